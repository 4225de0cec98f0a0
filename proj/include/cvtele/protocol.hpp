#pragma once

#include "cvtele/bogoliubov.hpp"
#include "cvtele/gaussian.hpp"
#include "cvtele/trajectory.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cvtele {

/// Weight multiplying f_alpha in the order-h^2 fidelity loss.
enum class DegradationWeight {
    /// tanh(r). Agrees with the exact transformed-state fidelities to O(h^4).
    tanh_r,
    /// tanh(2r). Kept for comparison;
    /// it leaves an O(h^2) residual against the exact pipeline.
    tanh_2r,
};

double degradation_weight(double r, DegradationWeight weight);

struct ProtocolParams {
    double r = 0.5;
    std::size_t k = 1;   // Alice's mode
    std::size_t kp = 3;  // Rob's cavity mode
    CavityGeometry geometry{};
    AliceClock clock = AliceClock::lab_coordinate;
    DegradationWeight weight = DegradationWeight::tanh_r;

    /// r = 1/2, k = 1, kp = 3, L = 1.2 cm, c = 1.2e8 m/s, N_max = 10.
    static ProtocolParams fig3();
    /// As fig3 but with squeezing r = ln 2.
    static ProtocolParams experiment();

    void validate() const;
};

/// Order-h^2 expansion of the coherent-state fidelity after motion:
/// F0 - F0^2 (1 + e^{-2r}) (f_beta + f_alpha w(r)) h^2,
/// F0 = 1 / (1 + cosh 2r - cos(phi) sinh 2r).
double perturbative_fidelity(double r, double phi, const FSums& f, double h,
                             DegradationWeight weight = DegradationWeight::tanh_r);

/// Phase-corrected counterpart with F0 = 1 / (1 + e^{-2r}):
/// F0 - F0 (f_beta + f_alpha w(r)) h^2.
double perturbative_optimal(double r, const FSums& f, double h,
                            DegradationWeight weight = DegradationWeight::tanh_r);

struct OptimalFidelity {
    double fidelity;
    double nu;
};

struct FidelityReport {
    double F_raw = 0.0;
    double F_corrected = 0.0;
    double F_opt_numeric = 0.0;
    double F_pert = 0.0;
    double F_pert_opt = 0.0;
    double nu = 0.0;
    double phi = 0.0;
    double h = 0.0;
    double residual_pert = 0.0;  // |F_corrected - F_pert_opt|

    FSums f;
    ProperTimeLedger times;
    double truncation_defect = 0.0;
    double clamped_violation = 0.0;  // Heisenberg violation removed before evaluation
    std::vector<std::string> notes;
};

/// Alice's mode k and Rob's cavity mode kp share a two-mode squeezed state;
/// the remaining cavity modes start in vacuum. Rob's cavity follows a
/// Trajectory, Alice stays inertial.
class TeleportationProtocol {
public:
    explicit TeleportationProtocol(ProtocolParams params);
    /// Shares the coefficient cache of an existing engine with the same geometry.
    TeleportationProtocol(ProtocolParams params, std::shared_ptr<const BogoliubovEngine> engine);

    const ProtocolParams& params() const noexcept { return params_; }
    const BogoliubovEngine& engine() const noexcept { return *engine_; }
    std::shared_ptr<const BogoliubovEngine> shared_engine() const noexcept { return engine_; }

    /// Reduced (Alice, Rob kp) state after the motion and Alice's free evolution.
    CovarianceMatrix transformed_state(const Trajectory& trajectory) const;

    double fidelity_raw(const Trajectory& trajectory) const;
    /// Undoes the free-evolution phases with local_rotation(-theta_A, -theta_B).
    double fidelity_corrected(const Trajectory& trajectory) const;
    OptimalFidelity fidelity_optimal(const Trajectory& trajectory) const;

    FidelityReport consistency_report(const Trajectory& trajectory) const;

private:
    struct Evaluation {
        CovarianceMatrix state;
        double defect;
        double clamped;
    };
    Evaluation evaluate(const Trajectory& trajectory) const;
    void check_trajectory(const Trajectory& trajectory) const;

    ProtocolParams params_;
    std::shared_ptr<const BogoliubovEngine> engine_;
};

}  // namespace cvtele
