#include "cvtele/protocol.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace cvtele {

double degradation_weight(double r, DegradationWeight weight) {
    return weight == DegradationWeight::tanh_r ? std::tanh(r) : std::tanh(2.0 * r);
}

ProtocolParams ProtocolParams::fig3() { return ProtocolParams{}; }

ProtocolParams ProtocolParams::experiment() {
    ProtocolParams p;
    p.r = std::log(2.0);
    return p;
}

void ProtocolParams::validate() const {
    require(std::isfinite(r) && r >= 0.0, "squeezing parameter must be finite and non-negative");
    require(k >= 1 && kp >= 1, "mode indices start at 1");
    geometry.validate();
    require_truncation_adequate(kp, geometry);
}

double perturbative_fidelity(double r, double phi, const FSums& f, double h, DegradationWeight weight) {
    require(h >= 0.0, "perturbative_fidelity: h must be non-negative");
    require(f.alpha >= 0.0 && f.beta >= 0.0, "perturbative_fidelity: f sums must be non-negative");
    const double f0 = 1.0 / (1.0 + std::cosh(2.0 * r) - std::cos(phi) * std::sinh(2.0 * r));
    const double f2 = f0 * f0 * (1.0 + std::exp(-2.0 * r)) * (f.beta + f.alpha * degradation_weight(r, weight));
    return f0 - f2 * h * h;
}

double perturbative_optimal(double r, const FSums& f, double h, DegradationWeight weight) {
    require(h >= 0.0, "perturbative_optimal: h must be non-negative");
    require(f.alpha >= 0.0 && f.beta >= 0.0, "perturbative_optimal: f sums must be non-negative");
    const double f0 = 1.0 / (1.0 + std::exp(-2.0 * r));
    return f0 - f0 * (f.beta + f.alpha * degradation_weight(r, weight)) * h * h;
}

TeleportationProtocol::TeleportationProtocol(ProtocolParams params)
    : TeleportationProtocol(params, std::make_shared<const BogoliubovEngine>(params.geometry)) {}

TeleportationProtocol::TeleportationProtocol(ProtocolParams params,
                                             std::shared_ptr<const BogoliubovEngine> engine)
    : params_(params), engine_(std::move(engine)) {
    params_.validate();
    require(engine_ != nullptr, "protocol needs an engine");
    require(engine_->geometry() == params_.geometry, "engine geometry differs from protocol geometry");
}

void TeleportationProtocol::check_trajectory(const Trajectory& trajectory) const {
    require(trajectory.geometry() == params_.geometry, "trajectory geometry differs from protocol geometry");
}

TeleportationProtocol::Evaluation TeleportationProtocol::evaluate(const Trajectory& trajectory) const {
    check_trajectory(trajectory);
    const auto& g = params_.geometry;
    const auto transform = build_transform(trajectory, *engine_);
    const auto phases = phase_pair(trajectory, params_.k, params_.kp, params_.clock);

    const auto initial = embed_with_vacuum(make_two_mode_squeezed(params_.r), params_.kp, g.n_max);
    const auto motion = direct_sum(rotation(phases.theta_alice), to_symplectic(transform));
    const std::array<std::size_t, 2> modes{0, params_.kp};
    const auto reduced = reduce(apply(motion, initial), modes);

    // Truncation can leave the reduced state marginally unphysical. Small
    // violations get isotropic vacuum-like noise; anything beyond ten times
    // the truncation defect is a bug, not physics.
    const double violation = reduced.heisenberg_violation();
    const double defect = transform.truncation_defect;
    if (violation <= physicality_tolerance) return {reduced, defect, 0.0};
    if (violation > std::max(physicality_tolerance, 10.0 * defect)) {
        std::ostringstream msg;
        msg << "transformed state violates the Heisenberg bound by " << violation
            << " (truncation defect " << defect << ")";
        fail(ErrorKind::numeric, msg.str());
    }
    Matrix lifted = reduced.data() + violation * Matrix::Identity(4, 4);
    return {CovarianceMatrix(std::move(lifted)), defect, violation};
}

CovarianceMatrix TeleportationProtocol::transformed_state(const Trajectory& trajectory) const {
    return evaluate(trajectory).state;
}

double TeleportationProtocol::fidelity_raw(const Trajectory& trajectory) const {
    return teleport_fidelity(transformed_state(trajectory));
}

double TeleportationProtocol::fidelity_corrected(const Trajectory& trajectory) const {
    const auto phases = phase_pair(trajectory, params_.k, params_.kp, params_.clock);
    return teleport_fidelity(apply(local_rotation(-phases.theta_alice, -phases.theta_rob),
                                   transformed_state(trajectory)));
}

OptimalFidelity TeleportationProtocol::fidelity_optimal(const Trajectory& trajectory) const {
    const auto state = transformed_state(trajectory);
    const double nu = entanglement_nu(state);
    return {1.0 / (1.0 + nu), nu};
}

FidelityReport TeleportationProtocol::consistency_report(const Trajectory& trajectory) const {
    const auto eval = evaluate(trajectory);
    const auto phases = phase_pair(trajectory, params_.k, params_.kp, params_.clock);

    FidelityReport rep;
    rep.F_raw = teleport_fidelity(eval.state);
    rep.F_corrected =
        teleport_fidelity(apply(local_rotation(-phases.theta_alice, -phases.theta_rob), eval.state));
    rep.nu = entanglement_nu(eval.state);
    rep.F_opt_numeric = 1.0 / (1.0 + rep.nu);
    rep.phi = phases.phi;
    rep.h = trajectory.max_h();
    rep.f = trajectory_f_sums(trajectory, params_.kp, *engine_);
    rep.F_pert = perturbative_fidelity(params_.r, rep.phi, rep.f, rep.h, params_.weight);
    rep.F_pert_opt = perturbative_optimal(params_.r, rep.f, rep.h, params_.weight);
    rep.residual_pert = std::abs(rep.F_corrected - rep.F_pert_opt);
    rep.times = ledger(trajectory, params_.clock);
    rep.truncation_defect = eval.defect;
    rep.clamped_violation = eval.clamped;
    rep.notes = trajectory.regime_notes();
    if (eval.clamped > 0.0) {
        std::ostringstream msg;
        msg << "clamped a Heisenberg violation of " << eval.clamped << " caused by mode truncation";
        rep.notes.push_back(msg.str());
    }

    const double slack = 1e-9 + eval.defect;
    if (rep.F_raw > rep.F_opt_numeric + slack || rep.F_corrected > rep.F_opt_numeric + slack) {
        std::ostringstream msg;
        msg << "fidelity exceeds the entanglement bound: F_raw = " << rep.F_raw
            << ", F_corrected = " << rep.F_corrected << ", bound = " << rep.F_opt_numeric;
        fail(ErrorKind::numeric, msg.str());
    }
    return rep;
}

}  // namespace cvtele
