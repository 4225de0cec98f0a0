#pragma once

#include "cvtele/bogoliubov.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cvtele {

/// Coasting for `duration_s` seconds.
struct Inertial {
    double duration_s = 0.0;
};

/// Constant proper acceleration at the cavity centre for proper time
/// `proper_time_s` measured there.
struct Accelerated {
    double acceleration_m_s2 = 0.0;
    double proper_time_s = 0.0;
};

using Segment = std::variant<Inertial, Accelerated>;

/// h = a L / c^2.
double h_parameter(double acceleration_m_s2, double length_m, double c_m_per_s);

/// Which clock advances Alice's phase while Rob accelerates.
enum class AliceClock {
    lab_coordinate,  // (c/a) sinh(a tau / c) per accelerated segment
    rob_proper,      // t = tau
};

class Trajectory {
public:
    /// Throws ErrorKind::domain on an empty list, negative durations,
    /// non-positive accelerations or h >= 2.
    Trajectory(std::vector<Segment> segments, CavityGeometry geometry);

    /// Only a zero-length inertial segment.
    static Trajectory rest(CavityGeometry geometry);

    /// Line-oriented text: `inertial <duration_s>` or `accel <a_m_s2> <tau_s>`;
    /// `#` starts a comment. Text without segments means rest. Errors are
    /// ErrorKind::parse and cite the 1-based line number.
    static Trajectory parse(std::string_view text, CavityGeometry geometry);

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    const CavityGeometry& geometry() const noexcept { return geometry_; }

    double h_of(const Accelerated& segment) const;
    /// Largest h among accelerated segments; 0 for inertial motion.
    double max_h() const;
    std::size_t accelerated_count() const;

    /// Notes for segments beyond the plotted regime (h^2 > 0.06).
    std::vector<std::string> regime_notes() const;

private:
    std::vector<Segment> segments_;
    CavityGeometry geometry_;
};

struct ProperTimeLedger {
    double t_alice_s = 0.0;
    double tau_rob_s = 0.0;
};

ProperTimeLedger ledger(const Trajectory& trajectory, AliceClock clock = AliceClock::lab_coordinate);

struct PhasePair {
    double theta_alice = 0.0;  // omega_k t_alice
    double theta_rob = 0.0;    // omega_kp tau_rob
    double phi = 0.0;          // theta_alice + theta_rob, unwrapped
    double phi_wrapped = 0.0;  // phi mod 2 pi in [0, 2 pi)
};

PhasePair phase_pair(const Trajectory& trajectory, std::size_t k, std::size_t kp,
                     AliceClock clock = AliceClock::lab_coordinate);

/// Coasting time after which omega_k t + omega_kp t = 2 pi turns.
double inertial_duration_for_turns(unsigned turns, std::size_t k, std::size_t kp,
                                   const CavityGeometry& geometry);

/// Segment transforms composed in order of the motion.
BogoliubovPair build_transform(const Trajectory& trajectory, const BogoliubovEngine& engine);

/// First-order sums of build_transform. A single accelerated segment goes
/// through BogoliubovEngine::f_sums; several are differentiated along
/// h_i = e a_i / a_max.
FSums trajectory_f_sums(const Trajectory& trajectory, std::size_t kp, const BogoliubovEngine& engine);

}  // namespace cvtele
