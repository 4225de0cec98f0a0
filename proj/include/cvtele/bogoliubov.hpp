#pragma once

// Bogoliubov transformations between the mode bases of a rigid (1+1)-D
// Dirichlet cavity at rest and the same cavity under uniform proper
// acceleration.
//
// Internally everything is in natural units L = c = 1 (positions in units of
// the rest length, times in units of L/c). Public functions that take times
// accept seconds and convert through CavityGeometry.
//
// A BogoliubovPair (alpha, beta) acts on annihilation operators:
//     b_m = sum_n alpha_mn a_n + beta_mn a_n^dagger
// so pairs compose like operator substitutions and map onto symplectic
// matrices acting on the Heisenberg-picture quadrature vector.

#include "cvtele/common.hpp"
#include "cvtele/gaussian.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace cvtele {

/// h^2 beyond which the order-h^2 expansion is not trusted.
inline constexpr double plotted_regime_h2 = 0.06;

/// h^2 above the plotted regime, ignoring rounding at the boundary itself.
inline bool beyond_plotted_regime_h(double h) { return h * h > plotted_regime_h2 * (1.0 + 1e-12); }

struct CavityGeometry {
    double length_m = 0.012;
    double c_m_per_s = 1.2e8;
    std::size_t n_max = 10;

    void validate() const;

    /// Angular frequency n pi c / L in rad/s.
    double omega(std::size_t n) const { return static_cast<double>(n) * pi * c_m_per_s / length_m; }
    double fundamental_period_s() const { return 2.0 * length_m / c_m_per_s; }
    double to_natural_time(double seconds) const { return seconds * c_m_per_s / length_m; }
    /// Modes whose columns stay unaffected by the truncation edge.
    std::size_t adequate_modes() const { return n_max / 2; }

    friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

/// Rigid cavity at constant proper acceleration, in Rindler coordinates with
/// L = c = 1: walls at chi = 1/h -+ 1/2, centre at chi = 1/h.
struct RindlerGeometry {
    double h;
    double chi_left;
    double chi_right;
    double chi_center;
    double log_width;  // ln(chi_right / chi_left)

    /// Requires 0 < h < 2 so the left wall stays off the horizon.
    static RindlerGeometry from_h(double h);

    /// Mode frequency conjugate to Rindler time eta.
    double frequency(std::size_t n) const { return static_cast<double>(n) * pi / log_width; }
    /// Mode frequency measured in proper time at the cavity centre.
    double proper_frequency(std::size_t n) const { return frequency(n) / chi_center; }
    bool beyond_plotted_regime() const { return beyond_plotted_regime_h(h); }
};

struct BogoliubovPair {
    CMatrix alpha;
    CMatrix beta;
    double truncation_defect = 0.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(alpha.rows()); }
    static BogoliubovPair identity(std::size_t n);
};

struct IdentityResiduals {
    double normalization = 0.0;  // max_n |sum_m |alpha_mn|^2 - |beta_mn|^2 - 1|
    double cross = 0.0;          // max_kn |sum_m conj(alpha_mk) beta_mn - beta_mk conj(alpha_mn)|
    double worst() const { return normalization > cross ? normalization : cross; }
};

/// Column Bogoliubov identities evaluated over the first `columns` columns.
IdentityResiduals identity_residuals(const BogoliubovPair& pair, std::size_t columns);

/// Mode value at t = 0 and its time derivative (natural units).
struct ModeSample {
    double value;
    Complex time_derivative;
};

/// sin(n pi x / L) / sqrt(n pi) for 0 <= x <= L, position in metres.
ModeSample mode_function_inertial(std::size_t n, double position_m, const CavityGeometry& geometry);

/// sin(n pi ln(chi/chi_left) / D) / sqrt(n pi); chi in units of L, derivative
/// with respect to Rindler time eta.
ModeSample mode_function_rindler(std::size_t n, double chi, const RindlerGeometry& geometry);

/// Klein-Gordon overlaps of accelerated and inertial modes on the shared
/// t = eta = 0 slice: alpha_mn = (u^_m, u_n), beta_mn = (u^_m, u_n^*).
/// Requires 0 < h < 2.
BogoliubovPair sudden_switch_oracle(double h, std::size_t n_max);

/// Same overlaps for any |h| < 2. h = 0 returns the identity and negative h
/// mirrors the acceleration direction; used for differentiation in h.
BogoliubovPair switch_coefficients(double h, std::size_t n_max);

/// Magnitudes of the first-order coefficients in closed form; zero for m+n even.
double closed_form_alpha1(std::size_t m, std::size_t n);
double closed_form_beta1(std::size_t m, std::size_t n);

struct ClosedFormCheck {
    double max_relative_mismatch = 0.0;  // over entries with m+n odd
    double max_even_entry = 0.0;         // largest |coefficient| with m+n even
    bool matches = false;                // relative mismatch <= 1% everywhere
};

struct PerturbativeCoefficients {
    CMatrix alpha1;
    CMatrix beta1;
    double extrapolation_error = 0.0;
    ClosedFormCheck closed_form;
};

/// d/dh at h = 0 of the oracle via Richardson extrapolation, cross-checked
/// against the closed-form magnitudes.
PerturbativeCoefficients sudden_switch_perturbative(std::size_t n_max);

/// Diagonal phases e^{-i Omega_n eta} for proper time tau (seconds) at the
/// cavity centre, with eta = h tau in natural units. Any |h| < 2.
BogoliubovPair phase_evolution_rindler(double tau_s, double h, const CavityGeometry& geometry);

/// Diagonal phases e^{-i omega_n t}.
BogoliubovPair phase_evolution_minkowski(double t_s, const CavityGeometry& geometry);

/// Apply `first`, then `second`.
BogoliubovPair compose(const BogoliubovPair& second, const BogoliubovPair& first);
BogoliubovPair inverse(const BogoliubovPair& pair);

/// Real 2N x 2N matrix acting on (x1, p1, ..., xN, pN).
SymplecticMatrix to_symplectic(const BogoliubovPair& pair);

struct FSums {
    double alpha = 0.0;  // (1/2) sum_n |alpha^(1)_{n kp}|^2
    double beta = 0.0;   // (1/2) sum_n |beta^(1)_{n kp}|^2
};

/// Fraction of sum_n |alpha1_{n kp}|^2 + |beta1_{n kp}|^2 (closed form)
/// carried by modes beyond n_max.
double truncation_tail_fraction(std::size_t kp, std::size_t n_max);

/// Throws ErrorKind::domain when mode kp is not adequately represented with
/// the geometry's truncation (kp > n_max / 2 or tail fraction > 1%).
void require_truncation_adequate(std::size_t kp, const CavityGeometry& geometry);

/// Owns a per-h cache of oracle coefficients for one geometry. Thread-safe;
/// cached values do not depend on the order in which threads fill them.
class BogoliubovEngine {
public:
    explicit BogoliubovEngine(CavityGeometry geometry);

    const CavityGeometry& geometry() const noexcept { return geometry_; }

    /// Cached switch_coefficients(h, n_max).
    std::shared_ptr<const BogoliubovPair> switch_pair(double h) const;

    const PerturbativeCoefficients& perturbative() const;

    /// inverse(B) o rindler_phase(tau) o B with B the switch pair at h.
    BogoliubovPair one_segment_transform(double tau_s, double h) const;

    /// First-order sums of one_segment_transform at fixed tau.
    FSums f_sums(std::size_t kp, double tau_s) const;

    /// First-order sums of an arbitrary family of transforms: column kp of
    /// d/de transform_at(e) at e = 0, via Richardson extrapolation.
    FSums first_order_sums(std::size_t kp,
                           const std::function<BogoliubovPair(double)>& transform_at) const;

    std::size_t cached_entries() const;

private:
    CavityGeometry geometry_;
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<const BogoliubovPair>> cache_;
    mutable std::once_flag perturbative_once_;
    mutable std::optional<PerturbativeCoefficients> perturbative_;
};

}  // namespace cvtele
