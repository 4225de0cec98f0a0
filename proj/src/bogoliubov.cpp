#include "cvtele/bogoliubov.hpp"

#include "cvtele/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvtele {

namespace {

// Adaptive Gauss-Kronrod: 2^14 panels at most, absolute error per element
// must end up below 1e-10.
constexpr unsigned quadrature_max_depth = 14;
constexpr double quadrature_relative_tolerance = 1e-13;
constexpr double quadrature_absolute_limit = 1e-10;

// ln(chi_right / chi_left) = 2 atanh(h/2) in units of L.
double log_width(double h) { return 2.0 * std::atanh(0.5 * h); }

// h / D(h): ratio of centre proper frequency to the inertial one. Even in h.
double centre_frequency_ratio(double h) {
    if (std::abs(h) < 1e-4) {
        const double h2 = h * h;
        return 1.0 / (1.0 + h2 / 12.0 + h2 * h2 / 80.0);
    }
    return h / log_width(h);
}

std::size_t residual_columns(std::size_t n) { return std::max<std::size_t>(1, n / 2); }

BogoliubovPair diagonal_phases(std::size_t n, double natural_time, double ratio) {
    BogoliubovPair pair;
    pair.alpha = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    pair.beta = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        const double phase = std::fmod(static_cast<double>(k) * pi * natural_time * ratio, 2.0 * pi);
        pair.alpha(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k - 1)) =
            std::polar(1.0, -phase);
    }
    return pair;
}

// Stack (alpha | beta) so one Richardson tableau handles both.
CMatrix stacked(const BogoliubovPair& pair) {
    CMatrix out(pair.alpha.rows(), 2 * pair.alpha.cols());
    out << pair.alpha, pair.beta;
    return out;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

PerturbativeCoefficients extract_first_order(const std::function<BogoliubovPair(double)>& oracle,
                                             std::size_t n_max) {
    const auto extrapolated = richardson_derivative<CMatrix>(
        [&](double h) { return stacked(oracle(h)); }, max_abs);
    const auto n = static_cast<Eigen::Index>(n_max);

    PerturbativeCoefficients out;
    out.alpha1 = extrapolated.value.leftCols(n);
    out.beta1 = extrapolated.value.rightCols(n);
    out.extrapolation_error = extrapolated.error_estimate;

    ClosedFormCheck check;
    for (std::size_t m = 1; m <= n_max; ++m) {
        for (std::size_t k = 1; k <= n_max; ++k) {
            const double a = std::abs(out.alpha1(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(k - 1)));
            const double b = std::abs(out.beta1(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(k - 1)));
            if ((m + k) % 2 == 0) {
                check.max_even_entry = std::max({check.max_even_entry, a, b});
                continue;
            }
            const double ca = closed_form_alpha1(m, k);
            const double cb = closed_form_beta1(m, k);
            check.max_relative_mismatch =
                std::max({check.max_relative_mismatch, std::abs(a - ca) / ca, std::abs(b - cb) / cb});
        }
    }
    check.matches = check.max_relative_mismatch <= 0.01;
    out.closed_form = check;
    return out;
}

}  // namespace

void CavityGeometry::validate() const {
    require(std::isfinite(length_m) && length_m > 0.0, "cavity length must be positive");
    require(std::isfinite(c_m_per_s) && c_m_per_s > 0.0, "propagation speed must be positive");
    require(n_max >= 2, "mode truncation N_max must be at least 2");
}

RindlerGeometry RindlerGeometry::from_h(double h) {
    require(std::isfinite(h) && h > 0.0 && h < 2.0, "perturbative parameter h must lie in (0, 2)");
    RindlerGeometry g;
    g.h = h;
    g.chi_center = 1.0 / h;
    g.chi_left = g.chi_center - 0.5;
    g.chi_right = g.chi_center + 0.5;
    g.log_width = cvtele::log_width(h);
    return g;
}

BogoliubovPair BogoliubovPair::identity(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return {CMatrix::Identity(k, k), CMatrix::Zero(k, k), 0.0};
}

IdentityResiduals identity_residuals(const BogoliubovPair& pair, std::size_t columns) {
    const auto cols = static_cast<Eigen::Index>(std::min(columns, pair.size()));
    const CMatrix& a = pair.alpha;
    const CMatrix& b = pair.beta;
    IdentityResiduals res;
    for (Eigen::Index n = 0; n < cols; ++n) {
        const double norm = a.col(n).squaredNorm() - b.col(n).squaredNorm() - 1.0;
        res.normalization = std::max(res.normalization, std::abs(norm));
    }
    const CMatrix cross = a.leftCols(cols).adjoint() * b.leftCols(cols) -
                          b.leftCols(cols).transpose() * a.leftCols(cols).conjugate();
    if (cols > 0) res.cross = cross.cwiseAbs().maxCoeff();
    return res;
}

ModeSample mode_function_inertial(std::size_t n, double position_m, const CavityGeometry& geometry) {
    require(n >= 1, "mode index starts at 1");
    const double xi = position_m / geometry.length_m;
    require(xi >= 0.0 && xi <= 1.0, "position lies outside the cavity");
    const double nn = static_cast<double>(n);
    const double value = std::sin(nn * pi * xi) / std::sqrt(nn * pi);
    return {value, Complex(0.0, -nn * pi * value)};
}

ModeSample mode_function_rindler(std::size_t n, double chi, const RindlerGeometry& geometry) {
    require(n >= 1, "mode index starts at 1");
    require(chi >= geometry.chi_left && chi <= geometry.chi_right, "position lies outside the cavity");
    const double nn = static_cast<double>(n);
    const double arg = std::log1p((chi - geometry.chi_left) / geometry.chi_left) / geometry.log_width;
    const double value = std::sin(nn * pi * arg) / std::sqrt(nn * pi);
    return {value, Complex(0.0, -geometry.frequency(n) * value)};
}

BogoliubovPair switch_coefficients(double h, std::size_t n_max) {
    require(n_max >= 1, "switch_coefficients: empty truncation");
    require(std::isfinite(h) && std::abs(h) < 2.0, "switch_coefficients: need |h| < 2");
    if (h == 0.0) return BogoliubovPair::identity(n_max);

    // Position s in [0, 1] across the cavity. With q = 1/chi_left:
    //   Rindler phase argument ln(1 + q s) / D, and Omega_m / chi = m pi w(s).
    const double q = 2.0 * h / (2.0 - h);
    const double d = log_width(h);
    auto rindler_arg = [q, d](double s) { return std::log1p(q * s) / d; };
    auto weight = [q, d](double s) { return q / (d * (1.0 + q * s)); };

    using Integrator = boost::math::quadrature::gauss_kronrod<double, 61>;
    const auto n = static_cast<Eigen::Index>(n_max);
    BogoliubovPair pair{CMatrix::Zero(n, n), CMatrix::Zero(n, n), 0.0};
    double worst_error = 0.0;
    for (std::size_t m = 1; m <= n_max; ++m) {
        const double mm = static_cast<double>(m);
        for (std::size_t k = 1; k <= n_max; ++k) {
            const double kk = static_cast<double>(k);
            const double norm = 1.0 / (pi * std::sqrt(mm * kk));
            auto overlap = [&](double s) {
                return norm * std::sin(kk * pi * s) * std::sin(mm * pi * rindler_arg(s));
            };
            double err_a = 0.0;
            double err_b = 0.0;
            const double a = Integrator::integrate(
                [&](double s) { return overlap(s) * (kk * pi + mm * pi * weight(s)); }, 0.0, 1.0,
                quadrature_max_depth, quadrature_relative_tolerance, &err_a);
            const double b = Integrator::integrate(
                [&](double s) { return overlap(s) * (mm * pi * weight(s) - kk * pi); }, 0.0, 1.0,
                quadrature_max_depth, quadrature_relative_tolerance, &err_b);
            worst_error = std::max({worst_error, err_a, err_b});
            if (!(std::isfinite(a) && std::isfinite(b)) || worst_error > quadrature_absolute_limit) {
                std::ostringstream msg;
                msg << "sudden-switch quadrature did not converge for (m, n) = (" << m << ", " << k
                    << ") at h = " << h << ": achieved error " << worst_error;
                fail(ErrorKind::numeric, msg.str());
            }
            pair.alpha(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(k - 1)) = a;
            pair.beta(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(k - 1)) = b;
        }
    }
    pair.truncation_defect = identity_residuals(pair, residual_columns(n_max)).worst();
    return pair;
}

BogoliubovPair sudden_switch_oracle(double h, std::size_t n_max) {
    require(std::isfinite(h) && h > 0.0 && h < 2.0, "sudden_switch_oracle: h must lie in (0, 2)");
    return switch_coefficients(h, n_max);
}

double closed_form_alpha1(std::size_t m, std::size_t n) {
    if ((m + n) % 2 == 0) return 0.0;
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    return 2.0 * std::sqrt(dm * dn) / (pi * pi * std::pow(std::abs(dm - dn), 3));
}

double closed_form_beta1(std::size_t m, std::size_t n) {
    if ((m + n) % 2 == 0) return 0.0;
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    return 2.0 * std::sqrt(dm * dn) / (pi * pi * std::pow(dm + dn, 3));
}

PerturbativeCoefficients sudden_switch_perturbative(std::size_t n_max) {
    return extract_first_order([n_max](double h) { return switch_coefficients(h, n_max); }, n_max);
}

BogoliubovPair phase_evolution_rindler(double tau_s, double h, const CavityGeometry& geometry) {
    require(std::isfinite(tau_s) && tau_s >= 0.0, "proper time must be non-negative");
    require(std::isfinite(h) && std::abs(h) < 2.0, "phase_evolution_rindler: need |h| < 2");
    return diagonal_phases(geometry.n_max, geometry.to_natural_time(tau_s), centre_frequency_ratio(h));
}

BogoliubovPair phase_evolution_minkowski(double t_s, const CavityGeometry& geometry) {
    require(std::isfinite(t_s) && t_s >= 0.0, "coordinate time must be non-negative");
    return diagonal_phases(geometry.n_max, geometry.to_natural_time(t_s), 1.0);
}

BogoliubovPair compose(const BogoliubovPair& second, const BogoliubovPair& first) {
    require(second.size() == first.size(), "compose: truncation size mismatch");
    BogoliubovPair out;
    out.alpha = second.alpha * first.alpha + second.beta * first.beta.conjugate();
    out.beta = second.alpha * first.beta + second.beta * first.alpha.conjugate();
    out.truncation_defect = identity_residuals(out, residual_columns(out.size())).worst();
    return out;
}

BogoliubovPair inverse(const BogoliubovPair& pair) {
    return {pair.alpha.adjoint(), -pair.beta.transpose(), pair.truncation_defect};
}

SymplecticMatrix to_symplectic(const BogoliubovPair& pair) {
    const auto n = static_cast<Eigen::Index>(pair.size());
    Matrix s(2 * n, 2 * n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex sum = pair.alpha(m, k) + pair.beta(m, k);
            const Complex diff = pair.alpha(m, k) - pair.beta(m, k);
            s(2 * m, 2 * k) = sum.real();
            s(2 * m, 2 * k + 1) = -diff.imag();
            s(2 * m + 1, 2 * k) = sum.imag();
            s(2 * m + 1, 2 * k + 1) = diff.real();
        }
    }
    return SymplecticMatrix(std::move(s));
}

double truncation_tail_fraction(std::size_t kp, std::size_t n_max) {
    require(kp >= 1, "mode index starts at 1");
    // The summand decays like n^-5; 2e4 terms put the neglected remainder far
    // below the 1% decision threshold.
    constexpr std::size_t horizon = 20000;
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double a = closed_form_alpha1(n, kp);
        const double b = closed_form_beta1(n, kp);
        const double w = a * a + b * b;
        total += w;
        if (n > n_max) tail += w;
    }
    return total > 0.0 ? tail / total : 0.0;
}

void require_truncation_adequate(std::size_t kp, const CavityGeometry& geometry) {
    require(kp >= 1, "mode index starts at 1");
    const double tail = truncation_tail_fraction(kp, geometry.n_max);
    if (kp > geometry.adequate_modes() || tail > 0.01) {
        std::ostringstream msg;
        msg << "truncation inadequate for Rob mode " << kp << " at N_max = " << geometry.n_max
            << " (tail estimate " << 100.0 * tail << "% of the first-order weight); use N_max >= "
            << std::max<std::size_t>(2 * kp, geometry.n_max + 2);
        fail(ErrorKind::domain, msg.str());
    }
}

BogoliubovEngine::BogoliubovEngine(CavityGeometry geometry) : geometry_(geometry) {
    geometry_.validate();
}

std::shared_ptr<const BogoliubovPair> BogoliubovEngine::switch_pair(double h) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(h); it != cache_.end()) return it->second;
    }
    auto computed = std::make_shared<const BogoliubovPair>(switch_coefficients(h, geometry_.n_max));
    std::lock_guard lock(mutex_);
    return cache_.emplace(h, std::move(computed)).first->second;
}

std::size_t BogoliubovEngine::cached_entries() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

const PerturbativeCoefficients& BogoliubovEngine::perturbative() const {
    std::call_once(perturbative_once_, [this] {
        perturbative_ = extract_first_order([this](double h) { return *switch_pair(h); }, geometry_.n_max);
    });
    return *perturbative_;
}

BogoliubovPair BogoliubovEngine::one_segment_transform(double tau_s, double h) const {
    const auto sw = switch_pair(h);
    return compose(inverse(*sw), compose(phase_evolution_rindler(tau_s, h, geometry_), *sw));
}

FSums BogoliubovEngine::f_sums(std::size_t kp, double tau_s) const {
    require(std::isfinite(tau_s) && tau_s >= 0.0, "proper time must be non-negative");
    return first_order_sums(kp, [&](double h) { return one_segment_transform(tau_s, h); });
}

FSums BogoliubovEngine::first_order_sums(std::size_t kp,
                                         const std::function<BogoliubovPair(double)>& transform_at) const {
    require_truncation_adequate(kp, geometry_);
    const auto derivative = richardson_derivative<CMatrix>(
        [&](double e) { return stacked(transform_at(e)); }, max_abs);
    const auto n = static_cast<Eigen::Index>(geometry_.n_max);
    const auto col = static_cast<Eigen::Index>(kp - 1);
    return {0.5 * derivative.value.col(col).squaredNorm(),
            0.5 * derivative.value.col(n + col).squaredNorm()};
}

}  // namespace cvtele
