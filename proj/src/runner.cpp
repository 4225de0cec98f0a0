#include "cvtele/runner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

namespace cvtele {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void config_error(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << what;
    fail(ErrorKind::parse, msg.str());
}

double to_double(std::string_view value, std::size_t line_no) {
    double out = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || end != value.data() + value.size() || !std::isfinite(out))
        config_error(line_no, "expected a number, got '" + std::string(value) + "'");
    return out;
}

std::size_t to_count(std::string_view value, std::size_t line_no) {
    std::size_t out = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || end != value.data() + value.size())
        config_error(line_no, "expected a non-negative integer, got '" + std::string(value) + "'");
    return out;
}

double linspace_at(double lo, double hi, std::size_t steps, std::size_t i) {
    if (i + 1 == steps) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

double acceleration_for_h(double h, const CavityGeometry& g) {
    return h * g.c_m_per_s * g.c_m_per_s / g.length_m;
}

}  // namespace

void SweepGrid::validate() const {
    require(std::isfinite(tau_min_s) && std::isfinite(tau_max_s) && tau_min_s >= 0.0 && tau_max_s > tau_min_s,
            "sweep grid: need 0 <= tau_min < tau_max");
    require(std::isfinite(a_min_m_s2) && std::isfinite(a_max_m_s2) && a_min_m_s2 > 0.0 && a_max_m_s2 > a_min_m_s2,
            "sweep grid: need 0 < a_min < a_max");
    require(tau_steps >= 2 && a_steps >= 2, "sweep grid: need at least 2 steps per axis");
}

double SweepGrid::tau_at(std::size_t i) const { return linspace_at(tau_min_s, tau_max_s, tau_steps, i); }
double SweepGrid::a_at(std::size_t j) const { return linspace_at(a_min_m_s2, a_max_m_s2, a_steps, j); }

RunConfig preset_config(std::string_view name) {
    RunConfig config;
    if (name == "fig3") {
        config.params = ProtocolParams::fig3();
    } else if (name == "experiment") {
        config.params = ProtocolParams::experiment();
    } else {
        fail(ErrorKind::parse, "unknown preset '" + std::string(name) + "' (known: fig3, experiment)");
    }
    config.preset = std::string(name);
    const auto& g = config.params.geometry;
    config.grid.tau_min_s = 0.0;
    config.grid.tau_max_s = 3.0 * g.fundamental_period_s();
    config.grid.tau_steps = 100;
    config.grid.a_min_m_s2 = 1e16;
    config.grid.a_max_m_s2 = acceleration_for_h(std::sqrt(plotted_regime_h2), g);
    config.grid.a_steps = 100;
    return config;
}

void apply_config_text(std::string_view text, RunConfig& config) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) config_error(line_no, "expected 'key = value'");

        auto& p = config.params;
        auto& g = config.grid;
        if (key == "preset") {
            try {
                config = preset_config(value);
            } catch (const Error& e) {
                config_error(line_no, e.what());
            }
        } else if (key == "r") {
            p.r = to_double(value, line_no);
        } else if (key == "k") {
            p.k = to_count(value, line_no);
        } else if (key == "kp") {
            p.kp = to_count(value, line_no);
        } else if (key == "L_m") {
            p.geometry.length_m = to_double(value, line_no);
        } else if (key == "c_m_per_s") {
            p.geometry.c_m_per_s = to_double(value, line_no);
        } else if (key == "n_max") {
            p.geometry.n_max = to_count(value, line_no);
        } else if (key == "alice_clock") {
            if (value == "lab") p.clock = AliceClock::lab_coordinate;
            else if (value == "proper") p.clock = AliceClock::rob_proper;
            else config_error(line_no, "alice_clock must be 'lab' or 'proper'");
        } else if (key == "degradation_weight") {
            if (value == "tanh_r") p.weight = DegradationWeight::tanh_r;
            else if (value == "tanh_2r") p.weight = DegradationWeight::tanh_2r;
            else config_error(line_no, "degradation_weight must be 'tanh_r' or 'tanh_2r'");
        } else if (key == "tau_min_s") {
            g.tau_min_s = to_double(value, line_no);
        } else if (key == "tau_max_s") {
            g.tau_max_s = to_double(value, line_no);
        } else if (key == "tau_steps") {
            g.tau_steps = to_count(value, line_no);
        } else if (key == "a_min_m_per_s2") {
            g.a_min_m_s2 = to_double(value, line_no);
        } else if (key == "a_max_m_per_s2") {
            g.a_max_m_s2 = to_double(value, line_no);
        } else if (key == "a_steps") {
            g.a_steps = to_count(value, line_no);
        } else {
            config_error(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
}

SweepResult run_sweep(const TeleportationProtocol& protocol, const SweepGrid& grid, unsigned jobs) {
    grid.validate();
    const auto& params = protocol.params();
    const auto& geometry = params.geometry;
    const auto& engine = protocol.engine();

    // Fill the coefficient cache up front so threads never duplicate
    // quadrature work.
    for (std::size_t j = 0; j < grid.a_steps; ++j)
        engine.switch_pair(h_parameter(grid.a_at(j), geometry.length_m, geometry.c_m_per_s));
    engine.f_sums(params.kp, grid.tau_max_s);

    SweepResult result;
    result.rows.resize(grid.size());
    std::vector<double> defects(grid.size(), 0.0);
    std::vector<std::size_t> warnings(grid.size(), 0);
    std::vector<std::size_t> clamped(grid.size(), 0);
    std::vector<std::exception_ptr> errors(grid.size());

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t idx = first; idx < grid.size(); idx += stride) {
            try {
                const double tau = grid.tau_at(idx / grid.a_steps);
                const double a = grid.a_at(idx % grid.a_steps);
                const Trajectory trajectory({Accelerated{a, tau}}, geometry);
                const auto rep = protocol.consistency_report(trajectory);
                result.rows[idx] = {tau, a, rep.h, rep.phi, rep.F_raw, rep.F_corrected, rep.F_opt_numeric,
                                    rep.F_pert, rep.F_pert_opt, rep.nu, rep.residual_pert};
                defects[idx] = rep.truncation_defect;
                warnings[idx] = trajectory.regime_notes().size();
                clamped[idx] = rep.clamped_violation > 0.0 ? 1 : 0;
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
        for (auto& thread : pool) thread.join();
    }

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const double rest = 1.0 / (1.0 + std::exp(-2.0 * params.r));
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        result.max_truncation_defect = std::max(result.max_truncation_defect, defects[idx]);
        result.max_relative_opt_deficit =
            std::max(result.max_relative_opt_deficit, (rest - result.rows[idx].F_opt_numeric) / rest);
        result.regime_warnings += warnings[idx];
        result.clamped_points += clamped[idx];
    }
    return result;
}

std::vector<CoefficientRow> coefficient_table(double h, const BogoliubovEngine& engine) {
    require(std::isfinite(h) && h > 0.0 && h < 2.0, "coefficient table: h must lie in (0, 2)");
    const auto pair = engine.switch_pair(h);
    const auto& first = engine.perturbative();
    const std::size_t n_max = engine.geometry().n_max;

    std::vector<CoefficientRow> rows;
    rows.reserve(n_max * n_max);
    for (std::size_t m = 1; m <= n_max; ++m) {
        for (std::size_t n = 1; n <= n_max; ++n) {
            const auto i = static_cast<Eigen::Index>(m - 1);
            const auto j = static_cast<Eigen::Index>(n - 1);
            CoefficientRow row{m, n, pair->alpha(i, j), pair->beta(i, j), std::abs(first.alpha1(i, j)),
                               std::abs(first.beta1(i, j)), false};
            if ((m + n) % 2 == 0) {
                row.closed_form_match = row.abs_alpha1 < 1e-8 && row.abs_beta1 < 1e-8;
            } else {
                const double ca = closed_form_alpha1(m, n);
                const double cb = closed_form_beta1(m, n);
                row.closed_form_match =
                    std::abs(row.abs_alpha1 - ca) <= 0.01 * ca && std::abs(row.abs_beta1 - cb) <= 0.01 * cb;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

double leading_block_residual(const SymplecticMatrix& s, std::size_t modes) {
    const auto k = static_cast<Eigen::Index>(2 * std::min(modes, s.n_modes()));
    const Matrix omega = symplectic_form(s.n_modes());
    const Matrix defect = s.data().transpose() * omega * s.data() - omega;
    return defect.topLeftCorner(k, k).cwiseAbs().maxCoeff();
}

namespace {

using Check = std::function<CheckResult()>;

CheckResult make_result(std::string name, double value, double threshold, bool passed, std::string detail = {}) {
    return {std::move(name), passed, value, threshold, std::move(detail)};
}

double halving_ratio(double coarse, double fine) { return fine > 0.0 ? coarse / fine : 0.0; }

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    CavityGeometry geometry;
    geometry.n_max = options.n_max;
    ProtocolParams params = ProtocolParams::fig3();
    params.geometry = geometry;

    auto engine = std::make_shared<const BogoliubovEngine>(
        options.n_max >= 2 ? geometry : CavityGeometry{});
    const double rest = 1.0 / (1.0 + std::exp(-1.0));

    std::vector<std::pair<std::string, Check>> checks;

    checks.emplace_back("truncation_adequacy", [&] {
        const double tail = truncation_tail_fraction(params.kp, options.n_max);
        const bool ok = params.kp <= options.n_max / 2 && tail <= 0.01;
        std::ostringstream detail;
        detail << "kp = " << params.kp << ", N_max = " << options.n_max << ", tail " << 100.0 * tail << "%";
        return make_result("truncation_adequacy", tail, 0.01, ok, detail.str());
    });

    checks.emplace_back("tms_rest_fidelity", [&] {
        const double dev = std::abs(teleport_fidelity(make_two_mode_squeezed(0.5)) - rest);
        return make_result("tms_rest_fidelity", dev, 1e-9, dev <= 1e-9);
    });

    checks.emplace_back("tms_symplectic_eigenvalue", [&] {
        double worst = 0.0;
        for (double r : {0.1, 0.5, std::log(2.0), 1.5})
            worst = std::max(worst, std::abs(entanglement_nu(make_two_mode_squeezed(r)) - std::exp(-2.0 * r)));
        return make_result("tms_symplectic_eigenvalue", worst, 1e-9, worst <= 1e-9);
    });

    checks.emplace_back("bogoliubov_identities", [&] {
        auto pair = *engine->switch_pair(0.245);
        if (options.inject_beta_sign_flip)
            pair.beta.triangularView<Eigen::StrictlyUpper>() = -pair.beta.triangularView<Eigen::StrictlyUpper>().toDenseMatrix();
        const double worst = identity_residuals(pair, std::max<std::size_t>(1, options.n_max / 2)).worst();
        const double limit = options.n_max >= 20 ? 1e-4 : 1e-3;
        return make_result("bogoliubov_identities", worst, limit, worst <= limit, "h = 0.245");
    });

    checks.emplace_back("symplecticity", [&] {
        const auto pair = engine->switch_pair(0.1);
        const double res = leading_block_residual(to_symplectic(*pair), options.n_max / 2);
        const double limit = std::max(1e-12, 3.0 * pair->truncation_defect);
        return make_result("symplecticity", res, limit, res <= limit, "h = 0.1");
    });

    checks.emplace_back("first_order_parity", [&] {
        const double worst = engine->perturbative().closed_form.max_even_entry;
        return make_result("first_order_parity", worst, 1e-8, worst < 1e-8);
    });

    checks.emplace_back("closed_form_first_order", [&] {
        const auto& cf = engine->perturbative().closed_form;
        return make_result("closed_form_first_order", cf.max_relative_mismatch, 0.01, cf.matches);
    });

    checks.emplace_back("first_order_residual_scaling", [&] {
        const auto& first = engine->perturbative();
        auto residual = [&](double h) {
            const auto pair = engine->switch_pair(h);
            const CMatrix ra = pair->alpha - (CMatrix::Identity(first.alpha1.rows(), first.alpha1.cols()) + h * first.alpha1);
            const CMatrix rb = pair->beta - h * first.beta1;
            return std::max(ra.cwiseAbs().maxCoeff(), rb.cwiseAbs().maxCoeff());
        };
        const double ratio = halving_ratio(residual(0.1), residual(0.05));
        return make_result("first_order_residual_scaling", ratio, 4.0, ratio >= 3.0 && ratio <= 5.0,
                           "expected ratio in [3, 5]");
    });

    checks.emplace_back("phase_fidelity_closed_form", [&] {
        std::mt19937_64 rng(20130101);
        std::uniform_real_distribution<double> r_dist(0.0, 2.0);
        std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * pi);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            auto p = params;
            p.r = r_dist(rng);
            const double phi = phi_dist(rng);
            const TeleportationProtocol protocol(p, engine);
            const double t = phi / (geometry.omega(p.k) + geometry.omega(p.kp));
            const double numeric = protocol.fidelity_raw(Trajectory({Inertial{t}}, geometry));
            worst = std::max(worst, std::abs(numeric - perturbative_fidelity(p.r, phi, {}, 0.0)));
        }
        return make_result("phase_fidelity_closed_form", worst, 1e-9, worst <= 1e-9);
    });

    checks.emplace_back("phase_correction_recovery", [&] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dur(0.0, 5.0 * geometry.fundamental_period_s());
        const TeleportationProtocol protocol(params, engine);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const Trajectory trajectory({Inertial{dur(rng)}, Inertial{dur(rng)}}, geometry);
            worst = std::max(worst, std::abs(protocol.fidelity_corrected(trajectory) - rest));
        }
        return make_result("phase_correction_recovery", worst, 1e-9, worst <= 1e-9);
    });

    checks.emplace_back("order_h4_expansion", [&] {
        const TeleportationProtocol protocol(params, engine);
        const double tau = geometry.fundamental_period_s();
        std::vector<double> dev;
        for (double h : {0.05, 0.1, 0.2}) {
            const auto rep =
                protocol.consistency_report(Trajectory({Accelerated{acceleration_for_h(h, geometry), tau}}, geometry));
            dev.push_back(std::abs(rep.F_raw - rep.F_pert));
        }
        const double r1 = halving_ratio(dev[1], dev[0]);
        const double r2 = halving_ratio(dev[2], dev[1]);
        const bool ok = r1 >= 10.0 && r1 <= 22.0 && r2 >= 10.0 && r2 <= 22.0;
        std::ostringstream detail;
        detail << "halving ratios " << r1 << ", " << r2 << " (expected [10, 22])";
        return make_result("order_h4_expansion", std::min(r1, r2), 10.0, ok, detail.str());
    });

    checks.emplace_back("optimality_coincidence", [&] {
        const TeleportationProtocol protocol(params, engine);
        double worst_ratio_gap = 0.0;
        bool ok = true;
        for (double periods : {0.25, 0.5, 1.25}) {
            const double tau = periods * geometry.fundamental_period_s();
            auto residual = [&](double h) {
                const auto rep = protocol.consistency_report(
                    Trajectory({Accelerated{acceleration_for_h(h, geometry), tau}}, geometry));
                return std::abs(rep.F_corrected - rep.F_opt_numeric);
            };
            const double ratio = halving_ratio(residual(0.1), residual(0.05));
            ok = ok && ratio >= 10.0 && ratio <= 22.0;
            worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 16.0));
        }
        return make_result("optimality_coincidence", worst_ratio_gap, 6.0, ok,
                           "|F_corrected - 1/(1+nu)| halving ratio within [10, 22]");
    });

    checks.emplace_back("perturbative_optimal_residual", [&] {
        const TeleportationProtocol protocol(params, engine);
        const double tau = 0.25 * geometry.fundamental_period_s();
        auto residual = [&](double h) {
            return protocol.consistency_report(
                               Trajectory({Accelerated{acceleration_for_h(h, geometry), tau}}, geometry))
                .residual_pert;
        };
        const double ratio = halving_ratio(residual(0.1), residual(0.05));
        return make_result("perturbative_optimal_residual", ratio, 16.0, ratio >= 10.0 && ratio <= 22.0,
                           "|F_corrected - F_pert_opt| halving ratio within [10, 22]");
    });

    std::vector<CheckResult> results;
    results.reserve(checks.size());
    for (auto& [name, check] : checks) {
        try {
            results.push_back(check());
        } catch (const std::exception& e) {
            results.push_back(make_result(name, 0.0, 0.0, false, e.what()));
        }
    }
    return results;
}

}  // namespace cvtele
