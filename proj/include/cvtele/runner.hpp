#pragma once

// Presets, config text, (tau, a) sweeps, coefficient tables and the
// validation suite behind the command-line front end.

#include "cvtele/protocol.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cvtele {

struct SweepGrid {
    double tau_min_s = 0.0;
    double tau_max_s = 0.0;
    std::size_t tau_steps = 2;
    double a_min_m_s2 = 0.0;
    double a_max_m_s2 = 0.0;
    std::size_t a_steps = 2;

    /// tau bounds non-negative and ordered, acceleration bounds positive and
    /// ordered, at least two steps on each axis.
    void validate() const;
    std::size_t size() const noexcept { return tau_steps * a_steps; }
    double tau_at(std::size_t i) const;
    double a_at(std::size_t j) const;
};

struct RunConfig {
    std::string preset = "fig3";
    ProtocolParams params = ProtocolParams::fig3();
    SweepGrid grid;
};

/// `fig3` (r = 1/2) or `experiment` (r = ln 2). Both sweep
/// a in [1e16, a(h^2 = 0.06)] m/s^2 and tau in [0, 3 fundamental periods]
/// on a 100 x 100 grid.
RunConfig preset_config(std::string_view name);

/// Applies `key = value` lines on top of `config`. `#` starts a comment.
/// A `preset` key resets every field to that preset first. Unknown keys and
/// malformed values raise ErrorKind::parse citing the line.
void apply_config_text(std::string_view text, RunConfig& config);

struct SweepRow {
    double tau_s;
    double a_m_s2;
    double h;
    double phi;
    double F_raw;
    double F_corrected;
    double F_opt_numeric;
    double F_pert;
    double F_pert_opt;
    double nu;
    double residual_pert;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // tau-major: row i * a_steps + j
    double max_truncation_defect = 0.0;
    double max_relative_opt_deficit = 0.0;  // max (F_opt(h=0) - F_opt) / F_opt(h=0)
    std::size_t regime_warnings = 0;
    std::size_t clamped_points = 0;  // points whose state needed a Heisenberg clamp
};

/// One single-segment trajectory `accel a tau` per grid point. Points are
/// split across `jobs` threads; results do not depend on `jobs`.
SweepResult run_sweep(const TeleportationProtocol& protocol, const SweepGrid& grid, unsigned jobs);

struct CoefficientRow {
    std::size_t m;
    std::size_t n;
    Complex alpha;
    Complex beta;
    double abs_alpha1;
    double abs_beta1;
    bool closed_form_match;  // within 1% for m+n odd, below 1e-8 for m+n even
};

std::vector<CoefficientRow> coefficient_table(double h, const BogoliubovEngine& engine);

/// max |S^T Omega S - Omega| over the leading `modes` x `modes` mode block.
double leading_block_residual(const SymplecticMatrix& s, std::size_t modes);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ValidationOptions {
    std::size_t n_max = 10;
    /// Test hook: negate the strictly upper triangle of beta before the
    /// Bogoliubov identity check.
    bool inject_beta_sign_flip = false;
};

/// Runs every check; a check that throws is reported as failed.
std::vector<CheckResult> run_validation(const ValidationOptions& options);

}  // namespace cvtele
