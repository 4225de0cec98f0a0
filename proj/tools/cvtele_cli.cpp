// Command-line front end over the C interface.
//
//   cvtele [--preset NAME] [--config FILE] [--nmax N] fidelity --trajectory FILE
//   cvtele ... sweep [--out FILE] [--plot-data FILE] [--jobs N]
//   cvtele ... coeffs --h H
//   cvtele [--nmax N] validate
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 I/O failure,
// 5 validation failure, 1 anything else.

#include "cvtele/cvtele.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_internal = 1;
constexpr int exit_input = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;
constexpr int exit_validation = 5;

struct Failure {
    int code;
    std::string message;
};

int exit_code(cvt_status s) {
    switch (s) {
        case CVT_OK: return 0;
        case CVT_ERR_ARGUMENT:
        case CVT_ERR_PARSE: return exit_input;
        case CVT_ERR_NUMERIC: return exit_numeric;
        case CVT_ERR_IO: return exit_io;
        case CVT_ERR_VALIDATION: return exit_validation;
        default: return exit_internal;
    }
}

void check(cvt_status s, const std::string& context) {
    if (s != CVT_OK) throw Failure{exit_code(s), context + ": " + cvt_last_error()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{exit_io, "cannot open '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Failure{exit_io, "cannot read '" + path + "'"};
    return buf.str();
}

// Writes to a file, or stdout for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") {
            stream_ = &std::cout;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Failure{exit_io, "cannot write '" + path + "'"};
            stream_ = file_.get();
            path_ = path;
        }
    }
    std::ostream& operator*() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw Failure{exit_io, "write failed for '" + (path_.empty() ? "stdout" : path_) + "'"};
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
    std::string path_;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

struct Context {
    cvt_context* ptr = nullptr;
    ~Context() { cvt_context_destroy(ptr); }
};

struct TrajectoryHandle {
    cvt_trajectory* ptr = nullptr;
    ~TrajectoryHandle() { cvt_trajectory_destroy(ptr); }
};

struct GlobalOptions {
    std::string preset = "fig3";
    std::string config_path;
    std::size_t n_max = 0;  // 0: keep the preset/config value
};

cvt_config load_config(const GlobalOptions& g) {
    cvt_config config{};
    check(cvt_config_preset(g.preset.c_str(), &config), "preset");
    if (!g.config_path.empty()) check(cvt_config_parse(read_file(g.config_path).c_str(), &config), g.config_path);
    if (g.n_max != 0) config.n_max = g.n_max;
    return config;
}

void write_metadata(std::ostream& out, const GlobalOptions& g, const cvt_config& c) {
    out << "# cvtele " << cvt_version() << "\n"
        << "# preset = " << g.preset << "\n"
        << "# r = " << num(c.r) << "\n"
        << "# k = " << c.k << "\n"
        << "# kp = " << c.kp << "\n"
        << "# L_m = " << num(c.length_m) << "\n"
        << "# c_m_per_s = " << num(c.c_m_per_s) << "\n"
        << "# n_max = " << c.n_max << "\n"
        << "# alice_clock = " << (c.alice_clock == CVT_CLOCK_LAB ? "lab" : "proper") << "\n"
        << "# degradation_weight = " << (c.weight == CVT_WEIGHT_TANH_R ? "tanh_r" : "tanh_2r") << "\n";
}

void run_fidelity(const GlobalOptions& g, const std::string& trajectory_path,
                  const std::vector<std::string>& segments, const std::string& out_path) {
    const auto config = load_config(g);
    Context ctx;
    check(cvt_context_create(&config, &ctx.ptr), "configuration");

    std::string text;
    if (!trajectory_path.empty()) text = read_file(trajectory_path);
    for (const auto& s : segments) text += s + "\n";
    TrajectoryHandle traj;
    check(cvt_trajectory_parse(ctx.ptr, text.c_str(), &traj.ptr),
          trajectory_path.empty() ? "trajectory" : trajectory_path);

    cvt_fidelity_report rep{};
    check(cvt_fidelity(ctx.ptr, traj.ptr, &rep), "fidelity");

    Output out(out_path);
    write_metadata(*out, g, config);
    *out << "h = " << num(rep.h) << "\n"
         << "t_alice_s = " << num(rep.t_alice_s) << "\n"
         << "tau_rob_s = " << num(rep.tau_rob_s) << "\n"
         << "phi = " << num(rep.phi) << "\n"
         << "F_raw = " << num(rep.F_raw) << "\n"
         << "F_corrected = " << num(rep.F_corrected) << "\n"
         << "F_opt_numeric = " << num(rep.F_opt_numeric) << "\n"
         << "nu = " << num(rep.nu) << "\n"
         << "f_alpha = " << num(rep.f_alpha) << "\n"
         << "f_beta = " << num(rep.f_beta) << "\n"
         << "F_pert = " << num(rep.F_pert) << "\n"
         << "F_pert_opt = " << num(rep.F_pert_opt) << "\n"
         << "residual_pert = " << num(rep.residual_pert) << "\n"
         << "truncation_defect = " << num(rep.truncation_defect) << "\n"
         << "clamped_violation = " << num(rep.clamped_violation) << "\n";
    out.finish();
    if (rep.n_notes > 0) std::cerr << "warning: " << rep.notes;
}

void run_sweep(const GlobalOptions& g, const std::string& out_path, const std::string& plot_path, unsigned jobs) {
    const auto config = load_config(g);
    Context ctx;
    check(cvt_context_create(&config, &ctx.ptr), "configuration");
    std::size_t n = 0;
    check(cvt_sweep_size(ctx.ptr, &n), "sweep");
    std::vector<cvt_sweep_row> rows(n);
    cvt_sweep_summary summary{};
    check(cvt_sweep(ctx.ptr, rows.data(), rows.size(), jobs, &summary), "sweep");

    Output out(out_path);
    write_metadata(*out, g, config);
    *out << "# tau_steps = " << config.tau_steps << "\n"
         << "# a_steps = " << config.a_steps << "\n"
         << "# max_truncation_defect = " << num(summary.max_truncation_defect) << "\n"
         << "# max_relative_opt_deficit = " << num(summary.max_relative_opt_deficit) << "\n"
         << "# clamped_points = " << summary.clamped_points << "\n"
         << "tau_s,a_m_per_s2,h,phi,F_raw,F_corrected,F_opt_numeric,F_pert,F_pert_opt,nu,residual_pert\n";
    for (const auto& r : rows) {
        *out << num(r.tau_s) << ',' << num(r.a_m_s2) << ',' << num(r.h) << ',' << num(r.phi) << ','
             << num(r.F_raw) << ',' << num(r.F_corrected) << ',' << num(r.F_opt_numeric) << ','
             << num(r.F_pert) << ',' << num(r.F_pert_opt) << ',' << num(r.nu) << ',' << num(r.residual_pert)
             << '\n';
    }
    out.finish();

    if (!plot_path.empty()) {
        // gnuplot "nonuniform matrix": first row holds a, first column tau.
        Output plot(plot_path);
        *plot << config.a_steps;
        for (std::size_t j = 0; j < config.a_steps; ++j) *plot << ' ' << num(rows[j].a_m_s2);
        *plot << '\n';
        for (std::size_t i = 0; i < config.tau_steps; ++i) {
            *plot << num(rows[i * config.a_steps].tau_s);
            for (std::size_t j = 0; j < config.a_steps; ++j)
                *plot << ' ' << num(rows[i * config.a_steps + j].F_opt_numeric);
            *plot << '\n';
        }
        plot.finish();
    }
    if (summary.regime_warnings > 0)
        std::cerr << "warning: " << summary.regime_warnings
                  << " grid points lie beyond h^2 = 0.06, where the order-h^2 expansion is not expected to hold\n";
}

void run_coeffs(const GlobalOptions& g, double h, const std::string& out_path) {
    const auto config = load_config(g);
    Context ctx;
    check(cvt_context_create(&config, &ctx.ptr), "configuration");
    std::vector<cvt_coefficient> rows(config.n_max * config.n_max);
    std::size_t count = 0;
    check(cvt_coefficients(ctx.ptr, h, rows.data(), rows.size(), &count), "coefficients");

    Output out(out_path);
    write_metadata(*out, g, config);
    *out << "# h = " << num(h) << "\n"
         << "m,n,alpha_re,alpha_im,beta_re,beta_im,abs_alpha1,abs_beta1,closed_form_match\n";
    for (std::size_t i = 0; i < count; ++i) {
        const auto& r = rows[i];
        *out << r.m << ',' << r.n << ',' << num(r.alpha_re) << ',' << num(r.alpha_im) << ',' << num(r.beta_re)
             << ',' << num(r.beta_im) << ',' << num(r.abs_alpha1) << ',' << num(r.abs_beta1) << ','
             << r.closed_form_match << '\n';
    }
    out.finish();
}

int run_validate(const GlobalOptions& g, bool inject_fault) {
    std::vector<cvt_check> checks(64);
    std::size_t count = 0;
    const auto status =
        cvt_validate(g.n_max == 0 ? 10 : g.n_max, inject_fault ? 1 : 0, checks.data(), checks.size(), &count);
    if (status != CVT_OK && status != CVT_ERR_VALIDATION) check(status, "validate");
    for (std::size_t i = 0; i < count; ++i) {
        const auto& c = checks[i];
        std::printf("%s %-32s value=%.6e threshold=%.6e %s\n", c.passed ? "PASS" : "FAIL", c.name, c.value,
                    c.threshold, c.detail);
    }
    return status == CVT_OK ? 0 : exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-variable teleportation with a uniformly accelerated cavity"};
    app.set_version_flag("--version", std::string(cvt_version()));
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--preset", g.preset, "Parameter preset: fig3 or experiment")
        ->check(CLI::IsMember({"fig3", "experiment"}));
    app.add_option("--config", g.config_path, "key = value file applied on top of the preset");
    app.add_option("--nmax", g.n_max, "Number of cavity modes kept")->check(CLI::PositiveNumber);

    auto* fidelity = app.add_subcommand("fidelity", "Fidelities for one trajectory");
    std::string trajectory_path;
    std::vector<std::string> segments;
    std::string fidelity_out;
    fidelity->add_option("--trajectory", trajectory_path, "Trajectory file (inertial/accel lines)");
    fidelity->add_option("--segment", segments, "Inline trajectory line, repeatable");
    fidelity->add_option("--out", fidelity_out, "Output file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Fidelities over the (tau, a) grid as CSV");
    std::string sweep_out;
    std::string plot_path;
    unsigned jobs = 1;
    sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");
    sweep->add_option("--plot-data", plot_path, "gnuplot nonuniform matrix of the optimal fidelity");
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* coeffs = app.add_subcommand("coeffs", "Sudden-switch Bogoliubov coefficients at h");
    coeffs->set_help_flag("--help", "Print this help message and exit");
    double h = 0.0;
    std::string coeffs_out;
    coeffs->add_option("--h", h, "Dimensionless acceleration aL/c^2 in (0, 2)")->required();
    coeffs->add_option("--out", coeffs_out, "Output file (default stdout)");

    auto* validate = app.add_subcommand("validate", "Run the self-consistency checks");
    bool inject_fault = false;
    validate->add_flag("--inject-beta-sign-flip", inject_fault,
                       "Corrupt the coefficients before the identity check (must then fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try {
        if (*fidelity) {
            run_fidelity(g, trajectory_path, segments, fidelity_out);
        } else if (*sweep) {
            run_sweep(g, sweep_out, plot_path, jobs);
        } else if (*coeffs) {
            run_coeffs(g, h, coeffs_out);
        } else if (*validate) {
            return run_validate(g, inject_fault);
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return 0;
}
