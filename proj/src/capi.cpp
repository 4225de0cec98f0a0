#include "cvtele/cvtele.h"

#include "cvtele/runner.hpp"

#include <cstring>
#include <new>
#include <optional>
#include <string>

using namespace cvtele;

struct cvt_context {
    RunConfig config;
    TeleportationProtocol protocol;
};

struct cvt_trajectory {
    CavityGeometry geometry;
    std::vector<Segment> segments;

    Trajectory build() const {
        if (segments.empty()) return Trajectory::rest(geometry);
        return Trajectory(segments, geometry);
    }
};

namespace {

thread_local std::string last_error;

cvt_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain: return CVT_ERR_ARGUMENT;
        case ErrorKind::parse: return CVT_ERR_PARSE;
        case ErrorKind::numeric: return CVT_ERR_NUMERIC;
        case ErrorKind::io: return CVT_ERR_IO;
        case ErrorKind::validation: return CVT_ERR_VALIDATION;
    }
    return CVT_ERR_INTERNAL;
}

template <class F>
cvt_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return CVT_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CVT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CVT_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return CVT_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorKind::domain, std::string(what) + " must not be NULL");
}

void copy_text(char* dst, std::size_t size, const std::string& src) {
    const std::size_t n = std::min(size - 1, src.size());
    std::memcpy(dst, src.data(), n);
    dst[n] = '\0';
}

cvt_config to_c(const RunConfig& rc) {
    const auto& p = rc.params;
    cvt_config c{};
    c.r = p.r;
    c.k = p.k;
    c.kp = p.kp;
    c.length_m = p.geometry.length_m;
    c.c_m_per_s = p.geometry.c_m_per_s;
    c.n_max = p.geometry.n_max;
    c.alice_clock = p.clock == AliceClock::lab_coordinate ? CVT_CLOCK_LAB : CVT_CLOCK_PROPER;
    c.weight = p.weight == DegradationWeight::tanh_r ? CVT_WEIGHT_TANH_R : CVT_WEIGHT_TANH_2R;
    c.tau_min_s = rc.grid.tau_min_s;
    c.tau_max_s = rc.grid.tau_max_s;
    c.tau_steps = rc.grid.tau_steps;
    c.a_min_m_s2 = rc.grid.a_min_m_s2;
    c.a_max_m_s2 = rc.grid.a_max_m_s2;
    c.a_steps = rc.grid.a_steps;
    return c;
}

RunConfig from_c(const cvt_config& c) {
    RunConfig rc;
    auto& p = rc.params;
    p.r = c.r;
    p.k = c.k;
    p.kp = c.kp;
    p.geometry.length_m = c.length_m;
    p.geometry.c_m_per_s = c.c_m_per_s;
    p.geometry.n_max = c.n_max;
    switch (c.alice_clock) {
        case CVT_CLOCK_LAB: p.clock = AliceClock::lab_coordinate; break;
        case CVT_CLOCK_PROPER: p.clock = AliceClock::rob_proper; break;
        default: fail(ErrorKind::domain, "unknown alice_clock value");
    }
    switch (c.weight) {
        case CVT_WEIGHT_TANH_R: p.weight = DegradationWeight::tanh_r; break;
        case CVT_WEIGHT_TANH_2R: p.weight = DegradationWeight::tanh_2r; break;
        default: fail(ErrorKind::domain, "unknown weight value");
    }
    rc.grid = {c.tau_min_s, c.tau_max_s, c.tau_steps, c.a_min_m_s2, c.a_max_m_s2, c.a_steps};
    return rc;
}

}  // namespace

extern "C" {

const char* cvt_version(void) { return CVTELE_VERSION; }

const char* cvt_last_error(void) { return last_error.c_str(); }

cvt_status cvt_config_preset(const char* name, cvt_config* out) {
    return guarded([&] {
        need(name, "preset name");
        need(out, "output config");
        *out = to_c(preset_config(name));
    });
}

cvt_status cvt_config_parse(const char* text, cvt_config* config) {
    return guarded([&] {
        need(text, "config text");
        need(config, "config");
        auto rc = from_c(*config);
        apply_config_text(text, rc);
        *config = to_c(rc);
    });
}

cvt_status cvt_context_create(const cvt_config* config, cvt_context** out) {
    return guarded([&] {
        need(config, "config");
        need(out, "output handle");
        *out = nullptr;
        auto rc = from_c(*config);
        rc.grid.validate();
        TeleportationProtocol protocol(rc.params);
        *out = new cvt_context{std::move(rc), std::move(protocol)};
    });
}

void cvt_context_destroy(cvt_context* ctx) { delete ctx; }

cvt_status cvt_trajectory_create(const cvt_context* ctx, cvt_trajectory** out) {
    return guarded([&] {
        need(ctx, "context");
        need(out, "output handle");
        *out = new cvt_trajectory{ctx->config.params.geometry, {}};
    });
}

cvt_status cvt_trajectory_parse(const cvt_context* ctx, const char* text, cvt_trajectory** out) {
    return guarded([&] {
        need(ctx, "context");
        need(text, "trajectory text");
        need(out, "output handle");
        *out = nullptr;
        const auto& geometry = ctx->config.params.geometry;
        auto parsed = Trajectory::parse(text, geometry);
        *out = new cvt_trajectory{geometry, parsed.segments()};
    });
}

cvt_status cvt_trajectory_add_inertial(cvt_trajectory* traj, double duration_s) {
    return guarded([&] {
        need(traj, "trajectory");
        const Segment segment = Inertial{duration_s};
        Trajectory({segment}, traj->geometry);
        traj->segments.push_back(segment);
    });
}

cvt_status cvt_trajectory_add_accel(cvt_trajectory* traj, double acceleration_m_s2, double proper_time_s) {
    return guarded([&] {
        need(traj, "trajectory");
        const Segment segment = Accelerated{acceleration_m_s2, proper_time_s};
        Trajectory({segment}, traj->geometry);
        traj->segments.push_back(segment);
    });
}

void cvt_trajectory_destroy(cvt_trajectory* traj) { delete traj; }

cvt_status cvt_fidelity(cvt_context* ctx, const cvt_trajectory* traj, cvt_fidelity_report* out) {
    return guarded([&] {
        need(ctx, "context");
        need(traj, "trajectory");
        need(out, "output report");
        const auto rep = ctx->protocol.consistency_report(traj->build());
        cvt_fidelity_report r{};
        r.F_raw = rep.F_raw;
        r.F_corrected = rep.F_corrected;
        r.F_opt_numeric = rep.F_opt_numeric;
        r.F_pert = rep.F_pert;
        r.F_pert_opt = rep.F_pert_opt;
        r.nu = rep.nu;
        r.phi = rep.phi;
        r.h = rep.h;
        r.residual_pert = rep.residual_pert;
        r.f_alpha = rep.f.alpha;
        r.f_beta = rep.f.beta;
        r.t_alice_s = rep.times.t_alice_s;
        r.tau_rob_s = rep.times.tau_rob_s;
        r.truncation_defect = rep.truncation_defect;
        r.clamped_violation = rep.clamped_violation;
        r.n_notes = rep.notes.size();
        std::string joined;
        for (const auto& note : rep.notes) joined += note + "\n";
        copy_text(r.notes, sizeof r.notes, joined);
        *out = r;
    });
}

cvt_status cvt_sweep_size(const cvt_context* ctx, size_t* out) {
    return guarded([&] {
        need(ctx, "context");
        need(out, "output size");
        *out = ctx->config.grid.size();
    });
}

cvt_status cvt_sweep(cvt_context* ctx, cvt_sweep_row* rows, size_t capacity, unsigned jobs,
                     cvt_sweep_summary* summary) {
    return guarded([&] {
        need(ctx, "context");
        need(rows, "row buffer");
        if (capacity < ctx->config.grid.size()) fail(ErrorKind::domain, "row buffer is smaller than the sweep grid");
        const auto result = run_sweep(ctx->protocol, ctx->config.grid, jobs);
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            const auto& s = result.rows[i];
            rows[i] = {s.tau_s, s.a_m_s2, s.h, s.phi, s.F_raw, s.F_corrected, s.F_opt_numeric,
                       s.F_pert, s.F_pert_opt, s.nu, s.residual_pert};
        }
        if (summary)
            *summary = {result.max_truncation_defect, result.max_relative_opt_deficit, result.regime_warnings,
                        result.clamped_points};
    });
}

cvt_status cvt_coefficients(cvt_context* ctx, double h, cvt_coefficient* rows, size_t capacity, size_t* count) {
    return guarded([&] {
        need(ctx, "context");
        need(rows, "row buffer");
        const auto table = coefficient_table(h, ctx->protocol.engine());
        if (capacity < table.size()) fail(ErrorKind::domain, "row buffer is smaller than n_max^2");
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& t = table[i];
            rows[i] = {t.m,          t.n,          t.alpha.real(), t.alpha.imag(), t.beta.real(),
                       t.beta.imag(), t.abs_alpha1, t.abs_beta1,   t.closed_form_match ? 1 : 0};
        }
        if (count) *count = table.size();
    });
}

cvt_status cvt_validate(size_t n_max, int inject_fault, cvt_check* checks, size_t capacity, size_t* count) {
    bool all_passed = true;
    const auto status = guarded([&] {
        need(checks, "check buffer");
        const auto results = run_validation({n_max, inject_fault != 0});
        if (capacity < results.size()) fail(ErrorKind::domain, "check buffer is too small");
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            cvt_check c{};
            copy_text(c.name, sizeof c.name, r.name);
            c.passed = r.passed ? 1 : 0;
            c.value = r.value;
            c.threshold = r.threshold;
            copy_text(c.detail, sizeof c.detail, r.detail);
            checks[i] = c;
            all_passed = all_passed && r.passed;
        }
        if (count) *count = results.size();
    });
    if (status != CVT_OK) return status;
    if (!all_passed) {
        last_error = "one or more validation checks failed";
        return CVT_ERR_VALIDATION;
    }
    return CVT_OK;
}

cvt_status cvt_h_parameter(double acceleration_m_s2, double length_m, double c_m_per_s, double* out) {
    return guarded([&] {
        need(out, "output");
        *out = h_parameter(acceleration_m_s2, length_m, c_m_per_s);
    });
}

}  // extern "C"
