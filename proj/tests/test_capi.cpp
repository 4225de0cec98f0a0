#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvtele/cvtele.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {

cvt_config small_config() {
    cvt_config c{};
    REQUIRE(cvt_config_preset("fig3", &c) == CVT_OK);
    c.tau_steps = 4;
    c.a_steps = 3;
    return c;
}

}  // namespace

TEST_CASE("version and presets") {
    CHECK(std::string(cvt_version()).size() > 0);
    cvt_config c{};
    CHECK(cvt_config_preset("fig3", &c) == CVT_OK);
    CHECK(c.r == 0.5);
    CHECK(c.kp == 3);
    CHECK(c.n_max == 10);
    CHECK(c.alice_clock == CVT_CLOCK_LAB);
    CHECK(c.weight == CVT_WEIGHT_TANH_R);
    CHECK(std::string(cvt_last_error()).empty());

    CHECK(cvt_config_preset("nope", &c) == CVT_ERR_PARSE);
    CHECK(std::string(cvt_last_error()).find("nope") != std::string::npos);
    CHECK(cvt_config_preset(nullptr, &c) == CVT_ERR_ARGUMENT);
    CHECK(cvt_config_preset("fig3", nullptr) == CVT_ERR_ARGUMENT);
}

TEST_CASE("config parsing") {
    cvt_config c{};
    REQUIRE(cvt_config_preset("fig3", &c) == CVT_OK);
    CHECK(cvt_config_parse("r = 0.25\nalice_clock = proper\n", &c) == CVT_OK);
    CHECK(c.r == 0.25);
    CHECK(c.alice_clock == CVT_CLOCK_PROPER);
    CHECK(cvt_config_parse("r = 0.25\nwhat = 1\n", &c) == CVT_ERR_PARSE);
    CHECK(std::string(cvt_last_error()).find("line 2") != std::string::npos);
    CHECK(c.r == 0.25);
}

TEST_CASE("context lifecycle and fidelity") {
    const auto config = small_config();
    cvt_context* ctx = nullptr;
    REQUIRE(cvt_context_create(&config, &ctx) == CVT_OK);
    REQUIRE(ctx != nullptr);

    cvt_trajectory* rest = nullptr;
    REQUIRE(cvt_trajectory_create(ctx, &rest) == CVT_OK);
    cvt_fidelity_report rep{};
    REQUIRE(cvt_fidelity(ctx, rest, &rep) == CVT_OK);
    CHECK(std::abs(rep.F_raw - 0.731059) < 1e-6);
    CHECK(rep.n_notes == 0);

    CHECK(cvt_trajectory_add_accel(rest, 1e17, 1e-10) == CVT_OK);
    CHECK(cvt_trajectory_add_inertial(rest, 1e-10) == CVT_OK);
    CHECK(cvt_trajectory_add_inertial(rest, -1.0) == CVT_ERR_ARGUMENT);
    CHECK(cvt_trajectory_add_accel(rest, 3e18, 1e-10) == CVT_ERR_ARGUMENT);
    REQUIRE(cvt_fidelity(ctx, rest, &rep) == CVT_OK);
    CHECK(rep.F_opt_numeric < 0.731059);
    CHECK(rep.F_corrected <= rep.F_opt_numeric + 1e-9);
    CHECK(rep.tau_rob_s == doctest::Approx(2e-10));
    cvt_trajectory_destroy(rest);

    cvt_trajectory* parsed = nullptr;
    CHECK(cvt_trajectory_parse(ctx, "accel 4e17 1e-10\n", &parsed) == CVT_OK);
    REQUIRE(cvt_fidelity(ctx, parsed, &rep) == CVT_OK);
    CHECK(rep.n_notes >= 1);
    CHECK(std::strstr(rep.notes, "exceeds") != nullptr);
    cvt_trajectory_destroy(parsed);

    cvt_trajectory* bad = nullptr;
    CHECK(cvt_trajectory_parse(ctx, "inertial 1\naccel x 1\n", &bad) == CVT_ERR_PARSE);
    CHECK(bad == nullptr);
    CHECK(std::string(cvt_last_error()).rfind("line 2:", 0) == 0);

    CHECK(cvt_fidelity(ctx, nullptr, &rep) == CVT_ERR_ARGUMENT);
    cvt_context_destroy(ctx);
    cvt_context_destroy(nullptr);
    cvt_trajectory_destroy(nullptr);
}

TEST_CASE("invalid configurations are rejected") {
    auto config = small_config();
    cvt_context* ctx = nullptr;
    config.kp = 7;
    CHECK(cvt_context_create(&config, &ctx) == CVT_ERR_ARGUMENT);
    CHECK(ctx == nullptr);
    config = small_config();
    config.alice_clock = 9;
    CHECK(cvt_context_create(&config, &ctx) == CVT_ERR_ARGUMENT);
    config = small_config();
    config.tau_steps = 1;
    CHECK(cvt_context_create(&config, &ctx) == CVT_ERR_ARGUMENT);
    CHECK(cvt_context_create(nullptr, &ctx) == CVT_ERR_ARGUMENT);
}

TEST_CASE("sweep through the C interface") {
    const auto config = small_config();
    cvt_context* ctx = nullptr;
    REQUIRE(cvt_context_create(&config, &ctx) == CVT_OK);
    size_t n = 0;
    REQUIRE(cvt_sweep_size(ctx, &n) == CVT_OK);
    CHECK(n == 12);
    std::vector<cvt_sweep_row> rows(n), again(n);
    CHECK(cvt_sweep(ctx, rows.data(), n - 1, 1, nullptr) == CVT_ERR_ARGUMENT);
    cvt_sweep_summary s{};
    REQUIRE(cvt_sweep(ctx, rows.data(), n, 1, &s) == CVT_OK);
    REQUIRE(cvt_sweep(ctx, again.data(), n, 4, nullptr) == CVT_OK);
    CHECK(std::memcmp(rows.data(), again.data(), n * sizeof(cvt_sweep_row)) == 0);
    CHECK(s.max_relative_opt_deficit > 0.0);
    CHECK(s.max_relative_opt_deficit < 0.06);
    cvt_context_destroy(ctx);
}

TEST_CASE("coefficients and validation") {
    auto config = small_config();
    config.n_max = 6;
    cvt_context* ctx = nullptr;
    REQUIRE(cvt_context_create(&config, &ctx) == CVT_OK);
    std::vector<cvt_coefficient> rows(36);
    size_t count = 0;
    CHECK(cvt_coefficients(ctx, 0.1, rows.data(), 10, &count) == CVT_ERR_ARGUMENT);
    REQUIRE(cvt_coefficients(ctx, 0.1, rows.data(), rows.size(), &count) == CVT_OK);
    CHECK(count == 36);
    CHECK(rows[1].m == 1);
    CHECK(rows[1].n == 2);
    CHECK(rows[1].closed_form_match == 1);
    CHECK(cvt_coefficients(ctx, 2.5, rows.data(), rows.size(), &count) == CVT_ERR_ARGUMENT);
    cvt_context_destroy(ctx);

    std::vector<cvt_check> checks(32);
    CHECK(cvt_validate(10, 0, checks.data(), checks.size(), &count) == CVT_OK);
    CHECK(count >= 12);
    CHECK(cvt_validate(10, 1, checks.data(), checks.size(), &count) == CVT_ERR_VALIDATION);
    bool found = false;
    for (size_t i = 0; i < count; ++i)
        if (std::string(checks[i].name) == "bogoliubov_identities") found = checks[i].passed == 0;
    CHECK(found);
    CHECK(cvt_validate(10, 0, checks.data(), 2, &count) == CVT_ERR_ARGUMENT);
}

TEST_CASE("h parameter") {
    double h = 0.0;
    REQUIRE(cvt_h_parameter(4e17, 0.012, 1.2e8, &h) == CVT_OK);
    CHECK(std::abs(h - 1.0 / 3.0) <= 1e-15 / 3.0);
    CHECK(cvt_h_parameter(-1.0, 0.012, 1.2e8, &h) == CVT_ERR_ARGUMENT);
    CHECK(cvt_h_parameter(1.0, 0.012, 1.2e8, nullptr) == CVT_ERR_ARGUMENT);
}
