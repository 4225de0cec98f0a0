#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvtele/trajectory.hpp"

#include <string>

using namespace cvtele;

namespace {

std::string parse_error_of(const std::string& text) {
    try {
        Trajectory::parse(text, CavityGeometry{});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("h parameter") {
    CHECK(std::abs(h_parameter(4e17, 0.012, 1.2e8) - 1.0 / 3.0) <= 1e-15 / 3.0);
    CHECK(h_parameter(0.0, 0.012, 1.2e8) == 0.0);
    CHECK_THROWS_AS(h_parameter(-1.0, 0.012, 1.2e8), Error);
    CHECK_THROWS_AS(h_parameter(1.0, 0.0, 1.2e8), Error);
    CHECK_THROWS_AS(h_parameter(1.0, 0.012, 0.0), Error);
}

TEST_CASE("parse a mixed trajectory") {
    const auto t = Trajectory::parse(
        "# warm up\n"
        "inertial 1e-10\n"
        "\n"
        "accel 1e17 2e-10   # first burn\n"
        "  inertial 0\n",
        CavityGeometry{});
    REQUIRE(t.segments().size() == 3);
    CHECK(std::get<Inertial>(t.segments()[0]).duration_s == 1e-10);
    const auto& acc = std::get<Accelerated>(t.segments()[1]);
    CHECK(acc.acceleration_m_s2 == 1e17);
    CHECK(acc.proper_time_s == 2e-10);
    CHECK(t.accelerated_count() == 1);
    CHECK(t.max_h() == doctest::Approx(1e17 * 0.012 / 1.44e16));
}

TEST_CASE("empty text means rest") {
    for (const char* text : {"", "\n\n", "# nothing\n"}) {
        const auto t = Trajectory::parse(text, CavityGeometry{});
        REQUIRE(t.segments().size() == 1);
        CHECK(std::get<Inertial>(t.segments()[0]).duration_s == 0.0);
        CHECK(t.max_h() == 0.0);
    }
}

TEST_CASE("parse errors cite the line") {
    CHECK(parse_error_of("inertial 1e-10\naccel 1e17\n").rfind("line 2:", 0) == 0);
    CHECK(parse_error_of("jump 3\n").rfind("line 1:", 0) == 0);
    CHECK(parse_error_of("inertial abc\n").find("expected a number") != std::string::npos);
    CHECK(parse_error_of("inertial 1 2\n").rfind("line 1:", 0) == 0);
    CHECK(parse_error_of("\n\ninertial -1\n").rfind("line 3:", 0) == 0);
    CHECK(parse_error_of("accel 0 1e-10\n").rfind("line 1:", 0) == 0);
    CHECK(parse_error_of("accel 3e18 1e-10\n").find("below 2") != std::string::npos);
    CHECK(parse_error_of("inertial nan\n").rfind("line 1:", 0) == 0);
}

TEST_CASE("constructor validation") {
    const CavityGeometry g;
    CHECK_THROWS_AS(Trajectory({}, g), Error);
    CHECK_THROWS_AS(Trajectory({Inertial{-1.0}}, g), Error);
    CHECK_THROWS_AS(Trajectory({Accelerated{-1.0, 1.0}}, g), Error);
    CHECK_THROWS_AS(Trajectory({Accelerated{1e17, -1.0}}, g), Error);
    CHECK_THROWS_AS(Trajectory({Inertial{1.0}}, CavityGeometry{0.0, 1.0, 10}), Error);
}

TEST_CASE("regime notes flag h^2 above the plotted range") {
    const CavityGeometry g;
    const double a_edge = std::sqrt(plotted_regime_h2) * g.c_m_per_s * g.c_m_per_s / g.length_m;
    CHECK(Trajectory({Accelerated{a_edge, 1e-10}}, g).regime_notes().empty());
    const auto notes = Trajectory({Inertial{1.0}, Accelerated{4e17, 1e-10}}, g).regime_notes();
    REQUIRE(notes.size() == 1);
    CHECK(notes[0].find("segment 2") != std::string::npos);
}

TEST_CASE("proper-time ledger") {
    const CavityGeometry g;
    const double a = 1e17, tau = 2e-10;
    const Trajectory t({Inertial{1e-10}, Accelerated{a, tau}}, g);
    const auto lab = ledger(t, AliceClock::lab_coordinate);
    const double x = a * tau / g.c_m_per_s;
    CHECK(lab.tau_rob_s == doctest::Approx(3e-10));
    CHECK(lab.t_alice_s == doctest::Approx(1e-10 + g.c_m_per_s / a * std::sinh(x)).epsilon(1e-14));
    CHECK(lab.t_alice_s > lab.tau_rob_s);
    const auto proper = ledger(t, AliceClock::rob_proper);
    CHECK(proper.t_alice_s == doctest::Approx(3e-10));

    // tiny accelerations: continuous with the inertial limit
    const Trajectory slow({Accelerated{1e-3, 1e-3}}, g);
    CHECK(ledger(slow).t_alice_s == doctest::Approx(1e-3).epsilon(1e-15));
}

TEST_CASE("phase pair and coasting time") {
    const CavityGeometry g;
    const double t = inertial_duration_for_turns(1, 1, 3, g);
    CHECK((g.omega(1) + g.omega(3)) * t == doctest::Approx(2 * pi));
    const auto p = phase_pair(Trajectory({Inertial{t}}, g), 1, 3);
    CHECK(p.phi == doctest::Approx(2 * pi));
    CHECK(p.phi_wrapped >= 0.0);
    CHECK(p.phi_wrapped < 2 * pi);
    CHECK(std::min(p.phi_wrapped, 2 * pi - p.phi_wrapped) < 1e-9);

    const auto q = phase_pair(Trajectory({Inertial{1e-10}}, g), 1, 3);
    CHECK(q.theta_alice == doctest::Approx(g.omega(1) * 1e-10));
    CHECK(q.theta_rob == doctest::Approx(g.omega(3) * 1e-10));
    CHECK(q.phi_wrapped == doctest::Approx(std::fmod(q.phi, 2 * pi)));
}

TEST_CASE("transform of inertial motion is the free phase") {
    const BogoliubovEngine engine(CavityGeometry{});
    const auto& g = engine.geometry();
    const Trajectory t({Inertial{1e-10}, Inertial{0.7e-10}}, g);
    const auto b = build_transform(t, engine);
    const auto m = phase_evolution_minkowski(1.7e-10, g);
    CHECK((b.alpha - m.alpha).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(b.beta.cwiseAbs().maxCoeff() == 0.0);
    const auto f = trajectory_f_sums(t, 3, engine);
    CHECK(f.alpha == 0.0);
    CHECK(f.beta == 0.0);
}

TEST_CASE("segment order matters and composition follows the motion") {
    const BogoliubovEngine engine(CavityGeometry{});
    const auto& g = engine.geometry();
    const Trajectory ab({Inertial{0.3e-10}, Accelerated{1e17, 1e-10}}, g);
    const auto built = build_transform(ab, engine);
    const auto expected = compose(engine.one_segment_transform(1e-10, ab.h_of(std::get<Accelerated>(ab.segments()[1]))),
                                  phase_evolution_minkowski(0.3e-10, g));
    CHECK((built.alpha - expected.alpha).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((built.beta - expected.beta).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("multi-segment first-order sums") {
    const BogoliubovEngine engine(CavityGeometry{});
    const auto& g = engine.geometry();
    const double crossing = g.length_m / g.c_m_per_s;

    // one segment through either route agrees
    const Trajectory single({Accelerated{1e17, crossing}}, g);
    const auto direct = engine.f_sums(3, crossing);
    const auto via = trajectory_f_sums(single, 3, engine);
    CHECK(via.alpha == doctest::Approx(direct.alpha).epsilon(1e-12));

    // two equal bursts: a one-crossing coast adds their first-order parts
    // in phase, a whole-period coast makes them cancel
    const Trajectory in_phase({Accelerated{1e17, crossing}, Inertial{crossing}, Accelerated{1e17, crossing}}, g);
    CHECK(trajectory_f_sums(in_phase, 3, engine).alpha == doctest::Approx(4.0 * direct.alpha).epsilon(1e-8));
    const Trajectory cancel({Accelerated{1e17, crossing}, Inertial{2 * crossing}, Accelerated{1e17, crossing}}, g);
    CHECK(trajectory_f_sums(cancel, 3, engine).alpha < 1e-10);

    // back-to-back bursts behave like one longer burst
    const Trajectory joined({Accelerated{1e17, crossing}, Accelerated{1e17, crossing}}, g);
    CHECK(trajectory_f_sums(joined, 3, engine).alpha < 1e-10);
    const Trajectory three({Accelerated{1e17, crossing}, Accelerated{1e17, 2 * crossing}}, g);
    CHECK(trajectory_f_sums(three, 3, engine).alpha == doctest::Approx(direct.alpha).epsilon(1e-8));
}
