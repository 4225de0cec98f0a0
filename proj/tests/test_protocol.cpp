#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvtele/protocol.hpp"
#include "oracles.hpp"

#include <random>

using namespace cvtele;

namespace {

const CavityGeometry geometry{};
const double crossing = geometry.length_m / geometry.c_m_per_s;
const double rest_fidelity = 1.0 / (1.0 + std::exp(-1.0));

double accel_for(double h) { return h * geometry.c_m_per_s * geometry.c_m_per_s / geometry.length_m; }

Trajectory burst(double h, double tau_s) { return Trajectory({Accelerated{accel_for(h), tau_s}}, geometry); }

std::shared_ptr<const BogoliubovEngine> shared_engine() {
    static const auto engine = std::make_shared<const BogoliubovEngine>(geometry);
    return engine;
}

}  // namespace

TEST_CASE("parameter presets and validation") {
    const auto f = ProtocolParams::fig3();
    CHECK(f.r == 0.5);
    CHECK(f.k == 1);
    CHECK(f.kp == 3);
    CHECK(f.geometry.length_m == 0.012);
    CHECK(f.geometry.c_m_per_s == 1.2e8);
    CHECK(ProtocolParams::experiment().r == doctest::Approx(std::log(2.0)));

    auto bad = f;
    bad.kp = 6;
    CHECK_THROWS_AS(TeleportationProtocol(bad, shared_engine()), Error);
    bad = f;
    bad.r = -0.1;
    CHECK_THROWS_AS(TeleportationProtocol(bad, shared_engine()), Error);
    bad = f;
    bad.geometry.n_max = 12;
    CHECK_THROWS_AS(TeleportationProtocol(bad, shared_engine()), Error);
}

TEST_CASE("rest anchor") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    const auto rep = p.consistency_report(Trajectory::rest(geometry));
    CHECK(std::abs(rep.F_raw - 0.731059) < 1e-6);
    CHECK(std::abs(rep.F_corrected - rest_fidelity) < 1e-12);
    CHECK(std::abs(rep.F_opt_numeric - rest_fidelity) < 1e-9);
    CHECK(std::abs(rep.nu - std::exp(-1.0)) < 1e-9);
    CHECK(rep.h == 0.0);
    CHECK(rep.notes.empty());
}

TEST_CASE("no squeezing gives the classical benchmark") {
    auto params = ProtocolParams::fig3();
    params.r = 0.0;
    const TeleportationProtocol p(params, shared_engine());
    CHECK(std::abs(p.fidelity_raw(Trajectory::rest(geometry)) - 0.5) < 1e-9);
    CHECK(std::abs(p.fidelity_raw(Trajectory({Inertial{0.37e-10}}, geometry)) - 0.5) < 1e-9);
}

TEST_CASE("property: inertial pipeline equals the closed-form phase fidelity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rd(0.0, 2.0), dur(0.0, 10.0 * crossing);
    for (int i = 0; i < 200; ++i) {
        auto params = ProtocolParams::fig3();
        params.r = rd(rng);
        const TeleportationProtocol p(params, shared_engine());
        const Trajectory t({Inertial{dur(rng)}}, geometry);
        const double phi = phase_pair(t, 1, 3).phi;
        CHECK(std::abs(p.fidelity_raw(t) - oracle::tms_fidelity(params.r, phi)) < 1e-9);
        CHECK(std::abs(p.fidelity_raw(t) - perturbative_fidelity(params.r, phi, {}, 0.0)) < 1e-9);
        CHECK(std::abs(p.fidelity_corrected(t) - 1.0 / (1.0 + std::exp(-2 * params.r))) < 1e-9);
    }
}

TEST_CASE("frozen pipeline values against a separate implementation") {
    // NumPy reference: (tau in L/c, h) -> (F_raw, F_corrected, F_opt), lab clock.
    struct Point {
        double tau, h, raw, corrected, opt;
    };
    const Point points[] = {
        {0.5, 0.1, 0.7285631513066053, 0.7285626885695418, 0.7285669939326115},
        {1.0, 0.2, 0.7112681006398271, 0.7110227321071982, 0.7115168576844623},
        {1.0, 0.245, 0.7015404736923154, 0.701019793111307, 0.7020788400943756},
    };
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    for (const auto& pt : points) {
        CAPTURE(pt.tau);
        CAPTURE(pt.h);
        const auto rep = p.consistency_report(burst(pt.h, pt.tau * crossing));
        CHECK(rep.F_raw == doctest::Approx(pt.raw).epsilon(2e-7));
        CHECK(rep.F_corrected == doctest::Approx(pt.corrected).epsilon(2e-7));
        CHECK(rep.F_opt_numeric == doctest::Approx(pt.opt).epsilon(2e-7));
    }
}

TEST_CASE("property: fidelities never exceed the entanglement bound") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    for (double tau : {0.2, 0.9, 1.7, 3.3, 5.0}) {
        for (double h : {0.02, 0.1, 0.2, 0.245}) {
            const auto rep = p.consistency_report(burst(h, tau * crossing));
            CHECK(rep.F_raw <= rep.F_opt_numeric + 1e-9 + rep.truncation_defect);
            CHECK(rep.F_corrected <= rep.F_opt_numeric + 1e-9 + rep.truncation_defect);
            CHECK(rep.F_opt_numeric <= rest_fidelity + 1e-9);
            CHECK(rep.nu >= std::exp(-1.0) - 1e-9);
        }
    }
}

TEST_CASE("perturbative formulas") {
    CHECK(perturbative_fidelity(0.5, 0.0, {}, 0.0) == doctest::Approx(rest_fidelity));
    CHECK(perturbative_fidelity(0.5, pi, {}, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))));
    CHECK(perturbative_optimal(0.5, {}, 0.3) == doctest::Approx(rest_fidelity));
    const FSums f{1.0, 0.5};
    const double w = std::tanh(0.5);
    CHECK(perturbative_optimal(0.5, f, 0.1) ==
          doctest::Approx(rest_fidelity * (1.0 - (0.5 + w) * 0.01)));
    CHECK(perturbative_optimal(0.5, f, 0.1, DegradationWeight::tanh_2r) ==
          doctest::Approx(rest_fidelity * (1.0 - (0.5 + std::tanh(1.0)) * 0.01)));
    CHECK_THROWS_AS(perturbative_fidelity(0.5, 0.0, {-1.0, 0.0}, 0.1), Error);
    CHECK_THROWS_AS(perturbative_optimal(0.5, {}, -0.1), Error);
}

TEST_CASE("expansion error is fourth order in h") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    const double tau = geometry.fundamental_period_s();
    double raw[3], opt[3];
    const double hs[3] = {0.05, 0.1, 0.2};
    for (int i = 0; i < 3; ++i) {
        const auto rep = p.consistency_report(burst(hs[i], tau));
        raw[i] = std::abs(rep.F_raw - rep.F_pert);
        opt[i] = rep.residual_pert;
    }
    for (int i = 0; i < 2; ++i) {
        CHECK(raw[i + 1] / raw[i] >= 10.0);
        CHECK(raw[i + 1] / raw[i] <= 22.0);
    }
    CHECK(opt[2] / opt[1] >= 10.0);
    CHECK(opt[2] / opt[1] <= 22.0);
}

TEST_CASE("the tanh(2r) weighting leaves a second-order residual") {
    auto params = ProtocolParams::fig3();
    params.weight = DegradationWeight::tanh_2r;
    const TeleportationProtocol doubled(params, shared_engine());
    const TeleportationProtocol exact(ProtocolParams::fig3(), shared_engine());
    auto residual = [&](const TeleportationProtocol& p, double h) {
        return p.consistency_report(burst(h, crossing)).residual_pert;
    };
    const double doubled_ratio = residual(doubled, 0.1) / residual(doubled, 0.05);
    const double exact_ratio = residual(exact, 0.1) / residual(exact, 0.05);
    CHECK(doubled_ratio == doctest::Approx(4.0).epsilon(0.1));
    CHECK(exact_ratio == doctest::Approx(16.0).epsilon(0.15));
    CHECK(residual(doubled, 0.1) > 10.0 * residual(exact, 0.1));
}

TEST_CASE("phase correction coincides with the optimum to fourth order") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    for (double tau : {0.3, 1.0, 2.7, 6.0}) {
        auto gap = [&](double h) {
            const auto rep = p.consistency_report(burst(h, tau * crossing));
            return rep.F_opt_numeric - rep.F_corrected;
        };
        const double g1 = gap(0.1), g2 = gap(0.05);
        CHECK(g1 >= 0.0);
        CHECK(g1 / g2 >= 10.0);
        CHECK(g1 / g2 <= 22.0);
    }
}

TEST_CASE("phase correction recovers the rest fidelity after inertial motion") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dur(0.0, 20.0 * crossing);
    for (int i = 0; i < 50; ++i) {
        const Trajectory t({Inertial{dur(rng)}, Inertial{dur(rng)}, Inertial{dur(rng)}}, geometry);
        CHECK(std::abs(p.fidelity_corrected(t) - rest_fidelity) < 1e-9);
    }
}

TEST_CASE("whole periods of acceleration undo the first-order damage") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    const auto rep = p.consistency_report(burst(0.1, geometry.fundamental_period_s()));
    CHECK(rep.f.alpha < 1e-12);
    CHECK(rest_fidelity - rep.F_opt_numeric < 1e-5);
    const auto worst = p.consistency_report(burst(0.1, crossing));
    CHECK(rest_fidelity - worst.F_opt_numeric > 1e-3);
}

TEST_CASE("Alice's clock choice moves only the phase") {
    auto params = ProtocolParams::fig3();
    params.clock = AliceClock::rob_proper;
    const TeleportationProtocol proper(params, shared_engine());
    const TeleportationProtocol lab(ProtocolParams::fig3(), shared_engine());
    const auto t = burst(0.2, 1.3 * crossing);
    const auto a = lab.consistency_report(t);
    const auto b = proper.consistency_report(t);
    CHECK(a.F_opt_numeric == doctest::Approx(b.F_opt_numeric).epsilon(1e-12));
    CHECK(a.F_corrected == doctest::Approx(b.F_corrected).epsilon(1e-12));
    CHECK(a.phi > b.phi);
    CHECK(b.times.t_alice_s == b.times.tau_rob_s);
}

TEST_CASE("reports carry timing, regime and geometry checks") {
    const TeleportationProtocol p(ProtocolParams::fig3(), shared_engine());
    const Trajectory t({Inertial{1e-10}, Accelerated{4e17, 1e-10}}, geometry);
    const auto rep = p.consistency_report(t);
    CHECK(rep.h == doctest::Approx(1.0 / 3.0));
    CHECK(rep.times.tau_rob_s == doctest::Approx(2e-10));
    CHECK_FALSE(rep.notes.empty());
    CHECK(rep.truncation_defect > 0.0);

    const Trajectory other({Inertial{1e-10}}, CavityGeometry{0.02, 1.2e8, 10});
    CHECK_THROWS_AS(p.fidelity_raw(other), Error);
    CHECK_THROWS_AS(TeleportationProtocol(ProtocolParams::fig3(),
                                          std::make_shared<const BogoliubovEngine>(CavityGeometry{0.02, 1.2e8, 10})),
                    Error);
}

TEST_CASE("larger truncation changes the answer only at the defect level") {
    auto params = ProtocolParams::fig3();
    params.geometry.n_max = 20;
    const TeleportationProtocol fine(params);
    const TeleportationProtocol coarse(ProtocolParams::fig3(), shared_engine());
    const auto a = coarse.consistency_report(burst(0.2, crossing));
    const auto b = fine.consistency_report(Trajectory({Accelerated{accel_for(0.2), crossing}}, params.geometry));
    CHECK(std::abs(a.F_opt_numeric - b.F_opt_numeric) < 1e-4);
    CHECK(b.truncation_defect < a.truncation_defect);
}
