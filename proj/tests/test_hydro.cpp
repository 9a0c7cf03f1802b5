#include <doctest.h>

#include <cmath>
#include <vector>

#include "spinewave/hydro.hpp"

using namespace spinewave;
namespace hy = spinewave::hydro;
using Eigen::VectorXd;

TEST_SUITE("hydro") {

TEST_CASE("geometry presets and validation") {
    for (int n : {1, 3, 5}) {
        const auto g = hy::BodyGeometry::preset(n);
        CHECK(g.link_lengths.size() == n);
        CHECK(g.link_lengths.sum() == doctest::Approx(0.29).epsilon(1e-12));
        CHECK(g.body_length == 0.725);
        CHECK(g.body_depth == 0.10);
        CHECK_NOTHROW(hy::validate(g));
    }
    CHECK_THROWS_AS(hy::BodyGeometry::preset(2), validation_error);
    CHECK_THROWS_AS(hy::BodyGeometry::preset(0), validation_error);

    hy::BodyGeometry bad = hy::BodyGeometry::preset(3);
    bad.body_depth = 0.0;
    CHECK_THROWS_AS(hy::validate(bad), validation_error);
    bad = hy::BodyGeometry::preset(3);
    bad.link_lengths = VectorXd();
    CHECK_THROWS_AS(hy::validate(bad), validation_error);
    bad = hy::BodyGeometry::preset(3);
    bad.link_lengths[1] = -0.1;
    CHECK_THROWS_AS(hy::validate(bad), validation_error);
    bad = hy::BodyGeometry::preset(1);
    bad.link_lengths[0] = 0.8;  // longer than the body
    CHECK_THROWS_AS(hy::validate(bad), validation_error);
}

TEST_CASE("tail tip follows the cumulative link angles") {
    VectorXd a(1), l(1);
    a << 0.2;
    l << 0.3;
    CHECK(hy::tail_tip_y(a, l) == 0.3 * std::sin(0.2));

    VectorXd a2(2), l2(2);
    a2 << 0.1, 0.3;
    l2 << 0.3, 0.2;
    // second link points at the sum of both joint angles
    CHECK(hy::tail_tip_y(a2, l2) ==
          doctest::Approx(0.3 * std::sin(0.1) + 0.2 * std::sin(0.4))
              .epsilon(1e-15));
    CHECK(hy::tail_tip_y(VectorXd::Zero(2), l2) == 0.0);
    CHECK_THROWS_AS(hy::tail_tip_y(a, l2), dimension_error);
}

TEST_CASE("still gait yields zero kinematics") {
    const auto g = hy::BodyGeometry::preset(3);
    const auto p = cpg::Params::uniform(3, 2.0 * M_PI * 0.7, 0.0, 0.1);
    const auto kin = hy::derive_kinematics(p, g, 0.3);
    CHECK(kin.A == 0.0);
    CHECK(kin.A_pp == 0.0);
    CHECK(kin.St == 0.0);
    CHECK(kin.f == 0.0);
    CHECK(kin.a_over_d == 0.0);
    // three joints each held at 0.1 rad
    CHECK(kin.b_eff == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("single joint tracks the drive frequency") {
    const auto g = hy::BodyGeometry::preset(1);
    const auto p = cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, 0.0);
    const auto kin = hy::derive_kinematics(p, g, 0.3);
    CHECK(kin.f == doctest::Approx(0.7).epsilon(0.01));
    // 0.2 rad of joint swing on a 0.29 m link
    CHECK(kin.A_pp ==
          doctest::Approx(2.0 * 0.29 * std::sin(0.2)).epsilon(1e-9));
    CHECK(kin.A == 0.5 * kin.A_pp);
    CHECK(kin.a_over_d == kin.A_pp / 0.10);
    CHECK(std::abs(kin.b_eff) <= 1e-9);
}

TEST_CASE("known single-link series reproduces the frozen numbers") {
    hy::BodyGeometry g;
    g.link_lengths = VectorXd::Constant(1, 0.3);
    const auto p = cpg::Params::uniform(1, 2.0 * M_PI, 0.04, 0.0);
    const auto kin = hy::derive_kinematics(p, g, 0.3);
    const double app = 2.0 * 0.3 * std::sin(0.2);  // 0.11920...
    CHECK(kin.A_pp == doctest::Approx(app).epsilon(1e-9));
    CHECK(kin.f == doctest::Approx(1.0).epsilon(0.01));
    CHECK(kin.St == doctest::Approx(app / 0.3).epsilon(1e-6));
    CHECK(kin.St == kin.f * kin.A_pp / 0.3);  // the identity holds exactly
}

TEST_CASE("offset carries through to the mean direction") {
    const auto g = hy::BodyGeometry::preset(1);
    const auto p = cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, 0.05);
    const auto kin = hy::derive_kinematics(p, g, 0.3);
    CHECK(kin.b_eff == doctest::Approx(0.05).epsilon(1e-7));
}

TEST_CASE("thrust coefficient closed form") {
    CHECK(hy::thrust_coefficient(0.4, 0.3) ==
          doctest::Approx(0.1518).epsilon(1e-12));
    CHECK(hy::thrust_coefficient(0.7, 0.0) ==
          doctest::Approx(-0.12).epsilon(1e-15));
    CHECK(hy::thrust_coefficient(0.2, 0.3) < 0.0);
    CHECK(hy::thrust_coefficient(0.4, 0.3) > 0.0);
    CHECK_THROWS_AS(hy::thrust_coefficient(-0.1, 0.3), validation_error);
    CHECK_THROWS_AS(hy::thrust_coefficient(0.1, -0.3), validation_error);
}

TEST_CASE("zero contour crosses every useful amplitude ray") {
    for (double aod : {0.05, 0.1, 0.3, 0.5}) {
        CHECK(hy::thrust_coefficient(0.0, aod) < 0.0);
        CHECK(hy::thrust_coefficient(1.0, aod) > 0.0);
        // and the crossing is unique: the form is monotone in St
        double prev = hy::thrust_coefficient(0.0, aod);
        for (int i = 1; i <= 50; ++i) {
            const double cur = hy::thrust_coefficient(i / 50.0, aod);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("vortex power discount at frequency match") {
    const hy::Constants k;
    const double base = k.p0 * 0.6 * 0.6 * 0.6 * 0.1 * 0.1;
    CHECK(hy::vortex_power(0.6, 0.1, 0.6) ==
          doctest::Approx(0.71 * base).epsilon(1e-12));
    // two window-widths away the discount has all but vanished
    const double off = hy::vortex_power(1.2, 0.1, 0.6);
    const double base_off = k.p0 * 1.2 * 1.2 * 1.2 * 0.1 * 0.1;
    CHECK(off == doctest::Approx(base_off).epsilon(1e-3));
    CHECK(off < base_off);
    CHECK_THROWS_AS(hy::vortex_power(0.6, 0.1, 0.0), validation_error);
}

TEST_CASE("turning moment peaks inside the sweep") {
    const hy::Constants k;
    const double st_peak = k.st_m / std::sqrt(2.0);
    const double at_peak = hy::turning_moment(0.1, st_peak, 0.3);
    CHECK(at_peak > hy::turning_moment(0.1, 0.1 * k.st_m, 0.3));
    CHECK(at_peak > hy::turning_moment(0.1, 3.0 * k.st_m, 0.3));
    CHECK(at_peak > hy::turning_moment(0.1, st_peak * 0.8, 0.3));
    CHECK(at_peak > hy::turning_moment(0.1, st_peak * 1.25, 0.3));
    CHECK(hy::turning_moment(0.0, 0.3, 0.3) == 0.0);
    CHECK(hy::turning_moment(-0.1, st_peak, 0.3) == -at_peak);
}

TEST_CASE("scenario values recombine their parts") {
    const auto g = hy::BodyGeometry::preset(3);
    const auto p = cpg::Params::uniform(3, 2.0 * M_PI * 0.7, 0.04, 0.03);
    hy::ScenarioSpec spec;
    const hy::Constants k;

    spec.kind = hy::Scenario::thrust;
    auto r = hy::evaluate_scenario(spec, p, g);
    CHECK(r.value == r.c_t);
    CHECK(r.c_t ==
          doctest::Approx(hy::thrust_coefficient(r.kin.St, r.kin.a_over_d))
              .epsilon(1e-12));
    CHECK(r.kin.St == r.kin.f * r.kin.A_pp / spec.U);

    spec.kind = hy::Scenario::sideflow;
    r = hy::evaluate_scenario(spec, p, g);
    {
        const double u_eff = spec.U * std::cos(spec.flow_angle);
        const double ct = hy::thrust_coefficient(r.kin.f * r.kin.A_pp / u_eff,
                                                 r.kin.a_over_d);
        const double cm = k.c_m1 * (std::sin(spec.flow_angle) -
                                    k.kappa * std::sin(r.kin.b_eff));
        CHECK(r.value == doctest::Approx(std::abs(ct) +
                                         spec.lambda_torque * std::abs(cm))
                             .epsilon(1e-12));
        CHECK(r.c_m == doctest::Approx(cm).epsilon(1e-12));
    }

    spec.kind = hy::Scenario::vortex;
    r = hy::evaluate_scenario(spec, p, g);
    {
        const double fs = 0.2 * spec.U / spec.cylinder_diameter;
        CHECK(r.shedding_f == doctest::Approx(fs).epsilon(1e-15));
        const double want =
            hy::vortex_power(r.kin.f, r.kin.A_pp, fs) +
            k.thrust_penalty *
                std::max(0.0, std::abs(hy::thrust_coefficient(
                                   r.kin.St, r.kin.a_over_d)) -
                                  k.thrust_band);
        CHECK(r.value == doctest::Approx(want).epsilon(1e-12));
    }

    spec.kind = hy::Scenario::turning;
    r = hy::evaluate_scenario(spec, p, g);
    CHECK(r.value ==
          doctest::Approx(hy::turning_moment(r.kin.b_eff, r.kin.St,
                                             r.kin.a_over_d))
              .epsilon(1e-12));

    CHECK(hy::scenario_maximizes(hy::Scenario::thrust));
    CHECK_FALSE(hy::scenario_maximizes(hy::Scenario::sideflow));
    CHECK_FALSE(hy::scenario_maximizes(hy::Scenario::vortex));
    CHECK(hy::scenario_maximizes(hy::Scenario::turning));
}

TEST_CASE("turning needs asymmetry") {
    const auto g = hy::BodyGeometry::preset(1);
    const auto p = cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, 0.0);
    hy::ScenarioSpec spec;
    spec.kind = hy::Scenario::turning;
    CHECK(std::abs(hy::evaluate_scenario(spec, p, g).value) <= 1e-9);
}

TEST_CASE("half-amplitude strouhal halves the model input") {
    const auto g = hy::BodyGeometry::preset(1);
    const auto p = cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, 0.0);
    hy::ScenarioSpec spec;
    spec.kind = hy::Scenario::thrust;
    const auto pp = hy::evaluate_scenario(spec, p, g);
    spec.half_amplitude_st = true;
    const auto half = hy::evaluate_scenario(spec, p, g);
    // kinematics keep the peak-to-peak St; only the model input shrinks
    CHECK(half.kin.St == pp.kin.St);
    CHECK(half.value ==
          doctest::Approx(
              hy::thrust_coefficient(0.5 * pp.kin.St, pp.kin.a_over_d))
              .epsilon(1e-12));
    CHECK(half.value < pp.value);
}

TEST_CASE("sideflow rewards a counter-tilted gait") {
    const auto g = hy::BodyGeometry::preset(1);
    hy::ScenarioSpec spec;
    spec.kind = hy::Scenario::sideflow;

    const auto straight = cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, 0.0);
    const auto tilted =
        cpg::Params::uniform(1, 2.0 * M_PI * 0.7, 0.04, spec.flow_angle);
    const auto r0 = hy::evaluate_scenario(spec, straight, g);
    const auto r1 = hy::evaluate_scenario(spec, tilted, g);
    CHECK(std::abs(r1.c_m) < 0.05 * std::abs(r0.c_m));
    CHECK(r1.value < r0.value);
}

TEST_CASE("station keeping settles at the shedding frequency") {
    // sweep the drive over the band; the objective should bottom out near
    // the 0.2 U / D = 0.6 Hz shedding line (within the documented 5%)
    const auto g = hy::BodyGeometry::preset(1);
    hy::ScenarioSpec spec;
    spec.kind = hy::Scenario::vortex;
    double best = 1e300, best_f = 0.0;
    for (int i = 0; i <= 120; ++i) {
        const double f = 0.25 + (1.3 - 0.25) * i / 120.0;
        const auto p = cpg::Params::uniform(1, 2.0 * M_PI * f, 0.0396, 0.0);
        const auto r = hy::evaluate_scenario(spec, p, g);
        if (r.value < best) {
            best = r.value;
            best_f = r.kin.f;
        }
    }
    CHECK(std::abs(best_f - 0.6) <= 0.05 * 0.6);
}

TEST_CASE("objectives are deterministic") {
    const auto g = hy::BodyGeometry::preset(3);
    const auto p = cpg::Params::uniform(3, 2.0 * M_PI * 0.9, 0.06, 0.02);
    for (auto kind : {hy::Scenario::thrust, hy::Scenario::sideflow,
                      hy::Scenario::vortex, hy::Scenario::turning}) {
        hy::ScenarioSpec spec;
        spec.kind = kind;
        const double a = hy::evaluate_scenario(spec, p, g).value;
        const double b = hy::evaluate_scenario(spec, p, g).value;
        CHECK(a == b);
    }
}

TEST_CASE("design vector maps into the oscillator chain") {
    const auto [lo, hi] = hy::design_bounds();
    REQUIRE(lo.size() == hy::kDesignDim);
    REQUIRE(hi.size() == hy::kDesignDim);
    for (int i = 0; i < hy::kDesignDim; ++i) CHECK(lo[i] < hi[i]);
    CHECK(lo[0] == doctest::Approx(2.0 * M_PI * 0.2).epsilon(1e-15));
    CHECK(hi[0] == doctest::Approx(2.0 * M_PI * 1.5).epsilon(1e-15));

    VectorXd d(7);
    d << 3.0, 0.1, 0.25, 0.6, -0.05, 0.4, 0.7;
    const auto p = hy::params_from_design(d, 3);
    CHECK_NOTHROW(cpg::validate(p));
    CHECK(p.n == 3);
    CHECK(p.omega == 3.0);
    CHECK(p.epsilon[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(p.epsilon[1] == doctest::Approx(0.175).epsilon(1e-15));
    CHECK(p.epsilon[2] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.phase_lag == 0.6);
    CHECK(p.offset[0] == -0.05);
    CHECK(p.offset[2] == -0.05);
    CHECK(p.coupling_u == 0.4);
    CHECK(p.coupling_v == 0.7);

    // one joint takes the head epsilon
    CHECK(hy::params_from_design(d, 1).epsilon[0] ==
          doctest::Approx(0.1).epsilon(1e-15));

    CHECK_THROWS_AS(hy::params_from_design(VectorXd::Zero(6), 3),
                    dimension_error);
    d[0] = 0.5;  // below the slowest drive
    CHECK_THROWS_AS(hy::params_from_design(d, 3), validation_error);
    d[0] = 3.0;
    d[4] = 0.3;  // offset out of range
    CHECK_THROWS_AS(hy::params_from_design(d, 3), validation_error);
    CHECK_THROWS_AS(hy::params_from_design(d, 0), validation_error);
}

TEST_CASE("scenario and input validation") {
    hy::ScenarioSpec spec;
    CHECK_NOTHROW(hy::validate(spec));
    spec.U = -0.1;
    CHECK_THROWS_AS(hy::validate(spec), validation_error);
    spec = {};
    spec.flow_angle = 1.6;
    CHECK_THROWS_AS(hy::validate(spec), validation_error);
    spec = {};
    spec.kind = hy::Scenario::vortex;
    spec.cylinder_diameter = 0.0;
    CHECK_THROWS_AS(hy::validate(spec), validation_error);
    spec = {};
    spec.lambda_torque = -1.0;
    CHECK_THROWS_AS(hy::validate(spec), validation_error);
    spec = {};
    spec.constants.eta_v = 0.3;  // past the saving cap
    CHECK_THROWS_AS(hy::validate(spec), validation_error);

    const auto g = hy::BodyGeometry::preset(3);
    const auto p = cpg::Params::uniform(3, 2.0 * M_PI * 0.7, 0.04, 0.0);
    spec = {};
    spec.U = 0.0;  // valid spec, but nothing to normalise St against
    CHECK_THROWS_AS(hy::evaluate_scenario(spec, p, g), validation_error);
    CHECK_THROWS_AS(hy::derive_kinematics(p, g, 0.0), validation_error);
    CHECK_THROWS_AS(
        hy::derive_kinematics(cpg::Params::uniform(2, 4.0, 0.04, 0.0), g, 0.3),
        dimension_error);
}

}  // TEST_SUITE
