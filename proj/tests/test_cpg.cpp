#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spinewave/cpg.hpp"

using namespace spinewave;
using Eigen::VectorXd;

namespace {

// independent single-oscillator integrator (midpoint rule, fine step) used as
// the oracle for limit-cycle attraction; deliberately not the library code path
struct Osc {
    double eps, omega, b, k;
};
static void osc_rhs(const Osc& o, double u, double v, double& du, double& dv) {
    const double w = v - o.b;
    const double g2 = u * u + w * w;
    du = o.k * o.k * u * (o.eps - g2) - o.omega * w;
    dv = o.k * o.k * w * (o.eps - g2) + o.omega * u;
}
static void midpoint_run(const Osc& o, double& u, double& v, double duration,
                         double dt) {
    const long steps = std::lround(duration / dt);
    for (long s = 0; s < steps; ++s) {
        double du, dv;
        osc_rhs(o, u, v, du, dv);
        double um = u + 0.5 * dt * du, vm = v + 0.5 * dt * dv;
        osc_rhs(o, um, vm, du, dv);
        u += dt * du;
        v += dt * dv;
    }
}

}  // namespace

TEST_SUITE("cpg") {

TEST_CASE("derivative fixed point at origin") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.0);
    p.coupling_u = p.coupling_v = 0.0;
    auto d = cpg::derivative(p, {VectorXd::Zero(1), VectorXd::Zero(1)});
    CHECK(d.u[0] == 0.0);
    CHECK(d.v[0] == 0.0);
}

TEST_CASE("derivative on the offset limit cycle") {
    // on the cycle the radial term vanishes and only rotation remains
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.3);
    cpg::State s{VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 0.3)};
    auto d = cpg::derivative(p, s);
    CHECK(d.u[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.v[0] == doctest::Approx(2 * M_PI).epsilon(1e-15));
}

TEST_CASE("zero coupling reduces to independent oscillators") {
    cpg::Params two = cpg::Params::uniform(2, 5.0, 0.8, 0.1);
    two.coupling_u = two.coupling_v = 0.0;
    cpg::Params one = cpg::Params::uniform(1, 5.0, 0.8, 0.1);
    one.coupling_u = one.coupling_v = 0.0;

    cpg::State s2{VectorXd(2), VectorXd(2)};
    s2.u << 0.4, -0.7;
    s2.v << 0.2, 0.9;
    auto d2 = cpg::derivative(two, s2);
    for (int i = 0; i < 2; ++i) {
        cpg::State s1{VectorXd::Constant(1, s2.u[i]),
                      VectorXd::Constant(1, s2.v[i])};
        auto d1 = cpg::derivative(one, s1);
        CHECK(d2.u[i] == d1.u[0]);
        CHECK(d2.v[i] == d1.v[0]);
    }
}

TEST_CASE("parameter and state validation") {
    cpg::Params p = cpg::Params::uniform(2, 2.0, 1.0, 0.0);
    CHECK_THROWS_AS(
        cpg::derivative(p, {VectorXd::Zero(3), VectorXd::Zero(3)}),
        dimension_error);

    cpg::Params bad = p;
    bad.epsilon = VectorXd::Zero(5);
    CHECK_THROWS_AS(cpg::validate(bad), dimension_error);
    bad = p;
    bad.epsilon[0] = -0.1;
    CHECK_THROWS_AS(cpg::validate(bad), validation_error);
    bad = p;
    bad.gain = 0.0;
    CHECK_THROWS_AS(cpg::validate(bad), validation_error);
    bad = p;
    bad.omega = -1.0;
    CHECK_THROWS_AS(cpg::validate(bad), validation_error);
    bad = p;
    bad.n = 0;
    CHECK_THROWS_AS(cpg::validate(bad), validation_error);

    CHECK_THROWS_AS(cpg::simulate(p, cpg::limit_cycle_state(p), 1.0, -1e-3),
                    validation_error);
    CHECK_THROWS_AS(cpg::simulate(p, cpg::limit_cycle_state(p), 1e-5, 1e-3),
                    validation_error);
}

TEST_CASE("limit cycle attraction matches fine-step oracle") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.0);
    cpg::State s0{VectorXd::Constant(1, 0.1), VectorXd::Zero(1)};
    auto tr = cpg::simulate(p, s0, 10.0, 1e-3);
    const double u = tr.u(tr.rows() - 1, 0), v = tr.v(tr.rows() - 1, 0);
    const double gamma = std::hypot(u, v);
    CHECK(std::abs(gamma - 1.0) <= 1e-3);

    double uo = 0.1, vo = 0.0;
    midpoint_run({1.0, 2 * M_PI, 0.0, 1.0}, uo, vo, 10.0, 1e-5);
    CHECK(std::abs(std::hypot(uo, vo) - gamma) <= 1e-6);
    CHECK(u == doctest::Approx(uo).epsilon(1e-5));
    CHECK(v == doctest::Approx(vo).epsilon(1e-5));
}

TEST_CASE("steady period equals 2*pi/omega within 1 percent") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.0);
    cpg::State s0{VectorXd::Constant(1, 0.1), VectorXd::Zero(1)};
    auto tr = cpg::simulate(p, s0, 10.0, 1e-3);
    auto m = cpg::extract_metrics(tr, 0.5);
    CHECK(m.frequency == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("offset limit cycle centred at b") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.3);
    cpg::State s0{VectorXd::Constant(1, 0.5), VectorXd::Constant(1, -0.2)};
    auto tr = cpg::simulate(p, s0, 12.0, 1e-3);
    // mean of v over the final full cycle
    const auto rows = tr.rows();
    const auto per_cycle = static_cast<Eigen::Index>(std::lround(1.0 / 1e-3));
    const double mean_v = tr.v.col(0).tail(per_cycle).mean();
    CHECK(mean_v == doctest::Approx(0.3).epsilon(1e-3 / 0.3));
    CHECK(std::abs(mean_v - 0.3) <= 1e-3);
    (void)rows;
}

TEST_CASE("radius converges to sqrt(epsilon) for random offsets and gains") {
    const double cases[][4] = {
        // eps, b, k, gamma0
        {0.49, -0.4, 1.0, 2.0},
        {2.25, 0.8, 0.7, 0.05},
        {1.00, 0.0, 1.5, 3.0},
    };
    for (auto& c : cases) {
        cpg::Params p = cpg::Params::uniform(1, 4.0, c[0], c[1]);
        p.gain = c[2];
        cpg::State s0{VectorXd::Constant(1, c[3]),
                      VectorXd::Constant(1, c[1])};
        const double horizon = 25.0 / (p.gain * p.gain * c[0]);
        auto tr = cpg::simulate(p, s0, horizon, 1e-3);
        const double u = tr.u(tr.rows() - 1, 0);
        const double w = tr.v(tr.rows() - 1, 0) - c[1];
        CHECK(std::abs(std::hypot(u, w) - std::sqrt(c[0])) <= 1e-3);
    }
}

TEST_CASE("divergence raises an error naming the step") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 100.0, 0.0);
    p.gain = 10.0;
    cpg::State s0{VectorXd::Constant(1, 50.0), VectorXd::Zero(1)};
    CHECK_THROWS_AS(cpg::simulate(p, s0, 1.0, 0.1), divergence_error);
    try {
        cpg::simulate(p, s0, 1.0, 0.1);
    } catch (const divergence_error& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("integrator shows fourth-order convergence") {
    cpg::Params p = cpg::Params::uniform(1, 2 * M_PI, 1.0, 0.0);
    cpg::State s0{VectorXd::Constant(1, 0.5), VectorXd::Constant(1, 0.2)};
    auto term = [&](double dt) {
        auto tr = cpg::simulate(p, s0, 1.0, dt);
        return std::pair<double, double>{tr.u(tr.rows() - 1, 0),
                                         tr.v(tr.rows() - 1, 0)};
    };
    auto [u1, v1] = term(4e-3);
    auto [u2, v2] = term(2e-3);
    auto [u3, v3] = term(1e-3);
    const double e1 = std::hypot(u1 - u2, v1 - v2);
    const double e2 = std::hypot(u2 - u3, v2 - v3);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.5);
}

TEST_CASE("metrics on synthetic signals") {
    const int n = 20001;
    cpg::Trajectory tr;
    tr.t = VectorXd::LinSpaced(n, 0.0, 20.0);

    SUBCASE("single 0.7 Hz channel") {
        tr.u.resize(n, 1);
        tr.v = Eigen::MatrixXd::Zero(n, 1);
        for (int i = 0; i < n; ++i)
            tr.u(i, 0) = std::sin(2 * M_PI * 0.7 * tr.t[i]);
        auto m = cpg::extract_metrics(tr, 0.0);
        CHECK(m.frequency == doctest::Approx(0.7).epsilon(0.005));
        CHECK(m.amplitude[0] == doctest::Approx(1.0).epsilon(1e-3));
    }

    SUBCASE("constant channel has amplitude 0 and no frequency") {
        tr.u = Eigen::MatrixXd::Constant(n, 1, 0.2);
        tr.v = Eigen::MatrixXd::Zero(n, 1);
        CHECK(0.5 * (tr.u.col(0).maxCoeff() - tr.u.col(0).minCoeff()) == 0.0);
        CHECK_THROWS_AS(cpg::extract_metrics(tr, 0.0),
                        insufficient_data_error);
    }

    SUBCASE("constructed quarter-period shift") {
        tr.u.resize(n, 2);
        tr.v = Eigen::MatrixXd::Zero(n, 2);
        const double w = 2 * M_PI * 1.1;
        for (int i = 0; i < n; ++i) {
            tr.u(i, 0) = std::sin(w * tr.t[i]);
            tr.u(i, 1) = std::sin(w * tr.t[i] - M_PI / 4);
        }
        auto m = cpg::extract_metrics(tr, 0.0);
        CHECK(std::abs(m.phase_lag[0] - M_PI / 4) <= 0.01);
    }
}

TEST_CASE("coupled chain locks to the commanded lag") {
    for (int n : {3, 5}) {
        cpg::Params p = cpg::Params::uniform(n, 2 * M_PI * 0.7, 1.0, 0.0);
        auto tr = cpg::simulate(p, cpg::limit_cycle_state(p), 30.0, 1e-3);
        auto m = cpg::extract_metrics(tr, 0.5);
        for (Eigen::Index i = 0; i < m.phase_lag.size(); ++i)
            CHECK(std::abs(m.phase_lag[i] - p.phase_lag) <= 0.05);
        CHECK(m.frequency == doctest::Approx(0.7).epsilon(0.01));
    }
}

TEST_CASE("chain offsets follow b") {
    cpg::Params p = cpg::Params::uniform(3, 2 * M_PI * 0.7, 0.25, 0.0);
    p.offset << -0.1, 0.05, 0.2;
    auto tr = cpg::simulate(p, cpg::limit_cycle_state(p), 30.0, 1e-3);
    auto m = cpg::extract_metrics(tr, 0.5);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(m.offset[i] - p.offset[i]) <= 1e-3);
}

TEST_CASE("trajectory csv layout") {
    cpg::Params p = cpg::Params::uniform(2, 2 * M_PI, 1.0, 0.0);
    auto tr = cpg::simulate(p, cpg::limit_cycle_state(p), 0.01, 1e-3);
    std::ostringstream os;
    cpg::write_csv(tr, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,u_1,v_1,u_2,v_2,angle_1,angle_2");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 11);  // 10 steps plus the initial sample

    // angle columns replicate u columns
    std::istringstream is2(os.str());
    std::getline(is2, line);
    std::getline(is2, line);
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    CHECK(cells[1] == cells[5]);
    CHECK(cells[3] == cells[6]);
}

}  // TEST_SUITE
