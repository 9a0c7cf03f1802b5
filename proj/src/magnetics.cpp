#include "spinewave/magnetics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spinewave::magnetics {

namespace {

constexpr double kForceScale = 6e-7;       // 3*mu0/(2*pi), mu0 = 4*pi*1e-7
constexpr double kContactFloor = 2e-4;     // m; faces touch, s^-4 stays finite
constexpr double kResidualTol = 1e-9;      // N*m
constexpr double kSweepTol = 1e-8;         // rad
constexpr int kMaxSweeps = 10000;

// Torque at a raw magnet deflection, no travel-stop check. The solver needs
// this past the stop: the exoskeleton pose and the servo command can disagree
// by more than one joint's travel.
double torque_at_deflection(const RibcageGeometry& g, double deflection) {
    const double pairs_per_side = g.magnets_per_joint / 4.0;
    const double shift = g.lever_arm * std::sin(deflection);
    const double s_squeezed = std::max(g.rail_gap - shift, kContactFloor);
    const double s_relaxed = std::max(g.rail_gap + shift, kContactFloor);
    const double f_squeezed =
        magnet_pair_force(g.magnet_moment, g.magnet_moment, s_squeezed);
    const double f_relaxed =
        magnet_pair_force(g.magnet_moment, g.magnet_moment, s_relaxed);
    return pairs_per_side * g.lever_arm * std::cos(deflection) *
           (f_relaxed - f_squeezed);
}

// One joint: root of magnetic + external torque over beta in [-limit, limit].
// The torque is monotone in beta below a quarter turn of deflection, so a
// same-sign bracket really means no equilibrium, not a missed crossing.
double solve_joint(const RibcageGeometry& g, double servo, double external,
                   double limit, StopPolicy stop, int joint) {
    const auto net = [&](double beta) {
        return torque_at_deflection(g, beta - servo) + external;
    };
    double a = -limit, b = limit;
    double fa = net(a);
    const double fb = net(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        if (stop == StopPolicy::clamp) return fa > 0.0 ? b : a;
        throw no_equilibrium_error(
            "magnetics: joint " + std::to_string(joint) +
            " finds no torque balance inside +/-" + fmt_g(limit, 6) +
            " rad (net " + fmt_g(fa, 6) + " N*m at the low stop, " +
            fmt_g(fb, 6) + " at the high stop)");
    }
    while (true) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;  // interval exhausted in fp
        const double fm = net(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    const double root = std::abs(net(a)) <= std::abs(net(b)) ? a : b;
    if (std::abs(net(root)) > kResidualTol)
        throw solver_error("magnetics: joint " + std::to_string(joint) +
                           " residual torque " + fmt_g(net(root), 6) +
                           " N*m exceeds the 1e-9 contract");
    return root;
}

}  // namespace

void validate(const RibcageGeometry& g) {
    if (g.n_joints < 1)
        throw validation_error("magnetics: n_joints must be positive");
    if (g.magnets_per_joint < 2 || g.magnets_per_joint % 2 != 0)
        throw validation_error(
            "magnetics: magnets_per_joint must be a positive even count");
    if (!std::isfinite(g.magnet_moment) || g.magnet_moment < 0.0)
        throw validation_error(
            "magnetics: magnet_moment must be finite and non-negative");
    if (!std::isfinite(g.rail_gap) || g.rail_gap <= 0.0)
        throw validation_error("magnetics: rail_gap must be positive");
    if (!std::isfinite(g.lever_arm) || g.lever_arm <= 0.0)
        throw validation_error("magnetics: lever_arm must be positive");
    if (!(g.max_angle_constrained > 0.0) ||
        !(g.max_angle_constrained < g.max_angle_free))
        throw validation_error(
            "magnetics: need 0 < max_angle_constrained < max_angle_free");
    // the rail model degenerates at a quarter turn (sin folds back)
    if (!(g.max_angle_free < 1.5707963267948966))
        throw validation_error(
            "magnetics: travel stops must sit below a quarter turn");
}

double max_bend_angle(const RibcageGeometry& g) {
    validate(g);
    return g.constrained ? g.max_angle_constrained : g.max_angle_free;
}

double magnet_pair_force(double moment1, double moment2, double separation) {
    if (!std::isfinite(moment1) || !std::isfinite(moment2))
        throw validation_error("magnetics: magnet moments must be finite");
    if (!(separation > 0.0))
        throw validation_error("magnetics: separation must be positive");
    const double s2 = separation * separation;
    return kForceScale * moment1 * moment2 / (s2 * s2);
}

double joint_torque(const RibcageGeometry& g, double angle) {
    validate(g);
    if (!std::isfinite(angle))
        throw validation_error("magnetics: bend angle must be finite");
    const double limit = max_bend_angle(g);
    if (std::abs(angle) >= limit)
        throw bend_limit_error("magnetics: bend of " + fmt_g(angle, 6) +
                               " rad is at or past the joint stop (" +
                               fmt_g(limit, 6) + " rad)");
    return torque_at_deflection(g, angle);
}

SpineConfiguration solve_passive_angles(const RibcageGeometry& g,
                                        const VectorXd& servo_angles,
                                        const VectorXd& external_torques,
                                        StopPolicy stop) {
    validate(g);
    if (servo_angles.size() != g.n_joints)
        throw dimension_error("magnetics: expected " +
                              std::to_string(g.n_joints) + " servo angles, got " +
                              std::to_string(servo_angles.size()));
    VectorXd external = external_torques;
    if (external.size() == 0) external = VectorXd::Zero(g.n_joints);
    if (external.size() != g.n_joints)
        throw dimension_error("magnetics: expected " +
                              std::to_string(g.n_joints) +
                              " external torques, got " +
                              std::to_string(external.size()));
    const double limit = max_bend_angle(g);
    for (int j = 0; j < g.n_joints; ++j) {
        if (!std::isfinite(servo_angles[j]) || std::abs(servo_angles[j]) > limit)
            throw validation_error("magnetics: servo angle for joint " +
                                   std::to_string(j) +
                                   " is outside the joint travel");
        if (!std::isfinite(external[j]))
            throw validation_error("magnetics: external torque for joint " +
                                   std::to_string(j) + " must be finite");
    }

    SpineConfiguration cfg;
    cfg.servo_angles = servo_angles;
    cfg.passive_angles = VectorXd::Zero(g.n_joints);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double change = 0.0;
        for (int j = 0; j < g.n_joints; ++j) {
            const double beta =
                solve_joint(g, servo_angles[j], external[j], limit, stop, j);
            change = std::max(change, std::abs(beta - cfg.passive_angles[j]));
            cfg.passive_angles[j] = beta;
        }
        if (change <= kSweepTol && sweep > 0) return cfg;
    }
    throw solver_error(
        "magnetics: passive-angle sweep did not settle in 1e4 passes");
}

void write_torque_csv(const RibcageGeometry& g, double lo, double hi, int n,
                      std::ostream& os) {
    if (n < 2) throw validation_error("magnetics: sweep needs >= 2 samples");
    if (!(lo < hi))
        throw validation_error("magnetics: sweep range must be increasing");
    os << "angle_rad,torque_Nm\n";
    for (int i = 0; i < n; ++i) {
        const double a = lo + (hi - lo) * i / static_cast<double>(n - 1);
        os << fmt_g(a, 17) << ',' << fmt_g(joint_torque(g, a), 17) << '\n';
    }
}

}  // namespace spinewave::magnetics
