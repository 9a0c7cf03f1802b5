#pragma once

#include <iosfwd>

#include "spinewave/common.hpp"

namespace spinewave::magnetics {

// Passive exoskeleton joint held by opposing permanent magnets: each joint
// carries magnets_per_joint magnets grouped into repelling pairs, split
// evenly between two rails at +/- lever_arm from the hinge axis. Bending
// squeezes one rail's pairs and relaxes the other's, so the force imbalance
// re-centres the joint (a magnetic spring).
struct RibcageGeometry {
    int n_joints = 3;
    int magnets_per_joint = 8;      // even; pairs split across the two rails
    double magnet_moment = 0.0725;  // A*m^2 per magnet (N52, 4 mm x 5 mm)
    double rail_gap = 0.008;        // m, face separation at zero bend
    double lever_arm = 0.010;       // m, rail offset from the hinge axis
    bool constrained = true;        // rigid constraint bar present
    double max_angle_constrained = 0.5235987755982988;  // rad
    double max_angle_free = 0.8726646259971648;         // rad
};

void validate(const RibcageGeometry& g);  // throws validation_error

// Travel stop for this geometry: the constrained or the free limit.
double max_bend_angle(const RibcageGeometry& g);

// Repulsion between two coaxial anti-aligned point dipoles, N (positive =
// repulsive). 3 mu0 m1 m2 / (2 pi s^4). Throws on separation <= 0.
double magnet_pair_force(double moment1, double moment2, double separation);

// Net magnetic torque about one joint axis at the given bend angle, N*m.
// Restoring: negative for positive bend. The rail separations are
// gap -/+ lever_arm*sin(angle), floored at 0.2 mm (face contact).
// |angle| at or past the travel stop throws bend_limit_error.
double joint_torque(const RibcageGeometry& g, double angle);

// What to do when a joint's net torque never changes sign inside its travel:
// strict raises no_equilibrium_error; clamp parks the joint on the stop the
// torque pushes it against (how an unmagnetised chain behaves under load).
enum class StopPolicy { strict, clamp };

struct SpineConfiguration {
    VectorXd servo_angles;    // endoskeleton command per joint, rad
    VectorXd passive_angles;  // solved exoskeleton pose per joint, rad
};

// Quasi-static pose of the exoskeleton chain: joint i settles where the
// magnetic torque at deflection (passive - servo) balances the external
// torque on that joint. Bracketed bisection per joint, |net torque| <= 1e-9;
// the chain is swept Gauss-Seidel style until no angle moves by > 1e-8 rad.
// external_torques may be empty (treated as all zero). Throws
// dimension_error on size mismatches, validation_error for servo commands
// past the stop, and no_equilibrium_error per StopPolicy.
SpineConfiguration solve_passive_angles(const RibcageGeometry& g,
                                        const VectorXd& servo_angles,
                                        const VectorXd& external_torques,
                                        StopPolicy stop = StopPolicy::strict);

// angle_rad,torque_Nm over an inclusive linspace sweep; n >= 2 samples.
void write_torque_csv(const RibcageGeometry& g, double lo, double hi, int n,
                      std::ostream& os);

}  // namespace spinewave::magnetics
