#pragma once

#include <iosfwd>

#include "spinewave/common.hpp"

namespace spinewave::cpg {

// Chain of coupled Hopf oscillators, one per actuated joint. Nearest-neighbour
// coupling is unidirectional in u (from the previous oscillator) and in v
// (from the next one), which locks a travelling wave with adjacent lag
// phase_lag once the cycle settles.
struct Params {
    int n = 3;
    double omega = 4.39822971502571;  // rad/s (0.7 Hz)
    VectorXd epsilon;                 // squared limit-cycle radius, per oscillator
    VectorXd offset;                  // centre of the v channel, per oscillator
    double gain = 1.0;                // convergence gain onto the cycle
    double phase_lag = 0.5235987755982988;  // target adjacent lag, rad
    double coupling_u = 0.5;
    double coupling_v = 0.5;

    static Params uniform(int n, double omega, double epsilon, double offset = 0.0);
};

void validate(const Params& p);  // throws validation_error

struct State {
    VectorXd u, v;
};

// Oscillator i rides a circle of radius sqrt(epsilon_i) centred at (0, offset_i).
// phase0 is the head oscillator's phase; each later one trails by phase_lag.
State limit_cycle_state(const Params& p, double phase0 = 0.0);

State derivative(const Params& p, const State& s);

struct Trajectory {
    VectorXd t;
    MatrixXd u, v;  // row per sample, column per oscillator

    Eigen::Index rows() const { return t.size(); }
};

// Classical fixed-step RK4. Records every step including t = 0.
Trajectory simulate(const Params& p, const State& init, double duration,
                    double dt = 1e-3);

// Joint command: the u channel directly.
inline MatrixXd joint_angles(const Trajectory& tr) { return tr.u; }

// t,u_1,v_1,...,u_N,v_N,angle_1,...,angle_N with 9 significant digits
void write_csv(const Trajectory& tr, std::ostream& os);

struct Metrics {
    VectorXd amplitude;  // half peak-to-peak of u, per channel
    double frequency;    // Hz, from mean upward mean-crossing interval
    VectorXd phase_lag;  // adjacent-pair lag, rad, positive = next channel trails
    VectorXd offset;     // mean of v, per channel
};

// Analyses the tail of a trajectory, skipping the first settle_fraction of it.
// Wants at least ~3 full periods after the skip; fewer than 2 upward crossings
// on any channel raises insufficient_data_error.
Metrics extract_metrics(const Trajectory& tr, double settle_fraction = 0.5);

// Series helpers shared with the metrics code; usable on any sampled signal.
std::vector<double> upward_crossings(const VectorXd& t, const VectorXd& y,
                                     double level);
double series_frequency(const VectorXd& t, const VectorXd& y);
// Lag of yb behind ya in radians, from the cross-correlation peak (parabolic
// refinement); sin(wt) against sin(wt - pi/4) gives +pi/4.
double pair_phase_lag(const VectorXd& t, const VectorXd& ya, const VectorXd& yb,
                      double frequency);

}  // namespace spinewave::cpg
