#pragma once

#include <utility>

#include "spinewave/common.hpp"
#include "spinewave/cpg.hpp"

namespace spinewave::hydro {

// Swimmer geometry for the closed-form objectives: the rear of the body is a
// chain of equal flexible links, one oscillator per link; body_depth is the
// amplitude normaliser (the d in A/d).
struct BodyGeometry {
    double body_length = 0.725;  // m
    double body_depth = 0.10;    // m
    VectorXd link_lengths;       // m, head side first

    static BodyGeometry preset(int n_segments);  // 1, 3 or 5 equal links
};

void validate(const BodyGeometry& g);

enum class Scenario { thrust, sideflow, vortex, turning };

// Calibration knobs for the synthetic objectives. None of these is a
// measured quantity; they only shape the response surfaces.
struct Constants {
    double c_t1 = 6.0;      // thrust gain on St^2 * (A/d)
    double c_d0 = 0.12;     // base drag
    double c_d1 = 1.5;      // drag growth with (A/d)^2
    double c_m1 = 1.0;      // moment scale
    double st_m = 0.45;     // turning response rolls off past this St
    double eta_v = 0.29;    // energy saving at perfect frequency match
    double sigma_f = 0.1;   // Hz, width of the matching window
    double p0 = 1.0;        // power scale
    double kappa = 1.0;     // gait-offset leverage against side flow
    double thrust_band = 0.02;     // |C_T| tolerated while station keeping
    double thrust_penalty = 10.0;  // cost per unit of excess |C_T|
};

struct ScenarioSpec {
    Scenario kind = Scenario::thrust;
    double U = 0.3;                          // m/s free stream
    double flow_angle = 0.2617993877991494;  // rad; sideflow only (15 deg)
    double cylinder_diameter = 0.1;          // m; vortex only
    double lambda_torque = 1.0;              // sideflow moment weight
    // Strouhal convention: default peak-to-peak (f A_pp / U); set for the
    // half-amplitude variant, which simply halves every St entering a model.
    bool half_amplitude_st = false;
    Constants constants;
};

void validate(const ScenarioSpec& s);

struct SwimKinematics {
    double f = 0.0;         // Hz
    double A = 0.0;         // m, tail-tip half amplitude
    double A_pp = 0.0;      // m, peak to peak
    double St = 0.0;        // f * A_pp / U
    double a_over_d = 0.0;  // A_pp / body_depth
    double b_eff = 0.0;     // rad, mean tail-tip direction (signed)
};

// Lateral tail-tip position for one set of joint deflections: each link is
// bent by the running sum of the angles up to it.
double tail_tip_y(const VectorXd& joint_angles, const VectorXd& link_lengths);

// Runs the oscillator chain for 8 settle + 6 measured periods (dt divides
// the period exactly for f >= 0.5 Hz, so means are taken over whole cycles),
// drives each link by u_i + offset_i, and reads the swimming numbers off the
// tip series. A perfectly still gait comes back with f = St = A = 0.
SwimKinematics derive_kinematics(const cpg::Params& p, const BodyGeometry& geom,
                                 double U = 0.3);

// c_t1 * St^2 * (A/d) - c_d0 * (1 + c_d1 * (A/d)^2); negative = net drag.
double thrust_coefficient(double st, double a_over_d, const Constants& k = {});

// p0 * f^3 * A_pp^2, discounted by eta_v when f sits near the shedding
// frequency of the upstream cylinder.
double vortex_power(double f, double a_pp, double shedding_f,
                    const Constants& k = {});

// c_m1 * sin(b_eff) * St * exp(-(St/St_m)^2) * (A/d); the St factor peaks at
// St_m / sqrt(2), giving the turning objective an interior optimum.
double turning_moment(double b_eff, double st, double a_over_d,
                      const Constants& k = {});

struct ScenarioResult {
    double value = 0.0;  // what the optimizer sees
    SwimKinematics kin;
    double c_t = 0.0;
    double c_m = 0.0;
    double power = 0.0;
    double shedding_f = 0.0;
};

// thrust: value = C_T (maximise). sideflow: |C_T at the effective stream
// U cos(angle)| + lambda * |C_M|, where C_M = c_m1 (sin(angle) -
// kappa sin(b_eff)) (minimise). vortex: vortex power plus a penalty on
// |C_T| past the station-keeping band (minimise). turning: the turning
// moment (maximise).
ScenarioResult evaluate_scenario(const ScenarioSpec& spec, const cpg::Params& p,
                                 const BodyGeometry& geom);

inline double scenario_objective(const ScenarioSpec& spec, const cpg::Params& p,
                                 const BodyGeometry& geom) {
    return evaluate_scenario(spec, p, geom).value;
}

bool scenario_maximizes(Scenario kind);  // thrust and turning do

// The seven-entry design vector the optimizer works in: omega, epsilon at
// the head, epsilon at the tail (linear in between), phase lag, shared
// offset, u coupling, v coupling.
constexpr int kDesignDim = 7;

std::pair<VectorXd, VectorXd> design_bounds();
cpg::Params params_from_design(const VectorXd& design, int n_joints);

}  // namespace spinewave::hydro
