#include "spinewave/hydro.hpp"

#include <algorithm>
#include <cmath>

namespace spinewave::hydro {

BodyGeometry BodyGeometry::preset(int n_segments) {
    if (n_segments != 1 && n_segments != 3 && n_segments != 5)
        throw validation_error("hydro: presets come in 1, 3 or 5 segments");
    BodyGeometry g;
    // the rear 40% of the body is the flexible part
    const double tail = 0.4 * g.body_length;
    g.link_lengths =
        VectorXd::Constant(n_segments, tail / static_cast<double>(n_segments));
    return g;
}

void validate(const BodyGeometry& g) {
    if (!std::isfinite(g.body_length) || !(g.body_length > 0.0))
        throw validation_error("hydro: body_length must be positive");
    if (!std::isfinite(g.body_depth) || !(g.body_depth > 0.0))
        throw validation_error("hydro: body_depth must be positive");
    if (g.link_lengths.size() < 1)
        throw validation_error("hydro: need at least one link");
    for (Eigen::Index i = 0; i < g.link_lengths.size(); ++i)
        if (!std::isfinite(g.link_lengths[i]) || !(g.link_lengths[i] > 0.0))
            throw validation_error("hydro: link lengths must be positive");
    if (g.link_lengths.sum() > g.body_length * (1.0 + 1e-12))
        throw validation_error("hydro: links exceed the body length");
}

void validate(const ScenarioSpec& s) {
    if (!std::isfinite(s.U) || s.U < 0.0)
        throw validation_error("hydro: free stream U must be >= 0");
    if (!std::isfinite(s.flow_angle) ||
        !(std::abs(s.flow_angle) < 1.5707963267948966))
        throw validation_error(
            "hydro: flow_angle must sit inside +/- a quarter turn");
    if (s.kind == Scenario::vortex &&
        (!std::isfinite(s.cylinder_diameter) || !(s.cylinder_diameter > 0.0)))
        throw validation_error("hydro: cylinder_diameter must be positive");
    if (!std::isfinite(s.lambda_torque) || s.lambda_torque < 0.0)
        throw validation_error("hydro: lambda_torque must be >= 0");
    const Constants& k = s.constants;
    const bool finite = std::isfinite(k.c_t1) && std::isfinite(k.c_d0) &&
                        std::isfinite(k.c_d1) && std::isfinite(k.c_m1) &&
                        std::isfinite(k.kappa);
    if (!finite || k.c_t1 < 0.0 || k.c_d0 < 0.0 || k.c_d1 < 0.0)
        throw validation_error("hydro: thrust constants out of range");
    if (!std::isfinite(k.st_m) || !(k.st_m > 0.0))
        throw validation_error("hydro: st_m must be positive");
    if (!std::isfinite(k.eta_v) || k.eta_v < 0.0 || k.eta_v > 0.29)
        throw validation_error("hydro: eta_v must lie in [0, 0.29]");
    if (!std::isfinite(k.sigma_f) || !(k.sigma_f > 0.0))
        throw validation_error("hydro: sigma_f must be positive");
    if (!std::isfinite(k.p0) || k.p0 < 0.0)
        throw validation_error("hydro: p0 must be >= 0");
    if (!std::isfinite(k.thrust_band) || k.thrust_band < 0.0 ||
        !std::isfinite(k.thrust_penalty) || k.thrust_penalty < 0.0)
        throw validation_error("hydro: station-keeping knobs must be >= 0");
}

double tail_tip_y(const VectorXd& joint_angles, const VectorXd& link_lengths) {
    if (joint_angles.size() != link_lengths.size())
        throw dimension_error("hydro: one joint angle per link required");
    double phi = 0.0, y = 0.0;
    for (Eigen::Index j = 0; j < joint_angles.size(); ++j) {
        phi += joint_angles[j];
        y += link_lengths[j] * std::sin(phi);
    }
    return y;
}

SwimKinematics derive_kinematics(const cpg::Params& p, const BodyGeometry& geom,
                                 double U) {
    cpg::validate(p);
    validate(geom);
    if (p.n != geom.link_lengths.size())
        throw dimension_error("hydro: one oscillator per link required");
    if (!std::isfinite(U) || !(U > 0.0))
        throw validation_error("hydro: kinematics need a positive free stream");

    const double period = 6.283185307179586 / p.omega;
    const double dt = std::min(2e-3, period / 1000.0);
    const int settle = 8, measure = 6;
    const auto tr = cpg::simulate(p, cpg::limit_cycle_state(p),
                                  (settle + measure) * period, dt);

    // Drop the last sample: when dt divides the period the window then covers
    // whole cycles exactly and the deflection mean carries no phase bias.
    auto i0 = static_cast<Eigen::Index>(std::ceil(settle * period / dt - 1e-9));
    const Eigen::Index i1 = tr.rows() - 2;
    if (i0 < 0) i0 = 0;
    if (i1 - i0 + 1 < 4)
        throw insufficient_data_error("hydro: measuring window too short");
    const Eigen::Index wn = i1 - i0 + 1;

    VectorXd y(wn);
    double direction_sum = 0.0;
    VectorXd deflection(p.n);
    for (Eigen::Index i = 0; i < wn; ++i) {
        deflection = tr.u.row(i0 + i).transpose() + p.offset;
        y[i] = tail_tip_y(deflection, geom.link_lengths);
        direction_sum += deflection.sum();
    }

    SwimKinematics kin;
    kin.b_eff = direction_sum / static_cast<double>(wn);
    kin.A_pp = y.maxCoeff() - y.minCoeff();
    kin.A = 0.5 * kin.A_pp;
    kin.a_over_d = kin.A_pp / geom.body_depth;
    if (kin.A_pp > 0.0) {
        kin.f = cpg::series_frequency(tr.t.segment(i0, wn), y);
        kin.St = kin.f * kin.A_pp / U;
    }
    return kin;
}

double thrust_coefficient(double st, double a_over_d, const Constants& k) {
    if (!std::isfinite(st) || st < 0.0 || !std::isfinite(a_over_d) ||
        a_over_d < 0.0)
        throw validation_error("hydro: St and A/d must be non-negative");
    return k.c_t1 * st * st * a_over_d -
           k.c_d0 * (1.0 + k.c_d1 * a_over_d * a_over_d);
}

double vortex_power(double f, double a_pp, double shedding_f,
                    const Constants& k) {
    if (!std::isfinite(f) || f < 0.0 || !std::isfinite(a_pp) || a_pp < 0.0)
        throw validation_error("hydro: f and A_pp must be non-negative");
    if (!std::isfinite(shedding_f) || !(shedding_f > 0.0))
        throw validation_error("hydro: shedding frequency must be positive");
    const double miss = (f - shedding_f) / k.sigma_f;
    return k.p0 * f * f * f * a_pp * a_pp *
           (1.0 - k.eta_v * std::exp(-miss * miss));
}

double turning_moment(double b_eff, double st, double a_over_d,
                      const Constants& k) {
    if (!std::isfinite(b_eff) || !std::isfinite(st) || st < 0.0 ||
        !std::isfinite(a_over_d) || a_over_d < 0.0)
        throw validation_error("hydro: bad turning inputs");
    const double ratio = st / k.st_m;
    return k.c_m1 * std::sin(b_eff) * st * std::exp(-ratio * ratio) * a_over_d;
}

ScenarioResult evaluate_scenario(const ScenarioSpec& spec, const cpg::Params& p,
                                 const BodyGeometry& geom) {
    validate(spec);
    if (!(spec.U > 0.0))
        throw validation_error("hydro: scenario evaluation needs U > 0");
    const Constants& k = spec.constants;

    ScenarioResult r;
    r.kin = derive_kinematics(p, geom, spec.U);
    const double st_scale = spec.half_amplitude_st ? 0.5 : 1.0;
    switch (spec.kind) {
        case Scenario::thrust:
            r.c_t = thrust_coefficient(st_scale * r.kin.St, r.kin.a_over_d, k);
            r.value = r.c_t;
            break;
        case Scenario::sideflow: {
            // the stream component along the body shrinks with the tilt
            const double u_eff = spec.U * std::cos(spec.flow_angle);
            const double st_eff = st_scale * r.kin.f * r.kin.A_pp / u_eff;
            r.c_t = thrust_coefficient(st_eff, r.kin.a_over_d, k);
            r.c_m = k.c_m1 * (std::sin(spec.flow_angle) -
                              k.kappa * std::sin(r.kin.b_eff));
            r.value = std::abs(r.c_t) + spec.lambda_torque * std::abs(r.c_m);
            break;
        }
        case Scenario::vortex: {
            r.shedding_f = 0.2 * spec.U / spec.cylinder_diameter;
            r.power = vortex_power(r.kin.f, r.kin.A_pp, r.shedding_f, k);
            r.c_t = thrust_coefficient(st_scale * r.kin.St, r.kin.a_over_d, k);
            r.value = r.power + k.thrust_penalty *
                                    std::max(0.0, std::abs(r.c_t) - k.thrust_band);
            break;
        }
        case Scenario::turning:
            r.c_m = turning_moment(r.kin.b_eff, st_scale * r.kin.St,
                                   r.kin.a_over_d, k);
            r.value = r.c_m;
            break;
        default:
            throw validation_error("hydro: unknown scenario kind");
    }
    return r;
}

bool scenario_maximizes(Scenario kind) {
    return kind == Scenario::thrust || kind == Scenario::turning;
}

std::pair<VectorXd, VectorXd> design_bounds() {
    VectorXd lo(kDesignDim), hi(kDesignDim);
    lo << 1.2566370614359172, 0.0, 0.0, -1.5, -0.2, 0.0, 0.0;  // 0.2 Hz
    hi << 9.42477796076938, 0.25, 0.25, 1.5, 0.2, 1.0, 1.0;    // 1.5 Hz
    return {lo, hi};
}

cpg::Params params_from_design(const VectorXd& design, int n_joints) {
    if (design.size() != kDesignDim)
        throw dimension_error("hydro: the design vector has " +
                              std::to_string(kDesignDim) + " entries");
    if (n_joints < 1)
        throw validation_error("hydro: need at least one joint");
    const auto [lo, hi] = design_bounds();
    for (int i = 0; i < kDesignDim; ++i)
        if (!std::isfinite(design[i]) || design[i] < lo[i] - 1e-9 ||
            design[i] > hi[i] + 1e-9)
            throw validation_error("hydro: design entry " +
                                   std::to_string(i + 1) +
                                   " is outside its bounds");

    cpg::Params p;
    p.n = n_joints;
    p.omega = design[0];
    p.epsilon.resize(n_joints);
    for (int j = 0; j < n_joints; ++j) {
        const double s =
            n_joints > 1 ? j / (n_joints - 1.0) : 0.0;  // head -> tail
        p.epsilon[j] = std::max(0.0, design[1] + (design[2] - design[1]) * s);
    }
    p.phase_lag = design[3];
    p.offset = VectorXd::Constant(n_joints, design[4]);
    p.coupling_u = design[5];
    p.coupling_v = design[6];
    return p;
}

}  // namespace spinewave::hydro
