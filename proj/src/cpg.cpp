#include "spinewave/cpg.hpp"

#include <cmath>
#include <ostream>

namespace spinewave::cpg {

Params Params::uniform(int n, double omega, double epsilon, double offset) {
    Params p;
    p.n = n;
    p.omega = omega;
    p.epsilon = VectorXd::Constant(n, epsilon);
    p.offset = VectorXd::Constant(n, offset);
    return p;
}

void validate(const Params& p) {
    if (p.n < 1) throw validation_error("cpg: n must be >= 1");
    if (p.epsilon.size() != p.n)
        throw dimension_error("cpg: epsilon size != n");
    if (p.offset.size() != p.n) throw dimension_error("cpg: offset size != n");
    if (!(p.omega > 0.0) || !std::isfinite(p.omega))
        throw validation_error("cpg: omega must be positive");
    if (!(p.gain > 0.0) || !std::isfinite(p.gain))
        throw validation_error("cpg: gain must be positive");
    for (int i = 0; i < p.n; ++i) {
        if (!(p.epsilon[i] >= 0.0) || !std::isfinite(p.epsilon[i]))
            throw validation_error("cpg: epsilon must be >= 0");
        if (!std::isfinite(p.offset[i]))
            throw validation_error("cpg: offset must be finite");
    }
    if (!std::isfinite(p.phase_lag) || !std::isfinite(p.coupling_u) ||
        !std::isfinite(p.coupling_v))
        throw validation_error("cpg: coupling parameters must be finite");
}

State limit_cycle_state(const Params& p, double phase0) {
    State s{VectorXd(p.n), VectorXd(p.n)};
    for (int i = 0; i < p.n; ++i) {
        double r = std::sqrt(p.epsilon[i]);
        double ph = phase0 - i * p.phase_lag;
        s.u[i] = r * std::cos(ph);
        s.v[i] = p.offset[i] + r * std::sin(ph);
    }
    return s;
}

State derivative(const Params& p, const State& s) {
    if (s.u.size() != p.n || s.v.size() != p.n)
        throw dimension_error("cpg: state size != n");
    const double c = std::cos(p.phase_lag);
    const double sn = std::sin(p.phase_lag);
    const double k2 = p.gain * p.gain;
    State d{VectorXd(p.n), VectorXd(p.n)};
    for (int i = 0; i < p.n; ++i) {
        const double w = s.v[i] - p.offset[i];
        const double g2 = s.u[i] * s.u[i] + w * w;
        double du = k2 * s.u[i] * (p.epsilon[i] - g2) - p.omega * w;
        double dv = k2 * w * (p.epsilon[i] - g2) + p.omega * s.u[i];
        // Upstream state rotated by -phase_lag, downstream by +phase_lag:
        // the chain then locks at uniform adjacent lag phase_lag with the
        // intrinsic frequency unshifted.
        if (i > 0) {
            const double wp = s.v[i - 1] - p.offset[i - 1];
            du += p.coupling_u * s.u[i - 1] * c + p.coupling_v * wp * sn;
        }
        if (i + 1 < p.n) {
            const double wn = s.v[i + 1] - p.offset[i + 1];
            dv += p.coupling_u * s.u[i + 1] * sn + p.coupling_v * wn * c;
        }
        d.u[i] = du;
        d.v[i] = dv;
    }
    return d;
}

Trajectory simulate(const Params& p, const State& init, double duration,
                    double dt) {
    validate(p);
    if (init.u.size() != p.n || init.v.size() != p.n)
        throw dimension_error("cpg: initial state size != n");
    if (!(duration > 0.0) || !(dt > 0.0))
        throw validation_error("cpg: duration and dt must be positive");
    const auto steps = static_cast<Eigen::Index>(std::llround(duration / dt));
    if (steps < 1) throw validation_error("cpg: duration shorter than dt");

    Trajectory tr;
    tr.t.resize(steps + 1);
    tr.u.resize(steps + 1, p.n);
    tr.v.resize(steps + 1, p.n);

    State s = init;
    tr.t[0] = 0.0;
    tr.u.row(0) = s.u.transpose();
    tr.v.row(0) = s.v.transpose();

    for (Eigen::Index k = 1; k <= steps; ++k) {
        const State k1 = derivative(p, s);
        const State k2 = derivative(
            p, State{s.u + 0.5 * dt * k1.u, s.v + 0.5 * dt * k1.v});
        const State k3 = derivative(
            p, State{s.u + 0.5 * dt * k2.u, s.v + 0.5 * dt * k2.v});
        const State k4 =
            derivative(p, State{s.u + dt * k3.u, s.v + dt * k3.v});
        s.u += dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        if (!s.u.allFinite() || !s.v.allFinite())
            throw divergence_error("cpg: non-finite state at step " +
                                   std::to_string(k) + " (t = " +
                                   fmt_g(k * dt, 6) + " s)");
        tr.t[k] = k * dt;
        tr.u.row(k) = s.u.transpose();
        tr.v.row(k) = s.v.transpose();
    }
    return tr;
}

void write_csv(const Trajectory& tr, std::ostream& os) {
    const auto n = tr.u.cols();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i)
        os << ",u_" << (i + 1) << ",v_" << (i + 1);
    for (Eigen::Index i = 0; i < n; ++i) os << ",angle_" << (i + 1);
    os << "\n";
    for (Eigen::Index r = 0; r < tr.rows(); ++r) {
        os << fmt_g(tr.t[r], 9);
        for (Eigen::Index i = 0; i < n; ++i)
            os << ',' << fmt_g(tr.u(r, i), 9) << ',' << fmt_g(tr.v(r, i), 9);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << fmt_g(tr.u(r, i), 9);
        os << "\n";
    }
}

std::vector<double> upward_crossings(const VectorXd& t, const VectorXd& y,
                                     double level) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i + 1 < y.size(); ++i) {
        if (y[i] < level && y[i + 1] >= level) {
            const double f = (level - y[i]) / (y[i + 1] - y[i]);
            out.push_back(t[i] + f * (t[i + 1] - t[i]));
        }
    }
    return out;
}

double series_frequency(const VectorXd& t, const VectorXd& y) {
    const auto cr = upward_crossings(t, y, y.mean());
    if (cr.size() < 2)
        throw insufficient_data_error(
            "series_frequency: fewer than 2 upward crossings");
    return (static_cast<double>(cr.size()) - 1.0) / (cr.back() - cr.front());
}

double pair_phase_lag(const VectorXd& t, const VectorXd& ya, const VectorXd& yb,
                      double frequency) {
    const Eigen::Index len = t.size();
    if (ya.size() != len || yb.size() != len)
        throw dimension_error("pair_phase_lag: series length mismatch");
    if (len < 4 || !(frequency > 0.0))
        throw insufficient_data_error("pair_phase_lag: series too short");
    const double dt = (t[len - 1] - t[0]) / static_cast<double>(len - 1);
    Eigen::Index m = static_cast<Eigen::Index>(
        std::llround(0.5 / (frequency * dt)));  // half a period in samples
    if (m > (len - 2) / 3) m = (len - 2) / 3;
    if (m < 1)
        throw insufficient_data_error("pair_phase_lag: sampling too coarse");

    const Eigen::Index lo = m;
    Eigen::Index hi = len - 1 - m;  // inclusive window
    // trim to a whole number of periods; a fractional cycle biases the peak
    const double samples_per_period = 1.0 / (frequency * dt);
    const auto whole = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(hi - lo + 1) / samples_per_period));
    if (whole >= 1)
        hi = lo +
             static_cast<Eigen::Index>(
                 std::llround(whole * samples_per_period)) -
             1;
    if (hi >= len - m) hi = len - 1 - m;
    const Eigen::Index wn = hi - lo + 1;
    const double ma = ya.segment(lo, wn).mean();
    const double mb = yb.segment(lo, wn).mean();

    VectorXd corr(2 * m + 1);
    for (Eigen::Index s = -m; s <= m; ++s) {
        double acc = 0.0;
        for (Eigen::Index i = lo; i <= hi; ++i)
            acc += (ya[i] - ma) * (yb[i + s] - mb);
        corr[s + m] = acc;
    }
    Eigen::Index best = 0;
    corr.maxCoeff(&best);

    double shift = static_cast<double>(best - m);
    if (best > 0 && best + 1 < corr.size()) {
        const double c0 = corr[best - 1], c1 = corr[best], c2 = corr[best + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom < 0.0) {
            double d = 0.5 * (c0 - c2) / denom;
            if (d > 0.5) d = 0.5;
            if (d < -0.5) d = -0.5;
            shift += d;
        }
    }
    double phase = 6.283185307179586 * frequency * shift * dt;
    while (phase > 3.141592653589793) phase -= 6.283185307179586;
    while (phase <= -3.141592653589793) phase += 6.283185307179586;
    return phase;
}

Metrics extract_metrics(const Trajectory& tr, double settle_fraction) {
    if (!(settle_fraction >= 0.0) || settle_fraction >= 1.0)
        throw validation_error("extract_metrics: settle_fraction outside [0,1)");
    const Eigen::Index rows = tr.rows();
    if (rows < 2)
        throw insufficient_data_error("extract_metrics: trajectory too short");
    const auto start = static_cast<Eigen::Index>(
        std::floor(settle_fraction * static_cast<double>(rows - 1)));
    const Eigen::Index wn = rows - start;
    if (wn < 4)
        throw insufficient_data_error("extract_metrics: window too short");

    const VectorXd tw = tr.t.segment(start, wn);
    const MatrixXd uw = tr.u.middleRows(start, wn);
    const MatrixXd vw = tr.v.middleRows(start, wn);
    const auto n = uw.cols();

    Metrics m;
    m.amplitude.resize(n);
    m.offset.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        m.amplitude[c] = 0.5 * (uw.col(c).maxCoeff() - uw.col(c).minCoeff());
        if (upward_crossings(tw, uw.col(c), uw.col(c).mean()).size() < 2)
            throw insufficient_data_error(
                "extract_metrics: fewer than 2 upward crossings on channel " +
                std::to_string(c + 1));
    }
    m.frequency = series_frequency(tw, uw.col(0));

    // average v over whole periods only; a fractional cycle biases the mean
    const double dt = (tw[wn - 1] - tw[0]) / static_cast<double>(wn - 1);
    const double spp = 1.0 / (m.frequency * dt);
    auto cycles = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(wn) / spp));
    Eigen::Index mn = wn;
    if (cycles >= 1) {
        mn = static_cast<Eigen::Index>(std::llround(cycles * spp));
        if (mn > wn) mn = wn;
    }
    for (Eigen::Index c = 0; c < n; ++c)
        m.offset[c] = vw.col(c).head(mn).mean();
    m.phase_lag.resize(n > 0 ? n - 1 : 0);
    for (Eigen::Index c = 0; c + 1 < n; ++c)
        m.phase_lag[c] =
            pair_phase_lag(tw, uw.col(c), uw.col(c + 1), m.frequency);
    return m;
}

}  // namespace spinewave::cpg
