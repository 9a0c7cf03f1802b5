#pragma once

#include <algorithm>
#include <functional>

#include "spinewave/common.hpp"

namespace spinewave::opt {

struct NmResult {
    VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex restricted to a box: candidate points are clamped onto the
// box before evaluation and charged a quadratic penalty for the excursion, so
// the simplex cannot stall on a flat outside region.
inline NmResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                            const VectorXd& x0, const VectorXd& lo,
                            const VectorXd& hi, double initial_step,
                            int max_iters, double f_tol = 1e-10,
                            double x_tol = 1e-9) {
    const int n = static_cast<int>(x0.size());
    auto clamp = [&](const VectorXd& x) {
        return x.cwiseMax(lo).cwiseMin(hi).eval();
    };
    auto eval = [&](const VectorXd& x) {
        const VectorXd c = clamp(x);
        double pen = (x - c).squaredNorm();
        return f(c) + 10.0 * pen;
    };

    std::vector<VectorXd> xs(n + 1);
    std::vector<double> fs(n + 1);
    xs[0] = clamp(x0);
    fs[0] = eval(xs[0]);
    for (int i = 0; i < n; ++i) {
        VectorXd p = xs[0];
        p[i] += (p[i] + initial_step <= hi[i]) ? initial_step : -initial_step;
        xs[i + 1] = p;
        fs[i + 1] = eval(p);
    }

    std::vector<int> idx(n + 1);
    NmResult res;
    int it = 0;
    for (; it < max_iters; ++it) {
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return fs[a] < fs[b]; });

        const int best = idx[0], worst = idx[n], second = idx[n - 1];

        double fspread = std::abs(fs[worst] - fs[best]);
        double xspread = 0.0;
        for (int i = 1; i <= n; ++i)
            xspread = std::max(
                xspread, (xs[idx[i]] - xs[best]).cwiseAbs().maxCoeff());
        if (fspread <= f_tol * (1.0 + std::abs(fs[best])) && xspread <= x_tol) {
            res.converged = true;
            break;
        }

        VectorXd centroid = VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= n;

        const VectorXd xr = centroid + (centroid - xs[worst]);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            const VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            const VectorXd base = outside ? xr : xs[worst];
            const VectorXd xc = centroid + 0.5 * (base - centroid);
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
                    fs[i] = eval(xs[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    res.x = clamp(xs[best]);
    res.value = fs[best];
    res.iterations = it;
    return res;
}

}  // namespace spinewave::opt
