#include "spinewave/kriging.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>

#include "spinewave/nelder_mead.hpp"

namespace spinewave::krig {

using nlohmann::json;

TrainingSet TrainingSet::create(MatrixXd x, VectorXd y) {
    if (x.rows() != y.size())
        throw dimension_error("kriging: x rows != y size");
    if (x.rows() < 1) throw validation_error("kriging: empty training set");
    if (!x.allFinite() || !y.allFinite())
        throw validation_error("kriging: training data must be finite");
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j)
            if ((x.row(i) - x.row(j)).cwiseAbs().maxCoeff() <= kDuplicateTol)
                throw duplicate_point_error(
                    "kriging: rows " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide within tolerance");
    return TrainingSet{std::move(x), std::move(y)};
}

double gauss_corr(const VectorXd& a, const VectorXd& b, const VectorXd& theta) {
    if (a.size() != b.size() || a.size() != theta.size())
        throw dimension_error("gauss_corr: size mismatch");
    return std::exp(-(theta.array() * (a - b).array().square()).sum());
}

MatrixXd correlation_matrix(const MatrixXd& x, const VectorXd& theta,
                            double nugget) {
    const Eigen::Index n = x.rows();
    MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 1.0 + nugget;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = std::exp(
                -(theta.array() *
                  (x.row(i) - x.row(j)).transpose().array().square())
                     .sum());
            r(i, j) = c;
            r(j, i) = c;
        }
    }
    return r;
}

namespace {

struct Concentrated {
    double value = 1e300;
    double beta = 0.0;
    double sigma2 = 0.0;
    double log_det = 0.0;
    bool ok = false;
};

Concentrated concentrate(const MatrixXd& r, const VectorXd& y) {
    const Eigen::Index n = y.size();
    Concentrated c;
    Eigen::LLT<MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) return c;

    const VectorXd one = VectorXd::Ones(n);
    const VectorXd rinv_one = llt.solve(one);
    const VectorXd rinv_y = llt.solve(y);
    const double denom = one.dot(rinv_one);
    if (!(denom > 0.0) || !std::isfinite(denom)) return c;

    // constant GLS trend; no extra 1/N here, that belongs to sigma2 only
    c.beta = one.dot(rinv_y) / denom;
    const VectorXd resid = y - c.beta * one;
    double s2 = resid.dot(llt.solve(resid)) / static_cast<double>(n);
    if (s2 < 0.0) s2 = 0.0;
    c.sigma2 = s2;

    c.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    if (!std::isfinite(c.log_det)) return c;

    const double s2_floor = s2 > 1e-300 ? s2 : 1e-300;
    c.value = 0.5 * (static_cast<double>(n) * std::log(s2_floor) + c.log_det);
    c.ok = std::isfinite(c.value);
    return c;
}

void validate_theta(const VectorXd& theta, Eigen::Index dim) {
    if (theta.size() != dim)
        throw dimension_error("kriging: theta size != dim");
    for (Eigen::Index k = 0; k < dim; ++k)
        if (!(theta[k] > 0.0) || !std::isfinite(theta[k]))
            throw validation_error("kriging: theta must be positive");
}

// canonical row order, so fits do not depend on how callers stack their data
std::vector<Eigen::Index> sort_order(const MatrixXd& x) {
    std::vector<Eigen::Index> idx(x.rows());
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) {
            if (x(a, k) < x(b, k)) return true;
            if (x(a, k) > x(b, k)) return false;
        }
        return false;
    });
    return idx;
}

TrainingSet sorted_copy(const TrainingSet& ts) {
    const auto idx = sort_order(ts.x);
    MatrixXd x(ts.x.rows(), ts.x.cols());
    VectorXd y(ts.y.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        x.row(i) = ts.x.row(idx[i]);
        y[i] = ts.y[idx[i]];
    }
    return TrainingSet{std::move(x), std::move(y)};
}

}  // namespace

double auto_nugget(const VectorXd& y) {
    const double mean = y.mean();
    const double var =
        (y.array() - mean).square().sum() / static_cast<double>(y.size());
    return 1e-10 * var;
}

LikelihoodEval neg_loglik(const TrainingSet& ts, const VectorXd& theta,
                          double nugget) {
    validate_theta(theta, ts.dim());
    if (nugget < 0.0) throw validation_error("kriging: nugget must be >= 0");
    const auto c = concentrate(correlation_matrix(ts.x, theta, nugget), ts.y);
    LikelihoodEval e;
    e.ok = c.ok;
    e.value = c.ok ? c.value : std::numeric_limits<double>::infinity();
    e.beta = c.beta;
    e.sigma2 = c.sigma2;
    e.log_det = c.log_det;
    return e;
}

void Model::factorize() {
    llt_.compute(correlation_matrix(x_, theta_, nugget_));
    if (llt_.info() != Eigen::Success)
        throw conditioning_error(
            "kriging: correlation matrix is not positive definite");
    const VectorXd one = VectorXd::Ones(y_.size());
    alpha_ = llt_.solve(y_ - beta_ * one);
    rinv_one_ = llt_.solve(one);
    one_rinv_one_ = one.dot(rinv_one_);
    if (!(one_rinv_one_ > 0.0) || !std::isfinite(one_rinv_one_))
        throw conditioning_error("kriging: degenerate trend system");
}

Model Model::with_theta(const TrainingSet& ts, const VectorXd& theta,
                        double nugget, bool simple_variance) {
    validate_theta(theta, ts.dim());
    if (nugget < 0.0) throw validation_error("kriging: nugget must be >= 0");
    const TrainingSet s = sorted_copy(ts);
    const auto c = concentrate(correlation_matrix(s.x, theta, nugget), s.y);
    if (!c.ok)
        throw conditioning_error(
            "kriging: likelihood evaluation failed at the given theta");
    Model m;
    m.x_ = s.x;
    m.y_ = s.y;
    m.theta_ = theta;
    m.nugget_ = nugget;
    m.beta_ = c.beta;
    m.sigma2_ = c.sigma2;
    m.simple_variance_ = simple_variance;
    m.factorize();
    return m;
}

Model Model::fit(const TrainingSet& ts, const FitConfig& cfg) {
    const TrainingSet s = sorted_copy(ts);
    const auto n = s.size();
    const auto dim = s.dim();
    const double nugget = cfg.nugget >= 0.0 ? cfg.nugget : auto_nugget(s.y);
    if (cfg.multistarts < 1)
        throw validation_error("kriging: multistarts must be >= 1");

    // squared coordinate distances, reused by every likelihood evaluation
    std::vector<MatrixXd> sq(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        sq[k].resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d = s.x(i, k) - s.x(j, k);
                sq[k](i, j) = d * d;
            }
    }

    auto objective = [&](const VectorXd& t) {
        MatrixXd m = MatrixXd::Zero(n, n);
        for (Eigen::Index k = 0; k < dim; ++k)
            m += std::pow(10.0, t[k]) * sq[k];
        MatrixXd r = (-m).array().exp();
        r.diagonal().array() += nugget;
        return concentrate(r, s.y).value;
    };

    const VectorXd lo = VectorXd::Constant(dim, -3.0);
    const VectorXd hi = VectorXd::Constant(dim, 3.0);
    const int iters = cfg.max_iters > 0
                          ? cfg.max_iters
                          : 200 * static_cast<int>(dim);

    std::vector<VectorXd> starts;
    if (cfg.warm_start_log10) {
        if (cfg.warm_start_log10->size() != dim)
            throw dimension_error("kriging: warm start size != dim");
        starts.push_back(
            cfg.warm_start_log10->cwiseMax(lo).cwiseMin(hi));
    }
    const int fresh = cfg.multistarts - static_cast<int>(starts.size());
    if (fresh > 0) {
        RngStream rng(derive_seed(cfg.seed, "kriging-multistart"));
        const MatrixXd u = lhs_sample(fresh, static_cast<int>(dim), rng);
        for (int i = 0; i < fresh; ++i)
            starts.push_back(lo + (u.row(i).transpose().array() *
                                   (hi - lo).array())
                                      .matrix());
    }

    VectorXd best_t;
    double best_v = std::numeric_limits<double>::infinity();
    for (const auto& st : starts) {
        const auto r = opt::nelder_mead(objective, st, lo, hi, 0.5, iters);
        if (r.value < best_v) {
            best_v = r.value;
            best_t = r.x;
        }
    }
    if (!best_t.size() || !std::isfinite(best_v))
        throw fit_error(
            "kriging: every likelihood evaluation failed; data may be "
            "degenerate");

    VectorXd theta(dim);
    for (Eigen::Index k = 0; k < dim; ++k) theta[k] = std::pow(10.0, best_t[k]);

    const auto c = concentrate(correlation_matrix(s.x, theta, nugget), s.y);
    if (!c.ok) throw fit_error("kriging: final factorization failed");

    Model m;
    m.x_ = s.x;
    m.y_ = s.y;
    m.theta_ = theta;
    m.nugget_ = nugget;
    m.beta_ = c.beta;
    m.sigma2_ = c.sigma2;
    m.simple_variance_ = cfg.simple_variance;
    m.factorize();
    return m;
}

Prediction Model::predict(const VectorXd& x) const {
    if (x.size() != dim())
        throw dimension_error("kriging: query dimension mismatch");
    if (!x.allFinite())
        throw validation_error("kriging: query must be finite");

    // an interpolator answers exactly at its own data; the linear-algebra
    // route leaves ~1e-7 noise there, above the documented tolerances
    if (nugget_ == 0.0) {
        for (Eigen::Index i = 0; i < size(); ++i)
            if ((x_.row(i).transpose() - x).cwiseAbs().maxCoeff() <=
                kDuplicateTol)
                return {y_[i], 0.0};
    }

    VectorXd r(size());
    for (Eigen::Index i = 0; i < size(); ++i)
        r[i] = std::exp(
            -(theta_.array() *
              (x_.row(i).transpose() - x).array().square())
                 .sum());

    Prediction p;
    p.mean = beta_ + r.dot(alpha_);
    const VectorXd rinv_r = llt_.solve(r);
    const double t1 = r.dot(rinv_r);
    double s2 = 1.0 - t1;
    if (!simple_variance_) {
        const double u = 1.0 - rinv_one_.dot(r);
        s2 += u * u / one_rinv_one_;
    }
    s2 *= sigma2_;
    p.sd = s2 > 0.0 ? std::sqrt(s2) : 0.0;
    return p;
}

double Model::predict_mean(const VectorXd& x) const {
    if (x.size() != dim())
        throw dimension_error("kriging: query dimension mismatch");
    if (!x.allFinite())
        throw validation_error("kriging: query must be finite");
    if (nugget_ == 0.0) {
        for (Eigen::Index i = 0; i < size(); ++i)
            if ((x_.row(i).transpose() - x).cwiseAbs().maxCoeff() <=
                kDuplicateTol)
                return y_[i];
    }
    VectorXd r(size());
    for (Eigen::Index i = 0; i < size(); ++i)
        r[i] = std::exp(
            -(theta_.array() *
              (x_.row(i).transpose() - x).array().square())
                 .sum());
    return beta_ + r.dot(alpha_);
}

std::string Model::to_json() const {
    json j;
    j["format"] = "spinewave-kriging";
    j["version"] = 1;
    j["dim"] = dim();
    j["n"] = size();
    j["theta"] = std::vector<double>(theta_.data(), theta_.data() + dim());
    j["beta_hat"] = beta_;
    j["sigma2_hat"] = sigma2_;
    j["nugget"] = nugget_;
    j["simple_variance"] = simple_variance_;
    std::vector<std::vector<double>> rows(size());
    for (Eigen::Index i = 0; i < size(); ++i)
        rows[i].assign(x_.row(i).begin(), x_.row(i).end());
    j["x"] = rows;
    j["y"] = std::vector<double>(y_.data(), y_.data() + size());
    return j.dump(2);
}

Model Model::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw io_error(std::string("kriging: bad model json: ") + e.what());
    }
    try {
        if (j.at("format") != "spinewave-kriging")
            throw io_error("kriging: not a kriging model file");
        const auto dim = j.at("dim").get<Eigen::Index>();
        const auto n = j.at("n").get<Eigen::Index>();
        const auto tv = j.at("theta").get<std::vector<double>>();
        const auto yv = j.at("y").get<std::vector<double>>();
        const auto xv = j.at("x").get<std::vector<std::vector<double>>>();
        if (static_cast<Eigen::Index>(tv.size()) != dim ||
            static_cast<Eigen::Index>(yv.size()) != n ||
            static_cast<Eigen::Index>(xv.size()) != n)
            throw io_error("kriging: inconsistent model dimensions");

        Model m;
        m.x_.resize(n, dim);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(xv[i].size()) != dim)
                throw io_error("kriging: inconsistent model dimensions");
            for (Eigen::Index k = 0; k < dim; ++k) m.x_(i, k) = xv[i][k];
        }
        m.y_ = Eigen::Map<const VectorXd>(yv.data(), n);
        m.theta_ = Eigen::Map<const VectorXd>(tv.data(), dim);
        m.nugget_ = j.at("nugget").get<double>();
        m.beta_ = j.at("beta_hat").get<double>();
        m.sigma2_ = j.at("sigma2_hat").get<double>();
        m.simple_variance_ = j.value("simple_variance", false);
        validate_theta(m.theta_, dim);
        m.factorize();
        return m;
    } catch (const json::exception& e) {
        throw io_error(std::string("kriging: bad model json: ") + e.what());
    }
}

}  // namespace spinewave::krig
