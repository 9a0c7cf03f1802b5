#pragma once

#include <optional>
#include <string>

#include "spinewave/common.hpp"

namespace spinewave::krig {

// Training data, rows are sample points. Points must be pairwise distinct
// beyond 1e-12 per coordinate; duplicates make the correlation matrix
// singular, so they are rejected at construction.
struct TrainingSet {
    MatrixXd x;  // N x D
    VectorXd y;  // N

    static TrainingSet create(MatrixXd x, VectorXd y);
    Eigen::Index size() const { return y.size(); }
    Eigen::Index dim() const { return x.cols(); }
};

constexpr double kDuplicateTol = 1e-12;

// Gaussian correlation: prod_k exp(-theta_k (a_k - b_k)^2)
double gauss_corr(const VectorXd& a, const VectorXd& b, const VectorXd& theta);

// Full correlation matrix with nugget on the diagonal.
MatrixXd correlation_matrix(const MatrixXd& x, const VectorXd& theta,
                            double nugget);

struct LikelihoodEval {
    double value = 0.0;  // concentrated negative log-likelihood (halved)
    double beta = 0.0;
    double sigma2 = 0.0;
    double log_det = 0.0;
    bool ok = false;  // false: Cholesky failed, value is +inf
};

// Profile likelihood for given theta: beta and sigma2 are concentrated out,
// leaving 0.5 * (N ln sigma2 + ln det R) to minimize over theta.
LikelihoodEval neg_loglik(const TrainingSet& ts, const VectorXd& theta,
                          double nugget);

// The default regularization used when FitConfig.nugget is negative.
double auto_nugget(const VectorXd& y);

struct FitConfig {
    double nugget = -1.0;     // negative: auto, 1e-10 * var(y)
    int multistarts = 8;      // includes the warm start when present
    int max_iters = 0;        // 0: 200 * dim per start
    std::uint64_t seed = 0;   // for the multistart draw
    std::optional<VectorXd> warm_start_log10;
    bool simple_variance = false;  // drop the trend-uncertainty term
};

struct Prediction {
    double mean = 0.0;
    double sd = 0.0;
};

// Constant-trend (ordinary) Kriging interpolator with Gaussian correlation.
class Model {
  public:
    // Maximum-likelihood hyperparameters via multistart Nelder-Mead over
    // log10(theta) in [-3, 3]^D. Training rows are sorted canonically first
    // so the result is invariant to input ordering.
    static Model fit(const TrainingSet& ts, const FitConfig& cfg = {});

    // Skip estimation and use the given theta directly.
    static Model with_theta(const TrainingSet& ts, const VectorXd& theta,
                            double nugget = 0.0, bool simple_variance = false);

    Prediction predict(const VectorXd& x) const;

    // Posterior mean alone; skips the variance solve.
    double predict_mean(const VectorXd& x) const;

    Eigen::Index dim() const { return x_.cols(); }
    Eigen::Index size() const { return y_.size(); }
    const VectorXd& theta() const { return theta_; }
    double beta() const { return beta_; }
    double sigma2() const { return sigma2_; }
    double nugget() const { return nugget_; }
    const MatrixXd& train_x() const { return x_; }
    const VectorXd& train_y() const { return y_; }

    std::string to_json() const;
    static Model from_json(const std::string& text);

  private:
    Model() = default;
    void factorize();  // builds llt_, alpha_, rinv_one_ from x_/theta_/nugget_

    MatrixXd x_;
    VectorXd y_;
    VectorXd theta_;
    double nugget_ = 0.0;
    double beta_ = 0.0;
    double sigma2_ = 0.0;
    bool simple_variance_ = false;
    Eigen::LLT<MatrixXd> llt_;
    VectorXd alpha_;      // R^-1 (y - beta 1)
    VectorXd rinv_one_;   // R^-1 1
    double one_rinv_one_ = 0.0;
};

}  // namespace spinewave::krig
