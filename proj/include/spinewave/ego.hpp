#pragma once
// Efficient global optimization: latin-hypercube start, kriging surrogate,
// expected-improvement infill picked by a small real-coded GA. The loop is
// sequential by design; every random draw comes from a named sub-stream of
// the run seed so an interrupted run resumes bit-for-bit.
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinewave/common.hpp"
#include "spinewave/kriging.hpp"

namespace spinewave::ego {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Objective in physical coordinates. Non-finite returns are treated as
// failed evaluations, not errors (see run_ego).
using Objective = std::function<double(const VectorXd&)>;

// [0,1)^dim latin hypercube: per dimension, one sample in each of n strata.
MatrixXd lhs_sample(int n, int dim, std::uint64_t seed);

struct GaConfig {
    int population = 50;  // even, >= 4
    int generations = 100;
    double p_crossover = 0.9;
    double p_mutation = -1.0;  // negative: 1/dim
    double blend_alpha = 0.5;
    double mutation_sigma = 0.1;
};

struct GaResult {
    VectorXd x;
    double value = 0.0;
    // runner-up kept at least 1e-6 (sup norm) away from x; fallback for
    // objective failures
    VectorXd second_x;
    double second_value = 0.0;
    bool has_second = false;
    long evaluations = 0;
};

// EI for minimization: (f_min - mean) Phi(z) + sd phi(z), exactly 0
// when sd is 0.
double ei_value(double mean, double sd, double f_min);
double expected_improvement(const krig::Model& model, const VectorXd& x,
                            double f_min);

// Maximizes over [0,1]^dim: tournament-of-2 selection, blend crossover,
// per-gene Gaussian mutation, elitism of 1. Deterministic per seed.
GaResult ga_maximize(const std::function<double(const VectorXd&)>& objective,
                     int dim, const GaConfig& ga, std::uint64_t seed);

// Duplicate policy for proposed infill points: while u lies within 1e-9
// (sup norm) of one of the first n rows, nudge every coordinate by up to
// 1e-6, clamped to [0,1]. Returns the point and whether it moved; throws
// duplicate_point_error after 16 stuck attempts.
std::pair<VectorXd, bool> dedupe_point(VectorXd u, const MatrixXd& rows,
                                       int n, RngStream& jit);

struct EgoConfig {
    int dim = 0;
    VectorXd lower, upper;  // physical bounds, lower < upper per dimension
    int n_init = -1;        // negative: 10 * dim
    int n_infill = -1;      // negative: 5 * dim
    GaConfig ga;
    std::uint64_t seed = 0;
    bool minimize = true;
    double nugget = -1.0;       // forwarded to the kriging fits
    int init_multistarts = 8;   // first fit, cold
    int refit_multistarts = 2;  // later fits, warm started from last theta
    int surface_grid = 50;      // per axis for the convergence diagnostic
    std::string db_path;        // empty: in-memory run, nothing persisted
    std::string config_hash;    // opaque tag checked on resume
    bool resume = false;        // continue from an existing db_path
    int halt_after = -1;        // stop after N successful evaluations
};

void validate(const EgoConfig& cfg);

struct Record {
    int iter = 0;     // 0 during initialization, then the infill index
    std::string tag;  // "init" | "infill" | "failure"
    std::string src;  // init points: "lhs" | "retry"
    VectorXd u;       // normalized coordinates, the surrogate's space
    VectorXd x;       // physical coordinates
    double y = 0.0;   // raw objective value; NaN on failure records
    double best_so_far = 0.0;
    double ei = 0.0;
    double surface_delta = 0.0;
    bool jittered = false;
    // theta of the refit that followed this evaluation (infill rows only);
    // lets a resumed run rebuild the exact model without re-optimizing
    std::optional<VectorXd> theta;
};

struct EgoResult {
    VectorXd best_x;
    double best_y = 0.0;
    std::vector<Record> records;  // includes failure rows
    std::optional<krig::Model> model;
    bool halted = false;  // stopped by halt_after before the budget ran out
};

EgoResult run_ego(const Objective& objective, const EgoConfig& cfg);

// Posterior mean over the diagnostic grid, internal (minimization) scale.
// Dims 0 and 1 are swept, any others pinned at 0.5; a 1-D space gets the
// full grid^2 points on its one axis.
VectorXd surface_means(const krig::Model& model, int dim, int grid);

// `iter,tag,x_1..x_D,y,best_so_far,ei,surface_delta`; failure rows skipped
void write_history_csv(const std::vector<Record>& records, std::ostream& os);

}  // namespace spinewave::ego
