#include "spinewave/ego.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace spinewave::ego {

using json = nlohmann::json;

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kDupTol = 1e-9;    // normalized spacing below this is "same"
constexpr double kJitter = 1e-6;    // per-axis nudge applied to duplicates
constexpr int kInitAttempts = 11;   // LHS draw + 10 retries per init point
// per infill: GA best, then its runner-up, then uniform substitutes; the
// loop only gives up once the whole chain has failed
constexpr int kInfillAttempts = 16;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void validate_ga(const GaConfig& ga, int dim) {
    if (dim < 1) throw validation_error("ga: dim must be >= 1");
    if (ga.population < 4 || ga.population % 2 != 0)
        throw validation_error("ga: population must be even and >= 4");
    if (ga.generations < 1)
        throw validation_error("ga: generations must be >= 1");
    if (!(ga.p_crossover >= 0.0 && ga.p_crossover <= 1.0))
        throw validation_error("ga: p_crossover must be in [0, 1]");
    if (ga.p_mutation >= 0.0 && ga.p_mutation > 1.0)
        throw validation_error("ga: p_mutation must be in [0, 1]");
    if (!(ga.blend_alpha >= 0.0))
        throw validation_error("ga: blend_alpha must be >= 0");
    if (!(ga.mutation_sigma > 0.0))
        throw validation_error("ga: mutation_sigma must be > 0");
}

std::vector<double> to_vec(const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd from_vec(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(),
                                      static_cast<Eigen::Index>(v.size()));
}

json record_json(const Record& r) {
    json j;
    j["iter"] = r.iter;
    j["tag"] = r.tag;
    if (!r.src.empty()) j["src"] = r.src;
    j["u"] = to_vec(r.u);
    j["x"] = to_vec(r.x);
    if (std::isfinite(r.y)) j["y"] = r.y; else j["y"] = nullptr;
    if (std::isfinite(r.best_so_far)) j["best_so_far"] = r.best_so_far;
    else j["best_so_far"] = nullptr;
    j["ei"] = r.ei;
    j["surface_delta"] = r.surface_delta;
    if (r.jittered) j["jittered"] = true;
    if (r.theta) j["theta"] = to_vec(*r.theta);
    return j;
}

Record record_from_json(const json& j) {
    Record r;
    r.iter = j.at("iter").get<int>();
    r.tag = j.at("tag").get<std::string>();
    if (j.contains("src")) r.src = j.at("src").get<std::string>();
    r.u = from_vec(j.at("u").get<std::vector<double>>());
    r.x = from_vec(j.at("x").get<std::vector<double>>());
    r.y = j.at("y").is_null() ? std::numeric_limits<double>::quiet_NaN()
                              : j.at("y").get<double>();
    r.best_so_far = j.at("best_so_far").is_null()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : j.at("best_so_far").get<double>();
    r.ei = j.at("ei").get<double>();
    r.surface_delta = j.at("surface_delta").get<double>();
    r.jittered = j.value("jittered", false);
    if (j.contains("theta"))
        r.theta = from_vec(j.at("theta").get<std::vector<double>>());
    return r;
}

}  // namespace

MatrixXd lhs_sample(int n, int dim, std::uint64_t seed) {
    RngStream rng(seed);
    return spinewave::lhs_sample(n, dim, rng);
}

double ei_value(double mean, double sd, double f_min) {
    if (!(sd > 0.0)) return 0.0;
    const double diff = f_min - mean;
    const double z = diff / sd;
    const double cdf = 0.5 * std::erfc(-z * kInvSqrt2);
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    const double ei = diff * cdf + sd * pdf;
    return ei > 0.0 ? ei : 0.0;
}

double expected_improvement(const krig::Model& model, const VectorXd& x,
                            double f_min) {
    const auto p = model.predict(x);
    return ei_value(p.mean, p.sd, f_min);
}

GaResult ga_maximize(const std::function<double(const VectorXd&)>& objective,
                     int dim, const GaConfig& ga, std::uint64_t seed) {
    validate_ga(ga, dim);
    const double pm = ga.p_mutation < 0.0 ? 1.0 / dim : ga.p_mutation;
    RngStream rng(seed);

    GaResult res;
    res.value = -std::numeric_limits<double>::infinity();
    res.second_value = -std::numeric_limits<double>::infinity();
    auto consider = [&](const VectorXd& x, double v) {
        ++res.evaluations;
        if (v > res.value) {
            if (res.x.size() &&
                (x - res.x).lpNorm<Eigen::Infinity>() > 1e-6) {
                res.second_x = res.x;
                res.second_value = res.value;
                res.has_second = true;
            }
            res.x = x;
            res.value = v;
        } else if ((x - res.x).lpNorm<Eigen::Infinity>() > 1e-6 &&
                   (!res.has_second || v > res.second_value)) {
            res.second_x = x;
            res.second_value = v;
            res.has_second = true;
        }
    };

    const int pop = ga.population;
    MatrixXd cur(pop, dim);
    VectorXd val(pop);
    for (int i = 0; i < pop; ++i) {
        for (int k = 0; k < dim; ++k) cur(i, k) = rng.u01();
        val[i] = objective(cur.row(i).transpose());
        consider(cur.row(i).transpose(), val[i]);
    }

    auto tournament = [&]() {
        const auto a = static_cast<Eigen::Index>(rng.index(pop));
        const auto b = static_cast<Eigen::Index>(rng.index(pop));
        return val[a] >= val[b] ? a : b;
    };

    MatrixXd next(pop, dim);
    VectorXd nval(pop);
    for (int gen = 0; gen < ga.generations; ++gen) {
        next.row(0) = res.x.transpose();  // elitism: carry the best seen
        nval[0] = res.value;
        int filled = 1;
        while (filled < pop) {
            VectorXd c1 = cur.row(tournament()).transpose();
            VectorXd c2 = cur.row(tournament()).transpose();
            if (rng.u01() < ga.p_crossover) {
                for (int k = 0; k < dim; ++k) {
                    const double lo = std::min(c1[k], c2[k]);
                    const double hi = std::max(c1[k], c2[k]);
                    const double d = ga.blend_alpha * (hi - lo);
                    c1[k] = rng.uniform(lo - d, hi + d);
                    c2[k] = rng.uniform(lo - d, hi + d);
                }
            }
            for (VectorXd* c : {&c1, &c2}) {
                for (int k = 0; k < dim; ++k) {
                    if (rng.u01() < pm)
                        (*c)[k] += ga.mutation_sigma * rng.normal();
                    (*c)[k] = clamp01((*c)[k]);
                }
            }
            next.row(filled) = c1.transpose();
            nval[filled] = objective(c1);
            consider(c1, nval[filled]);
            ++filled;
            if (filled < pop) {
                next.row(filled) = c2.transpose();
                nval[filled] = objective(c2);
                consider(c2, nval[filled]);
                ++filled;
            }
        }
        cur.swap(next);
        val.swap(nval);
    }
    return res;
}

std::pair<VectorXd, bool> dedupe_point(VectorXd u, const MatrixXd& rows,
                                       int n, RngStream& jit) {
    const auto dim = u.size();
    bool jittered = false;
    for (int attempt = 0; attempt < 16; ++attempt) {
        bool dup = false;
        for (int i = 0; i < n && !dup; ++i)
            dup = (rows.row(i).transpose() - u)
                      .lpNorm<Eigen::Infinity>() <= kDupTol;
        if (!dup) return {std::move(u), jittered};
        for (Eigen::Index k = 0; k < dim; ++k)
            u[k] = clamp01(u[k] + jit.uniform(-kJitter, kJitter));
        jittered = true;
    }
    throw duplicate_point_error(
        "ego: infill point stuck on an existing sample");
}

void validate(const EgoConfig& cfg) {
    if (cfg.dim < 1) throw validation_error("ego: dim must be >= 1");
    if (cfg.lower.size() != cfg.dim || cfg.upper.size() != cfg.dim)
        throw dimension_error("ego: bounds must match dim");
    if (!cfg.lower.allFinite() || !cfg.upper.allFinite())
        throw validation_error("ego: bounds must be finite");
    for (int k = 0; k < cfg.dim; ++k)
        if (!(cfg.lower[k] < cfg.upper[k]))
            throw validation_error("ego: lower bound must be < upper bound");
    const int n_init = cfg.n_init < 0 ? 10 * cfg.dim : cfg.n_init;
    const int n_infill = cfg.n_infill < 0 ? 5 * cfg.dim : cfg.n_infill;
    if (n_init < cfg.dim + 1)
        throw validation_error("ego: n_init must be >= dim + 1");
    if (n_infill < 1) throw validation_error("ego: n_infill must be >= 1");
    validate_ga(cfg.ga, cfg.dim);
    if (std::isnan(cfg.nugget))
        throw validation_error("ego: nugget must not be NaN");
    if (cfg.init_multistarts < 1 || cfg.refit_multistarts < 1)
        throw validation_error("ego: multistarts must be >= 1");
    if (cfg.surface_grid < 2)
        throw validation_error("ego: surface_grid must be >= 2");
    if (cfg.resume && cfg.db_path.empty())
        throw validation_error("ego: resume needs a db_path");
}

VectorXd surface_means(const krig::Model& model, int dim, int grid) {
    if (grid < 2) throw validation_error("ego: surface grid must be >= 2");
    const int total = grid * grid;
    VectorXd out(total);
    VectorXd u = VectorXd::Constant(dim, 0.5);
    if (dim == 1) {
        for (int i = 0; i < total; ++i) {
            u[0] = static_cast<double>(i) / (total - 1);
            out[i] = model.predict_mean(u);
        }
        return out;
    }
    int idx = 0;
    for (int a = 0; a < grid; ++a) {
        u[0] = static_cast<double>(a) / (grid - 1);
        for (int b = 0; b < grid; ++b) {
            u[1] = static_cast<double>(b) / (grid - 1);
            out[idx++] = model.predict_mean(u);
        }
    }
    return out;
}

void write_history_csv(const std::vector<Record>& records, std::ostream& os) {
    Eigen::Index dim = 0;
    for (const auto& r : records)
        if (r.x.size()) { dim = r.x.size(); break; }
    os << "iter,tag";
    for (Eigen::Index k = 1; k <= dim; ++k) os << ",x_" << k;
    os << ",y,best_so_far,ei,surface_delta\n";
    for (const auto& r : records) {
        if (r.tag == "failure") continue;
        os << r.iter << ',' << r.tag;
        for (Eigen::Index k = 0; k < dim; ++k)
            os << ',' << fmt_g(r.x[k], 17);
        os << ',' << fmt_g(r.y, 17) << ',' << fmt_g(r.best_so_far, 17)
           << ',' << fmt_g(r.ei, 17) << ',' << fmt_g(r.surface_delta, 17)
           << '\n';
    }
}

namespace {

struct Replay {
    std::vector<Record> recs;
    int init_done = 0;
    int last_infill = 0;
    int trailing_init_failures = 0;
    int dangling_iter = 0;   // 0: none, else the unfinished iteration
    int dangling_count = 0;  // failures already logged for it
};

json make_header(const EgoConfig& cfg, int n_init, int n_infill) {
    json h;
    h["format"] = "spinewave-ego-db";
    h["version"] = 1;
    h["dim"] = cfg.dim;
    h["seed"] = cfg.seed;
    h["config_hash"] = cfg.config_hash;
    h["minimize"] = cfg.minimize;
    h["n_init"] = n_init;
    h["n_infill"] = n_infill;
    h["lower"] = to_vec(cfg.lower);
    h["upper"] = to_vec(cfg.upper);
    return h;
}

Replay replay_db(const EgoConfig& cfg, int n_init, int n_infill,
                 const MatrixXd& lhs) {
    std::ifstream in(cfg.db_path);
    if (!in) throw io_error("ego: cannot open database " + cfg.db_path);
    std::string line;
    if (!std::getline(in, line))
        throw io_error("ego: database is empty: " + cfg.db_path);

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw io_error(std::string("ego: bad database header: ") + e.what());
    }
    if (header != make_header(cfg, n_init, n_infill))
        throw io_error("ego: database does not match this configuration");

    Replay rp;
    const VectorXd span = cfg.upper - cfg.lower;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Record r;
        try {
            r = record_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw io_error(std::string("ego: bad database record: ") +
                           e.what());
        } catch (const std::exception& e) {
            throw io_error(std::string("ego: bad database record: ") +
                           e.what());
        }
        if (r.u.size() != cfg.dim || r.x.size() != cfg.dim)
            throw io_error("ego: database record has wrong dimension");
        for (int k = 0; k < cfg.dim; ++k) {
            if (!(r.u[k] >= 0.0 && r.u[k] <= 1.0))
                throw io_error("ego: database point outside the unit cube");
            const double phys = cfg.lower[k] + r.u[k] * span[k];
            if (std::abs(phys - r.x[k]) > 1e-9 * (1.0 + std::abs(r.x[k])))
                throw io_error("ego: physical/normalized mismatch in db");
        }
        if (r.tag == "failure") {
            if (r.iter == 0) {
                ++rp.trailing_init_failures;
            } else if (r.iter == rp.dangling_iter) {
                ++rp.dangling_count;
            } else if (rp.dangling_count > 0) {
                throw io_error("ego: failure records for two iterations "
                               "without an infill between them");
            } else {
                rp.dangling_iter = r.iter;
                rp.dangling_count = 1;
            }
        } else if (r.tag == "init") {
            if (rp.init_done >= n_init)
                throw io_error("ego: more init records than n_init");
            if (r.src == "lhs" &&
                (r.u - lhs.row(rp.init_done).transpose())
                        .lpNorm<Eigen::Infinity>() > 1e-12)
                throw io_error("ego: init point does not replay from seed");
            ++rp.init_done;
            rp.trailing_init_failures = 0;
        } else if (r.tag == "infill") {
            if (r.iter != rp.last_infill + 1 || !r.theta)
                throw io_error("ego: infill records out of order");
            rp.last_infill = r.iter;
            rp.dangling_iter = 0;
            rp.dangling_count = 0;
        } else {
            throw io_error("ego: unknown record tag '" + r.tag + "'");
        }
        rp.recs.push_back(std::move(r));
    }
    if (rp.dangling_iter && rp.dangling_iter != rp.last_infill + 1)
        throw io_error("ego: dangling failure does not follow the last "
                       "infill");
    if (rp.init_done > n_init || rp.last_infill > n_infill)
        throw io_error("ego: database longer than the configured budget");
    if (rp.last_infill > 0 && rp.init_done < n_init)
        throw io_error("ego: infill records before initialization finished");
    return rp;
}

}  // namespace

EgoResult run_ego(const Objective& objective, const EgoConfig& cfg) {
    validate(cfg);
    const int dim = cfg.dim;
    const int n_init = cfg.n_init < 0 ? 10 * dim : cfg.n_init;
    const int n_infill = cfg.n_infill < 0 ? 5 * dim : cfg.n_infill;
    const int budget = n_init + n_infill;
    const double sgn = cfg.minimize ? 1.0 : -1.0;
    const VectorXd span = cfg.upper - cfg.lower;
    const auto nan = std::numeric_limits<double>::quiet_NaN();

    auto phys = [&](const VectorXd& u) -> VectorXd {
        return cfg.lower.array() + u.array() * span.array();
    };

    const MatrixXd lhs =
        lhs_sample(n_init, dim, derive_seed(cfg.seed, "lhs"));

    // replay an existing database, or start a fresh one
    std::vector<Record> recs;
    int init_done = 0, last_infill = 0, pre_failed = 0;
    int dangling_iter = 0, dangling_count = 0;
    const bool have_db = !cfg.db_path.empty();
    if (have_db) {
        const bool exists = static_cast<bool>(std::ifstream(cfg.db_path));
        if (cfg.resume && !exists)
            throw io_error("ego: nothing to resume at " + cfg.db_path);
        if (!cfg.resume && exists)
            throw io_error("ego: database already exists: " + cfg.db_path);
        if (exists) {
            Replay rp = replay_db(cfg, n_init, n_infill, lhs);
            recs = std::move(rp.recs);
            init_done = rp.init_done;
            last_infill = rp.last_infill;
            pre_failed = rp.trailing_init_failures;
            dangling_iter = rp.dangling_iter;
            dangling_count = rp.dangling_count;
        }
    }
    std::ofstream db;
    if (have_db) {
        db.open(cfg.db_path, recs.empty() && !cfg.resume
                                 ? std::ios::out
                                 : std::ios::out | std::ios::app);
        if (!db) throw io_error("ego: cannot write " + cfg.db_path);
        if (!cfg.resume) db << make_header(cfg, n_init, n_infill).dump()
                            << '\n' << std::flush;
    }
    auto emit = [&](const Record& r) {
        recs.push_back(r);
        if (db.is_open()) db << record_json(r).dump() << '\n' << std::flush;
    };

    // training state in normalized coordinates, internal (minimizing) y
    MatrixXd u_rows(budget, dim);
    VectorXd y_int(budget);
    int n = 0;
    double best_raw = nan;
    VectorXd best_u;
    auto absorb = [&](const VectorXd& u, double yraw) {
        u_rows.row(n) = u.transpose();
        y_int[n] = sgn * yraw;
        ++n;
        if (std::isnan(best_raw) ||
            (cfg.minimize ? yraw < best_raw : yraw > best_raw)) {
            best_raw = yraw;
            best_u = u;
        }
    };
    for (const auto& r : recs)
        if (r.tag != "failure") absorb(r.u, r.y);

    std::optional<krig::Model> model;
    auto finish = [&](bool halted) {
        EgoResult res;
        if (best_u.size()) res.best_x = phys(best_u);
        res.best_y = best_raw;
        res.records = std::move(recs);
        res.model = std::move(model);
        res.halted = halted;
        return res;
    };
    auto halt_hit = [&]() {
        return cfg.halt_after >= 0 && n >= cfg.halt_after && n < budget;
    };

    // initialization: one LHS row per point, redrawn on non-finite returns
    for (int j = init_done; j < n_init; ++j) {
        RngStream retry(derive_seed(cfg.seed, "init-retry",
                                    static_cast<std::uint64_t>(j)));
        VectorXd u(dim);
        double yraw = nan;
        std::string src;
        int a = (j == init_done) ? pre_failed : 0;
        for (int burn = 1; burn < a; ++burn)  // attempts 1..a-1 already drawn
            for (int k = 0; k < dim; ++k) retry.u01();
        for (; a < kInitAttempts; ++a) {
            if (a == 0) {
                u = lhs.row(j).transpose();
                src = "lhs";
            } else {
                for (int k = 0; k < dim; ++k) u[k] = retry.u01();
                src = "retry";
            }
            yraw = objective(phys(u));
            if (std::isfinite(yraw)) break;
            Record f;
            f.iter = 0;
            f.tag = "failure";
            f.src = src;
            f.u = u;
            f.x = phys(u);
            f.y = nan;
            f.best_so_far = best_raw;
            emit(f);
        }
        if (!std::isfinite(yraw))
            throw divergence_error(
                "ego: objective kept failing at init point " +
                std::to_string(j));
        absorb(u, yraw);
        Record r;
        r.iter = 0;
        r.tag = "init";
        r.src = src;
        r.u = u;
        r.x = phys(u);
        r.y = yraw;
        r.best_so_far = best_raw;
        emit(r);
        if (halt_hit()) return finish(true);
    }

    auto fit_cfg = [&](int iter, const std::optional<VectorXd>& warm_theta) {
        krig::FitConfig fc;
        fc.nugget = cfg.nugget;
        fc.seed = derive_seed(cfg.seed, "fit",
                              static_cast<std::uint64_t>(iter));
        if (warm_theta) {
            fc.multistarts = cfg.refit_multistarts;
            fc.warm_start_log10 = warm_theta->array().log10().matrix();
        } else {
            fc.multistarts = cfg.init_multistarts;
        }
        return fc;
    };
    auto training = [&]() {
        return krig::TrainingSet::create(u_rows.topRows(n), y_int.head(n));
    };

    if (last_infill == 0) {
        model = krig::Model::fit(training(), fit_cfg(0, std::nullopt));
    } else {
        // the stored theta rebuilds the exact model the dead run had
        const VectorXd* theta = nullptr;
        for (auto it = recs.rbegin(); it != recs.rend(); ++it)
            if (it->theta) { theta = &*it->theta; break; }
        const auto ts = training();
        const double ng =
            cfg.nugget >= 0.0 ? cfg.nugget : krig::auto_nugget(ts.y);
        model = krig::Model::with_theta(ts, *theta, ng);
    }
    VectorXd surface = surface_means(*model, dim, cfg.surface_grid);

    auto dedupe = [&](const VectorXd& u, RngStream& jit) {
        return dedupe_point(u, u_rows, n, jit);
    };

    for (int it = last_infill + 1; it <= n_infill; ++it) {
        const double f_min = y_int.head(n).minCoeff();
        const auto g = ga_maximize(
            [&](const VectorXd& u) {
                return expected_improvement(*model, u, f_min);
            },
            dim, cfg.ga, derive_seed(cfg.seed, "ga",
                                     static_cast<std::uint64_t>(it)));
        RngStream jit(derive_seed(cfg.seed, "jitter",
                                  static_cast<std::uint64_t>(it)));
        RngStream fallback(derive_seed(cfg.seed, "fallback",
                                       static_cast<std::uint64_t>(it)));

        // attempt 0: GA best; 1: its runner-up; then uniform substitutes.
        // Failed attempts already on disk (a crashed run) are reproduced
        // and checked against the log instead of re-evaluated.
        const int replayed = (dangling_iter == it) ? dangling_count : 0;
        VectorXd u_pick;
        bool jittered = false;
        double ei_used = 0.0;
        double yraw = nan;
        for (int attempt = 0; attempt < kInfillAttempts; ++attempt) {
            VectorXd cand;
            double cand_ei = 0.0;
            if (attempt == 0) {
                cand = g.x;
                cand_ei = g.value;
            } else if (attempt == 1) {
                if (!g.has_second)
                    throw divergence_error(
                        "ego: objective failed and the GA has no "
                        "runner-up at infill " + std::to_string(it));
                cand = g.second_x;
                cand_ei = g.second_value;
            } else {
                cand.resize(dim);
                for (int k = 0; k < dim; ++k) cand[k] = fallback.u01();
            }
            auto [u_c, jit_c] = dedupe(cand, jit);
            if (attempt >= 2)
                cand_ei = expected_improvement(*model, u_c, f_min);
            if (attempt < replayed) {
                const auto& f =
                    recs[recs.size() - replayed + attempt];
                if (f.tag != "failure" ||
                    (f.u - u_c).lpNorm<Eigen::Infinity>() > 1e-12)
                    throw io_error(
                        "ego: dangling failure does not replay");
                continue;
            }
            yraw = objective(phys(u_c));
            if (std::isfinite(yraw)) {
                u_pick = u_c;
                jittered = jit_c;
                ei_used = cand_ei;
                break;
            }
            Record f;
            f.iter = it;
            f.tag = "failure";
            f.u = u_c;
            f.x = phys(u_c);
            f.y = nan;
            f.best_so_far = best_raw;
            f.ei = cand_ei;
            f.jittered = jit_c;
            emit(f);
            yraw = nan;
        }
        if (!std::isfinite(yraw))
            throw divergence_error(
                "ego: objective kept failing at infill " +
                std::to_string(it));
        dangling_iter = 0;
        dangling_count = 0;

        absorb(u_pick, yraw);
        model = krig::Model::fit(training(), fit_cfg(it, model->theta()));
        const VectorXd fresh = surface_means(*model, dim, cfg.surface_grid);
        const double delta = (fresh - surface).lpNorm<Eigen::Infinity>();
        surface = fresh;

        Record r;
        r.iter = it;
        r.tag = "infill";
        r.u = u_pick;
        r.x = phys(u_pick);
        r.y = yraw;
        r.best_so_far = best_raw;
        r.ei = ei_used;
        r.surface_delta = delta;
        r.jittered = jittered;
        r.theta = model->theta();
        emit(r);
        if (halt_hit()) return finish(true);
    }
    return finish(false);
}

}  // namespace spinewave::ego
