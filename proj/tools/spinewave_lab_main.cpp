// spinewave-lab: one experiment per process. Every subcommand shares the
// same pipeline: built-in defaults <- config file <- --set overrides <- seed
// resolution (config < SPINEWAVE_SEED < --seed), hashed into a manifest that
// is written before any long work starts. Exit codes: 0 done, 2 bad input,
// 3 the run itself failed (any partial database stays on disk).
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinewave/common.hpp"
#include "spinewave/config.hpp"
#include "spinewave/cpg.hpp"
#include "spinewave/ego.hpp"
#include "spinewave/hydro.hpp"
#include "spinewave/kriging.hpp"
#include "spinewave/magnetics.hpp"

namespace fs = std::filesystem;
namespace sw = spinewave;
namespace cfg = sw::config;
namespace hy = sw::hydro;
using nlohmann::json;
using sw::VectorXd;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int threads = 1;
};

cfg::Run load_run(const CommonArgs& a,
                  std::optional<std::uint64_t> fallback_seed = {}) {
    json tree = cfg::default_tree();
    tree.merge_patch(cfg::load_file(a.config_path));
    for (const auto& s : a.sets) cfg::apply_set(tree, s);
    if (!a.out_dir.empty()) tree["output"]["dir"] = a.out_dir;
    const char* env = std::getenv("SPINEWAVE_SEED");
    if (fallback_seed && !a.seed && env == nullptr)
        tree["seed"] = *fallback_seed;  // resume: reuse the recorded seed
    else
        cfg::resolve_seed(tree, env, a.seed);
    return cfg::parse(std::move(tree));
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw sw::io_error("cannot write " + p.string());
    return os;
}

void write_manifest(const cfg::Run& run, const std::string& subcommand,
                    const std::string& scenario, int threads) {
    json m{{"config_hash", run.hash},
           {"seed", run.seed},
           {"subcommand", subcommand},
           {"threads", threads},
           {"modules", cfg::module_versions()}};
    if (!scenario.empty()) m["scenario"] = scenario;
    auto os = open_out(fs::path(run.out_dir) / "manifest.json");
    os << m.dump(2) << '\n';
}

hy::Scenario scenario_from_name(const std::string& s) {
    if (s == "s1") return hy::Scenario::thrust;
    if (s == "s2") return hy::Scenario::sideflow;
    if (s == "s3") return hy::Scenario::vortex;
    if (s == "s4") return hy::Scenario::turning;
    throw sw::validation_error("--scenario: expected s1|s2|s3|s4, got \"" + s +
                               "\"");
}

int cmd_cpg_sim(const cfg::Run& run, int threads) {
    fs::create_directories(run.out_dir);
    write_manifest(run, "cpg-sim", "", threads);
    const auto tr = sw::cpg::simulate(run.gait,
                                      sw::cpg::limit_cycle_state(run.gait),
                                      run.sim_duration, run.sim_dt);
    auto os = open_out(fs::path(run.out_dir) / "trajectory.csv");
    sw::cpg::write_csv(tr, os);
    std::printf("trajectory.csv: %lld samples, %d oscillators\n",
                static_cast<long long>(tr.rows()), run.gait.n);
    return 0;
}

sw::krig::TrainingSet read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sw::validation_error("dataset file not found: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw sw::validation_error("dataset " + path + ": empty file");
    int cols = 1;
    for (char c : line)
        if (c == ',') ++cols;
    if (cols < 2)
        throw sw::validation_error("dataset " + path +
                                   ": header needs x columns then y");
    std::vector<double> vals;
    int rows = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const char* p = line.c_str();
        for (int c = 0; c < cols; ++c) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            const bool last = c == cols - 1;
            if (end == p || (last ? *end != '\0' : *end != ','))
                throw sw::validation_error(
                    "dataset " + path + " line " + std::to_string(lineno) +
                    ": expected " + std::to_string(cols) + " numbers");
            vals.push_back(v);
            p = last ? end : end + 1;
        }
        ++rows;
    }
    if (rows < 2)
        throw sw::validation_error("dataset " + path +
                                   ": need at least 2 data rows");
    sw::MatrixXd x(rows, cols - 1);
    VectorXd y(rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols - 1; ++c)
            x(r, c) = vals[static_cast<std::size_t>(r * cols + c)];
        y[r] = vals[static_cast<std::size_t>(r * cols + cols - 1)];
    }
    return sw::krig::TrainingSet::create(std::move(x), std::move(y));
}

int cmd_krig_fit(const cfg::Run& run, const std::string& data_path,
                 int threads) {
    const auto ts = read_dataset(data_path);
    fs::create_directories(run.out_dir);
    write_manifest(run, "krig-fit", "", threads);
    sw::krig::FitConfig fc;
    fc.nugget = run.opt.nugget;
    fc.multistarts = run.opt.init_multistarts;
    fc.seed = run.seed;
    fc.simple_variance = run.simple_variance;
    const auto model = sw::krig::Model::fit(ts, fc);
    auto os = open_out(fs::path(run.out_dir) / "model.json");
    os << model.to_json() << '\n';
    std::printf("model.json: %lld points, %lld dims, sigma2 %.6g\n",
                static_cast<long long>(model.size()),
                static_cast<long long>(model.dim()), model.sigma2());
    return 0;
}

int cmd_magnetics_sweep(const cfg::Run& run, int threads) {
    const double limit = sw::magnetics::max_bend_angle(run.ribcage);
    if (run.sweep_lo <= -limit || run.sweep_hi >= limit)
        throw sw::validation_error(
            "config key ribcage.sweep_lo/sweep_hi: sweep must stay strictly "
            "inside the +/-" +
            std::to_string(limit) + " rad travel stops");
    fs::create_directories(run.out_dir);
    write_manifest(run, "magnetics-sweep", "", threads);
    auto os = open_out(fs::path(run.out_dir) / "torque_curve.csv");
    sw::magnetics::write_torque_csv(run.ribcage, run.sweep_lo, run.sweep_hi,
                                    run.sweep_points, os);
    std::printf("torque_curve.csv: %d samples over [%g, %g] rad\n",
                run.sweep_points, run.sweep_lo, run.sweep_hi);
    return 0;
}

// Swim metrics recomputed from the recorded physical points, kept out of the
// database so its byte layout stays the resume contract.
void write_metrics_csv(const std::vector<sw::ego::Record>& records,
                       const hy::ScenarioSpec& spec,
                       const hy::BodyGeometry& body, int n_joints,
                       const fs::path& path) {
    auto os = open_out(path);
    os << "iter,tag,f,A,A_pp,St,a_over_d,b_eff,y\n";
    for (const auto& r : records) {
        if (r.tag == "failure") continue;
        const auto kin = hy::derive_kinematics(
            hy::params_from_design(r.x, n_joints), body, spec.U);
        os << r.iter << ',' << r.tag << ',' << sw::fmt_g(kin.f, 17) << ','
           << sw::fmt_g(kin.A, 17) << ',' << sw::fmt_g(kin.A_pp, 17) << ','
           << sw::fmt_g(kin.St, 17) << ',' << sw::fmt_g(kin.a_over_d, 17)
           << ',' << sw::fmt_g(kin.b_eff, 17) << ',' << sw::fmt_g(r.y, 17)
           << '\n';
    }
}

int cmd_optimize(cfg::Run run, const std::string& scenario_name,
                 int halt_after, int threads, bool resume) {
    const hy::Scenario kind = scenario_from_name(scenario_name);
    run.scenario.kind = kind;
    try {
        hy::validate(run.scenario);
    } catch (const sw::validation_error& e) {
        throw sw::validation_error(std::string("config section plant: ") +
                                   e.what());
    }
    if (!(run.scenario.U > 0.0))
        throw sw::validation_error(
            "config key plant.u_flow: must be positive for scenario runs");

    const int n_joints = static_cast<int>(run.body.link_lengths.size());
    const auto bounds = hy::design_bounds();
    sw::ego::EgoConfig e = run.opt;
    e.dim = hy::kDesignDim;
    e.lower = bounds.first;
    e.upper = bounds.second;
    e.minimize = !hy::scenario_maximizes(kind);
    e.seed = run.seed;
    e.config_hash = run.hash;
    e.halt_after = halt_after;
    e.resume = resume;
    if (run.surface_dim_j >= e.dim)
        throw sw::validation_error(
            "config key output.surface_dims: j must be below the design "
            "dimension " +
            std::to_string(e.dim));

    const fs::path dir(run.out_dir);
    const fs::path db = dir / "db.jsonl";
    if (!resume && fs::exists(db))
        throw sw::validation_error(
            db.string() + " already exists; resume it or pick a fresh --out");
    if (resume && !fs::exists(db))
        throw sw::validation_error("resume: no database at " + db.string());
    fs::create_directories(dir);
    e.db_path = db.string();
    write_manifest(run, resume ? "resume" : "optimize", scenario_name,
                   threads);

    const hy::ScenarioSpec spec = run.scenario;
    const hy::BodyGeometry body = run.body;
    const sw::ego::Objective objective = [spec, body,
                                          n_joints](const VectorXd& x) {
        return hy::scenario_objective(spec, hy::params_from_design(x, n_joints),
                                      body);
    };

    const auto t0 = std::chrono::steady_clock::now();
    const auto res = sw::ego::run_ego(objective, e);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    if (res.halted) {
        std::fprintf(stderr,
                     "halted after %d evaluations; partial database kept at "
                     "%s\n",
                     halt_after, e.db_path.c_str());
        return 3;
    }

    {
        auto os = open_out(dir / "history.csv");
        sw::ego::write_history_csv(res.records, os);
    }
    {
        json rj{{"best_x", std::vector<double>(
                               res.best_x.data(),
                               res.best_x.data() + res.best_x.size())},
                {"best_y", res.best_y},
                {"n_evals", res.records.size()},
                {"wall_time_s", wall}};
        auto os = open_out(dir / "result.json");
        os << rj.dump(2) << '\n';
    }
    if (res.model) {
        auto os = open_out(dir / "model_final.json");
        os << res.model->to_json() << '\n';
        auto surf = open_out(dir / "surface_final.csv");
        cfg::export_surface_grid(*res.model, run.surface_dim_i,
                                 run.surface_dim_j, run.surface_resolution,
                                 surf, 0.5, !e.minimize);
    }
    write_metrics_csv(res.records, spec, body, n_joints, dir / "metrics.csv");
    std::printf("%s best %.10g after %zu evaluations (%.1f s)\n",
                scenario_name.c_str(), res.best_y, res.records.size(), wall);
    return 0;
}

int cmd_resume(const CommonArgs& a) {
    // the manifest remembers what produced the database: seed, scenario,
    // and the hash the current config has to reproduce
    json tree = cfg::default_tree();
    tree.merge_patch(cfg::load_file(a.config_path));
    for (const auto& s : a.sets) cfg::apply_set(tree, s);
    if (!a.out_dir.empty()) tree["output"]["dir"] = a.out_dir;
    std::string dir;
    if (tree.contains("output") && tree["output"].contains("dir") &&
        tree["output"]["dir"].is_string())
        dir = tree["output"]["dir"].get<std::string>();
    else
        throw sw::validation_error("config key output.dir: expected a string");

    const fs::path mpath = fs::path(dir) / "manifest.json";
    std::ifstream min(mpath);
    if (!min)
        throw sw::validation_error("resume: no manifest.json in " + dir);
    json m;
    try {
        m = json::parse(min);
    } catch (const json::parse_error& e) {
        throw sw::validation_error("resume: bad manifest: " +
                                   std::string(e.what()));
    }
    if (!m.contains("scenario") || !m["scenario"].is_string())
        throw sw::validation_error(
            "resume: manifest records no scenario; only optimize runs "
            "resume");
    const auto scenario = m["scenario"].get<std::string>();
    if (!m.contains("seed") || !m["seed"].is_number_unsigned())
        throw sw::validation_error("resume: manifest has no usable seed");
    const auto mseed = m["seed"].get<std::uint64_t>();
    const auto mhash = m.value("config_hash", std::string());

    const char* env = std::getenv("SPINEWAVE_SEED");
    if (a.seed || env != nullptr)
        cfg::resolve_seed(tree, env, a.seed);
    else
        tree["seed"] = mseed;
    cfg::Run run = cfg::parse(std::move(tree));
    if (run.hash != mhash)
        throw sw::validation_error("resume: config hash mismatch (manifest " +
                                   mhash + ", current " + run.hash + ")");
    if (run.seed != mseed)
        throw sw::validation_error("resume: seed mismatch (manifest " +
                                   std::to_string(mseed) + ", current " +
                                   std::to_string(run.seed) + ")");
    return cmd_optimize(std::move(run), scenario, -1, a.threads, true);
}

int cmd_surface(const cfg::Run& run, std::string model_path, int res,
                bool negate, int threads) {
    if (res <= 0) res = run.surface_resolution;
    if (res < 2)
        throw sw::validation_error("--res: grid resolution must be >= 2");
    if (model_path.empty())
        model_path = (fs::path(run.out_dir) / "model_final.json").string();
    std::ifstream in(model_path);
    if (!in)
        throw sw::validation_error("model file not found: " + model_path);
    const std::string text{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    const auto model = sw::krig::Model::from_json(text);
    if (run.surface_dim_j >= model.dim())
        throw sw::validation_error(
            "config key output.surface_dims: j must be below the model "
            "dimension " +
            std::to_string(model.dim()));
    fs::create_directories(run.out_dir);
    write_manifest(run, "surface", "", threads);
    auto os = open_out(fs::path(run.out_dir) / "surface.csv");
    cfg::export_surface_grid(model, run.surface_dim_i, run.surface_dim_j, res,
                             os, 0.5, negate);
    std::printf("surface.csv: %d x %d grid over dims (%d, %d)\n", res, res,
                run.surface_dim_i, run.surface_dim_j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPG gait, magnetic spine, and surrogate-optimization lab"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string scenario, data_path, model_path;
    int halt_after = -1;
    int surf_res = 0;
    bool negate = false;

    const auto add_common = [&a](CLI::App* c) {
        c->add_option("--config", a.config_path, "experiment JSON file")
            ->required();
        c->add_option("--set", a.sets,
                      "override a config key: dotted.path=value (repeatable)");
        c->add_option("--seed", a.seed,
                      "master seed; wins over config and SPINEWAVE_SEED");
        c->add_option("--out", a.out_dir, "output directory, overrides "
                                          "output.dir");
        c->add_option("--threads", a.threads, "worker cap")
            ->check(CLI::PositiveNumber);
    };

    auto* sim = app.add_subcommand(
        "cpg-sim", "integrate the oscillator chain, write trajectory.csv");
    add_common(sim);

    auto* fit = app.add_subcommand("krig-fit",
                                   "fit a kriging model to a CSV dataset");
    add_common(fit);
    fit->add_option("--data", data_path, "dataset CSV: x_1..x_D,y with header")
        ->required();

    auto* opt =
        app.add_subcommand("optimize", "run the EGO loop on a scenario");
    add_common(opt);
    opt->add_option("--scenario", scenario, "s1|s2|s3|s4")->required();
    opt->add_option("--halt-after", halt_after)->group("");

    auto* res_cmd = app.add_subcommand(
        "resume", "continue an interrupted optimize run from its database");
    add_common(res_cmd);

    auto* sweep = app.add_subcommand("magnetics-sweep",
                                     "export the passive torque curve");
    add_common(sweep);

    auto* surf = app.add_subcommand(
        "surface", "export a posterior grid from a saved model");
    add_common(surf);
    surf->add_option("--model", model_path,
                     "model JSON (default: <out>/model_final.json)");
    surf->add_option("--res", surf_res,
                     "grid resolution per axis (default: "
                     "output.surface_resolution)");
    surf->add_flag("--negate", negate,
                   "flip means back to raw scale for maximize-run models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (a.threads > 0) Eigen::setNbThreads(a.threads);
        if (app.got_subcommand(sim)) return cmd_cpg_sim(load_run(a), a.threads);
        if (app.got_subcommand(fit))
            return cmd_krig_fit(load_run(a), data_path, a.threads);
        if (app.got_subcommand(opt))
            return cmd_optimize(load_run(a), scenario, halt_after, a.threads,
                                false);
        if (app.got_subcommand(res_cmd)) return cmd_resume(a);
        if (app.got_subcommand(sweep))
            return cmd_magnetics_sweep(load_run(a), a.threads);
        if (app.got_subcommand(surf))
            return cmd_surface(load_run(a), model_path, surf_res, negate,
                               a.threads);
        return 2;
    } catch (const sw::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
