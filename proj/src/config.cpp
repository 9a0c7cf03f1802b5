#include "spinewave/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>

namespace spinewave::config {

namespace {

// Walks a dotted path; nullptr when any segment is missing. Used for the
// few genuinely optional keys (everything else exists after the merge).
const json* find(const json& root, const std::string& key) {
    const json* cur = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object() || !cur->contains(part)) return nullptr;
        cur = &(*cur)[part];
        if (dot == std::string::npos) return cur;
        start = dot + 1;
    }
}

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw validation_error("config key " + key + ": " + what);
}

const json& at(const json& root, const std::string& key) {
    const json* v = find(root, key);
    if (v == nullptr) bad_key(key, "missing");
    return *v;
}

double get_num(const json& root, const std::string& key) {
    const json& v = at(root, key);
    if (!v.is_number()) bad_key(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad_key(key, "must be finite");
    return d;
}

double get_pos(const json& root, const std::string& key) {
    const double d = get_num(root, key);
    if (!(d > 0.0)) bad_key(key, "must be positive");
    return d;
}

double get_nonneg(const json& root, const std::string& key) {
    const double d = get_num(root, key);
    if (d < 0.0) bad_key(key, "must be non-negative");
    return d;
}

int get_int(const json& root, const std::string& key) {
    const json& v = at(root, key);
    if (!v.is_number_integer()) bad_key(key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& root, const std::string& key) {
    const json& v = at(root, key);
    if (!v.is_boolean()) bad_key(key, "expected true or false");
    return v.get<bool>();
}

std::string get_str(const json& root, const std::string& key) {
    const json& v = at(root, key);
    if (!v.is_string()) bad_key(key, "expected a string");
    return v.get<std::string>();
}

// Per-oscillator quantities accept a scalar (broadcast) or an n-entry array.
VectorXd get_broadcast(const json& root, const std::string& key, int n) {
    const json& v = at(root, key);
    if (v.is_number()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) bad_key(key, "must be finite");
        return VectorXd::Constant(n, d);
    }
    if (v.is_array()) {
        if (static_cast<int>(v.size()) != n)
            bad_key(key, "expected " + std::to_string(n) + " entries");
        VectorXd out(n);
        for (int i = 0; i < n; ++i) {
            if (!v[i].is_number()) bad_key(key, "entries must be numbers");
            out[i] = v[i].get<double>();
            if (!std::isfinite(out[i])) bad_key(key, "entries must be finite");
        }
        return out;
    }
    bad_key(key, "expected a number or an array");
}

// Re-raise a module's own complaint under the section that configured it.
template <typename Fn>
void section_validate(const char* section, Fn&& fn) {
    try {
        fn();
    } catch (const validation_error& e) {
        throw validation_error(std::string("config section ") + section +
                               ": " + e.what());
    }
}

}  // namespace

json default_tree() {
    static const json base = json::parse(R"json({
  "seed": 20260819,
  "cpg": {
    "n": 3,
    "omega": 4.39822971502571,
    "epsilon": 0.04,
    "offset": 0.0,
    "gain": 1.0,
    "phase_lag": 0.5235987755982988,
    "coupling_u": 0.5,
    "coupling_v": 0.5,
    "duration": 20.0,
    "dt": 0.001
  },
  "ribcage": {
    "n_joints": 3,
    "magnets_per_joint": 8,
    "magnet_moment": 0.0725,
    "rail_gap": 0.008,
    "lever_arm": 0.01,
    "constrained": true,
    "max_angle_constrained": 0.5235987755982988,
    "max_angle_free": 0.8726646259971648,
    "sweep_lo": -0.5,
    "sweep_hi": 0.5,
    "sweep_points": 101
  },
  "plant": {
    "preset": 3,
    "body_length": 0.725,
    "body_depth": 0.1,
    "u_flow": 0.3,
    "flow_angle": 0.2617993877991494,
    "cylinder_diameter": 0.1,
    "lambda_torque": 1.0,
    "strouhal_amplitude": "peak-to-peak",
    "constants": {
      "c_t1": 6.0,
      "c_d0": 0.12,
      "c_d1": 1.5,
      "c_m1": 1.0,
      "st_m": 0.45,
      "eta_v": 0.29,
      "sigma_f": 0.1,
      "p0": 1.0,
      "kappa": 1.0,
      "thrust_band": 0.02,
      "thrust_penalty": 10.0
    }
  },
  "ego": {
    "n_init": -1,
    "n_infill": -1,
    "nugget": -1.0,
    "init_multistarts": 8,
    "refit_multistarts": 2,
    "surface_grid": 50,
    "simple_variance": false,
    "ga": {
      "population": 50,
      "generations": 100,
      "p_crossover": 0.9,
      "p_mutation": -1.0,
      "blend_alpha": 0.5,
      "mutation_sigma": 0.1
    }
  },
  "output": {
    "dir": "out",
    "surface_resolution": 50,
    "surface_dims": [0, 1]
  }
})json");
    return base;
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config file not found: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw validation_error("config file " + path + ": " + e.what());
    }
}

void apply_set(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw validation_error("--set " + assignment +
                               ": expected key.path=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare words are strings
    }
    json* cur = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw validation_error("--set " + assignment +
                                   ": empty key segment");
        if (dot == std::string::npos) {
            (*cur)[part] = std::move(value);
            return;
        }
        if (!cur->contains(part) || !(*cur)[part].is_object())
            (*cur)[part] = json::object();
        cur = &(*cur)[part];
        start = dot + 1;
    }
}

void resolve_seed(json& root, const char* env_value,
                  std::optional<std::uint64_t> flag_seed) {
    if (env_value != nullptr) {
        errno = 0;
        char* end = nullptr;
        const bool plausible = *env_value != '\0' && *env_value != '-' &&
                               *env_value != '+' && *env_value != ' ';
        const unsigned long long v =
            plausible ? std::strtoull(env_value, &end, 10) : 0ULL;
        if (!plausible || errno != 0 || end == env_value || *end != '\0')
            throw validation_error(
                "SPINEWAVE_SEED: expected a non-negative integer, got \"" +
                std::string(env_value) + "\"");
        root["seed"] = static_cast<std::uint64_t>(v);
    }
    if (flag_seed) root["seed"] = *flag_seed;
}

std::uint64_t canonical_hash(const json& root) {
    // the hash identifies the experiment, not where it lands: the same run
    // sent to a different directory must keep its identity, or a killed run
    // could never be resumed from a copy
    if (root.is_object() && root.contains("output") &&
        root["output"].is_object() && root["output"].contains("dir")) {
        json stripped = root;
        stripped["output"].erase("dir");
        return fnv1a64(stripped.dump());
    }
    return fnv1a64(root.dump());
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

Run parse(json effective) {
    Run r;
    r.effective = std::move(effective);
    const json& j = r.effective;
    r.hash = hex64(canonical_hash(j));

    {
        const json& s = at(j, "seed");
        if (!s.is_number_unsigned())
            bad_key("seed", "expected a non-negative integer");
        r.seed = s.get<std::uint64_t>();
    }

    {
        cpg::Params p;
        p.n = get_int(j, "cpg.n");
        if (p.n < 1) bad_key("cpg.n", "must be at least 1");
        p.omega = get_pos(j, "cpg.omega");
        p.epsilon = get_broadcast(j, "cpg.epsilon", p.n);
        p.offset = get_broadcast(j, "cpg.offset", p.n);
        p.gain = get_pos(j, "cpg.gain");
        p.phase_lag = get_num(j, "cpg.phase_lag");
        p.coupling_u = get_num(j, "cpg.coupling_u");
        p.coupling_v = get_num(j, "cpg.coupling_v");
        section_validate("cpg", [&] { cpg::validate(p); });
        r.gait = std::move(p);
        r.sim_duration = get_pos(j, "cpg.duration");
        r.sim_dt = get_pos(j, "cpg.dt");
        if (r.sim_dt > r.sim_duration)
            bad_key("cpg.dt", "must not exceed cpg.duration");
    }

    {
        magnetics::RibcageGeometry g;
        g.n_joints = get_int(j, "ribcage.n_joints");
        g.magnets_per_joint = get_int(j, "ribcage.magnets_per_joint");
        g.magnet_moment = get_nonneg(j, "ribcage.magnet_moment");
        g.rail_gap = get_pos(j, "ribcage.rail_gap");
        g.lever_arm = get_pos(j, "ribcage.lever_arm");
        g.constrained = get_bool(j, "ribcage.constrained");
        g.max_angle_constrained = get_pos(j, "ribcage.max_angle_constrained");
        g.max_angle_free = get_pos(j, "ribcage.max_angle_free");
        section_validate("ribcage", [&] { magnetics::validate(g); });
        r.ribcage = g;
        r.sweep_lo = get_num(j, "ribcage.sweep_lo");
        r.sweep_hi = get_num(j, "ribcage.sweep_hi");
        if (!(r.sweep_lo < r.sweep_hi))
            bad_key("ribcage.sweep_hi", "must exceed ribcage.sweep_lo");
        r.sweep_points = get_int(j, "ribcage.sweep_points");
        if (r.sweep_points < 2) bad_key("ribcage.sweep_points", "needs >= 2");
    }

    {
        const int preset = get_int(j, "plant.preset");
        hydro::BodyGeometry b;
        section_validate("plant",
                         [&] { b = hydro::BodyGeometry::preset(preset); });
        b.body_length = get_pos(j, "plant.body_length");
        b.body_depth = get_pos(j, "plant.body_depth");
        if (const json* ll = find(j, "plant.link_lengths")) {
            if (!ll->is_array() || ll->empty())
                bad_key("plant.link_lengths", "expected a non-empty array");
            b.link_lengths.resize(static_cast<Eigen::Index>(ll->size()));
            for (Eigen::Index i = 0; i < b.link_lengths.size(); ++i) {
                const json& e = (*ll)[static_cast<std::size_t>(i)];
                if (!e.is_number())
                    bad_key("plant.link_lengths", "entries must be numbers");
                b.link_lengths[i] = e.get<double>();
            }
        }
        section_validate("plant", [&] { hydro::validate(b); });
        r.body = std::move(b);

        hydro::ScenarioSpec s;
        s.U = get_nonneg(j, "plant.u_flow");
        s.flow_angle = get_num(j, "plant.flow_angle");
        s.cylinder_diameter = get_num(j, "plant.cylinder_diameter");
        s.lambda_torque = get_nonneg(j, "plant.lambda_torque");
        const std::string conv = get_str(j, "plant.strouhal_amplitude");
        if (conv == "half")
            s.half_amplitude_st = true;
        else if (conv != "peak-to-peak")
            bad_key("plant.strouhal_amplitude",
                    "expected \"peak-to-peak\" or \"half\"");
        s.constants.c_t1 = get_num(j, "plant.constants.c_t1");
        s.constants.c_d0 = get_num(j, "plant.constants.c_d0");
        s.constants.c_d1 = get_num(j, "plant.constants.c_d1");
        s.constants.c_m1 = get_num(j, "plant.constants.c_m1");
        s.constants.st_m = get_pos(j, "plant.constants.st_m");
        s.constants.eta_v = get_num(j, "plant.constants.eta_v");
        s.constants.sigma_f = get_pos(j, "plant.constants.sigma_f");
        s.constants.p0 = get_nonneg(j, "plant.constants.p0");
        s.constants.kappa = get_num(j, "plant.constants.kappa");
        s.constants.thrust_band = get_nonneg(j, "plant.constants.thrust_band");
        s.constants.thrust_penalty =
            get_nonneg(j, "plant.constants.thrust_penalty");
        section_validate("plant", [&] { hydro::validate(s); });
        r.scenario = s;
    }

    {
        ego::EgoConfig e;
        e.n_init = get_int(j, "ego.n_init");
        e.n_infill = get_int(j, "ego.n_infill");
        e.nugget = get_num(j, "ego.nugget");
        e.init_multistarts = get_int(j, "ego.init_multistarts");
        if (e.init_multistarts < 1)
            bad_key("ego.init_multistarts", "must be at least 1");
        e.refit_multistarts = get_int(j, "ego.refit_multistarts");
        if (e.refit_multistarts < 1)
            bad_key("ego.refit_multistarts", "must be at least 1");
        e.surface_grid = get_int(j, "ego.surface_grid");
        if (e.surface_grid < 2) bad_key("ego.surface_grid", "needs >= 2");
        e.ga.population = get_int(j, "ego.ga.population");
        if (e.ga.population < 4 || e.ga.population % 2 != 0)
            bad_key("ego.ga.population", "must be even and at least 4");
        e.ga.generations = get_int(j, "ego.ga.generations");
        if (e.ga.generations < 1) bad_key("ego.ga.generations", "too small");
        e.ga.p_crossover = get_num(j, "ego.ga.p_crossover");
        if (e.ga.p_crossover < 0.0 || e.ga.p_crossover > 1.0)
            bad_key("ego.ga.p_crossover", "must lie in [0, 1]");
        e.ga.p_mutation = get_num(j, "ego.ga.p_mutation");
        if (e.ga.p_mutation > 1.0)
            bad_key("ego.ga.p_mutation", "must be <= 1 (negative: 1/dim)");
        e.ga.blend_alpha = get_nonneg(j, "ego.ga.blend_alpha");
        e.ga.mutation_sigma = get_pos(j, "ego.ga.mutation_sigma");
        r.opt = std::move(e);
        r.simple_variance = get_bool(j, "ego.simple_variance");
    }

    {
        r.out_dir = get_str(j, "output.dir");
        if (r.out_dir.empty()) bad_key("output.dir", "must not be empty");
        r.surface_resolution = get_int(j, "output.surface_resolution");
        if (r.surface_resolution < 2)
            bad_key("output.surface_resolution", "needs >= 2");
        const json& sd = at(j, "output.surface_dims");
        if (!sd.is_array() || sd.size() != 2 || !sd[0].is_number_integer() ||
            !sd[1].is_number_integer())
            bad_key("output.surface_dims", "expected two integers [i, j]");
        r.surface_dim_i = sd[0].get<int>();
        r.surface_dim_j = sd[1].get<int>();
        if (r.surface_dim_i < 0 || r.surface_dim_j <= r.surface_dim_i)
            bad_key("output.surface_dims", "needs 0 <= i < j");
    }

    return r;
}

json module_versions() {
    return json{{"cpg", "1.0.0"},      {"kriging", "1.0.0"},
                {"ego", "1.0.0"},      {"magnetics", "1.0.0"},
                {"hydro", "1.0.0"},    {"harness", "1.0.0"}};
}

void export_surface_grid(const krig::Model& model, int dim_i, int dim_j,
                         int resolution, std::ostream& os, double slice,
                         bool negate_mean) {
    const int dim = static_cast<int>(model.dim());
    if (resolution < 2)
        throw validation_error("surface export: resolution must be >= 2");
    if (dim_i < 0 || dim_j <= dim_i || dim_j >= dim)
        throw validation_error("surface export: dims need 0 <= i < j < " +
                               std::to_string(dim));
    const double sign = negate_mean ? -1.0 : 1.0;
    os << "x_i,x_j,mean,sd\n";
    VectorXd x = VectorXd::Constant(dim, slice);
    for (int a = 0; a < resolution; ++a) {
        x[dim_i] = a / (resolution - 1.0);
        for (int b = 0; b < resolution; ++b) {
            x[dim_j] = b / (resolution - 1.0);
            const auto pr = model.predict(x);
            os << fmt_g(x[dim_i], 17) << ',' << fmt_g(x[dim_j], 17) << ','
               << fmt_g(sign * pr.mean, 17) << ',' << fmt_g(pr.sd, 17) << '\n';
        }
    }
    Eigen::Index ibest = 0;
    model.train_y().minCoeff(&ibest);
    const VectorXd xb = model.train_x().row(ibest).transpose();
    const auto pb = model.predict(xb);
    os << "# incumbent," << fmt_g(xb[dim_i], 17) << ',' << fmt_g(xb[dim_j], 17)
       << ',' << fmt_g(sign * pb.mean, 17) << ',' << fmt_g(pb.sd, 17) << '\n';
}

}  // namespace spinewave::config
