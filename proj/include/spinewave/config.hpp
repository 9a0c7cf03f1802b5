#pragma once
// One JSON file per experiment, sections {cpg, ribcage, plant, ego, output}.
// A run starts from the built-in defaults, deep-merges the user file, applies
// dotted --set overrides, resolves the seed, and hashes the canonical dump;
// the hash goes into every manifest so a resumed run can prove it is using
// the settings that produced the database it is about to extend.
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "spinewave/common.hpp"
#include "spinewave/cpg.hpp"
#include "spinewave/ego.hpp"
#include "spinewave/hydro.hpp"
#include "spinewave/kriging.hpp"
#include "spinewave/magnetics.hpp"

namespace spinewave::config {

using nlohmann::json;

// Built-in defaults; a sparse user file only needs the keys it changes.
json default_tree();

// validation_error on a missing file or malformed JSON; never touches disk
// beyond the read, so a failed load leaves no outputs behind.
json load_file(const std::string& path);

// "a.b.c=value" override. The value is parsed as JSON when it parses
// (numbers, booleans, arrays); anything else is kept as a plain string.
void apply_set(json& root, const std::string& assignment);

// Seed precedence config < SPINEWAVE_SEED < --seed; winner lands in
// root["seed"]. env_value is the raw environment string (null: unset).
void resolve_seed(json& root, const char* env_value,
                  std::optional<std::uint64_t> flag_seed);

// FNV-1a over the canonical dump (sorted keys, no whitespace). output.dir
// is excluded: the hash names the experiment, not its landing directory.
std::uint64_t canonical_hash(const json& root);
std::string hex64(std::uint64_t h);

// Fully typed view of a merged tree; parse throws validation_error naming
// the dotted key for wrong types and impossible values.
struct Run {
    json effective;    // the tree the hash was computed over
    std::string hash;  // hex64(canonical_hash(effective))
    std::uint64_t seed = 0;
    std::string out_dir;

    cpg::Params gait;
    double sim_duration = 0.0;
    double sim_dt = 0.0;

    magnetics::RibcageGeometry ribcage;
    double sweep_lo = 0.0, sweep_hi = 0.0;
    int sweep_points = 0;

    hydro::BodyGeometry body;
    hydro::ScenarioSpec scenario;  // kind filled in by the subcommand

    ego::EgoConfig opt;  // budgets and knobs; dim, bounds, seed filled later
    bool simple_variance = false;  // kriging variance convention (krig-fit)

    int surface_resolution = 50;
    int surface_dim_i = 0, surface_dim_j = 1;
};

Run parse(json effective);

json module_versions();

// Posterior over a res x res grid in the model's own (normalized) space,
// dims i and j swept, every other coordinate pinned at slice. After the data
// rows one '#'-prefixed sidecar row marks the incumbent: the training point
// with the lowest stored y, predicted at its true position. negate_mean
// flips written means back to raw scale for models fitted on a negated
// (maximized) objective.
void export_surface_grid(const krig::Model& model, int dim_i, int dim_j,
                         int resolution, std::ostream& os, double slice = 0.5,
                         bool negate_mean = false);

}  // namespace spinewave::config
