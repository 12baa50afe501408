#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "graspmaps/annotations.hpp"
#include "graspmaps/config.hpp"
#include "graspmaps/mapbuild.hpp"

namespace graspmaps::cli {

enum class DatasetFormat { jacquard, cornell, synth };
enum class Split { all, train, test };

// Fraction of the sorted scene list used for training; the rest is the test split.
inline constexpr double kTrainFraction = 0.9;

struct RunConfig {
    std::filesystem::path dataset_dir;
    std::filesystem::path out;
    DatasetFormat format = DatasetFormat::synth;
    Split split = Split::all;
    BuilderConfig builder_config;
    Builder builder = Builder::orange;
    std::vector<double> thresholds{0.25, 0.30, 0.50};
    std::optional<double> angle_tol_deg;
    std::uint64_t seed = 0;
    int scenes = 10;         // synthetic corpus size
    int source_width = 0;    // 0 picks the format default
    int source_height = 0;
    SynthParams synth;       // seed and image size are filled per scene

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

std::string to_string(DatasetFormat f);
std::string to_string(Split s);
DatasetFormat parse_format(std::string_view s);
Split parse_split(std::string_view s);

// One scene of a corpus: either parsed annotations (already scaled to the
// output size) or the reason it could not be loaded.
struct SceneResult {
    std::string id;
    std::optional<AnnotationSet> scene;
    std::string error;
};

/// Scene ids of the corpus in deterministic order, after the split.
std::vector<std::string> list_scenes(const RunConfig& cfg);

/// Loads one scene by id; never throws for per-scene defects.
SceneResult load_scene(const RunConfig& cfg, const std::string& id);

struct BuildSummary {
    std::size_t built = 0;
    std::size_t skipped = 0;
};

/// One stack file per scene plus manifest.json under cfg.out.
BuildSummary cmd_build(const RunConfig& cfg);

/// EvalReport JSON text; also written to cfg.out when set.
std::string cmd_eval(const RunConfig& cfg);

/// One PGM per channel plus fused.pgm; returns the number of images written.
std::size_t cmd_viz(const std::filesystem::path& stack_file, const std::filesystem::path& out_dir);

/// Writes the synthetic corpus as Jacquard grasp files; returns the scene count.
std::size_t cmd_synth(const RunConfig& cfg);

/// Command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace graspmaps::cli
