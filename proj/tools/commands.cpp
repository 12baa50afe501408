#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "graspmaps/errors.hpp"
#include "graspmaps/eval.hpp"
#include "graspmaps/inference.hpp"
#include "graspmaps/stack_io.hpp"

namespace graspmaps::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string_view file_suffix(DatasetFormat f) {
    return f == DatasetFormat::cornell ? "cpos.txt" : "_grasps.txt";
}

std::pair<int, int> source_size(const RunConfig& cfg) {
    int w = cfg.source_width;
    int h = cfg.source_height;
    if (w <= 0) w = cfg.format == DatasetFormat::cornell ? 640 : 1024;
    if (h <= 0) h = cfg.format == DatasetFormat::cornell ? 480 : 1024;
    return {w, h};
}

SynthParams synth_params(const RunConfig& cfg, int index) {
    SynthParams p = cfg.synth;
    p.seed = cfg.seed + static_cast<std::uint64_t>(index);
    p.image_width = cfg.builder_config.out_width;
    p.image_height = cfg.builder_config.out_height;
    return p;
}

ordered_json synth_to_json(const SynthParams& p) {
    ordered_json j;
    j["num_rects"] = p.num_rects;
    j["center_min"] = p.center_min;
    j["center_max"] = p.center_max;
    j["width_min"] = p.width_min;
    j["width_max"] = p.width_max;
    j["height_min"] = p.height_min;
    j["height_max"] = p.height_max;
    j["jaw_to_width"] = p.jaw_to_width;
    j["angle_spread"] = p.angle_spread;
    j["duplicate_center_fraction"] = p.duplicate_center_fraction;
    j["bins"] = p.bins;
    j["min_center_separation"] = p.min_center_separation;
    j["non_overlapping"] = p.non_overlapping;
    j["pixel_centers"] = p.pixel_centers;
    return j;
}

SynthParams synth_from_json(const nlohmann::json& j) {
    SynthParams p;
    for (const auto& [key, v] : j.items()) {
        if (key == "num_rects") p.num_rects = v.get<int>();
        else if (key == "center_min") p.center_min = v.get<double>();
        else if (key == "center_max") p.center_max = v.get<double>();
        else if (key == "width_min") p.width_min = v.get<double>();
        else if (key == "width_max") p.width_max = v.get<double>();
        else if (key == "height_min") p.height_min = v.get<double>();
        else if (key == "height_max") p.height_max = v.get<double>();
        else if (key == "jaw_to_width") p.jaw_to_width = v.get<double>();
        else if (key == "angle_spread") p.angle_spread = v.get<double>();
        else if (key == "duplicate_center_fraction") p.duplicate_center_fraction = v.get<double>();
        else if (key == "bins") p.bins = v.get<int>();
        else if (key == "min_center_separation") p.min_center_separation = v.get<double>();
        else if (key == "non_overlapping") p.non_overlapping = v.get<bool>();
        else if (key == "pixel_centers") p.pixel_centers = v.get<bool>();
        else throw InvalidArgument("unknown synth config key '" + key + "'");
    }
    return p;
}

// 8-bit binary PGM, min-max normalized; a constant plane is black when zero
// and white otherwise.
void write_pgm(const fs::path& path, std::span<const float> values, int width, int height) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const float lo = *lo_it;
    const float hi = *hi_it;
    std::string bytes(values.size(), '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v;
        if (hi > lo) v = (values[i] - lo) / (hi - lo);
        else v = hi != 0.0f ? 1.0 : 0.0;
        bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
    write_file(path, fmt::format("P5\n{} {}\n255\n", width, height) + bytes);
}

}  // namespace

std::string to_string(DatasetFormat f) {
    switch (f) {
        case DatasetFormat::jacquard: return "jacquard";
        case DatasetFormat::cornell: return "cornell";
        case DatasetFormat::synth: return "synth";
    }
    return "synth";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::all: return "all";
        case Split::train: return "train";
        case Split::test: return "test";
    }
    return "all";
}

DatasetFormat parse_format(std::string_view s) {
    if (s == "jacquard") return DatasetFormat::jacquard;
    if (s == "cornell") return DatasetFormat::cornell;
    if (s == "synth") return DatasetFormat::synth;
    throw InvalidArgument("unknown dataset format '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
    if (s == "all") return Split::all;
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw InvalidArgument("unknown split '" + std::string(s) + "'");
}

ordered_json to_json(const RunConfig& cfg) {
    ordered_json j;
    j["dataset_dir"] = cfg.dataset_dir.generic_string();
    j["out"] = cfg.out.generic_string();
    j["format"] = to_string(cfg.format);
    j["split"] = to_string(cfg.split);
    j["builder_config"] = graspmaps::to_json(cfg.builder_config);
    j["builder"] = to_string(cfg.builder);
    j["thresholds"] = cfg.thresholds;
    j["angle_tol_deg"] = cfg.angle_tol_deg ? ordered_json(*cfg.angle_tol_deg) : ordered_json();
    j["seed"] = cfg.seed;
    j["scenes"] = cfg.scenes;
    j["source_width"] = cfg.source_width;
    j["source_height"] = cfg.source_height;
    j["synth"] = synth_to_json(cfg.synth);
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("run config must be a JSON object");
    RunConfig cfg;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "dataset_dir") cfg.dataset_dir = v.get<std::string>();
            else if (key == "out") cfg.out = v.get<std::string>();
            else if (key == "format") cfg.format = parse_format(v.get<std::string>());
            else if (key == "split") cfg.split = parse_split(v.get<std::string>());
            else if (key == "builder_config") cfg.builder_config = builder_config_from_json(v);
            else if (key == "builder") cfg.builder = parse_builder(v.get<std::string>());
            else if (key == "thresholds") cfg.thresholds = v.get<std::vector<double>>();
            else if (key == "angle_tol_deg") {
                if (v.is_null()) cfg.angle_tol_deg.reset();
                else cfg.angle_tol_deg = v.get<double>();
            } else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "scenes") cfg.scenes = v.get<int>();
            else if (key == "source_width") cfg.source_width = v.get<int>();
            else if (key == "source_height") cfg.source_height = v.get<int>();
            else if (key == "synth") cfg.synth = synth_from_json(v);
            else throw InvalidArgument("unknown run config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("run config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    try {
        return run_config_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

std::vector<std::string> list_scenes(const RunConfig& cfg) {
    std::vector<std::string> ids;
    if (cfg.format == DatasetFormat::synth) {
        for (int i = 0; i < cfg.scenes; ++i) ids.push_back(fmt::format("synth_{}", cfg.seed + static_cast<std::uint64_t>(i)));
    } else {
        if (!fs::is_directory(cfg.dataset_dir)) {
            throw std::runtime_error("dataset directory not found: " + cfg.dataset_dir.string());
        }
        const std::string_view suffix = file_suffix(cfg.format);
        for (const auto& entry : fs::recursive_directory_iterator(cfg.dataset_dir)) {
            if (!entry.is_regular_file()) continue;
            const fs::path rel = fs::relative(entry.path(), cfg.dataset_dir);
            const std::string name = rel.generic_string();
            if (ends_with(name, suffix)) ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
        std::sort(ids.begin(), ids.end());
    }
    const auto n_train = static_cast<std::size_t>(std::floor(kTrainFraction * static_cast<double>(ids.size())));
    if (cfg.split == Split::train) ids.resize(n_train);
    if (cfg.split == Split::test) ids.erase(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    return ids;
}

SceneResult load_scene(const RunConfig& cfg, const std::string& id) {
    SceneResult result{id, std::nullopt, {}};
    try {
        const BuilderConfig& bc = cfg.builder_config;
        if (cfg.format == DatasetFormat::synth) {
            const auto dash = id.rfind('_');
            const int index = static_cast<int>(std::stoull(id.substr(dash + 1)) - cfg.seed);
            result.scene = synth_scene(synth_params(cfg, index));
            return result;
        }
        const auto [w, h] = source_size(cfg);
        const fs::path file = cfg.dataset_dir / (id + std::string(file_suffix(cfg.format)));
        const std::string text = read_file(file);
        AnnotationSet raw;
        if (cfg.format == DatasetFormat::jacquard) {
            raw = parse_jacquard(text, w, h, id);
        } else {
            CornellParse parsed = parse_cornell(text, w, h, id);
            if (parsed.skipped > 0) warn(fmt::format("{}: skipped {} defective rectangles", id, parsed.skipped));
            raw = std::move(parsed.set);
        }
        result.scene = scale_annotations(raw, bc.out_width, bc.out_height);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

BuildSummary cmd_build(const RunConfig& cfg) {
    validate(cfg.builder_config);
    if (cfg.out.empty()) throw InvalidArgument("build: --out is required");
    fs::create_directories(cfg.out);

    const std::vector<std::string> ids = list_scenes(cfg);
    if (ids.empty()) warn("no scenes found");

    ordered_json manifest;
    manifest["format"] = to_string(cfg.format);
    manifest["split"] = to_string(cfg.split);
    manifest["config"] = graspmaps::to_json(cfg.builder_config);
    manifest["fingerprint"] = fingerprint(cfg.builder_config);
    auto scenes = ordered_json::array();
    auto skipped = ordered_json::array();

    BuildSummary summary;
    for (const std::string& id : ids) {
        SceneResult loaded = load_scene(cfg, id);
        if (loaded.scene) {
            try {
                const std::string file = std::string(id) + ".gmap";
                const fs::path path = cfg.out / file;
                fs::create_directories(path.parent_path());
                write_stack(path, build_orange_maps(*loaded.scene, cfg.builder_config));
                scenes.push_back({{"id", id}, {"annotations", loaded.scene->rects.size()}, {"file", file}});
                ++summary.built;
                continue;
            } catch (const InvalidArgument& e) {
                loaded.error = e.what();
            }
        }
        warn(fmt::format("{}: {}", id, loaded.error));
        skipped.push_back({{"id", id}, {"error", loaded.error}});
        ++summary.skipped;
    }
    manifest["scenes"] = scenes;
    manifest["skipped"] = skipped;
    manifest["skipped_count"] = summary.skipped;
    write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

std::string cmd_eval(const RunConfig& cfg) {
    std::optional<double> angle_tol;
    if (cfg.angle_tol_deg) angle_tol = *cfg.angle_tol_deg * kPi / 180.0;
    ReconstructionScorer scorer(cfg.builder_config, cfg.builder, cfg.thresholds, angle_tol);

    for (const std::string& id : list_scenes(cfg)) {
        const SceneResult loaded = load_scene(cfg, id);
        if (!loaded.scene) {
            warn(fmt::format("{}: {}", id, loaded.error));
            scorer.skip(id);
            continue;
        }
        scorer.add(*loaded.scene);
    }
    ordered_json j = to_json(scorer.report());
    j["format"] = to_string(cfg.format);
    j["split"] = to_string(cfg.split);
    const std::string text = j.dump(2) + "\n";
    if (!cfg.out.empty()) {
        if (cfg.out.has_parent_path()) fs::create_directories(cfg.out.parent_path());
        write_file(cfg.out, text);
    }
    return text;
}

std::size_t cmd_viz(const fs::path& stack_file, const fs::path& out_dir) {
    const GraspMapStack stack = read_stack(stack_file);
    fs::create_directories(out_dir);
    const auto names = stack.channel_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        write_pgm(out_dir / (names[i] + ".pgm"), stack.plane(i), stack.width(), stack.height());
    }
    const FusedQuality fused = fuse_quality(stack);
    std::vector<float> best(stack.plane_size(), 0.0f);
    for (int b = 0; b < fused.bins; ++b) {
        const auto plane = fused.plane(b);
        for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], plane[i]);
    }
    write_pgm(out_dir / "fused.pgm", best, stack.width(), stack.height());
    return names.size() + 1;
}

std::size_t cmd_synth(const RunConfig& cfg) {
    if (cfg.out.empty()) throw InvalidArgument("synth: --out is required");
    fs::create_directories(cfg.out);
    for (int i = 0; i < cfg.scenes; ++i) {
        const AnnotationSet scene = synth_scene(synth_params(cfg, i));
        write_file(cfg.out / (scene.scene_id + "_grasps.txt"), to_jacquard(scene));
    }
    return static_cast<std::size_t>(std::max(cfg.scenes, 0));
}

int run(int argc, char** argv) {
    CLI::App app{"Orientation-binned grasp map toolkit"};
    app.require_subcommand(1);

    std::string config_path, format, split, jaw_policy, quality_mode, gamma_mode, builder, dataset, out, stack;
    int bins = 0, size = 0, scenes = 0, source_size_px = 0, num_rects = 0;
    std::uint64_t seed = 0;
    double angle_tol = 0.0, dup_fraction = 0.0;
    std::vector<double> thresholds;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run config; flags override it")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory (build, synth) or report file (eval)");
        sub->add_option("--bins", bins, "Number of orientation bins")->check(CLI::PositiveNumber);
        sub->add_option("--jaw-policy", jaw_policy, "minimum | maximum");
        sub->add_option("--quality-mode", quality_mode, "soft | binary");
        sub->add_option("--gamma-mode", gamma_mode, "region | centers");
        sub->add_option("--size", size, "Square output size in pixels")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Seed of the synthetic corpus");
        sub->add_option("--format", format, "jacquard | cornell | synth");
        sub->add_option("--split", split, "all | train | test");
        sub->add_option("--scenes", scenes, "Synthetic corpus size")->check(CLI::NonNegativeNumber);
        sub->add_option("--num-rects", num_rects, "Rectangles per synthetic scene")->check(CLI::NonNegativeNumber);
        sub->add_option("--duplicate-fraction", dup_fraction, "Fraction of synthetic rects sharing a center");
        sub->add_option("--source-size", source_size_px, "Square size of the source images in pixels");
    };

    CLI::App* build = app.add_subcommand("build", "Build map stacks for every scene of a corpus");
    build->add_option("dataset_dir", dataset, "Dataset directory (unused for synth)");
    add_common(build);

    CLI::App* eval = app.add_subcommand("eval", "Score perfect-regressor reconstruction of a corpus");
    eval->add_option("dataset_dir", dataset, "Dataset directory (unused for synth)");
    add_common(eval);
    eval->add_option("--builder", builder, "orange | legacy");
    eval->add_option("--thresholds", thresholds, "IoU thresholds")->delimiter(',');
    eval->add_option("--angle-tol", angle_tol, "Angle criterion in degrees (off when absent)");

    CLI::App* viz = app.add_subcommand("viz", "Render the channels of a stack file as PGM images");
    viz->add_option("stack", stack, "Stack file")->required();
    viz->add_option("--out", out, "Output directory")->required();

    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic corpus as Jacquard grasp files");
    add_common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (viz->parsed()) {
            const std::size_t n = cmd_viz(stack, out);
            std::cerr << "wrote " << n << " images to " << out << '\n';
            return 0;
        }

        CLI::App* sub = app.get_subcommands().front();
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        const auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
        if (!dataset.empty()) cfg.dataset_dir = dataset;
        if (given("--out")) cfg.out = out;
        if (given("--bins")) cfg.builder_config.bins = cfg.synth.bins = bins;
        if (given("--jaw-policy")) cfg.builder_config.jaw_policy = parse_jaw_policy(jaw_policy);
        if (given("--quality-mode")) cfg.builder_config.quality_mode = parse_quality_mode(quality_mode);
        if (given("--gamma-mode")) cfg.builder_config.gamma_mode = parse_gamma_mode(gamma_mode);
        if (given("--size")) cfg.builder_config.out_width = cfg.builder_config.out_height = size;
        if (given("--seed")) cfg.seed = seed;
        if (given("--format")) cfg.format = parse_format(format);
        if (given("--split")) cfg.split = parse_split(split);
        if (given("--scenes")) cfg.scenes = scenes;
        if (given("--num-rects")) cfg.synth.num_rects = num_rects;
        if (given("--duplicate-fraction")) cfg.synth.duplicate_center_fraction = dup_fraction;
        if (given("--source-size")) cfg.source_width = cfg.source_height = source_size_px;
        if (given("--builder")) cfg.builder = parse_builder(builder);
        if (given("--thresholds")) cfg.thresholds = thresholds;
        if (given("--angle-tol")) cfg.angle_tol_deg = angle_tol;

        if (build->parsed()) {
            const BuildSummary s = cmd_build(cfg);
            std::cerr << "built " << s.built << " stacks, skipped " << s.skipped << '\n';
        } else if (eval->parsed()) {
            const std::string report = cmd_eval(cfg);
            if (cfg.out.empty()) std::cout << report;
        } else if (synth->parsed()) {
            std::cerr << "wrote " << cmd_synth(cfg) << " scenes to " << cfg.out << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace graspmaps::cli
