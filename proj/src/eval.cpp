#include "graspmaps/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "graspmaps/errors.hpp"

namespace graspmaps {

bool grasp_success(const GraspRect& pred, std::span<const GraspRect> gts, double iou_threshold,
                   std::optional<double> angle_tol) {
    if (gts.empty()) throw InvalidArgument("grasp_success: no ground-truth rectangles");
    if (!(iou_threshold > 0 && iou_threshold <= 1)) throw InvalidArgument("grasp_success: threshold outside (0, 1]");
    return std::any_of(gts.begin(), gts.end(), [&](const GraspRect& gt) {
        if (angle_tol && angular_distance(pred.phi, gt.phi) > *angle_tol) return false;
        return rect_iou(pred, gt) >= iou_threshold;
    });
}

ScoredGrasp extract_legacy_best(const LegacyMapStack& maps) {
    const auto it = std::max_element(maps.q.begin(), maps.q.end());
    if (it == maps.q.end() || *it <= 0.0f) throw NoGrasp("extract_legacy_best: quality map is all zero");
    const auto idx = static_cast<std::size_t>(it - maps.q.begin());
    const int x = static_cast<int>(idx % maps.width);
    const int y = static_cast<int>(idx / maps.width);
    const GraspRect rect = reconstruct_box({x + 0.5, y + 0.5}, maps.angle[idx], maps.omega[idx]);
    return {rect, *it, 0, x, y};
}

std::vector<double> EvalReport::thresholds() const {
    std::vector<double> t;
    for (const auto& r : results) t.push_back(r.threshold);
    return t;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
    nlohmann::ordered_json config = to_json(report.config);
    config["angle_tol"] = report.angle_tol ? nlohmann::ordered_json(*report.angle_tol) : nlohmann::ordered_json();
    config["fingerprint"] = report.fingerprint;

    nlohmann::ordered_json j;
    j["builder"] = to_string(report.builder);
    j["config"] = config;
    j["thresholds"] = report.thresholds();
    auto results = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        results.push_back({{"threshold", r.threshold},
                           {"successes", r.successes},
                           {"total", r.total},
                           {"accuracy", r.accuracy}});
    }
    j["results"] = results;
    j["skipped"] = report.skipped;
    j["skipped_scenes"] = report.skipped_scenes;
    return j;
}

ReconstructionScorer::ReconstructionScorer(BuilderConfig cfg, Builder builder, std::vector<double> thresholds,
                                           std::optional<double> angle_tol) {
    validate(cfg);
    if (thresholds.empty()) throw InvalidArgument("at least one IoU threshold is required");
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    for (const double t : thresholds) {
        if (!(t > 0 && t <= 1)) throw InvalidArgument("IoU thresholds must lie in (0, 1]");
    }
    report_.builder = builder;
    report_.config = cfg;
    report_.angle_tol = angle_tol;
    nlohmann::ordered_json canonical = to_json(cfg);
    canonical["builder"] = to_string(builder);
    canonical["angle_tol"] = angle_tol ? nlohmann::ordered_json(*angle_tol) : nlohmann::ordered_json();
    report_.fingerprint = fingerprint(canonical.dump());
    for (const double t : thresholds) report_.results.push_back({t, 0, 0, 0.0});
}

void ReconstructionScorer::skip(const std::string& scene_id) {
    ++report_.skipped;
    report_.skipped_scenes.push_back(scene_id);
}

void ReconstructionScorer::add(const AnnotationSet& scene) {
    if (scene.rects.empty()) {
        skip(scene.scene_id);
        return;
    }
    ScoredGrasp best;
    try {
        best = report_.builder == Builder::orange ? extract_best(build_orange_maps(scene, report_.config))
                                                  : extract_legacy_best(build_legacy_maps(scene, report_.config));
    } catch (const NoGrasp&) {
        // Every annotation fell outside the image.
        skip(scene.scene_id);
        return;
    }
    for (auto& r : report_.results) {
        ++r.total;
        if (grasp_success(best.rect, scene.rects, r.threshold, report_.angle_tol)) ++r.successes;
        r.accuracy = static_cast<double>(r.successes) / static_cast<double>(r.total);
    }
}

EvalReport reconstruct_and_score(std::span<const AnnotationSet> scenes, const BuilderConfig& cfg,
                                 Builder builder, const std::vector<double>& thresholds,
                                 std::optional<double> angle_tol) {
    ReconstructionScorer scorer(cfg, builder, thresholds, angle_tol);
    for (const auto& scene : scenes) scorer.add(scene);
    return scorer.report();
}

namespace {

bool recovers(const ScoredGrasp& g, const GraspRect& r) {
    return std::hypot(g.rect.cx - r.cx, g.rect.cy - r.cy) <= kRecoverCenterTol &&
           angular_distance(g.rect.phi, r.phi) <= kRecoverAngleTol;
}

}  // namespace

DisentanglementReport disentanglement_report(std::span<const AnnotationSet> scenes, const BuilderConfig& cfg) {
    DisentanglementReport report;
    for (const AnnotationSet& scene : scenes) {
        SceneDisentanglement entry;
        entry.scene_id = scene.scene_id;

        const std::vector<GraspRect> survivors = select_by_jaw(scene.rects, cfg.jaw_policy);
        std::map<std::pair<long long, long long>, std::vector<GraspRect>> by_center;
        std::vector<int> per_bin(cfg.bins, 0);
        for (const GraspRect& r : survivors) {
            by_center[{std::llround(r.cx * 1e6), std::llround(r.cy * 1e6)}].push_back(r);
            ++per_bin[bin_index(r.phi, cfg.bins)];
        }

        std::vector<std::vector<GraspRect>> shared;
        for (auto& [center, group] : by_center) {
            if (group.size() >= 2) shared.push_back(std::move(group));
        }
        entry.shared_centers = shared.size();

        if (!shared.empty()) {
            const int k = std::max(1, *std::max_element(per_bin.begin(), per_bin.end()));
            std::vector<ScoredGrasp> orange;
            for (auto& bin : extract_per_bin(build_orange_maps(scene, cfg), k, suppression_radius(scene))) {
                orange.insert(orange.end(), bin.begin(), bin.end());
            }
            std::optional<ScoredGrasp> legacy;
            try {
                legacy = extract_legacy_best(build_legacy_maps(scene, cfg));
            } catch (const NoGrasp&) {
            }

            for (const auto& group : shared) {
                entry.orientations += group.size();
                std::size_t legacy_here = 0;
                for (const GraspRect& r : group) {
                    if (std::any_of(orange.begin(), orange.end(), [&](const ScoredGrasp& g) { return recovers(g, r); })) {
                        ++entry.orange_recovered;
                    }
                    if (legacy && recovers(*legacy, r)) ++legacy_here;
                }
                entry.legacy_recovered += legacy_here;
                entry.legacy_max_per_center = std::max(entry.legacy_max_per_center, legacy_here);
            }
        }
        report.orientations += entry.orientations;
        report.orange_recovered += entry.orange_recovered;
        report.legacy_recovered += entry.legacy_recovered;
        report.scenes.push_back(std::move(entry));
    }
    return report;
}

nlohmann::ordered_json to_json(const DisentanglementReport& report) {
    nlohmann::ordered_json j;
    j["orientations"] = report.orientations;
    j["orange_recovered"] = report.orange_recovered;
    j["legacy_recovered"] = report.legacy_recovered;
    auto scenes = nlohmann::ordered_json::array();
    for (const auto& s : report.scenes) {
        scenes.push_back({{"scene_id", s.scene_id},
                          {"shared_centers", s.shared_centers},
                          {"orientations", s.orientations},
                          {"orange_recovered", s.orange_recovered},
                          {"legacy_recovered", s.legacy_recovered}});
    }
    j["scenes"] = scenes;
    return j;
}

}  // namespace graspmaps
