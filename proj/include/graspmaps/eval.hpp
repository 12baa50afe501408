#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "graspmaps/annotations.hpp"
#include "graspmaps/config.hpp"
#include "graspmaps/inference.hpp"
#include "graspmaps/mapbuild.hpp"

namespace graspmaps {

/// True iff some gt overlaps pred with IoU >= iou_threshold and, when angle_tol
/// is set, lies within angle_tol of pred's orientation.
bool grasp_success(const GraspRect& pred, std::span<const GraspRect> gts, double iou_threshold,
                   std::optional<double> angle_tol = std::nullopt);

/// First maximum of the binary quality plane in row-major order, with its
/// angle and width and a half-jaw box. Throws NoGrasp on an empty plane.
ScoredGrasp extract_legacy_best(const LegacyMapStack& maps);

struct ThresholdResult {
    double threshold = 0.0;
    std::size_t successes = 0;
    std::size_t total = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    Builder builder = Builder::orange;
    BuilderConfig config;
    std::optional<double> angle_tol;
    std::string fingerprint;
    std::vector<ThresholdResult> results;  // ascending threshold
    std::size_t skipped = 0;
    std::vector<std::string> skipped_scenes;

    std::vector<double> thresholds() const;
};

nlohmann::ordered_json to_json(const EvalReport& report);

/// Streaming form of reconstruct_and_score: add scenes one at a time.
class ReconstructionScorer {
public:
    ReconstructionScorer(BuilderConfig cfg, Builder builder, std::vector<double> thresholds,
                         std::optional<double> angle_tol = std::nullopt);

    /// Builds GT maps for `scene`, extracts the best grasp and scores it.
    /// Scenes without annotations or without any in-image grasp are skipped.
    void add(const AnnotationSet& scene);

    /// Records a scene that could not be loaded at all.
    void skip(const std::string& scene_id);

    const EvalReport& report() const { return report_; }

private:
    EvalReport report_;
};

EvalReport reconstruct_and_score(std::span<const AnnotationSet> scenes, const BuilderConfig& cfg,
                                 Builder builder, const std::vector<double>& thresholds,
                                 std::optional<double> angle_tol = std::nullopt);

// An extracted grasp recovers an annotation when its center is within
// kRecoverCenterTol pixels and its orientation within kRecoverAngleTol.
inline constexpr double kRecoverCenterTol = 1.0;
inline constexpr double kRecoverAngleTol = 1e-3;

struct SceneDisentanglement {
    std::string scene_id;
    std::size_t shared_centers = 0;
    std::size_t orientations = 0;  // annotated orientations at shared centers
    std::size_t orange_recovered = 0;
    std::size_t legacy_recovered = 0;
    std::size_t legacy_max_per_center = 0;
};

struct DisentanglementReport {
    std::vector<SceneDisentanglement> scenes;
    std::size_t orientations = 0;
    std::size_t orange_recovered = 0;
    std::size_t legacy_recovered = 0;
};

/// Counts, per scene, how many of the distinct orientations annotated at
/// shared centers each builder recovers: per-bin peaks for the binned maps,
/// the single argmax for the legacy maps.
DisentanglementReport disentanglement_report(std::span<const AnnotationSet> scenes, const BuilderConfig& cfg);

nlohmann::ordered_json to_json(const DisentanglementReport& report);

}  // namespace graspmaps
