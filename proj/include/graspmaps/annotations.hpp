#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graspmaps/geometry.hpp"

namespace graspmaps {

// All grasp rectangles of one scene. Rect centers may lie outside the image;
// clipping happens at rasterization.
struct AnnotationSet {
    std::string scene_id;
    int image_width = 0;
    int image_height = 0;
    std::vector<GraspRect> rects;
};

struct CornellParse {
    AnnotationSet set;
    std::size_t skipped = 0;  // groups dropped for NaN or degenerate corners
};

/// Jacquard grasp file: one "x;y;theta;opening;jaws_size" per line, theta in
/// degrees counterclockwise (y up). Blank lines are ignored, duplicates kept.
AnnotationSet parse_jacquard(std::string_view text, int image_width, int image_height,
                             std::string scene_id = {});

/// Cornell positive-rectangle file: four "x y" lines per rectangle. Groups with
/// NaN coordinates are skipped and counted, never repaired.
CornellParse parse_cornell(std::string_view text, int image_width, int image_height,
                           std::string scene_id = {});

/// Inverse of parse_jacquard, full double precision.
std::string to_jacquard(const AnnotationSet& set);

/// Rescales a scene to target_w x target_h. Isotropic scaling multiplies the
/// rect sizes; anisotropic scaling refits each rect from its transformed corners.
AnnotationSet scale_annotations(const AnnotationSet& s, int target_w, int target_h);

struct SynthParams {
    std::uint64_t seed = 0;
    int num_rects = 8;
    int image_width = 320;
    int image_height = 320;
    double center_min = 40.0;
    double center_max = 280.0;
    double width_min = 20.0;
    double width_max = 60.0;
    double height_min = 10.0;
    double height_max = 30.0;
    // When positive, height = jaw_to_width * width and the height range is unused.
    double jaw_to_width = 0.0;
    double angle_spread = kPi;  // phis drawn from [-spread/2, spread/2)
    double duplicate_center_fraction = 0.0;
    int bins = 3;  // duplicates differ by more than one bin width pi/bins
    // Distinct centers keep at least this distance.
    double min_center_separation = 0.0;
    // Rects keep a one-pixel gap from each other (no shared pixels).
    bool non_overlapping = false;
    // Snap centers to pixel centers (k + 0.5).
    bool pixel_centers = false;

    friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

/// Deterministic synthetic scene. Throws InvalidArgument for empty ranges or
/// when the placement constraints cannot be met.
AnnotationSet synth_scene(const SynthParams& p);

}  // namespace graspmaps
