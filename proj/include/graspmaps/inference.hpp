#pragma once

#include <span>
#include <vector>

#include "graspmaps/annotations.hpp"
#include "graspmaps/geometry.hpp"
#include "graspmaps/mapbuild.hpp"

namespace graspmaps {

// Threshold applied to o and gamma before fusion.
inline constexpr float kMaskThreshold = 0.5f;
inline constexpr double kMinSuppressionRadius = 2.0;
inline constexpr double kBceEpsilon = 1e-7;

// Per-bin q * gamma * o, with o and gamma binarized.
struct FusedQuality {
    int bins = 0;
    int height = 0;
    int width = 0;
    std::vector<float> values;

    std::span<const float> plane(int bin) const {
        const std::size_t n = static_cast<std::size_t>(height) * width;
        return std::span<const float>(values).subspan(bin * n, n);
    }
};

struct ScoredGrasp {
    GraspRect rect;
    double score = 0.0;
    int bin = 0;
    int px = 0;  // pixel column of the peak
    int py = 0;  // pixel row of the peak
};

FusedQuality fuse_quality(const GraspMapStack& stack);

/// Box centered at `center` with jaw size width / 2.
GraspRect reconstruct_box(Point center, double phi, double width);

/// Global maximum of the fused quality; ties go to the lowest (bin, row, column).
/// The grasp center is the center of the peak pixel. Throws NoGrasp when the
/// fused map is all zero.
ScoredGrasp extract_best(const GraspMapStack& stack);

/// Up to k local maxima per bin in descending score, each at least `radius`
/// pixels from every earlier pick of the same bin. Index i holds bin i.
std::vector<std::vector<ScoredGrasp>> extract_per_bin(const GraspMapStack& stack, int k,
                                                      double radius = kMinSuppressionRadius);

/// Half the median jaw size of the scene, never below kMinSuppressionRadius.
double suppression_radius(const AnnotationSet& scene);

struct LossBreakdown {
    double bce_o = 0.0;
    double bce_gamma = 0.0;
    double mse_q = 0.0;
    double mse_cos = 0.0;
    double mse_sin = 0.0;
    double mse_omega = 0.0;
    double mse_attentive = 0.0;
    double total = 0.0;
};

/// Training objective: BCE on o and gamma plus N times the MSE of q, cos, sin,
/// omega and of pred.q * pred.o against gt.q. Every term is a mean.
LossBreakdown total_loss(const GraspMapStack& pred, const GraspMapStack& gt);

}  // namespace graspmaps
