#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "graspmaps/annotations.hpp"
#include "graspmaps/geometry.hpp"

namespace graspmaps {

enum class JawPolicy { minimum, maximum };
enum class QualityMode { soft, binary };
enum class Decay { linear };
// region: union of rasterized boxes; centers: annotated center pixels only.
enum class GammaMode { region, centers };

struct BuilderConfig {
    int bins = 3;
    JawPolicy jaw_policy = JawPolicy::minimum;
    QualityMode quality_mode = QualityMode::soft;
    Decay decay = Decay::linear;
    GammaMode gamma_mode = GammaMode::region;
    int out_width = 320;
    int out_height = 320;

    friend bool operator==(const BuilderConfig&, const BuilderConfig&) = default;
};

void validate(const BuilderConfig& cfg);

/// Orientation-binned grasp maps. Physical storage is 5N+1 float planes in the
/// order q[0..N), cos2phi[0..N), sin2phi[0..N), omega[0..N), o[0..N), gamma.
class GraspMapStack {
public:
    GraspMapStack() = default;
    GraspMapStack(int bins, int height, int width);

    int bins() const { return bins_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
    std::size_t plane_count() const { return 5 * static_cast<std::size_t>(bins_) + 1; }

    std::span<float> plane(std::size_t index);
    std::span<const float> plane(std::size_t index) const;

    std::span<float> q(int bin) { return plane(bin); }
    std::span<float> cos2phi(int bin) { return plane(bins_ + bin); }
    std::span<float> sin2phi(int bin) { return plane(2 * bins_ + bin); }
    std::span<float> omega(int bin) { return plane(3 * bins_ + bin); }
    std::span<float> o(int bin) { return plane(4 * bins_ + bin); }
    std::span<float> gamma() { return plane(5 * bins_); }
    std::span<const float> q(int bin) const { return plane(bin); }
    std::span<const float> cos2phi(int bin) const { return plane(bins_ + bin); }
    std::span<const float> sin2phi(int bin) const { return plane(2 * bins_ + bin); }
    std::span<const float> omega(int bin) const { return plane(3 * bins_ + bin); }
    std::span<const float> o(int bin) const { return plane(4 * bins_ + bin); }
    std::span<const float> gamma() const { return plane(5 * bins_); }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    /// "q0".."q{N-1}", "cos0".., "sin0".., "omega0".., "o0".., "gamma".
    std::vector<std::string> channel_names() const;

    friend bool operator==(const GraspMapStack&, const GraspMapStack&) = default;

private:
    int bins_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

// Single-orientation maps: binary quality, raw angle and opening width.
struct LegacyMapStack {
    int height = 0;
    int width = 0;
    std::vector<float> q;
    std::vector<float> angle;
    std::vector<float> omega;
};

/// floor((phi + pi/2) / (pi/N)); throws unless phi is in [-pi/2, pi/2).
int bin_index(double phi, int bins);

/// Half-open angle interval [lo, hi) covered by `bin`.
std::pair<double, double> bin_interval(int bin, int bins);

struct AngleCode {
    double c = 1.0;
    double s = 0.0;
};

AngleCode encode_angle(double phi);

/// Half of atan2(s, c), normalized. Throws UndefinedAngle for (0, 0).
double decode_angle(double c, double s);

/// Quality at point `px` of rectangle r: 1 at the center, 0 on the boundary,
/// linear in the rect-frame Chebyshev distance. Throws if px lies outside r.
double soft_quality_value(Point px, const GraspRect& r, Decay decay = Decay::linear);

/// Collapses rects sharing (center, phi) to one, chosen by jaw size. The result
/// is sorted and independent of the input order.
std::vector<GraspRect> select_by_jaw(const std::vector<GraspRect>& rects, JawPolicy policy);

GraspMapStack build_orange_maps(const AnnotationSet& s, const BuilderConfig& cfg);

/// Boxes drawn in list order, later boxes overwriting angle and width.
LegacyMapStack build_legacy_maps(const AnnotationSet& s, const BuilderConfig& cfg);

}  // namespace graspmaps
