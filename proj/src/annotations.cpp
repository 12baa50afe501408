#include "graspmaps/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "graspmaps/errors.hpp"

namespace graspmaps {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

// Calls fn(line_number, line) for each line, 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t number = 0;
    while (!text.empty()) {
        const std::size_t end = text.find('\n');
        ++number;
        fn(number, text.substr(0, end));
        if (end == std::string_view::npos) break;
        text.remove_prefix(end + 1);
    }
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) parts.push_back(s.substr(start, i - start));
    }
    return parts;
}

void check_dims(int w, int h, const char* who) {
    if (w <= 0 || h <= 0) throw InvalidArgument(std::string(who) + ": image dimensions must be positive");
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [lo, hi); bit-identical across standard libraries.
    double uniform(double lo, double hi) {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

private:
    std::mt19937_64 engine_;
};

GraspRect inflated(const GraspRect& r, double by) {
    GraspRect out = r;
    out.width += 2 * by;
    out.height += 2 * by;
    return out;
}

}  // namespace

AnnotationSet parse_jacquard(std::string_view text, int image_width, int image_height,
                             std::string scene_id) {
    check_dims(image_width, image_height, "parse_jacquard");
    AnnotationSet set{std::move(scene_id), image_width, image_height, {}};
    for_each_line(text, [&](std::size_t number, std::string_view line) {
        line = trim(line);
        if (line.empty()) return;
        const auto fields = split(line, ';');
        if (fields.size() != 5) {
            throw ParseError(number, fmt::format("expected 5 ';'-separated fields, got {}", fields.size()));
        }
        double v[5];
        for (std::size_t i = 0; i < 5; ++i) {
            if (!parse_double(fields[i], v[i]) || !std::isfinite(v[i])) {
                throw ParseError(number, fmt::format("field {} is not a finite number", i + 1));
            }
        }
        if (v[3] <= 0) throw ParseError(number, "non-positive opening");
        if (v[4] <= 0) throw ParseError(number, "non-positive jaw size");
        // Degrees counterclockwise with y up; negate into the y-down frame.
        const double phi = normalize_angle(-v[2] * kPi / 180.0);
        set.rects.push_back({v[0], v[1], phi, v[3], v[4]});
    });
    return set;
}

CornellParse parse_cornell(std::string_view text, int image_width, int image_height,
                           std::string scene_id) {
    check_dims(image_width, image_height, "parse_cornell");
    CornellParse out{{std::move(scene_id), image_width, image_height, {}}, 0};

    Corners group{};
    int filled = 0;
    bool has_nan = false;
    std::size_t last_line = 0;
    for_each_line(text, [&](std::size_t number, std::string_view line) {
        line = trim(line);
        if (line.empty()) return;
        last_line = number;
        const auto fields = split_ws(line);
        if (fields.size() != 2) {
            throw ParseError(number, fmt::format("expected 2 coordinates, got {}", fields.size()));
        }
        Point p;
        if (!parse_double(fields[0], p.x) || !parse_double(fields[1], p.y)) {
            throw ParseError(number, "coordinate is not a number");
        }
        if (std::isnan(p.x) || std::isnan(p.y)) has_nan = true;
        group[filled++] = p;
        if (filled < 4) return;
        filled = 0;
        if (has_nan) {
            ++out.skipped;
        } else {
            try {
                out.set.rects.push_back(points_to_rect(group));
            } catch (const InvalidArgument&) {
                ++out.skipped;
            }
        }
        has_nan = false;
    });
    if (filled != 0) {
        throw ParseError(last_line, "corner count is not a multiple of 4");
    }
    return out;
}

std::string to_jacquard(const AnnotationSet& set) {
    std::string out;
    for (const GraspRect& r : set.rects) {
        out += fmt::format("{:.17g};{:.17g};{:.17g};{:.17g};{:.17g}\n", r.cx, r.cy,
                           -r.phi * 180.0 / kPi, r.width, r.height);
    }
    return out;
}

AnnotationSet scale_annotations(const AnnotationSet& s, int target_w, int target_h) {
    check_dims(target_w, target_h, "scale_annotations");
    check_dims(s.image_width, s.image_height, "scale_annotations");
    const double sx = static_cast<double>(target_w) / s.image_width;
    const double sy = static_cast<double>(target_h) / s.image_height;

    AnnotationSet out{s.scene_id, target_w, target_h, {}};
    out.rects.reserve(s.rects.size());
    for (const GraspRect& r : s.rects) {
        if (sx == sy) {
            out.rects.push_back({r.cx * sx, r.cy * sy, r.phi, r.width * sx, r.height * sx});
            continue;
        }
        Corners cs = rect_corners(r);
        for (Point& p : cs) p = {p.x * sx, p.y * sy};
        out.rects.push_back(points_to_rect(cs));
    }
    return out;
}

AnnotationSet synth_scene(const SynthParams& p) {
    if (p.num_rects < 0 || p.image_width <= 0 || p.image_height <= 0 ||
        !(p.center_min <= p.center_max) || !(p.width_min <= p.width_max) || !(p.width_min > 0) ||
        (p.jaw_to_width <= 0 && (!(p.height_min <= p.height_max) || !(p.height_min > 0))) ||
        !(p.angle_spread > 0 && p.angle_spread <= kPi) ||
        !(p.duplicate_center_fraction >= 0 && p.duplicate_center_fraction <= 1)) {
        throw InvalidArgument("synth_scene: invalid parameters");
    }

    const int pairs = static_cast<int>(std::llround(p.duplicate_center_fraction * p.num_rects)) / 2;
    if (pairs > 0 && p.bins < 2) throw InvalidArgument("synth_scene: duplicate centers need bins >= 2");
    const int singles = p.num_rects - 2 * pairs;
    const double bin_width = kPi / std::max(p.bins, 1);

    Rng rng(p.seed);
    AnnotationSet set{fmt::format("synth_{}", p.seed), p.image_width, p.image_height, {}};
    std::vector<Point> centers;

    const auto draw_rect = [&](Point c) {
        const double w = rng.uniform(p.width_min, p.width_max);
        const double h = p.jaw_to_width > 0 ? p.jaw_to_width * w : rng.uniform(p.height_min, p.height_max);
        const double phi = normalize_angle(rng.uniform(-p.angle_spread / 2, p.angle_spread / 2));
        return GraspRect{c.x, c.y, phi, w, h};
    };

    const auto fits = [&](Point c, const std::vector<GraspRect>& candidate) {
        for (const Point& o : centers) {
            if (std::hypot(c.x - o.x, c.y - o.y) < p.min_center_separation) return false;
        }
        if (p.non_overlapping) {
            for (const GraspRect& a : candidate) {
                for (const GraspRect& b : set.rects) {
                    if (rect_iou(inflated(a, 1.0), inflated(b, 1.0)) > 0) return false;
                }
            }
        }
        return true;
    };

    constexpr int kMaxAttempts = 10000;
    for (int i = 0; i < pairs + singles; ++i) {
        const bool pair = i < pairs;
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            Point c{rng.uniform(p.center_min, p.center_max), rng.uniform(p.center_min, p.center_max)};
            if (p.pixel_centers) c = {std::floor(c.x) + 0.5, std::floor(c.y) + 0.5};
            std::vector<GraspRect> candidate{draw_rect(c)};
            if (pair) {
                GraspRect second = draw_rect(c);
                const double lo = std::min(bin_width + 1e-3, kPi / 2);
                const double gap = rng.uniform(lo, kPi / 2);
                second.phi = normalize_angle(candidate[0].phi + gap);
                candidate.push_back(second);
            }
            if (!fits(c, candidate)) continue;
            centers.push_back(c);
            set.rects.insert(set.rects.end(), candidate.begin(), candidate.end());
            placed = true;
        }
        if (!placed) throw InvalidArgument("synth_scene: could not place rectangles under the constraints");
    }
    return set;
}

}  // namespace graspmaps
