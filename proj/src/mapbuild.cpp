#include "graspmaps/mapbuild.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "graspmaps/errors.hpp"

namespace graspmaps {

namespace {

// Rect-frame coordinates scaled so the boundary sits at Chebyshev distance 1.
double chebyshev_extent(Point px, const GraspRect& r) {
    const double c = std::cos(r.phi);
    const double s = std::sin(r.phi);
    const double dx = px.x - r.cx;
    const double dy = px.y - r.cy;
    const double u = dx * c + dy * s;
    const double v = -dx * s + dy * c;
    return std::max(std::abs(u) / (r.width / 2), std::abs(v) / (r.height / 2));
}

auto order_key(const GraspRect& r) { return std::tie(r.phi, r.cy, r.cx, r.width, r.height); }

void check_scene(const AnnotationSet& s, const BuilderConfig& cfg) {
    validate(cfg);
    if (s.image_width != cfg.out_width || s.image_height != cfg.out_height) {
        throw InvalidArgument("annotation set is not scaled to the output size");
    }
    for (const GraspRect& r : s.rects) {
        if (!is_valid(r)) throw InvalidArgument("invalid or unnormalized grasp rectangle");
    }
}

}  // namespace

void validate(const BuilderConfig& cfg) {
    if (cfg.bins < 1) throw InvalidArgument("bins must be >= 1");
    if (cfg.out_width <= 0 || cfg.out_height <= 0) throw InvalidArgument("output size must be positive");
}

GraspMapStack::GraspMapStack(int bins, int height, int width)
    : bins_(bins), height_(height), width_(width) {
    if (bins < 1 || height <= 0 || width <= 0) throw InvalidArgument("GraspMapStack: bad shape");
    data_.assign(plane_count() * plane_size(), 0.0f);
}

std::span<float> GraspMapStack::plane(std::size_t index) {
    return std::span<float>(data_).subspan(index * plane_size(), plane_size());
}

std::span<const float> GraspMapStack::plane(std::size_t index) const {
    return std::span<const float>(data_).subspan(index * plane_size(), plane_size());
}

std::vector<std::string> GraspMapStack::channel_names() const {
    std::vector<std::string> names;
    names.reserve(plane_count());
    for (const char* prefix : {"q", "cos", "sin", "omega", "o"}) {
        for (int i = 0; i < bins_; ++i) names.push_back(prefix + std::to_string(i));
    }
    names.emplace_back("gamma");
    return names;
}

int bin_index(double phi, int bins) {
    if (bins < 1) throw InvalidArgument("bin_index: bins must be >= 1");
    if (!(phi >= -kPi / 2 && phi < kPi / 2)) throw InvalidArgument("bin_index: angle not normalized");
    const int bin = static_cast<int>(std::floor((phi + kPi / 2) / (kPi / bins)));
    return std::clamp(bin, 0, bins - 1);
}

std::pair<double, double> bin_interval(int bin, int bins) {
    const double step = kPi / bins;
    return {-kPi / 2 + bin * step, -kPi / 2 + (bin + 1) * step};
}

AngleCode encode_angle(double phi) { return {std::cos(2 * phi), std::sin(2 * phi)}; }

double decode_angle(double c, double s) {
    if (c == 0.0 && s == 0.0) throw UndefinedAngle("decode_angle: (0, 0) has no angle");
    return normalize_angle(0.5 * std::atan2(s, c));
}

double soft_quality_value(Point px, const GraspRect& r, Decay) {
    if (!contains(r, px)) throw InvalidArgument("soft_quality_value: point outside rectangle");
    return std::clamp(1.0 - chebyshev_extent(px, r), 0.0, 1.0);
}

std::vector<GraspRect> select_by_jaw(const std::vector<GraspRect>& rects, JawPolicy policy) {
    const auto quantize = [](double v) { return std::llround(v * 1e6); };
    // Preference within a group; width breaks ties so the pick is order-free.
    const auto better = [policy](const GraspRect& a, const GraspRect& b) {
        if (a.height != b.height) return policy == JawPolicy::minimum ? a.height < b.height : a.height > b.height;
        return std::tie(a.width, a.cx, a.cy, a.phi) < std::tie(b.width, b.cx, b.cy, b.phi);
    };
    std::map<std::tuple<long long, long long, long long>, GraspRect> groups;
    for (const GraspRect& r : rects) {
        const auto key = std::make_tuple(quantize(r.cx), quantize(r.cy), quantize(r.phi));
        auto [it, inserted] = groups.try_emplace(key, r);
        if (!inserted && better(r, it->second)) it->second = r;
    }
    std::vector<GraspRect> out;
    out.reserve(groups.size());
    for (const auto& [key, r] : groups) out.push_back(r);
    std::sort(out.begin(), out.end(), [](const GraspRect& a, const GraspRect& b) { return order_key(a) < order_key(b); });
    return out;
}

GraspMapStack build_orange_maps(const AnnotationSet& s, const BuilderConfig& cfg) {
    check_scene(s, cfg);
    const int n = cfg.bins;
    const int h = cfg.out_height;
    const int w = cfg.out_width;
    GraspMapStack stack(n, h, w);

    // select_by_jaw returns ascending (phi, cy, cx, width, height), which is
    // also the write order inside every bin.
    std::vector<std::vector<GraspRect>> per_bin(n);
    for (const GraspRect& r : select_by_jaw(s.rects, cfg.jaw_policy)) {
        per_bin[bin_index(r.phi, n)].push_back(r);
    }

    std::vector<std::uint8_t> written(stack.plane_size());
    for (int b = 0; b < n; ++b) {
        std::fill(written.begin(), written.end(), 0);
        auto q = stack.q(b);
        auto cs = stack.cos2phi(b);
        auto sn = stack.sin2phi(b);
        auto om = stack.omega(b);
        auto o = stack.o(b);

        const auto write = [&](std::size_t idx, const GraspRect& r, double quality) {
            const AngleCode code = encode_angle(r.phi);
            q[idx] = static_cast<float>(quality);
            cs[idx] = static_cast<float>(code.c);
            sn[idx] = static_cast<float>(code.s);
            om[idx] = static_cast<float>(r.width);
            o[idx] = 1.0f;
            written[idx] = 1;
        };

        // Center pixels first, so every rect keeps its unit peak even inside a
        // smaller-angle neighbour.
        for (const GraspRect& r : per_bin[b]) {
            const double fx = std::floor(r.cx);
            const double fy = std::floor(r.cy);
            if (fx < 0 || fy < 0 || fx >= w || fy >= h) continue;
            const std::size_t idx = static_cast<std::size_t>(fy) * w + static_cast<std::size_t>(fx);
            if (!written[idx]) write(idx, r, 1.0);
        }
        for (const GraspRect& r : per_bin[b]) {
            for_each_pixel(r, h, w, [&](int x, int y) {
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                if (written[idx]) return;
                const double quality = cfg.quality_mode == QualityMode::binary
                                           ? 1.0
                                           : std::clamp(1.0 - chebyshev_extent({x + 0.5, y + 0.5}, r), 0.0, 1.0);
                write(idx, r, quality);
            });
        }
    }

    auto gamma = stack.gamma();
    if (cfg.gamma_mode == GammaMode::region) {
        for (int b = 0; b < n; ++b) {
            const auto o = stack.o(b);
            for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = std::max(gamma[i], o[i]);
        }
    } else {
        for (const auto& bin : per_bin) {
            for (const GraspRect& r : bin) {
                const double fx = std::floor(r.cx);
                const double fy = std::floor(r.cy);
                if (fx < 0 || fy < 0 || fx >= w || fy >= h) continue;
                gamma[static_cast<std::size_t>(fy) * w + static_cast<std::size_t>(fx)] = 1.0f;
            }
        }
    }
    return stack;
}

LegacyMapStack build_legacy_maps(const AnnotationSet& s, const BuilderConfig& cfg) {
    check_scene(s, cfg);
    const int h = cfg.out_height;
    const int w = cfg.out_width;
    const std::size_t size = static_cast<std::size_t>(h) * w;
    LegacyMapStack maps{h, w, std::vector<float>(size), std::vector<float>(size), std::vector<float>(size)};
    for (const GraspRect& r : s.rects) {
        for_each_pixel(r, h, w, [&](int x, int y) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            maps.q[idx] = 1.0f;
            maps.angle[idx] = static_cast<float>(r.phi);
            maps.omega[idx] = static_cast<float>(r.width);
        });
    }
    return maps;
}

}  // namespace graspmaps
