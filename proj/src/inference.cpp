#include "graspmaps/inference.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "graspmaps/errors.hpp"

namespace graspmaps {

namespace {

float binarize(float v) { return v >= kMaskThreshold ? 1.0f : 0.0f; }

ScoredGrasp grasp_at(const GraspMapStack& stack, int bin, int x, int y, double score) {
    const std::size_t idx = static_cast<std::size_t>(y) * stack.width() + x;
    const double phi = decode_angle(stack.cos2phi(bin)[idx], stack.sin2phi(bin)[idx]);
    const GraspRect rect = reconstruct_box({x + 0.5, y + 0.5}, phi, stack.omega(bin)[idx]);
    return {rect, score, bin, x, y};
}

double bce(double target, double p) {
    p = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
    return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

}  // namespace

FusedQuality fuse_quality(const GraspMapStack& stack) {
    if (stack.bins() < 1 || stack.data().size() != stack.plane_count() * stack.plane_size()) {
        throw InvalidArgument("fuse_quality: malformed stack");
    }
    FusedQuality fused{stack.bins(), stack.height(), stack.width(),
                       std::vector<float>(stack.bins() * stack.plane_size())};
    const auto gamma = stack.gamma();
    for (int b = 0; b < stack.bins(); ++b) {
        const auto q = stack.q(b);
        const auto o = stack.o(b);
        float* out = fused.values.data() + b * stack.plane_size();
        for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] * binarize(gamma[i]) * binarize(o[i]);
    }
    return fused;
}

GraspRect reconstruct_box(Point center, double phi, double width) {
    if (!(width > 0) || !std::isfinite(width)) throw InvalidArgument("reconstruct_box: width must be positive");
    return {center.x, center.y, normalize_angle(phi), width, width / 2};
}

ScoredGrasp extract_best(const GraspMapStack& stack) {
    const FusedQuality fused = fuse_quality(stack);
    int best_bin = -1, best_x = 0, best_y = 0;
    float best = 0.0f;
    for (int b = 0; b < fused.bins; ++b) {
        const auto plane = fused.plane(b);
        for (int y = 0; y < fused.height; ++y) {
            for (int x = 0; x < fused.width; ++x) {
                const float v = plane[static_cast<std::size_t>(y) * fused.width + x];
                if (v > best) {
                    best = v;
                    best_bin = b;
                    best_x = x;
                    best_y = y;
                }
            }
        }
    }
    if (best_bin < 0) throw NoGrasp("extract_best: fused quality map is all zero");
    return grasp_at(stack, best_bin, best_x, best_y, best);
}

std::vector<std::vector<ScoredGrasp>> extract_per_bin(const GraspMapStack& stack, int k, double radius) {
    if (k < 1) throw InvalidArgument("extract_per_bin: k must be >= 1");
    const FusedQuality fused = fuse_quality(stack);
    const int h = fused.height;
    const int w = fused.width;

    std::vector<std::vector<ScoredGrasp>> out(fused.bins);
    for (int b = 0; b < fused.bins; ++b) {
        const auto plane = fused.plane(b);
        const auto at = [&](int x, int y) { return plane[static_cast<std::size_t>(y) * w + x]; };

        struct Peak {
            float score;
            int x, y;
        };
        std::vector<Peak> peaks;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const float v = at(x, y);
                if (v <= 0.0f) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (at(nx, ny) > v) {
                            is_max = false;
                            break;
                        }
                    }
                }
                if (is_max) peaks.push_back({v, x, y});
            }
        }
        std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& c) {
            return std::make_tuple(-a.score, a.y, a.x) < std::make_tuple(-c.score, c.y, c.x);
        });

        for (const Peak& p : peaks) {
            if (static_cast<int>(out[b].size()) >= k) break;
            const bool suppressed = std::any_of(out[b].begin(), out[b].end(), [&](const ScoredGrasp& g) {
                return std::hypot(g.px - p.x, g.py - p.y) <= radius;
            });
            if (suppressed) continue;
            try {
                out[b].push_back(grasp_at(stack, b, p.x, p.y, p.score));
            } catch (const InvalidArgument&) {
                // Undecodable angle or non-positive width at this peak.
            }
        }
    }
    return out;
}

double suppression_radius(const AnnotationSet& scene) {
    if (scene.rects.empty()) return kMinSuppressionRadius;
    std::vector<double> jaws;
    jaws.reserve(scene.rects.size());
    for (const GraspRect& r : scene.rects) jaws.push_back(r.height);
    std::sort(jaws.begin(), jaws.end());
    const std::size_t n = jaws.size();
    const double median = n % 2 ? jaws[n / 2] : 0.5 * (jaws[n / 2 - 1] + jaws[n / 2]);
    return std::max(kMinSuppressionRadius, median / 2);
}

LossBreakdown total_loss(const GraspMapStack& pred, const GraspMapStack& gt) {
    if (pred.bins() != gt.bins() || pred.height() != gt.height() || pred.width() != gt.width()) {
        throw InvalidArgument("total_loss: prediction and target shapes differ");
    }
    const int n = gt.bins();
    const double elems = static_cast<double>(n) * gt.plane_size();

    LossBreakdown l;
    for (int b = 0; b < n; ++b) {
        const auto pq = pred.q(b), gq = gt.q(b);
        const auto pc = pred.cos2phi(b), gc = gt.cos2phi(b);
        const auto ps = pred.sin2phi(b), gs = gt.sin2phi(b);
        const auto pw = pred.omega(b), gw = gt.omega(b);
        const auto po = pred.o(b), go = gt.o(b);
        for (std::size_t i = 0; i < gt.plane_size(); ++i) {
            const auto sq = [](double d) { return d * d; };
            l.bce_o += bce(go[i], po[i]);
            l.mse_q += sq(double{pq[i]} - gq[i]);
            l.mse_cos += sq(double{pc[i]} - gc[i]);
            l.mse_sin += sq(double{ps[i]} - gs[i]);
            l.mse_omega += sq(double{pw[i]} - gw[i]);
            l.mse_attentive += sq(double{pq[i]} * po[i] - gq[i]);
        }
    }
    l.bce_o /= elems;
    l.mse_q /= elems;
    l.mse_cos /= elems;
    l.mse_sin /= elems;
    l.mse_omega /= elems;
    l.mse_attentive /= elems;

    const auto pg = pred.gamma(), gg = gt.gamma();
    for (std::size_t i = 0; i < gg.size(); ++i) l.bce_gamma += bce(gg[i], pg[i]);
    l.bce_gamma /= static_cast<double>(gg.size());

    l.total = l.bce_o + l.bce_gamma + n * (l.mse_q + l.mse_cos + l.mse_sin + l.mse_omega + l.mse_attentive);
    return l;
}

}  // namespace graspmaps
