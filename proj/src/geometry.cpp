#include "graspmaps/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "graspmaps/errors.hpp"

namespace graspmaps {

namespace {

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
double norm(Point a) { return std::hypot(a.x, a.y); }

// Intersection of segment p -> q with the line through a -> b.
Point intersect(Point p, Point q, Point a, Point b) {
    const Point e = b - a;
    const double dp = cross(e, p - a);
    const double dq = cross(e, q - a);
    const double t = dp / (dp - dq);
    return p + t * (q - p);
}

}  // namespace

std::size_t PixelRegion::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double normalize_angle(double a) {
    if (!std::isfinite(a)) throw InvalidArgument("normalize_angle: non-finite angle");
    double r = a - kPi * std::floor((a + kPi / 2) / kPi);
    if (r >= kPi / 2) r -= kPi;
    if (r < -kPi / 2) r += kPi;
    return r;
}

double angular_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

bool is_valid(const GraspRect& r) {
    return std::isfinite(r.cx) && std::isfinite(r.cy) && std::isfinite(r.phi) &&
           std::isfinite(r.width) && std::isfinite(r.height) && r.width > 0 && r.height > 0 &&
           r.phi >= -kPi / 2 && r.phi < kPi / 2;
}

Corners rect_corners(const GraspRect& r) {
    const double c = std::cos(r.phi);
    const double s = std::sin(r.phi);
    const Point u{c * r.width / 2, s * r.width / 2};
    const Point v{-s * r.height / 2, c * r.height / 2};
    const Point o{r.cx, r.cy};
    return {o - u - v, o + u - v, o + u + v, o - u + v};
}

double polygon_area(const std::vector<Point>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        twice += cross(poly[i], poly[(i + 1) % n]);
    }
    return std::abs(twice) / 2;
}

std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip) {
    std::vector<Point> out = subject;
    for (std::size_t i = 0, n = clip.size(); i < n && !out.empty(); ++i) {
        const Point a = clip[i];
        const Point b = clip[(i + 1) % n];
        std::vector<Point> in = std::move(out);
        out.clear();
        for (std::size_t j = 0, m = in.size(); j < m; ++j) {
            const Point p = in[j];
            const Point q = in[(j + 1) % m];
            const bool p_in = cross(b - a, p - a) >= 0;
            const bool q_in = cross(b - a, q - a) >= 0;
            if (p_in) out.push_back(p);
            if (p_in != q_in) out.push_back(intersect(p, q, a, b));
        }
    }
    return out;
}

double rect_iou(const GraspRect& a, const GraspRect& b) {
    if (!(a.width > 0 && a.height > 0 && b.width > 0 && b.height > 0)) {
        throw InvalidArgument("rect_iou: degenerate rectangle");
    }
    // Fixed argument order makes the result exactly symmetric.
    const auto key = [](const GraspRect& r) { return std::tie(r.cx, r.cy, r.phi, r.width, r.height); };
    const GraspRect& s = key(a) < key(b) ? a : b;
    const GraspRect& t = key(a) < key(b) ? b : a;

    const Corners cs = rect_corners(s);
    const Corners ct = rect_corners(t);
    const std::vector<Point> ps(cs.begin(), cs.end());
    const std::vector<Point> pt(ct.begin(), ct.end());

    const double inter = polygon_area(clip_convex(ps, pt));
    const double uni = s.width * s.height + t.width * t.height - inter;
    if (uni <= 0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

bool contains(const GraspRect& r, Point p, double tol) {
    const double c = std::cos(r.phi);
    const double s = std::sin(r.phi);
    const double dx = p.x - r.cx;
    const double dy = p.y - r.cy;
    const double u = dx * c + dy * s;
    const double v = -dx * s + dy * c;
    return std::abs(u) <= r.width / 2 + tol && std::abs(v) <= r.height / 2 + tol;
}

PixelBounds pixel_bounds(const GraspRect& r, int image_h, int image_w) {
    const Corners cs = rect_corners(r);
    double lo_x = cs[0].x, hi_x = cs[0].x, lo_y = cs[0].y, hi_y = cs[0].y;
    for (const Point& p : cs) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    // Pixel x has its center inside [lo, hi] only if lo - 0.5 <= x <= hi - 0.5.
    const auto lower = [](double v, int limit) {
        return static_cast<int>(std::clamp(std::floor(v - 0.5) , 0.0, static_cast<double>(limit)));
    };
    const auto upper = [](double v, int limit) {
        return static_cast<int>(std::clamp(std::ceil(v - 0.5) + 1.0, 0.0, static_cast<double>(limit)));
    };
    return {lower(lo_x, image_w), lower(lo_y, image_h), upper(hi_x, image_w), upper(hi_y, image_h)};
}

PixelRegion rasterize_rect(const GraspRect& r, int image_h, int image_w) {
    if (image_h <= 0 || image_w <= 0) throw InvalidArgument("rasterize_rect: empty image");
    PixelRegion region{image_w, image_h,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(image_h) * image_w, 0)};
    for_each_pixel(r, image_h, image_w, [&](int x, int y) {
        region.mask[static_cast<std::size_t>(y) * image_w + x] = 1;
    });
    return region;
}

GraspRect points_to_rect(const Corners& pts) {
    for (const Point& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidArgument("points_to_rect: non-finite corner");
        }
    }
    const Point center = 0.25 * (pts[0] + pts[1] + pts[2] + pts[3]);

    // Sums of opposite edges: along ~2*width*u and ~2*height*v.
    const Point a = (pts[1] - pts[0]) + (pts[2] - pts[3]);
    const Point b = (pts[3] - pts[0]) + (pts[2] - pts[1]);
    const double la = norm(a);
    const double lb = norm(b);
    const double scale = std::max(la, lb);
    if (scale == 0.0 || la <= 1e-9 * scale || lb <= 1e-9 * scale) {
        throw InvalidArgument("points_to_rect: collinear or duplicate corners");
    }
    const Point b_rot{b.y, -b.x};  // v rotated onto u

    // Alternating least squares over (orientation, width, height); the center
    // is the corner mean regardless of the others.
    double w = la / 2;
    double h = lb / 2;
    Point u{};
    for (int it = 0; it < 8; ++it) {
        const Point d = w * a + h * b_rot;
        const double ld = norm(d);
        if (ld <= 1e-12 * scale * scale) throw InvalidArgument("points_to_rect: degenerate corners");
        u = (1.0 / ld) * d;
        const Point v{-u.y, u.x};
        w = dot(u, a) / 2;
        h = dot(v, b) / 2;
    }
    if (!(w > 1e-9 * scale) || !(h > 1e-9 * scale)) {
        throw InvalidArgument("points_to_rect: corners do not span a rectangle");
    }
    return {center.x, center.y, normalize_angle(std::atan2(u.y, u.x)), w, h};
}

}  // namespace graspmaps
