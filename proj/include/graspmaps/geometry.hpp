#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

namespace graspmaps {

inline constexpr double kPi = std::numbers::pi;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// One oriented grasp rectangle in image coordinates (x right, y down, origin at
// the top-left pixel corner). phi is the angle of the opening axis measured from
// +x toward +y; width is the gripper opening, height the jaw size.
struct GraspRect {
    double cx = 0.0;
    double cy = 0.0;
    double phi = 0.0;
    double width = 0.0;
    double height = 0.0;

    friend bool operator==(const GraspRect&, const GraspRect&) = default;
};

using Corners = std::array<Point, 4>;

// Boolean raster of one rectangle. mask is row-major, height x width.
struct PixelRegion {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;

    bool at(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t count() const;
};

/// Maps any finite angle into [-pi/2, pi/2), congruent modulo pi.
/// Throws InvalidArgument for NaN or infinite input.
double normalize_angle(double a);

/// Smallest distance between two antipodal orientations, in [0, pi/2].
double angular_distance(double a, double b);

bool is_valid(const GraspRect& r);

/// Corners in the order center -u-v, +u-v, +u+v, -u+v where u is the
/// half-opening vector and v the half-jaw vector. Positive signed area.
Corners rect_corners(const GraspRect& r);

double polygon_area(const std::vector<Point>& poly);

/// Clips convex `subject` against the half-planes of convex, positively
/// oriented `clip`.
std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip);

/// Intersection over union of two rectangles via convex clipping.
/// Throws InvalidArgument on a zero-area rectangle.
double rect_iou(const GraspRect& a, const GraspRect& b);

/// True iff p lies inside r, boundary included within `tol`.
bool contains(const GraspRect& r, Point p, double tol = 1e-9);

struct PixelBounds {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)
    bool empty() const { return x0 >= x1 || y0 >= y1; }
};

/// Pixel window of an image_h x image_w grid that can contain centers of r.
PixelBounds pixel_bounds(const GraspRect& r, int image_h, int image_w);

/// Calls fn(x, y) for each pixel whose center (x + 0.5, y + 0.5) lies in r,
/// scanning rows then columns. Pixels outside the image are never visited.
template <typename Fn>
void for_each_pixel(const GraspRect& r, int image_h, int image_w, Fn&& fn) {
    const PixelBounds b = pixel_bounds(r, image_h, image_w);
    for (int y = b.y0; y < b.y1; ++y) {
        for (int x = b.x0; x < b.x1; ++x) {
            if (contains(r, {x + 0.5, y + 0.5})) fn(x, y);
        }
    }
}

PixelRegion rasterize_rect(const GraspRect& r, int image_h, int image_w);

/// Least-squares rectangle through four annotated corners. The edge p0 -> p1
/// gives the opening axis, p1 -> p2 the jaw axis.
GraspRect points_to_rect(const Corners& pts);

}  // namespace graspmaps
