#pragma once
/**
 * @file    geometry.hpp
 * @brief   Planar poses and closed polygonal object contours with outward normals.
 *
 * Conventions:
 * - Polygons are stored counter-clockwise; outward normals are the edge
 *   direction rotated by -90 degrees.
 * - Angles are radians, normalized to (-pi, pi].
 * - A contour "segment" is an edge of the source polygon. Every resampled
 *   point records the segment it lies on; samples that coincide with a
 *   vertex belong to the edge that starts there.
 */

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pushkit
{

using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double wrap_angle (double angle);

inline double deg2rad (double deg) { return deg * kPi / 180.0; }
inline double rad2deg (double rad) { return rad * 180.0 / kPi; }

/// z-component of the 3D cross product.
inline double cross (const Vec2 &a, const Vec2 &b) { return a.x () * b.y () - a.y () * b.x (); }

/// Counter-clockwise perpendicular.
inline Vec2 perp (const Vec2 &v) { return {-v.y (), v.x ()}; }

Vec2 rotate (const Vec2 &v, double angle);

struct Pose2
{
    Vec2 position = Vec2::Zero ();
    double theta = 0.0;

    Pose2 () = default;
    Pose2 (Vec2 p, double th);
    Pose2 (double x, double y, double th) : Pose2 (Vec2{x, y}, th) {}

    /// this ∘ rhs: first rhs, then this.
    [[nodiscard]] Pose2 compose (const Pose2 &rhs) const;
    [[nodiscard]] Pose2 inverse () const;

    [[nodiscard]] Vec2 apply (const Vec2 &local) const;
    [[nodiscard]] Vec2 rotate_vector (const Vec2 &local) const;
    [[nodiscard]] Vec2 to_local (const Vec2 &world) const;
};

class ShapeContour
{
  public:
    /// Resamples a simple polygon at (approximately) arc_step spacing.
    /// Throws std::invalid_argument on degenerate or self-intersecting input.
    static ShapeContour from_polygon (std::span<const Vec2> vertices, double arc_step);

    [[nodiscard]] std::size_t size () const noexcept { return points_.size (); }
    [[nodiscard]] const std::vector<Vec2> &points () const noexcept { return points_; }
    [[nodiscard]] const std::vector<Vec2> &normals () const noexcept { return normals_; }
    [[nodiscard]] const std::vector<std::size_t> &segments () const noexcept { return segments_; }
    [[nodiscard]] const Vec2 &point (std::size_t i) const { return points_[i]; }
    [[nodiscard]] const Vec2 &normal (std::size_t i) const { return normals_[i]; }
    [[nodiscard]] std::size_t segment (std::size_t i) const { return segments_[i]; }

    /// Nominal spacing requested at construction.
    [[nodiscard]] double arc_step () const noexcept { return arc_step_; }
    /// Actual spacing (perimeter / sample count).
    [[nodiscard]] double sample_spacing () const noexcept { return perimeter_ / static_cast<double> (points_.size ()); }
    [[nodiscard]] bool is_closed () const noexcept { return true; }

    [[nodiscard]] const std::vector<Vec2> &vertices () const noexcept { return vertices_; }
    [[nodiscard]] std::size_t edge_count () const noexcept { return vertices_.size (); }
    [[nodiscard]] const Vec2 &edge_start (std::size_t k) const { return vertices_[k]; }
    [[nodiscard]] const Vec2 &edge_end (std::size_t k) const { return vertices_[(k + 1) % vertices_.size ()]; }
    [[nodiscard]] const Vec2 &edge_normal (std::size_t k) const { return edge_normals_[k]; }
    [[nodiscard]] Vec2 edge_direction (std::size_t k) const;
    [[nodiscard]] double edge_length (std::size_t k) const;

    [[nodiscard]] double perimeter () const noexcept { return perimeter_; }
    [[nodiscard]] double area () const;
    [[nodiscard]] Vec2 centroid () const;
    /// Even-odd point-in-polygon test.
    [[nodiscard]] bool contains (const Vec2 &p) const;
    /// Closest point on the boundary.
    [[nodiscard]] Vec2 closest_boundary_point (const Vec2 &p) const;

    /// Rigid transform of every point, normal and vertex.
    [[nodiscard]] ShapeContour transformed (const Pose2 &pose) const;

  private:
    std::vector<Vec2> points_;
    std::vector<Vec2> normals_;
    std::vector<std::size_t> segments_;
    std::vector<Vec2> vertices_;
    std::vector<Vec2> edge_normals_;
    double arc_step_ = 0.0;
    double perimeter_ = 0.0;
};

ShapeContour make_polygon_contour (std::span<const Vec2> vertices, double arc_step);
ShapeContour world_contour (const ShapeContour &contour, const Pose2 &pose);

/// True if any two non-adjacent edges intersect (or adjacent edges overlap).
bool polygon_self_intersects (std::span<const Vec2> vertices);

struct ContactHit
{
    Vec2 point;
    Vec2 normal;
    std::size_t segment = 0;
    double distance = 0.0;
};

/**
 * First entry of the ray origin + t * direction (t >= 0) into the polygon.
 *
 * Only front-facing segments (direction . normal < 0) count as hits. When a
 * ray passes exactly through a vertex, both adjacent segments hit at the same
 * distance; `preferred_segment` wins if it is among them, otherwise the lower
 * segment index.
 */
std::optional<ContactHit> contact_query (const ShapeContour &contour, const Vec2 &origin, const Vec2 &direction,
                                         std::optional<std::size_t> preferred_segment = std::nullopt);

} // namespace pushkit
