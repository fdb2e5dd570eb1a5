#include <pushkit/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pushkit
{

double wrap_angle (double angle)
{
    double a = std::remainder (angle, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

Vec2 rotate (const Vec2 &v, double angle)
{
    const double c = std::cos (angle);
    const double s = std::sin (angle);
    return {c * v.x () - s * v.y (), s * v.x () + c * v.y ()};
}

Pose2::Pose2 (Vec2 p, double th) : position (std::move (p)), theta (wrap_angle (th)) {}

Pose2 Pose2::compose (const Pose2 &rhs) const { return {apply (rhs.position), theta + rhs.theta}; }

Pose2 Pose2::inverse () const { return {-rotate (position, -theta), -theta}; }

Vec2 Pose2::apply (const Vec2 &local) const { return position + rotate (local, theta); }

Vec2 Pose2::rotate_vector (const Vec2 &local) const { return rotate (local, theta); }

Vec2 Pose2::to_local (const Vec2 &world) const { return rotate (world - position, -theta); }

namespace
{

double signed_area (std::span<const Vec2> v)
{
    double a = 0.0;
    for (std::size_t i = 0; i < v.size (); ++i)
        a += cross (v[i], v[(i + 1) % v.size ()]);
    return 0.5 * a;
}

int orientation (const Vec2 &a, const Vec2 &b, const Vec2 &c, double eps)
{
    const double o = cross (b - a, c - a);
    if (o > eps)
        return 1;
    if (o < -eps)
        return -1;
    return 0;
}

bool on_segment (const Vec2 &a, const Vec2 &b, const Vec2 &p, double eps)
{
    return p.x () >= std::min (a.x (), b.x ()) - eps && p.x () <= std::max (a.x (), b.x ()) + eps &&
           p.y () >= std::min (a.y (), b.y ()) - eps && p.y () <= std::max (a.y (), b.y ()) + eps;
}

bool segments_intersect (const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2, double eps)
{
    const int o1 = orientation (p1, p2, q1, eps);
    const int o2 = orientation (p1, p2, q2, eps);
    const int o3 = orientation (q1, q2, p1, eps);
    const int o4 = orientation (q1, q2, p2, eps);
    if (o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    if (o1 == 0 && on_segment (p1, p2, q1, eps))
        return true;
    if (o2 == 0 && on_segment (p1, p2, q2, eps))
        return true;
    if (o3 == 0 && on_segment (q1, q2, p1, eps))
        return true;
    if (o4 == 0 && on_segment (q1, q2, p2, eps))
        return true;
    return false;
}

} // namespace

bool polygon_self_intersects (std::span<const Vec2> v)
{
    const std::size_t n = v.size ();
    double scale = 0.0;
    for (const auto &p : v)
        scale = std::max (scale, p.cwiseAbs ().maxCoeff ());
    const double eps = 1e-12 * std::max (1.0, scale * scale);
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &a = v[i];
        const Vec2 &b = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const Vec2 &c = v[j];
            const Vec2 &d = v[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent)
            {
                // shared vertex is fine; collinear fold-back is not
                const Vec2 shared = (j == i + 1) ? b : a;
                const Vec2 other_a = (j == i + 1) ? a : b;
                const Vec2 other_b = (j == i + 1) ? d : c;
                const Vec2 ea = other_a - shared;
                const Vec2 eb = other_b - shared;
                if (std::abs (cross (ea, eb)) <= eps && ea.dot (eb) > 0.0)
                    return true;
                continue;
            }
            if (segments_intersect (a, b, c, d, eps))
                return true;
        }
    }
    return false;
}

ShapeContour ShapeContour::from_polygon (std::span<const Vec2> input, double arc_step)
{
    if (input.size () < 3)
        throw std::invalid_argument ("polygon needs at least 3 vertices");
    if (!(arc_step > 0.0) || !std::isfinite (arc_step))
        throw std::invalid_argument ("arc_step must be positive");
    for (const auto &p : input)
        if (!p.allFinite ())
            throw std::invalid_argument ("polygon vertex is not finite");

    std::vector<Vec2> verts (input.begin (), input.end ());
    for (std::size_t i = 0; i < verts.size (); ++i)
        if ((verts[i] - verts[(i + 1) % verts.size ()]).norm () == 0.0)
            throw std::invalid_argument ("polygon has repeated consecutive vertices");
    if (polygon_self_intersects (verts))
        throw std::invalid_argument ("polygon is self-intersecting");
    const double area = signed_area (verts);
    if (std::abs (area) < 1e-14)
        throw std::invalid_argument ("polygon has zero area");
    if (area < 0.0)
        std::reverse (verts.begin (), verts.end ());

    ShapeContour c;
    c.vertices_ = std::move (verts);
    c.arc_step_ = arc_step;
    const std::size_t n = c.vertices_.size ();
    double shortest = std::numeric_limits<double>::infinity ();
    c.edge_normals_.reserve (n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double len = c.edge_length (k);
        shortest = std::min (shortest, len);
        c.perimeter_ += len;
        const Vec2 d = c.edge_direction (k);
        c.edge_normals_.emplace_back (d.y (), -d.x ());
    }
    if (arc_step >= shortest)
        throw std::invalid_argument ("arc_step must be smaller than the shortest polygon edge");

    const auto count = static_cast<std::size_t> (std::max (3.0, std::round (c.perimeter_ / arc_step)));
    const double step = c.perimeter_ / static_cast<double> (count);
    c.points_.reserve (count);
    c.normals_.reserve (count);
    c.segments_.reserve (count);

    std::size_t edge = 0;
    double edge_begin = 0.0; // arc length at the start of `edge`
    for (std::size_t j = 0; j < count; ++j)
    {
        const double s = step * static_cast<double> (j);
        while (edge + 1 < n && s >= edge_begin + c.edge_length (edge) - 1e-12 * c.perimeter_)
        {
            edge_begin += c.edge_length (edge);
            ++edge;
        }
        const double local = std::clamp (s - edge_begin, 0.0, c.edge_length (edge));
        c.points_.push_back (c.edge_start (edge) + local * c.edge_direction (edge));
        c.normals_.push_back (c.edge_normals_[edge]);
        c.segments_.push_back (edge);
    }
    return c;
}

Vec2 ShapeContour::edge_direction (std::size_t k) const { return (edge_end (k) - edge_start (k)).normalized (); }

double ShapeContour::edge_length (std::size_t k) const { return (edge_end (k) - edge_start (k)).norm (); }

double ShapeContour::area () const { return signed_area (vertices_); }

Vec2 ShapeContour::centroid () const
{
    Vec2 acc = Vec2::Zero ();
    double a = 0.0;
    for (std::size_t i = 0; i < vertices_.size (); ++i)
    {
        const Vec2 &p = vertices_[i];
        const Vec2 &q = vertices_[(i + 1) % vertices_.size ()];
        const double w = cross (p, q);
        a += w;
        acc += (p + q) * w;
    }
    return acc / (3.0 * a);
}

bool ShapeContour::contains (const Vec2 &p) const
{
    bool inside = false;
    const std::size_t n = vertices_.size ();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        const Vec2 &a = vertices_[i];
        const Vec2 &b = vertices_[j];
        if ((a.y () > p.y ()) != (b.y () > p.y ()))
        {
            const double x = a.x () + (p.y () - a.y ()) * (b.x () - a.x ()) / (b.y () - a.y ());
            if (p.x () < x)
                inside = !inside;
        }
    }
    return inside;
}

Vec2 ShapeContour::closest_boundary_point (const Vec2 &p) const
{
    Vec2 best = vertices_.front ();
    double best_d = std::numeric_limits<double>::infinity ();
    for (std::size_t k = 0; k < edge_count (); ++k)
    {
        const Vec2 &a = edge_start (k);
        const Vec2 ab = edge_end (k) - a;
        const double t = std::clamp ((p - a).dot (ab) / ab.squaredNorm (), 0.0, 1.0);
        const Vec2 q = a + t * ab;
        const double d = (q - p).squaredNorm ();
        if (d < best_d)
        {
            best_d = d;
            best = q;
        }
    }
    return best;
}

ShapeContour ShapeContour::transformed (const Pose2 &pose) const
{
    ShapeContour out = *this;
    for (auto &p : out.points_)
        p = pose.apply (p);
    for (auto &n : out.normals_)
        n = pose.rotate_vector (n);
    for (auto &v : out.vertices_)
        v = pose.apply (v);
    for (auto &n : out.edge_normals_)
        n = pose.rotate_vector (n);
    return out;
}

ShapeContour make_polygon_contour (std::span<const Vec2> vertices, double arc_step)
{
    return ShapeContour::from_polygon (vertices, arc_step);
}

ShapeContour world_contour (const ShapeContour &contour, const Pose2 &pose) { return contour.transformed (pose); }

std::optional<ContactHit> contact_query (const ShapeContour &contour, const Vec2 &origin, const Vec2 &direction,
                                         std::optional<std::size_t> preferred_segment)
{
    struct Candidate
    {
        double t;
        std::size_t segment;
    };
    std::vector<Candidate> hits;
    const double scale = std::max (1.0, contour.perimeter ());
    for (std::size_t k = 0; k < contour.edge_count (); ++k)
    {
        const Vec2 &n = contour.edge_normal (k);
        if (direction.dot (n) >= 0.0)
            continue;
        const Vec2 &a = contour.edge_start (k);
        const Vec2 e = contour.edge_end (k) - a;
        const double denom = cross (direction, e);
        if (std::abs (denom) < 1e-15)
            continue;
        const Vec2 w = a - origin;
        const double t = cross (w, e) / denom;
        const double s = cross (w, direction) / denom;
        const double s_eps = 1e-12;
        if (t < 0.0 || s < -s_eps || s > 1.0 + s_eps)
            continue;
        hits.push_back ({t, k});
    }
    if (hits.empty ())
        return std::nullopt;

    double t_min = std::numeric_limits<double>::infinity ();
    for (const auto &h : hits)
        t_min = std::min (t_min, h.t);
    const double tie = 1e-12 * scale;
    std::optional<std::size_t> chosen;
    for (const auto &h : hits)
    {
        if (h.t > t_min + tie)
            continue;
        if (preferred_segment && h.segment == *preferred_segment)
        {
            chosen = h.segment;
            break;
        }
        if (!chosen || h.segment < *chosen)
            chosen = h.segment;
    }
    double t_hit = t_min;
    for (const auto &h : hits)
        if (h.segment == *chosen)
            t_hit = h.t;
    return ContactHit{origin + t_hit * direction, contour.edge_normal (*chosen), *chosen, t_hit};
}

} // namespace pushkit
