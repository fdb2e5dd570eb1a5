#include <pushkit/dynamics.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pushkit
{

void validate_state (const ObjectState &state, const ShapeContour &contour)
{
    if (!(state.limit_param >= kMinLimitParam && state.limit_param <= kMaxLimitParam))
        throw std::invalid_argument ("limit surface parameter out of range");
    if (!(state.mu > 0.0 && state.mu <= kMaxFriction))
        throw std::invalid_argument ("friction coefficient out of range");
    if (!state.com.allFinite () || !contour.contains (state.com))
        throw std::invalid_argument ("centre of mass must lie inside the object");
}

void validate_action (const PushAction &action, const ShapeContour &contour)
{
    if (action.contact_index >= contour.size ())
        throw std::invalid_argument ("contact index out of range");
    if (!(std::abs (action.angle) <= kMaxPushAngle + 1e-12))
        throw std::invalid_argument ("push angle out of range");
    if (!(action.length >= 0.0) || !std::isfinite (action.length))
        throw std::invalid_argument ("push length must be non-negative");
}

Twist stick_twist (const Vec2 &r, const Vec2 &u, double l)
{
    const double l2 = l * l;
    const double rx = r.x ();
    const double ry = r.y ();
    const double denom = l2 + rx * rx + ry * ry;
    Twist t;
    t.v.x () = ((l2 + rx * rx) * u.x () + rx * ry * u.y ()) / denom;
    t.v.y () = (rx * ry * u.x () + (l2 + ry * ry) * u.y ()) / denom;
    t.omega = (rx * t.v.y () - ry * t.v.x ()) / l2;
    return t;
}

Twist force_twist (const Vec2 &r, const Vec2 &f, double l) { return {f, cross (r, f) / (l * l)}; }

MotionCone motion_cone (const Vec2 &r, const Vec2 &n_out, double mu, double l)
{
    const double half = std::atan (mu);
    const Vec2 f_left = rotate (-n_out, half);
    const Vec2 f_right = rotate (-n_out, -half);
    return {contact_displacement (force_twist (r, f_left, l), r).normalized (),
            contact_displacement (force_twist (r, f_right, l), r).normalized ()};
}

namespace
{

double distance_to_segment (const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
    const Vec2 ab = b - a;
    const double t = std::clamp ((p - a).dot (ab) / ab.squaredNorm (), 0.0, 1.0);
    return (a + t * ab - p).norm ();
}

ObjectState apply_twist (const ObjectState &state, const Twist &tw)
{
    ObjectState out = state;
    const Vec2 com_w = state.com_world ();
    const Vec2 new_com = com_w + tw.v;
    out.pose = Pose2 (new_com + rotate (state.pose.position - com_w, tw.omega), state.pose.theta + tw.omega);
    return out;
}

} // namespace

SubstepResult push_substep (const ObjectState &state, const ShapeContour &contour, const Contact &contact,
                            const Vec2 &u, const SubstepOptions &options)
{
    if (contact.segment >= contour.edge_count ())
        throw std::invalid_argument ("contact segment out of range");
    const Vec2 seg_a = state.pose.apply (contour.edge_start (contact.segment));
    const Vec2 seg_b = state.pose.apply (contour.edge_end (contact.segment));
    if (distance_to_segment (contact.point, seg_a, seg_b) > 1e-7)
        throw std::invalid_argument ("contact point is not on the contour");

    SubstepResult res;
    res.state = state;
    const Vec2 &n = contact.normal;
    if (u.dot (n) >= 0.0)
    {
        res.mode = ContactMode::separated;
        return res;
    }

    const double l = state.limit_param;
    const Vec2 r = contact.point - state.com_world ();
    const Vec2 t = perp (n);

    const Twist stick = stick_twist (r, u, l);
    const double fn = -stick.v.dot (n);
    const double ft = stick.v.dot (t);
    if (fn > 0.0 && std::abs (ft) <= state.mu * fn * (1.0 + 1e-12))
    {
        res.mode = ContactMode::sticking;
        res.twist = stick;
        res.friction_force = stick.v / fn;
    }
    else
    {
        const double half = std::atan (state.mu);
        const double side = ft >= 0.0 ? 1.0 : -1.0;
        const Vec2 f_edge = -n * std::cos (half) + side * t * std::sin (half);
        const Twist edge = force_twist (r, f_edge, l);
        const Vec2 w_edge = contact_displacement (edge, r);
        const double w_n = w_edge.dot (n);
        if (w_n >= -1e-15)
        {
            // the cone edge cannot press into the surface; treat as separation
            res.mode = ContactMode::separated;
            return res;
        }
        const double scale = u.dot (n) / w_n;
        res.mode = ContactMode::sliding;
        res.twist = {scale * edge.v, scale * edge.omega};
        res.friction_force = f_edge / std::cos (half);
        res.slip = (u - scale * w_edge).dot (t);
    }
    res.state = apply_twist (state, res.twist);

    // Re-localize the contact in the object frame by arc length along the segment.
    std::size_t seg = contact.segment;
    double s = (state.pose.to_local (contact.point) - contour.edge_start (seg)).dot (contour.edge_direction (seg));
    if (options.relocalize)
    {
        s += res.slip;
        const std::size_t edges = contour.edge_count ();
        for (std::size_t guard = 0; guard < edges; ++guard)
        {
            const double len = contour.edge_length (seg);
            if (s > len)
            {
                const double overflow = s - len;
                seg = (seg + 1) % edges;
                if (u.dot (res.state.pose.rotate_vector (contour.edge_normal (seg))) >= 0.0)
                {
                    res.contact.reset ();
                    return res;
                }
                s = overflow;
            }
            else if (s < 0.0)
            {
                const double overflow = -s;
                seg = (seg + edges - 1) % edges;
                if (u.dot (res.state.pose.rotate_vector (contour.edge_normal (seg))) >= 0.0)
                {
                    res.contact.reset ();
                    return res;
                }
                s = contour.edge_length (seg) - overflow;
            }
            else
                break;
        }
    }
    s = std::clamp (s, 0.0, contour.edge_length (seg));
    const Vec2 local = contour.edge_start (seg) + s * contour.edge_direction (seg);
    res.contact = Contact{res.state.pose.apply (local), res.state.pose.rotate_vector (contour.edge_normal (seg)), seg};
    return res;
}

PusherPath make_pusher_path (const Pose2 &pose, const ShapeContour &contour, const PushAction &action)
{
    validate_action (action, contour);
    const Vec2 q = pose.apply (contour.point (action.contact_index));
    const Vec2 n = pose.rotate_vector (contour.normal (action.contact_index));
    PusherPath path;
    path.direction = rotate (-n, action.angle);
    path.start = q - kApproachDistance * path.direction;
    path.travel = kApproachDistance + action.length;
    path.preferred_segment = contour.segment (action.contact_index);
    return path;
}

RolloutResult simulate_push (const ObjectState &state, const ShapeContour &contour, const PusherPath &path,
                             double substep, bool record_prefixes, bool relocalize)
{
    if (!(substep > 0.0))
        throw std::invalid_argument ("substep must be positive");
    RolloutResult out;
    out.final_state = state;

    const ShapeContour world = contour.transformed (state.pose);
    const auto hit = contact_query (world, path.start, path.direction, path.preferred_segment);
    if (!hit || hit->distance >= path.travel)
    {
        out.motion.contact_lost = true;
        return out;
    }
    out.hit = true;
    const double in_contact = path.travel - hit->distance;
    const auto steps = static_cast<std::size_t> (std::max (1.0, std::ceil (in_contact / substep - 1e-9)));

    Contact contact{hit->point, hit->normal, hit->segment};
    ObjectState cur = state;
    double theta_acc = 0.0;
    double slide = 0.0;
    bool lost = false;
    const SubstepOptions options{relocalize};
    auto snapshot = [&] {
        MotionPrediction m;
        m.delta_position = cur.pose.position - state.pose.position;
        m.delta_theta = theta_acc;
        m.contact_lost = lost;
        m.slide_distance = slide;
        return m;
    };
    if (record_prefixes)
        out.prefixes.reserve (steps);

    for (std::size_t i = 0; i < steps; ++i)
    {
        const double len = (i + 1 < steps) ? substep : in_contact - substep * static_cast<double> (steps - 1);
        const SubstepResult res = push_substep (cur, contour, contact, path.direction * len, options);
        cur = res.state;
        theta_acc += res.twist.omega;
        slide += res.slip;
        if (!res.contact)
        {
            lost = true;
            if (record_prefixes)
                out.prefixes.resize (steps, snapshot ());
            break;
        }
        contact = *res.contact;
        if (record_prefixes)
            out.prefixes.push_back (snapshot ());
    }
    out.final_state = cur;
    out.motion = snapshot ();
    return out;
}

MotionPrediction rollout (const ObjectState &state, const ShapeContour &contour, const PushAction &action,
                          double substep)
{
    return simulate_push (state, contour, make_pusher_path (state.pose, contour, action), substep).motion;
}

MotionPrediction predict_one_step (const ObjectState &state, const ShapeContour &contour, const PushAction &action)
{
    if (action.length <= 0.0)
        return {};
    return simulate_push (state, contour, make_pusher_path (state.pose, contour, action), action.length, false, false)
        .motion;
}

} // namespace pushkit
