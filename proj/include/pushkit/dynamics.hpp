#pragma once
/**
 * @file    dynamics.hpp
 * @brief   Quasi-static point-contact pushing under an ellipsoidal limit surface.
 *
 * A force f applied at offset r from the centre of mass produces the twist
 *   v = f,  omega = (r x f) / l^2
 * (up to a common positive scale), so the contact-point velocity is
 *   w = v + omega * perp(r) = (I + perp(r) perp(r)^T / l^2) f.
 * Sticking contact inverts this map; sliding contact pins f to a friction
 * cone edge and lets the pusher slip along the contour.
 */

#include <pushkit/geometry.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace pushkit
{

inline constexpr double kPushSpeed = 0.02;        ///< m/s
inline constexpr double kMinLimitParam = 1e-4;    ///< m
inline constexpr double kMaxLimitParam = 0.5;     ///< m
inline constexpr double kMaxFriction = 2.0;
inline constexpr double kMaxPushAngle = 75.0 * kPi / 180.0;
inline constexpr double kApproachDistance = 0.3;  ///< pusher starts this far before the contact, m
inline constexpr double kPlannerSubstep = 0.005;  ///< m
inline constexpr double kSimSubstep = 0.0005;     ///< m

struct ObjectState
{
    Pose2 pose;
    Vec2 com = Vec2::Zero (); ///< object frame
    double limit_param = 0.04;
    double mu = 0.3;

    [[nodiscard]] Vec2 com_world () const { return pose.apply (com); }
};

/// Throws std::invalid_argument when l, mu or the COM are out of range.
void validate_state (const ObjectState &state, const ShapeContour &contour);

struct PushAction
{
    std::size_t contact_index = 0; ///< contour sample
    double angle = 0.0;            ///< relative to the inward normal, counter-clockwise positive
    double length = 0.0;           ///< pusher travel in contact, m
    double speed = kPushSpeed;
};

void validate_action (const PushAction &action, const ShapeContour &contour);

struct MotionPrediction
{
    Vec2 delta_position = Vec2::Zero (); ///< object frame origin, world frame
    double delta_theta = 0.0;
    bool contact_lost = false;
    double slide_distance = 0.0; ///< signed, along the contour's counter-clockwise tangent
};

struct Twist
{
    Vec2 v = Vec2::Zero ();
    double omega = 0.0;
};

/// Object twist for a sticking contact whose point moves by u.
Twist stick_twist (const Vec2 &r, const Vec2 &u, double l);

/// Contact-point displacement produced by an object twist.
inline Vec2 contact_displacement (const Twist &t, const Vec2 &r) { return t.v + t.omega * perp (r); }

/// Twist produced by a (unnormalized) contact force.
Twist force_twist (const Vec2 &r, const Vec2 &f, double l);

struct MotionCone
{
    Vec2 left;  ///< image of the friction-cone edge rotated counter-clockwise from -n
    Vec2 right;
};

MotionCone motion_cone (const Vec2 &r, const Vec2 &n_out, double mu, double l);

struct Contact
{
    Vec2 point;  ///< world
    Vec2 normal; ///< world, outward
    std::size_t segment = 0;
};

enum class ContactMode
{
    sticking,
    sliding,
    separated,
};

struct SubstepResult
{
    ObjectState state;
    std::optional<Contact> contact; ///< empty when contact was lost
    double slip = 0.0;
    ContactMode mode = ContactMode::separated;
    Twist twist;
    Vec2 friction_force = Vec2::Zero (); ///< unit-normal-scaled force used (cone interior or edge)
};

struct SubstepOptions
{
    /// Track the pusher across vertices; when false the contact is kept on the original segment.
    bool relocalize = true;
};

/// One quasi-static step of the pusher by u_step; `contour` is in the object frame.
SubstepResult push_substep (const ObjectState &state, const ShapeContour &contour, const Contact &contact,
                            const Vec2 &u_step, const SubstepOptions &options = {});

/// Straight world-frame pusher motion: start point, unit direction and total travel.
struct PusherPath
{
    Vec2 start = Vec2::Zero ();
    Vec2 direction{1.0, 0.0};
    double travel = 0.0;
    std::optional<std::size_t> preferred_segment;
};

/// Converts a contour-relative action into a world pusher path at `pose`.
PusherPath make_pusher_path (const Pose2 &pose, const ShapeContour &contour, const PushAction &action);

struct RolloutResult
{
    ObjectState final_state;
    MotionPrediction motion;
    bool hit = false;                      ///< approach ray found the object
    std::vector<MotionPrediction> prefixes; ///< cumulative motion after each substep, when requested
};

/**
 * Pushes along `path` in substeps of at most `substep`. The pusher first
 * travels to the object along the approach ray; only the remaining travel is
 * in contact. Stops early (flagging contact_lost) when contact is lost.
 */
RolloutResult simulate_push (const ObjectState &state, const ShapeContour &contour, const PusherPath &path,
                             double substep, bool record_prefixes = false, bool relocalize = true);

MotionPrediction rollout (const ObjectState &state, const ShapeContour &contour, const PushAction &action,
                          double substep);

/// Single-step prediction over the full push; the contact is never re-localized.
MotionPrediction predict_one_step (const ObjectState &state, const ShapeContour &contour, const PushAction &action);

} // namespace pushkit
