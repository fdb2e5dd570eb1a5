#include <pushkit/affordance.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pushkit
{

double motion_score (const GoalMotion &goal, const Vec2 &delta_position, double delta_theta, const ScoreWeights &w)
{
    const double trans = (goal.translation - delta_position).norm () / w.translation_unit;
    const double rot = std::abs (goal.rotation - delta_theta) / w.rotation_unit;
    return trans + w.lambda * rot;
}

AffordanceMap::AffordanceMap (ObjectState snapshot, AffordanceMode mode, std::size_t points)
    : snapshot_ (snapshot), mode_ (mode), rows_ (points), data_ (points * pushes ())
{
}

bool AffordanceMap::is_fresh (const ObjectState &cur, double tol) const
{
    return (cur.pose.position - snapshot_.pose.position).norm () <= tol &&
           std::abs (wrap_angle (cur.pose.theta - snapshot_.pose.theta)) <= tol &&
           (cur.com - snapshot_.com).norm () <= tol && std::abs (cur.limit_param - snapshot_.limit_param) <= tol &&
           std::abs (cur.mu - snapshot_.mu) <= tol;
}

AffordanceMap compute_affordances (const ShapeContour &contour, const ObjectState &belief_mean, AffordanceMode mode,
                                   double rollout_substep)
{
    AffordanceMap map (belief_mean, mode, contour.size ());
    for (std::size_t i = 0; i < contour.size (); ++i)
    {
        for (std::size_t j = 0; j < AffordanceMap::pushes (); ++j)
        {
            const PushAction a{i, RepresentativePushSet::angle (j), RepresentativePushSet::length (j)};
            map.at (i, j) = mode == AffordanceMode::one_step ? predict_one_step (belief_mean, contour, a)
                                                             : rollout (belief_mean, contour, a, rollout_substep);
        }
    }
    return map;
}

std::vector<double> score_field (const AffordanceMap &map, const GoalMotion &goal, const ScoreWeights &w)
{
    std::vector<double> s (map.points (), std::numeric_limits<double>::infinity ());
    for (std::size_t i = 0; i < map.points (); ++i)
        for (std::size_t j = 0; j < AffordanceMap::pushes (); ++j)
            s[i] = std::min (s[i], motion_score (goal, map.at (i, j), w));
    return s;
}

void write_affordance_csv (std::ostream &out, const AffordanceMap &map, const ShapeContour &contour)
{
    out << "index,x,y,push_id,dpx,dpy,dtheta,lost\n";
    const Pose2 &pose = map.snapshot ().pose;
    for (std::size_t i = 0; i < map.points (); ++i)
    {
        const Vec2 p = pose.apply (contour.point (i));
        for (std::size_t j = 0; j < AffordanceMap::pushes (); ++j)
        {
            const auto &m = map.at (i, j);
            out << i << ',' << p.x () << ',' << p.y () << ',' << j << ',' << m.delta_position.x () << ','
                << m.delta_position.y () << ',' << m.delta_theta << ',' << (m.contact_lost ? 1 : 0) << '\n';
        }
    }
}

} // namespace pushkit
