#include <pushkit/sim.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pushkit
{

void WorldConfig::validate () const
{
    if (!(l_range.lo > 0.0 && l_range.lo <= l_range.hi && l_range.hi <= kMaxLimitParam))
        throw std::invalid_argument ("l_range must be positive and ordered");
    if (!(mu_range.lo > 0.0 && mu_range.lo <= mu_range.hi && mu_range.hi <= kMaxFriction))
        throw std::invalid_argument ("mu_range must be positive and ordered");
    if (!(obs_noise_pos >= 0.0 && obs_noise_theta >= 0.0))
        throw std::invalid_argument ("observation noise must be non-negative");
    if (!(substep > 0.0))
        throw std::invalid_argument ("substep must be positive");
}

World::World (WorldConfig config, ShapeContour contour, ObjectState initial)
    : config_ (std::move (config)), contour_ (std::move (contour)), state_ (initial),
      rng_ (config_.rng_seed ^ 0x9e3779b97f4a7c15ULL)
{
    validate_state (state_, contour_);
    history_.push_back (state_);
}

Observation World::observe ()
{
    std::normal_distribution<double> unit (0.0, 1.0);
    const double nx = unit (rng_);
    const double ny = unit (rng_);
    const double nt = unit (rng_);
    Observation obs;
    obs.step_index = step_;
    obs.pose = Pose2 (state_.pose.position + config_.obs_noise_pos * Vec2{nx, ny},
                      state_.pose.theta + config_.obs_noise_theta * nt);
    return obs;
}

Observation World::execute (const PusherPath &path)
{
    const RolloutResult res = simulate_push (state_, contour_, path, config_.substep);
    state_ = res.final_state;
    ++step_;
    history_.push_back (state_);
    return observe ();
}

Vec2 sample_inside (const ShapeContour &contour, std::mt19937_64 &rng)
{
    Vec2 lo = contour.vertices ().front ();
    Vec2 hi = lo;
    for (const auto &v : contour.vertices ())
    {
        lo = lo.cwiseMin (v);
        hi = hi.cwiseMax (v);
    }
    std::uniform_real_distribution<double> ux (lo.x (), hi.x ());
    std::uniform_real_distribution<double> uy (lo.y (), hi.y ());
    for (;;)
    {
        const Vec2 p{ux (rng), uy (rng)};
        if (contour.contains (p))
            return p;
    }
}

World spawn (const WorldConfig &config, double initial_theta, const ShapeLibrary &shapes)
{
    config.validate ();
    const ShapeContour &contour = shapes.get (config.object_name);
    std::mt19937_64 rng (config.rng_seed);
    ObjectState s;
    s.pose = Pose2 (Vec2::Zero (), initial_theta);
    std::uniform_real_distribution<double> ul (config.l_range.lo, config.l_range.hi);
    std::uniform_real_distribution<double> um (config.mu_range.lo, config.mu_range.hi);
    s.limit_param = ul (rng);
    s.mu = um (rng);
    s.com = config.com_mode == ComMode::centered ? Vec2::Zero () : sample_inside (contour, rng);
    return World (config, contour, s);
}

Observation execute (World &world, const PushAction &action, const Pose2 &planner_pose)
{
    return world.execute (make_pusher_path (planner_pose, world.contour (), action));
}

bool goal_reached (const Pose2 &pose, const Pose2 &goal, double tol_pos, double tol_theta)
{
    const double dp = (pose.position - goal.position).norm ();
    const double dth = std::abs (wrap_angle (pose.theta - goal.theta));
    return dp < tol_pos && dth <= tol_theta;
}

} // namespace pushkit
