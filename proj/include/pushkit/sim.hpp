#pragma once
/**
 * @file    sim.hpp
 * @brief   Ground-truth pushing world with latent object properties and noisy pose observations.
 */

#include <pushkit/dynamics.hpp>
#include <pushkit/shapes.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pushkit
{

enum class ComMode
{
    centered,
    uniform_inside,
};

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

struct WorldConfig
{
    std::string object_name = "triangle";
    ComMode com_mode = ComMode::centered;
    Interval l_range{0.02, 0.06};
    Interval mu_range{0.2, 0.6};
    double obs_noise_pos = 0.002;
    double obs_noise_theta = 1.0 * kPi / 180.0;
    std::uint64_t rng_seed = 0;
    double substep = kSimSubstep;

    void validate () const;
};

struct Observation
{
    Pose2 pose;
    int step_index = 0;
};

class World
{
  public:
    World (WorldConfig config, ShapeContour contour, ObjectState initial);

    [[nodiscard]] const WorldConfig &config () const noexcept { return config_; }
    [[nodiscard]] const ShapeContour &contour () const noexcept { return contour_; }
    [[nodiscard]] const ObjectState &true_state () const noexcept { return state_; }
    [[nodiscard]] int step_index () const noexcept { return step_; }
    /// True states after spawn and after each executed push.
    [[nodiscard]] const std::vector<ObjectState> &history () const noexcept { return history_; }

    /// Noisy observation of the current pose (consumes noise draws).
    Observation observe ();

    /// Executes `path` on the true object and returns the next observation.
    Observation execute (const PusherPath &path);

  private:
    WorldConfig config_;
    ShapeContour contour_;
    ObjectState state_;
    std::mt19937_64 rng_;
    int step_ = 0;
    std::vector<ObjectState> history_;
};

/// Object at the workspace origin with latent c, l and mu drawn from the config's seed.
World spawn (const WorldConfig &config, double initial_theta, const ShapeLibrary &shapes = ShapeLibrary::builtin ());

/**
 * Executes an action planned against `planner_pose`. The pusher follows the
 * world-frame line implied by the planner's pose estimate; a miss still
 * consumes a step and leaves the object where it was.
 */
Observation execute (World &world, const PushAction &action, const Pose2 &planner_pose);

bool goal_reached (const Pose2 &pose, const Pose2 &goal, double tol_pos, double tol_theta);
inline bool goal_reached (const ObjectState &state, const Pose2 &goal, double tol_pos, double tol_theta)
{
    return goal_reached (state.pose, goal, tol_pos, tol_theta);
}

/// Uniform sample inside the polygon by rejection from its bounding box.
Vec2 sample_inside (const ShapeContour &contour, std::mt19937_64 &rng);

} // namespace pushkit
