#pragma once
/**
 * @file    affordance.hpp
 * @brief   Dense push affordances: predicted object motion for a fixed push set at every contour point.
 */

#include <pushkit/dynamics.hpp>

#include <array>
#include <iosfwd>
#include <vector>

namespace pushkit
{

struct RepresentativePushSet
{
    static constexpr std::array<double, 5> angles_deg{-60.0, -30.0, 0.0, 30.0, 60.0};
    static constexpr std::array<double, 2> lengths{0.01, 0.05};
    static constexpr std::size_t kDirections = angles_deg.size ();
    static constexpr std::size_t kCount = angles_deg.size () * lengths.size ();

    /// Push j: direction j % 5, length j / 5.
    static double angle (std::size_t j) { return deg2rad (angles_deg[j % kDirections]); }
    static double length (std::size_t j) { return lengths[j / kDirections]; }
    static std::size_t index (std::size_t direction, std::size_t length_index)
    {
        return length_index * kDirections + direction;
    }
};

enum class AffordanceMode
{
    one_step,
    rollout,
};

/// Desired object motion in world frame.
struct GoalMotion
{
    Vec2 translation = Vec2::Zero ();
    double rotation = 0.0;
};

struct ScoreWeights
{
    double lambda = 2.0;                ///< weight on the rotation term
    double translation_unit = 0.001;    ///< m per score unit (millimeters)
    double rotation_unit = kPi / 180.0; ///< rad per score unit (degrees)
};

/// lambda-weighted residual between desired and predicted motion (lower is better).
double motion_score (const GoalMotion &goal, const Vec2 &delta_position, double delta_theta,
                     const ScoreWeights &w = {});
inline double motion_score (const GoalMotion &goal, const MotionPrediction &p, const ScoreWeights &w = {})
{
    return motion_score (goal, p.delta_position, p.delta_theta, w);
}

class AffordanceMap
{
  public:
    AffordanceMap (ObjectState snapshot, AffordanceMode mode, std::size_t points);

    [[nodiscard]] std::size_t points () const noexcept { return rows_; }
    [[nodiscard]] static constexpr std::size_t pushes () noexcept { return RepresentativePushSet::kCount; }
    [[nodiscard]] const MotionPrediction &at (std::size_t i, std::size_t j) const { return data_[i * pushes () + j]; }
    MotionPrediction &at (std::size_t i, std::size_t j) { return data_[i * pushes () + j]; }
    [[nodiscard]] const ObjectState &snapshot () const noexcept { return snapshot_; }
    [[nodiscard]] AffordanceMode mode () const noexcept { return mode_; }

    /// False when the belief drifted from the snapshot beyond tolerance.
    [[nodiscard]] bool is_fresh (const ObjectState &current, double tol = 1e-9) const;

  private:
    ObjectState snapshot_;
    AffordanceMode mode_;
    std::size_t rows_;
    std::vector<MotionPrediction> data_;
};

AffordanceMap compute_affordances (const ShapeContour &contour, const ObjectState &belief_mean, AffordanceMode mode,
                                   double rollout_substep = kPlannerSubstep);

/// s(r_i) = min over the ten pushes of motion_score.
std::vector<double> score_field (const AffordanceMap &map, const GoalMotion &goal, const ScoreWeights &w = {});

/// CSV dump: index,x,y,push_id,dpx,dpy,dtheta,lost (world-frame points at the snapshot pose).
void write_affordance_csv (std::ostream &out, const AffordanceMap &map, const ShapeContour &contour);

} // namespace pushkit
