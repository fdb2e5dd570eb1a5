#pragma once
/**
 * @file    planner.hpp
 * @brief   Greedy one-push planner: propose contact points, optimize a push at each, keep the best.
 *
 * Scores follow motion_score(): a residual in (mm + lambda * deg), so the
 * planner minimizes. Candidate contacts come from one of three samplers:
 *   ana  softmax over the affordance score field, exp(-s / temperature)
 *   geo  geometric half-plane heuristic around the line from p to the goal
 *   rdn  uniform over the contour
 */

#include <pushkit/affordance.hpp>
#include <pushkit/dynamics.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pushkit
{

enum class Sampler
{
    ana,
    geo,
    rdn,
};

enum class Optimizer
{
    rollout,
    direct,
};

enum class LengthSearch
{
    prefix,
    golden,
};

std::string to_string (Sampler s);
std::string to_string (Optimizer o);
Sampler parse_sampler (const std::string &s);
Optimizer parse_optimizer (const std::string &s);

struct PlannerConfig
{
    std::size_t k = 3;
    Sampler sampler = Sampler::ana;
    Optimizer optimizer = Optimizer::rollout;
    double temperature = 1.0;
    ScoreWeights weights{};
    double max_len = 0.05;
    double min_len = 0.01;
    double substep = kPlannerSubstep;
    double goal_translation_cap = 0.05;
    double goal_rotation_cap = 15.0 * kPi / 180.0;
    LengthSearch length_search = LengthSearch::prefix;
    std::uint64_t rng_seed = 0;

    void validate () const;
};

struct GoalSpec
{
    Pose2 goal_pose;
    double tol_pos = 0.0075;
    double tol_theta = 5.0 * kPi / 180.0;
};

using Rng = std::mt19937_64;

/// Remaining goal error from `current`, translation and rotation each capped in magnitude.
GoalMotion goal_motion (const Pose2 &current, const Pose2 &goal, const PlannerConfig &config);

std::vector<std::size_t> sample_contacts_affordance (std::span<const double> scores, std::size_t k,
                                                     double temperature, Rng &rng);
std::vector<std::size_t> sample_contacts_geo (const ShapeContour &contour_world, const Pose2 &pose,
                                              const GoalSpec &goal, std::size_t k, Rng &rng);
std::vector<std::size_t> sample_contacts_rdn (const ShapeContour &contour, std::size_t k, Rng &rng);

struct OptimizedPush
{
    PushAction action;
    double score = 0.0;
    MotionPrediction prediction;
};

OptimizedPush optimize_push (const ObjectState &state, const ShapeContour &contour, std::size_t index,
                             const GoalMotion &goal, const PlannerConfig &config);

/// Uses the one-step affordance row of `index` with linear length rescaling instead of rollouts.
OptimizedPush optimize_push_direct (const AffordanceMap &map, std::size_t index, const GoalMotion &goal,
                                    const PlannerConfig &config);

struct PlanResult
{
    PushAction action;
    double score = 0.0;
    MotionPrediction prediction;
    std::vector<std::size_t> candidates;
};

/// `map`, when given and fresh for `belief_mean`, is reused instead of recomputed.
PlanResult plan_step (const ObjectState &belief_mean, const ShapeContour &contour, const GoalSpec &goal,
                      const PlannerConfig &config, Rng &rng, const AffordanceMap *map = nullptr);

} // namespace pushkit
