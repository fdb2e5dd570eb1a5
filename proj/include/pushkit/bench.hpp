#pragma once
/**
 * @file    bench.hpp
 * @brief   Closed-loop pushing trials and seeded experiment suites.
 *
 * A trial loops observe -> filter -> plan -> execute until the estimated
 * pose is inside the goal region or the step budget runs out. Suites run a
 * grid of (task, object, sampler, optimizer, k, goal region) cells with
 * `trials` episodes each; trial i starts at orientation (i mod 20) * 18 deg.
 * World seeds depend only on (suite seed, task, object, trial index), so
 * every cell of a suite faces the same set of worlds.
 */

#include <pushkit/estimation.hpp>
#include <pushkit/planner.hpp>
#include <pushkit/sim.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pushkit
{

enum class TaskKind
{
    translation,
    rotation,
    mixed,
};

std::string to_string (TaskKind t);
TaskKind parse_task (const std::string &s);

struct TaskSpec
{
    TaskKind kind = TaskKind::translation;
    double translation = 0.2;
    double rotation = 0.0;
    double tol_pos = 0.0075;
    double tol_theta = 5.0 * kPi / 180.0;
    int max_steps = 30;

    static TaskSpec make (TaskKind kind);
    /// Goal pose for a trial starting at `start` (translation along world +x).
    [[nodiscard]] Pose2 goal_from (const Pose2 &start) const;
    void validate () const;
};

struct GoalRegion
{
    std::string name;
    double tol_pos = 0.0075;
    double tol_theta = 5.0 * kPi / 180.0;
};

/// small (0.75 cm, 5 deg), medium (2.5 cm, 7.5 deg), large (5 cm, 10 deg).
std::vector<GoalRegion> standard_goal_regions ();
GoalRegion parse_goal_region (const std::string &name);

struct TrialOptions
{
    double initial_theta = 0.0;
    bool ground_truth_state = false; ///< planner sees the true state; filter bypassed
    EkfConfig ekf{};
    double l0 = 0.04;
    double mu0 = 0.3;
    const ShapeLibrary *shapes = nullptr;
};

struct StepLog
{
    int step = 0;
    PushAction action;
    double planned_score = 0.0;
    Pose2 obs_pose;
    ObjectState true_state;
    StateVec est_state = StateVec::Zero ();
    bool outlier = false;
};

struct TrialRecord
{
    std::string object;
    TaskKind task = TaskKind::translation;
    Sampler sampler = Sampler::ana;
    Optimizer optimizer = Optimizer::rollout;
    std::size_t k = 1;
    double tol_pos = 0.0;
    double tol_theta = 0.0;
    int max_steps = 0;
    bool ground_truth_state = false;
    std::uint64_t world_seed = 0;
    std::uint64_t planner_seed = 0;
    double initial_theta = 0.0;
    ObjectState initial_true_state;

    std::vector<StepLog> steps;
    bool success = false;      ///< estimated pose reached the goal region within budget
    bool true_success = false; ///< true pose inside the goal region at the end
    int steps_taken = 0;
    double final_pos_err_mm = 0.0;     ///< true pose
    double final_theta_err_deg = 0.0;  ///< true pose
    std::vector<double> com_error_mm;  ///< |c_est - c_true| before each decision
    StateVec final_estimate = StateVec::Zero ();
};

/// Exact (hex-float) text form of every field; equal strings mean bit-identical records.
std::string fingerprint (const TrialRecord &record);

TrialRecord run_trial (const TaskSpec &task, const WorldConfig &world_config, const PlannerConfig &planner_config,
                       const TrialOptions &options = {});

/// Seeds both the world and the planner from `seed`.
TrialRecord run_trial (const TaskSpec &task, WorldConfig world_config, PlannerConfig planner_config,
                       std::uint64_t seed, const TrialOptions &options = {});

/// One JSON object per step: {step, action, obs_pose, true_pose, est_state}.
void write_episode_log (std::ostream &out, const TrialRecord &record);

struct CellStats
{
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double true_success_rate = 0.0;
    double steps_mean_success = 0.0;
    double steps_std_success = 0.0;
    double steps_mean_all = 0.0;
    double steps_std_all = 0.0;
    double pos_err_mm_mean = 0.0; ///< successful trials
    double pos_err_mm_std = 0.0;
    double theta_err_deg_mean = 0.0;
    double theta_err_deg_std = 0.0;
    double com_err_mm_mean = 0.0; ///< final estimate, all trials
    double com_err_mm_median = 0.0;
};

CellStats aggregate (std::span<const TrialRecord> records);

struct SuiteSpec
{
    std::vector<TaskKind> tasks{TaskKind::translation};
    std::vector<std::string> objects{"triangle", "butter", "hexagon"};
    std::vector<Sampler> samplers{Sampler::ana};
    std::vector<std::size_t> ks{1};
    std::vector<Optimizer> optimizers{Optimizer::rollout};
    std::vector<GoalRegion> goal_regions{GoalRegion{"small", 0.0075, 5.0 * kPi / 180.0}};
    int trials = 60;
    int max_steps = 30;
    std::uint64_t seed = 1;
    bool ground_truth_state = true;
    WorldConfig world{};            ///< object_name and rng_seed are set per trial
    PlannerConfig planner{};        ///< sampler, optimizer, k and rng_seed are set per cell/trial
    EkfConfig ekf{};
    unsigned threads = 0;           ///< 0: hardware concurrency

    void validate () const;
};

struct CellResult
{
    TaskKind task = TaskKind::translation;
    std::string object;
    Sampler sampler = Sampler::ana;
    Optimizer optimizer = Optimizer::rollout;
    std::size_t k = 1;
    GoalRegion region;
    std::vector<TrialRecord> records;
    CellStats stats;
};

std::uint64_t trial_world_seed (std::uint64_t suite_seed, TaskKind task, const std::string &object, int trial);
double trial_orientation (int trial);

std::vector<CellResult> run_suite (const SuiteSpec &spec, const ShapeLibrary &shapes = ShapeLibrary::builtin ());

/// Pools the records of several cells (e.g. across objects).
CellStats pooled (std::span<const CellResult> cells);

void write_results_csv (std::ostream &out, std::span<const CellResult> cells);
/// Whitespace-separated columns with a '#' header line, for gnuplot.
void write_results_dat (std::ostream &out, std::span<const CellResult> cells);
void write_trials_csv (std::ostream &out, std::span<const CellResult> cells);

/// Grid file: JSON object with optional keys tasks, objects, samplers, k, optimizers,
/// goal_regions, trials, max_steps, seed, ground_truth_state, com_mode, obs_noise_pos,
/// obs_noise_theta_deg, temperature, threads.
SuiteSpec parse_grid (const std::string &json_text);

} // namespace pushkit
