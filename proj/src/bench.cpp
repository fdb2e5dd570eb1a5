#include <pushkit/bench.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pushkit
{

std::string to_string (TaskKind t)
{
    switch (t)
    {
    case TaskKind::translation:
        return "translation";
    case TaskKind::rotation:
        return "rotation";
    case TaskKind::mixed:
        return "mixed";
    }
    return "?";
}

TaskKind parse_task (const std::string &s)
{
    if (s == "translation")
        return TaskKind::translation;
    if (s == "rotation")
        return TaskKind::rotation;
    if (s == "mixed")
        return TaskKind::mixed;
    throw std::invalid_argument ("unknown task: " + s);
}

TaskSpec TaskSpec::make (TaskKind kind)
{
    TaskSpec t;
    t.kind = kind;
    switch (kind)
    {
    case TaskKind::translation:
        t.translation = 0.20;
        t.rotation = 0.0;
        break;
    case TaskKind::rotation:
        t.translation = 0.0;
        t.rotation = 0.5;
        break;
    case TaskKind::mixed:
        t.translation = 0.10;
        t.rotation = 0.35;
        break;
    }
    return t;
}

Pose2 TaskSpec::goal_from (const Pose2 &start) const
{
    return Pose2 (start.position + Vec2{translation, 0.0}, start.theta + rotation);
}

void TaskSpec::validate () const
{
    if (!(tol_pos > 0.0 && tol_theta > 0.0))
        throw std::invalid_argument ("goal tolerances must be positive");
    if (max_steps < 0)
        throw std::invalid_argument ("max_steps must be non-negative");
}

std::vector<GoalRegion> standard_goal_regions ()
{
    return {{"small", 0.0075, deg2rad (5.0)}, {"medium", 0.025, deg2rad (7.5)}, {"large", 0.05, deg2rad (10.0)}};
}

GoalRegion parse_goal_region (const std::string &name)
{
    for (auto &g : standard_goal_regions ())
        if (g.name == name)
            return g;
    throw std::invalid_argument ("unknown goal region: " + name);
}

namespace
{

std::uint64_t splitmix (std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a (const std::string &s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double com_error_mm (const ObjectState &truth, const StateVec &est)
{
    return 1000.0 * (Vec2{est[kCx], est[kCy]} - truth.com).norm ();
}

} // namespace

std::uint64_t trial_world_seed (std::uint64_t suite_seed, TaskKind task, const std::string &object, int trial)
{
    std::uint64_t h = splitmix (suite_seed);
    h = splitmix (h ^ static_cast<std::uint64_t> (task));
    h = splitmix (h ^ fnv1a (object));
    return splitmix (h ^ static_cast<std::uint64_t> (trial));
}

double trial_orientation (int trial) { return deg2rad (18.0 * static_cast<double> (trial % 20)); }

TrialRecord run_trial (const TaskSpec &task, const WorldConfig &world_config, const PlannerConfig &planner_config,
                       const TrialOptions &options)
{
    task.validate ();
    planner_config.validate ();
    const ShapeLibrary &shapes = options.shapes ? *options.shapes : ShapeLibrary::builtin ();

    TrialRecord rec;
    rec.object = world_config.object_name;
    rec.task = task.kind;
    rec.sampler = planner_config.sampler;
    rec.optimizer = planner_config.optimizer;
    rec.k = planner_config.k;
    rec.tol_pos = task.tol_pos;
    rec.tol_theta = task.tol_theta;
    rec.max_steps = task.max_steps;
    rec.ground_truth_state = options.ground_truth_state;
    rec.world_seed = world_config.rng_seed;
    rec.planner_seed = planner_config.rng_seed;
    rec.initial_theta = options.initial_theta;

    World world = spawn (world_config, options.initial_theta, shapes);
    rec.initial_true_state = world.true_state ();
    const ShapeContour &contour = world.contour ();
    const GoalSpec goal{task.goal_from (world.true_state ().pose), task.tol_pos, task.tol_theta};
    const PoseCov R = observation_covariance (world_config);
    Rng rng (planner_config.rng_seed);

    Observation obs = world.observe ();
    BeliefState belief;
    if (!options.ground_truth_state)
    {
        belief = init_belief (obs, options.l0, options.mu0, default_prior_covariance (world_config));
        constrain (belief.mean, contour, options.ekf);
    }

    for (;;)
    {
        const ObjectState est = options.ground_truth_state ? world.true_state () : belief.state ();
        rec.final_estimate = to_vector (est);
        rec.com_error_mm.push_back (com_error_mm (world.true_state (), rec.final_estimate));
        if (goal_reached (est, goal.goal_pose, goal.tol_pos, goal.tol_theta))
        {
            rec.success = true;
            break;
        }
        if (rec.steps_taken >= task.max_steps)
            break;

        const PlanResult plan = plan_step (est, contour, goal, planner_config, rng);
        const PusherPath path = make_pusher_path (est.pose, contour, plan.action);
        obs = world.execute (path);
        ++rec.steps_taken;

        StepLog log;
        log.step = rec.steps_taken;
        log.action = plan.action;
        log.planned_score = plan.score;
        log.obs_pose = obs.pose;
        log.true_state = world.true_state ();
        if (options.ground_truth_state)
            log.est_state = to_vector (world.true_state ());
        else
        {
            belief = predict (belief, path, plan.action.length, contour, options.ekf);
            belief = update (belief, obs, R, options.ekf);
            constrain (belief.mean, contour, options.ekf);
            log.est_state = belief.mean;
            log.outlier = belief.outlier;
        }
        rec.steps.push_back (log);
    }

    const Pose2 &final_pose = world.true_state ().pose;
    rec.final_pos_err_mm = 1000.0 * (final_pose.position - goal.goal_pose.position).norm ();
    rec.final_theta_err_deg = rad2deg (std::abs (wrap_angle (final_pose.theta - goal.goal_pose.theta)));
    rec.true_success = goal_reached (final_pose, goal.goal_pose, goal.tol_pos, goal.tol_theta);
    return rec;
}

TrialRecord run_trial (const TaskSpec &task, WorldConfig world_config, PlannerConfig planner_config,
                       std::uint64_t seed, const TrialOptions &options)
{
    world_config.rng_seed = splitmix (seed);
    planner_config.rng_seed = splitmix (seed ^ 0x5bd1e995ULL);
    return run_trial (task, world_config, planner_config, options);
}

namespace
{

nlohmann::json pose_json (const Pose2 &p) { return {p.position.x (), p.position.y (), p.theta}; }

void hexf (std::ostringstream &os, double v)
{
    char buf[64];
    std::snprintf (buf, sizeof buf, "%a,", v);
    os << buf;
}

void hexf (std::ostringstream &os, const ObjectState &s)
{
    hexf (os, s.pose.position.x ());
    hexf (os, s.pose.position.y ());
    hexf (os, s.pose.theta);
    hexf (os, s.com.x ());
    hexf (os, s.com.y ());
    hexf (os, s.limit_param);
    hexf (os, s.mu);
}

} // namespace

std::string fingerprint (const TrialRecord &r)
{
    std::ostringstream os;
    os << r.object << ',' << to_string (r.task) << ',' << to_string (r.sampler) << ',' << to_string (r.optimizer)
       << ',' << r.k << ',' << r.max_steps << ',' << r.ground_truth_state << ',' << r.world_seed << ','
       << r.planner_seed << ',';
    hexf (os, r.tol_pos);
    hexf (os, r.tol_theta);
    hexf (os, r.initial_theta);
    hexf (os, r.initial_true_state);
    for (const auto &s : r.steps)
    {
        os << '|' << s.step << ',' << s.action.contact_index << ',' << s.outlier << ',';
        hexf (os, s.action.angle);
        hexf (os, s.action.length);
        hexf (os, s.planned_score);
        hexf (os, s.obs_pose.position.x ());
        hexf (os, s.obs_pose.position.y ());
        hexf (os, s.obs_pose.theta);
        hexf (os, s.true_state);
        for (int i = 0; i < 7; ++i)
            hexf (os, s.est_state[i]);
    }
    os << '|' << r.success << ',' << r.true_success << ',' << r.steps_taken << ',';
    hexf (os, r.final_pos_err_mm);
    hexf (os, r.final_theta_err_deg);
    for (double c : r.com_error_mm)
        hexf (os, c);
    for (int i = 0; i < 7; ++i)
        hexf (os, r.final_estimate[i]);
    return os.str ();
}

void write_episode_log (std::ostream &out, const TrialRecord &record)
{
    for (const auto &s : record.steps)
    {
        nlohmann::json j;
        j["step"] = s.step;
        j["action"] = {{"contact_index", s.action.contact_index},
                       {"angle", s.action.angle},
                       {"length", s.action.length},
                       {"speed", s.action.speed}};
        j["obs_pose"] = pose_json (s.obs_pose);
        j["true_pose"] = pose_json (s.true_state.pose);
        j["est_state"] = std::vector<double> (s.est_state.data (), s.est_state.data () + 7);
        j["outlier"] = s.outlier;
        out << j.dump () << '\n';
    }
}

namespace
{

void mean_std (const std::vector<double> &v, double &mean, double &sd)
{
    mean = 0.0;
    sd = 0.0;
    if (v.empty ())
        return;
    mean = std::accumulate (v.begin (), v.end (), 0.0) / static_cast<double> (v.size ());
    if (v.size () < 2)
        return;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    sd = std::sqrt (ss / static_cast<double> (v.size () - 1));
}

} // namespace

CellStats aggregate (std::span<const TrialRecord> records)
{
    CellStats s;
    s.trials = records.size ();
    std::vector<double> steps_ok, steps_all, pos, theta, com;
    std::size_t true_ok = 0;
    for (const auto &r : records)
    {
        steps_all.push_back (r.steps_taken);
        com.push_back (r.com_error_mm.empty () ? 0.0 : r.com_error_mm.back ());
        if (r.true_success)
            ++true_ok;
        if (!r.success)
            continue;
        ++s.successes;
        steps_ok.push_back (r.steps_taken);
        pos.push_back (r.final_pos_err_mm);
        theta.push_back (r.final_theta_err_deg);
    }
    if (s.trials == 0)
        return s;
    s.success_rate = static_cast<double> (s.successes) / static_cast<double> (s.trials);
    s.true_success_rate = static_cast<double> (true_ok) / static_cast<double> (s.trials);
    mean_std (steps_ok, s.steps_mean_success, s.steps_std_success);
    mean_std (steps_all, s.steps_mean_all, s.steps_std_all);
    mean_std (pos, s.pos_err_mm_mean, s.pos_err_mm_std);
    mean_std (theta, s.theta_err_deg_mean, s.theta_err_deg_std);
    double unused = 0.0;
    mean_std (com, s.com_err_mm_mean, unused);
    std::sort (com.begin (), com.end ());
    const std::size_t n = com.size ();
    s.com_err_mm_median = n % 2 ? com[n / 2] : 0.5 * (com[n / 2 - 1] + com[n / 2]);
    return s;
}

CellStats pooled (std::span<const CellResult> cells)
{
    std::vector<TrialRecord> all;
    for (const auto &c : cells)
        all.insert (all.end (), c.records.begin (), c.records.end ());
    return aggregate (all);
}

void SuiteSpec::validate () const
{
    if (tasks.empty () || objects.empty () || samplers.empty () || ks.empty () || optimizers.empty () ||
        goal_regions.empty ())
        throw std::invalid_argument ("suite grid must be non-empty");
    if (trials < 0)
        throw std::invalid_argument ("trials must be non-negative");
    world.validate ();
}

std::vector<CellResult> run_suite (const SuiteSpec &spec, const ShapeLibrary &shapes)
{
    spec.validate ();
    std::vector<CellResult> cells;
    for (const auto task : spec.tasks)
        for (const auto &object : spec.objects)
        {
            if (!shapes.contains (object))
                throw std::out_of_range ("unknown object: " + object);
            for (const auto sampler : spec.samplers)
                for (const auto optimizer : spec.optimizers)
                    for (const auto k : spec.ks)
                        for (const auto &region : spec.goal_regions)
                        {
                            CellResult c;
                            c.task = task;
                            c.object = object;
                            c.sampler = sampler;
                            c.optimizer = optimizer;
                            c.k = k;
                            c.region = region;
                            c.records.resize (static_cast<std::size_t> (spec.trials));
                            cells.push_back (std::move (c));
                        }
        }

    const std::size_t per_cell = static_cast<std::size_t> (spec.trials);
    const std::size_t jobs = cells.size () * per_cell;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++)
        {
            CellResult &cell = cells[job / per_cell];
            const int trial = static_cast<int> (job % per_cell);

            TaskSpec task = TaskSpec::make (cell.task);
            task.tol_pos = cell.region.tol_pos;
            task.tol_theta = cell.region.tol_theta;
            task.max_steps = spec.max_steps;

            WorldConfig wc = spec.world;
            wc.object_name = cell.object;
            wc.rng_seed = trial_world_seed (spec.seed, cell.task, cell.object, trial);

            PlannerConfig pc = spec.planner;
            pc.sampler = cell.sampler;
            pc.optimizer = cell.optimizer;
            pc.k = cell.k;
            pc.rng_seed = splitmix (wc.rng_seed ^ 0x2545f4914f6cdd1dULL);

            TrialOptions opt;
            opt.initial_theta = trial_orientation (trial);
            opt.ground_truth_state = spec.ground_truth_state;
            opt.ekf = spec.ekf;
            opt.shapes = &shapes;
            cell.records[job % per_cell] = run_trial (task, wc, pc, opt);
        }
    };
    unsigned threads = spec.threads ? spec.threads : std::max (1u, std::thread::hardware_concurrency ());
    threads = static_cast<unsigned> (std::min<std::size_t> (threads, std::max<std::size_t> (jobs, 1)));
    if (threads <= 1)
        worker ();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back (worker);
        for (auto &t : pool)
            t.join ();
    }
    for (auto &c : cells)
        c.stats = aggregate (c.records);
    return cells;
}

namespace
{

constexpr const char *kResultColumns[] = {
    "task", "object", "sampler", "optimizer", "k", "region", "tol_pos_m", "tol_theta_deg", "trials",
    "success_rate", "true_success_rate", "steps_mean_success", "steps_std_success", "steps_mean_all",
    "steps_std_all", "pos_err_mm_mean", "pos_err_mm_std", "theta_err_deg_mean", "theta_err_deg_std",
    "com_err_mm_mean", "com_err_mm_median"};

template <typename Emit> void for_each_row (std::span<const CellResult> cells, Emit emit)
{
    for (const auto &c : cells)
    {
        const auto &s = c.stats;
        std::ostringstream tol_p, tol_t;
        tol_p << c.region.tol_pos;
        tol_t << rad2deg (c.region.tol_theta);
        emit (std::vector<std::string>{to_string (c.task), c.object, to_string (c.sampler), to_string (c.optimizer),
                                       std::to_string (c.k), c.region.name, tol_p.str (), tol_t.str (),
                                       std::to_string (s.trials)},
              std::vector<double>{s.success_rate, s.true_success_rate, s.steps_mean_success, s.steps_std_success,
                                  s.steps_mean_all, s.steps_std_all, s.pos_err_mm_mean, s.pos_err_mm_std,
                                  s.theta_err_deg_mean, s.theta_err_deg_std, s.com_err_mm_mean,
                                  s.com_err_mm_median});
    }
}

} // namespace

void write_results_csv (std::ostream &out, std::span<const CellResult> cells)
{
    bool first = true;
    for (const char *col : kResultColumns)
    {
        out << (first ? "" : ",") << col;
        first = false;
    }
    out << '\n';
    for_each_row (cells, [&] (const std::vector<std::string> &keys, const std::vector<double> &vals) {
        for (std::size_t i = 0; i < keys.size (); ++i)
            out << (i ? "," : "") << keys[i];
        for (double v : vals)
            out << ',' << v;
        out << '\n';
    });
}

void write_results_dat (std::ostream &out, std::span<const CellResult> cells)
{
    out << '#';
    for (const char *col : kResultColumns)
        out << ' ' << col;
    out << '\n';
    for_each_row (cells, [&] (const std::vector<std::string> &keys, const std::vector<double> &vals) {
        for (std::size_t i = 0; i < keys.size (); ++i)
            out << (i ? " " : "") << keys[i];
        for (double v : vals)
            out << ' ' << v;
        out << '\n';
    });
}

void write_trials_csv (std::ostream &out, std::span<const CellResult> cells)
{
    out << "task,object,sampler,optimizer,k,region,trial,initial_theta_deg,world_seed,success,true_success,"
           "steps,final_pos_err_mm,final_theta_err_deg,com_true_x,com_true_y,com_err_mm\n";
    for (const auto &c : cells)
        for (std::size_t i = 0; i < c.records.size (); ++i)
        {
            const auto &r = c.records[i];
            out << to_string (c.task) << ',' << c.object << ',' << to_string (c.sampler) << ','
                << to_string (c.optimizer) << ',' << c.k << ',' << c.region.name << ',' << i << ','
                << rad2deg (r.initial_theta) << ',' << r.world_seed << ',' << r.success << ',' << r.true_success
                << ',' << r.steps_taken << ',' << r.final_pos_err_mm << ',' << r.final_theta_err_deg << ','
                << r.initial_true_state.com.x () << ',' << r.initial_true_state.com.y () << ','
                << (r.com_error_mm.empty () ? 0.0 : r.com_error_mm.back ()) << '\n';
        }
}

SuiteSpec parse_grid (const std::string &json_text)
{
    const auto j = nlohmann::json::parse (json_text);
    SuiteSpec s;
    if (j.contains ("tasks"))
    {
        s.tasks.clear ();
        for (const auto &t : j["tasks"])
            s.tasks.push_back (parse_task (t.get<std::string> ()));
    }
    if (j.contains ("objects"))
        s.objects = j["objects"].get<std::vector<std::string>> ();
    if (j.contains ("samplers"))
    {
        s.samplers.clear ();
        for (const auto &t : j["samplers"])
            s.samplers.push_back (parse_sampler (t.get<std::string> ()));
    }
    if (j.contains ("k"))
        s.ks = j["k"].get<std::vector<std::size_t>> ();
    if (j.contains ("optimizers"))
    {
        s.optimizers.clear ();
        for (const auto &t : j["optimizers"])
            s.optimizers.push_back (parse_optimizer (t.get<std::string> ()));
    }
    if (j.contains ("goal_regions"))
    {
        s.goal_regions.clear ();
        for (const auto &g : j["goal_regions"])
        {
            if (g.is_string ())
                s.goal_regions.push_back (parse_goal_region (g.get<std::string> ()));
            else
                s.goal_regions.push_back (GoalRegion{g.value ("name", std::string ("custom")), g.at ("tol_pos").get<double> (),
                                                     deg2rad (g.at ("tol_theta_deg").get<double> ())});
        }
    }
    s.trials = j.value ("trials", s.trials);
    s.max_steps = j.value ("max_steps", s.max_steps);
    s.seed = j.value ("seed", s.seed);
    s.ground_truth_state = j.value ("ground_truth_state", s.ground_truth_state);
    if (j.contains ("com_mode"))
    {
        const auto mode = j["com_mode"].get<std::string> ();
        if (mode == "centered")
            s.world.com_mode = ComMode::centered;
        else if (mode == "uniform")
            s.world.com_mode = ComMode::uniform_inside;
        else
            throw std::invalid_argument ("unknown com_mode: " + mode);
    }
    s.world.obs_noise_pos = j.value ("obs_noise_pos", s.world.obs_noise_pos);
    if (j.contains ("obs_noise_theta_deg"))
        s.world.obs_noise_theta = deg2rad (j["obs_noise_theta_deg"].get<double> ());
    s.planner.temperature = j.value ("temperature", s.planner.temperature);
    s.threads = j.value ("threads", s.threads);
    s.validate ();
    return s;
}

} // namespace pushkit
