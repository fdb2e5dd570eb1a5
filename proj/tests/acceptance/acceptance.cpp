// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <pushkit/bench.hpp>

#include "../support/dynamics_properties.hpp"
#include "../support/ekf_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace pushkit;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since (Clock::time_point t0) { return std::chrono::duration<double> (Clock::now () - t0).count (); }

struct Outcome
{
    bool pass = true;
    std::vector<std::string> notes;

    void require (bool ok, const std::string &what)
    {
        pass = pass && ok;
        notes.push_back (std::string (ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt (const char *f, double a)
{
    char buf[128];
    std::snprintf (buf, sizeof buf, f, a);
    return buf;
}

std::string fmt (const char *f, double a, double b)
{
    char buf[160];
    std::snprintf (buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt (const char *f, double a, double b, double c)
{
    char buf[200];
    std::snprintf (buf, sizeof buf, f, a, b, c);
    return buf;
}

const std::vector<std::string> kObjects{"triangle", "butter", "hexagon"};
const std::vector<TaskKind> kTasks{TaskKind::translation, TaskKind::rotation, TaskKind::mixed};

/// Stats pooled over the cells matching the predicate.
CellStats pool_where (const std::vector<CellResult> &cells, const std::function<bool (const CellResult &)> &pred)
{
    std::vector<CellResult> sel;
    for (const auto &c : cells)
        if (pred (c))
            sel.push_back (c);
    return pooled (sel);
}

// 1 --------------------------------------------------------------------------------------------

Outcome dynamics_properties ()
{
    Outcome o;
    const auto t0 = Clock::now ();
    const std::vector<testing::PropertyReport> reports{
        testing::check_frame_equivariance (1000, 101), testing::check_sticking_consistency (1000, 102),
        testing::check_sliding_normal_matching (1000, 103), testing::check_quasi_static_bound (1000, 104),
        testing::check_omega_sign (1000, 105)};
    const double dt = seconds_since (t0);
    for (const auto &r : reports)
        o.require (r.cases == 1000 && r.failures == 0,
                   r.name + ": " + std::to_string (r.cases - r.failures) + "/" + std::to_string (r.cases) +
                       (r.failures ? " first failure " + r.first_failure : ""));
    o.require (dt < 10.0, fmt ("runtime %.2f s (< 10 s)", dt));
    return o;
}

// 2 --------------------------------------------------------------------------------------------

Outcome one_step_vs_rollout ()
{
    Outcome o;
    const ShapeLibrary &lib = ShapeLibrary::builtin ();
    std::mt19937_64 rng (202);
    std::uniform_real_distribution<double> unit (0.0, 1.0);

    // Pushes whose line of action passes through the COM and stay inside the friction cone:
    // constant normal, sticking contact, no rotation.
    int cases = 0;
    double worst = 0.0;
    int attempts = 0;
    while (cases < 100 && attempts < 100000)
    {
        ++attempts;
        const ShapeContour &c = lib.get (kObjects[static_cast<std::size_t> (attempts) % 3]);
        ObjectState s;
        s.com = sample_inside (c, rng);
        s.limit_param = 0.02 + 0.04 * unit (rng);
        s.mu = 0.2 + 0.6 * unit (rng);
        s.pose = Pose2 (unit (rng) - 0.5, unit (rng) - 0.5, 2.0 * kPi * unit (rng));
        const std::size_t i = static_cast<std::size_t> (unit (rng) * static_cast<double> (c.size ())) % c.size ();
        const Vec2 d = (s.com - c.point (i)).normalized ();
        const Vec2 inward = -c.normal (i);
        const double angle = std::atan2 (cross (inward, d), inward.dot (d));
        if (std::abs (angle) > std::min (std::atan (s.mu) * 0.95, deg2rad (60.0)))
            continue;
        const PushAction a{i, angle, 0.01 + 0.04 * unit (rng)};
        const MotionPrediction one = predict_one_step (s, c, a);
        const MotionPrediction fine = rollout (s, c, a, kSimSubstep);
        if (fine.contact_lost)
            continue;
        ++cases;
        worst = std::max ({worst, (one.delta_position - fine.delta_position).norm (),
                           std::abs (one.delta_theta - fine.delta_theta)});
    }
    o.require (cases == 100 && worst <= 1e-6, fmt ("flat-edge sticking agreement over %.0f cases, max deviation %.2e",
                                                   cases, worst));

    for (const auto &name : kObjects)
    {
        const ShapeContour &c = lib.get (name);
        const ObjectState s;
        bool found = false;
        double gap = 0.0;
        std::string where;
        for (std::size_t i = 0; i < c.size () && !found; ++i)
            for (double deg : {-60.0, 60.0})
            {
                const PushAction a{i, deg2rad (deg), 0.05};
                const MotionPrediction fine = rollout (s, c, a, kSimSubstep);
                const MotionPrediction one = predict_one_step (s, c, a);
                if (fine.contact_lost && !one.contact_lost)
                {
                    found = true;
                    gap = (one.delta_position - fine.delta_position).norm ();
                    where = "index " + std::to_string (i) + fmt (", %+.0f deg", deg);
                    break;
                }
            }
        o.require (found, name + " near-corner case (" + where + "): fine rollout loses contact, one-step does not" +
                              fmt (", |dp| gap %.1f mm", 1000.0 * gap));
    }
    return o;
}

// 3 --------------------------------------------------------------------------------------------

Outcome sampler_trends ()
{
    Outcome o;
    const auto t0 = Clock::now ();
    SuiteSpec spec;
    spec.tasks = kTasks;
    spec.objects = kObjects;
    spec.samplers = {Sampler::ana, Sampler::geo, Sampler::rdn};
    spec.ks = {1, 3};
    spec.trials = 60;
    spec.seed = 1;
    spec.ground_truth_state = true;
    auto cells = run_suite (spec);
    SuiteSpec k10 = spec;
    k10.samplers = {Sampler::ana};
    k10.ks = {10};
    for (auto &c : run_suite (k10))
        cells.push_back (std::move (c));
    const double dt = seconds_since (t0);

    auto stats = [&] (TaskKind t, Sampler s, std::size_t k) {
        return pool_where (cells, [&] (const CellResult &c) { return c.task == t && c.sampler == s && c.k == k; });
    };
    std::ostringstream table;
    for (TaskKind t : kTasks)
        for (std::size_t k : {1, 3})
        {
            table << "      " << to_string (t) << " k=" << k << ":";
            for (Sampler s : {Sampler::ana, Sampler::geo, Sampler::rdn})
            {
                const CellStats st = stats (t, s, k);
                table << "  " << to_string (s)
                      << fmt (" %.0f%% / %.2f steps", 100.0 * st.success_rate, st.steps_mean_success);
            }
            table << "\n";
        }
    std::cout << table.str ();

    for (TaskKind t : kTasks)
    {
        const CellStats a = stats (t, Sampler::ana, 1);
        o.require (a.success_rate >= 0.9,
                   "(a) ana k=1 " + to_string (t) + fmt (" success %.1f%% (>= 90%%)", 100.0 * a.success_rate));
    }
    {
        const double ana = stats (TaskKind::translation, Sampler::ana, 1).success_rate;
        const double rdn = stats (TaskKind::translation, Sampler::rdn, 1).success_rate;
        o.require (rdn <= ana - 0.2, fmt ("(b) translation k=1: rdn %.1f%% vs ana %.1f%% (gap >= 20 points)",
                                          100.0 * rdn, 100.0 * ana));
    }
    for (TaskKind t : kTasks)
        for (std::size_t k : {1, 3})
        {
            const double a = stats (t, Sampler::ana, k).steps_mean_success;
            const double g = stats (t, Sampler::geo, k).steps_mean_success;
            const double r = stats (t, Sampler::rdn, k).steps_mean_success;
            o.require (r > g && g >= a - 1.0, "(c) " + to_string (t) + " k=" + std::to_string (k) +
                                                  fmt (": steps rdn %.2f > geo %.2f >= ana - 1 (ana %.2f)", r, g, a));
        }
    for (TaskKind t : kTasks)
    {
        const double s3 = stats (t, Sampler::ana, 3).steps_mean_success;
        const double s10 = stats (t, Sampler::ana, 10).steps_mean_success;
        const double rel = std::abs (s3 - s10) / s3;
        o.require (rel < 0.1, "(d) " + to_string (t) + fmt (": ana steps k=3 %.2f vs k=10 %.2f (%.1f%% < 10%%)", s3,
                                                            s10, 100.0 * rel));
    }
    o.require (dt <= 1800.0, fmt ("runtime %.1f s (<= 30 min)", dt));
    return o;
}

// 4 --------------------------------------------------------------------------------------------

Outcome direct_degradation ()
{
    Outcome o;
    SuiteSpec spec;
    spec.tasks = {TaskKind::mixed};
    spec.objects = {"triangle", "butter"};
    spec.samplers = {Sampler::ana};
    spec.ks = {3};
    spec.optimizers = {Optimizer::rollout, Optimizer::direct};
    spec.trials = 60;
    spec.seed = 1;
    const auto cells = run_suite (spec);

    auto paired = [&] (const std::string &object, double &mean, double &se) {
        const CellResult *ro = nullptr, *di = nullptr;
        for (const auto &c : cells)
            if (c.object == object)
                (c.optimizer == Optimizer::rollout ? ro : di) = &c;
        std::vector<double> d;
        for (std::size_t i = 0; i < ro->records.size (); ++i)
            d.push_back (di->records[i].steps_taken - ro->records[i].steps_taken);
        mean = 0.0;
        for (double x : d)
            mean += x;
        mean /= static_cast<double> (d.size ());
        double ss = 0.0;
        for (double x : d)
            ss += (x - mean) * (x - mean);
        se = std::sqrt (ss / static_cast<double> (d.size () - 1) / static_cast<double> (d.size ()));
        return std::make_pair (ro->stats.steps_mean_all, di->stats.steps_mean_all);
    };
    double dt = 0, set = 0, db = 0, seb = 0;
    const auto [tr, td] = paired ("triangle", dt, set);
    const auto [br, bd] = paired ("butter", db, seb);
    o.require (dt >= 0.5, fmt ("triangle mixed: rollout %.2f, direct %.2f steps", tr, td) +
                              fmt (", increase %.2f (>= 0.5), paired SE %.2f", dt, set));
    o.require (std::abs (db) <= 2.0 * seb, fmt ("butter mixed: rollout %.2f, direct %.2f steps", br, bd) +
                                               fmt (", change %.2f within 2 paired SE (%.2f)", db, 2.0 * seb));
    return o;
}

// 5 --------------------------------------------------------------------------------------------

Outcome ekf_suite ()
{
    Outcome o;
    const auto spd = testing::run_spd_cycles (1000, 55);
    o.require (spd.cycles == 1000 && spd.failures == 0,
               fmt ("covariance symmetric PD over %.0f predict/update cycles, min eigenvalue %.2e", spd.cycles,
                    spd.min_eigenvalue));

    // step-size sweep on random sticking pushes
    {
        std::mt19937_64 rng (56);
        std::uniform_real_distribution<double> unit (0.0, 1.0);
        const ShapeContour &sq = ShapeLibrary::builtin ().get ("square");
        const EkfConfig cfg;
        int ok = 0, n = 0;
        double worst = 0.0;
        while (n < 20)
        {
            StateVec x;
            x << unit (rng) - 0.5, unit (rng) - 0.5, 2.0 * kPi * unit (rng), 0.02 * (unit (rng) - 0.5),
                0.02 * (unit (rng) - 0.5), 0.03 + 0.02 * unit (rng), 0.8 + 0.4 * unit (rng);
            const Pose2 pose (x[kPx], x[kPy], x[kTheta]);
            // face-centre pushes within +-10 deg
            const std::size_t face = static_cast<std::size_t> (unit (rng) * 4.0) % 4;
            const std::size_t idx = (face * sq.size ()) / 4 + sq.size () / 8;
            const PushAction a{idx, deg2rad (20.0 * unit (rng) - 10.0), 0.02 + 0.03 * unit (rng)};
            const PusherPath path = make_pusher_path (pose, sq, a);
            const auto d = testing::jacobian_step_sweep (x, sq, path, cfg, {8.0, 4.0, 2.0, 1.0});
            ++n;
            worst = std::max (worst, d.back ());
            if (d[1] <= d[0] && d[2] <= d[1] && d[2] < 1e-4)
                ++ok;
        }
        o.require (ok == n, fmt ("finite-difference Jacobian converges under step halving in %.0f/%.0f cases, final "
                                 "relative change %.1e",
                                 ok, n, worst));
    }

    // angle wrap
    {
        const double eps = 0.01;
        BeliefState b;
        b.mean << 0, 0, -kPi + eps, 0, 0, 0.04, 0.3;
        b.covariance = StateCov::Identity () * 1e-4;
        const PoseCov R = PoseCov::Identity () * 1e-4;
        const Eigen::Vector3d innov (0.0, 0.0, wrap_angle ((kPi - eps) - (-kPi + eps)));
        const BeliefState u = update (b, Observation{Pose2 (0.0, 0.0, kPi - eps), 1}, R);
        const double moved = wrap_angle (u.mean[kTheta] - b.mean[kTheta]);
        o.require (std::abs (std::abs (innov[2]) - 2.0 * eps) < 1e-12 && !u.outlier && moved < 0.0 &&
                       moved > -2.0 * eps,
                   fmt ("angle wrap: innovation %.4f rad (2 eps = %.4f), mean moved %.4f rad", innov[2], 2.0 * eps,
                        moved));
    }

    // COM estimate: uniform COM, default noise, 60 mixed trials (20 per object)
    {
        SuiteSpec spec;
        spec.tasks = {TaskKind::mixed};
        spec.objects = kObjects;
        spec.trials = 20;
        spec.seed = 7;
        spec.ground_truth_state = false;
        spec.world.com_mode = ComMode::uniform_inside;
        const auto cells = run_suite (spec);
        std::vector<double> err;
        int better = 0;
        double init = 0.0;
        for (const auto &c : cells)
            for (const auto &r : c.records)
            {
                const double e = r.com_error_mm.back ();
                const double c0 = 1000.0 * r.initial_true_state.com.norm ();
                err.push_back (e);
                init += c0;
                better += e < c0 ? 1 : 0;
            }
        std::sort (err.begin (), err.end ());
        const double median = 0.5 * (err[err.size () / 2 - 1] + err[err.size () / 2]);
        const double frac = static_cast<double> (better) / static_cast<double> (err.size ());
        o.require (err.size () == 60 && frac >= 0.8,
                   fmt ("COM error below initial offset in %.1f%% of %.0f trials (>= 80%%)", 100.0 * frac,
                        err.size ()));
        o.require (median <= 25.0, fmt ("median final COM error %.1f mm (<= 25 mm), mean initial offset %.1f mm",
                                        median, init / static_cast<double> (err.size ())));
    }
    return o;
}

// 6 --------------------------------------------------------------------------------------------

Outcome filtering_cost ()
{
    Outcome o;
    SuiteSpec spec;
    spec.tasks = kTasks;
    spec.objects = kObjects;
    spec.trials = 60;
    spec.seed = 11;
    spec.world.com_mode = ComMode::uniform_inside;

    SuiteSpec gt = spec;
    gt.ground_truth_state = true;
    gt.world.obs_noise_pos = 0.0;
    gt.world.obs_noise_theta = 0.0;
    SuiteSpec noisy = spec;
    noisy.ground_truth_state = false;

    const CellStats a = pooled (run_suite (gt));
    const CellStats b = pooled (run_suite (noisy));
    const double tol_mm = 7.5;
    o.require (b.pos_err_mm_mean > a.pos_err_mm_mean,
               fmt ("mean true end-pose error: filtered %.2f mm > ground truth %.2f mm", b.pos_err_mm_mean,
                    a.pos_err_mm_mean));
    o.require (b.pos_err_mm_mean <= 2.0 * tol_mm,
               fmt ("filtered error %.2f mm <= 2 x tolerance (%.1f mm)", b.pos_err_mm_mean, 2.0 * tol_mm));
    std::cout << fmt ("      stopped on estimate: %.1f%% of trials; true pose inside the goal in %.1f%%",
                      100.0 * b.success_rate, 100.0 * b.true_success_rate)
              << fmt ("; end orientation error %.2f deg (ground truth %.2f deg)\n", b.theta_err_deg_mean,
                      a.theta_err_deg_mean);
    return o;
}

// 7 --------------------------------------------------------------------------------------------

Outcome goal_region_sweep ()
{
    Outcome o;
    SuiteSpec spec;
    spec.tasks = kTasks;
    spec.objects = kObjects;
    spec.samplers = {Sampler::ana, Sampler::geo, Sampler::rdn};
    spec.ks = {1};
    spec.goal_regions = standard_goal_regions ();
    spec.trials = 60;
    spec.seed = 1;
    const auto cells = run_suite (spec);

    std::map<std::pair<Sampler, std::string>, double> rate;
    for (Sampler s : spec.samplers)
        for (const auto &g : spec.goal_regions)
            rate[{s, g.name}] =
                pool_where (cells, [&] (const CellResult &c) { return c.sampler == s && c.region.name == g.name; })
                    .success_rate;
    for (Sampler s : spec.samplers)
    {
        const double sm = rate[{s, "small"}], md = rate[{s, "medium"}], lg = rate[{s, "large"}];
        o.require (sm <= md && md <= lg, to_string (s) + fmt (" success small %.1f%%, medium %.1f%%, large %.1f%%",
                                                               100.0 * sm, 100.0 * md, 100.0 * lg));
    }
    const double spread_s = rate[{Sampler::ana, "small"}] - rate[{Sampler::rdn, "small"}];
    const double spread_m = rate[{Sampler::ana, "medium"}] - rate[{Sampler::rdn, "medium"}];
    const double spread_l = rate[{Sampler::ana, "large"}] - rate[{Sampler::rdn, "large"}];
    o.require (spread_s > spread_m && spread_s > spread_l,
               fmt ("ana - rdn spread: small %.1f, medium %.1f, large %.1f points", 100.0 * spread_s,
                    100.0 * spread_m, 100.0 * spread_l));
    return o;
}

// 8 --------------------------------------------------------------------------------------------

Outcome determinism ()
{
    Outcome o;
    int same = 0, total = 0;
    for (TaskKind t : kTasks)
        for (Sampler s : {Sampler::ana, Sampler::geo, Sampler::rdn})
            for (bool gt : {true, false})
            {
                WorldConfig wc;
                wc.object_name = kObjects[static_cast<std::size_t> (total) % 3];
                wc.com_mode = ComMode::uniform_inside;
                PlannerConfig pc;
                pc.sampler = s;
                pc.optimizer = total % 2 ? Optimizer::direct : Optimizer::rollout;
                TrialOptions opt;
                opt.ground_truth_state = gt;
                opt.initial_theta = 0.3 * total;
                const auto seed = static_cast<std::uint64_t> (1000 + total);
                const TrialRecord a = run_trial (TaskSpec::make (t), wc, pc, seed, opt);
                const TrialRecord b = run_trial (TaskSpec::make (t), wc, pc, seed, opt);
                same += fingerprint (a) == fingerprint (b) ? 1 : 0;
                ++total;
            }
    o.require (same == total, fmt ("%.0f/%.0f trial records bit-identical across repeated runs", same, total));

    SuiteSpec spec;
    spec.tasks = {TaskKind::mixed};
    spec.objects = kObjects;
    spec.trials = 6;
    spec.ground_truth_state = false;
    spec.threads = 1;
    const auto serial = run_suite (spec);
    spec.threads = 4;
    const auto parallel = run_suite (spec);
    bool equal = true;
    for (std::size_t c = 0; c < serial.size (); ++c)
        for (std::size_t i = 0; i < serial[c].records.size (); ++i)
            equal = equal && fingerprint (serial[c].records[i]) == fingerprint (parallel[c].records[i]);
    o.require (equal, "suite records identical with 1 and 4 worker threads");
    return o;
}

} // namespace

int main ()
{
    struct Criterion
    {
        int id;
        const char *name;
        Outcome (*run) ();
    };
    const Criterion criteria[] = {
        {1, "dynamics property suite", dynamics_properties},
        {2, "one-step vs rollout", one_step_vs_rollout},
        {3, "sampler trends over tasks and k", sampler_trends},
        {4, "direct-optimizer degradation", direct_degradation},
        {5, "EKF suite", ekf_suite},
        {6, "filtering cost", filtering_cost},
        {7, "goal-region sweep", goal_region_sweep},
        {8, "determinism", determinism},
    };
    int failed = 0;
    std::vector<std::string> summary;
    for (const auto &c : criteria)
    {
        const auto t0 = Clock::now ();
        std::cout << "criterion " << c.id << ": " << c.name << "\n" << std::flush;
        Outcome o;
        try
        {
            o = c.run ();
        }
        catch (const std::exception &e)
        {
            o.require (false, std::string ("exception: ") + e.what ());
        }
        for (const auto &n : o.notes)
            std::cout << "    " << n << "\n";
        const std::string line = std::string (o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string (c.id) +
                                 " (" + c.name + ")" + fmt (" [%.1f s]", seconds_since (t0));
        std::cout << line << "\n\n" << std::flush;
        summary.push_back (line);
        failed += o.pass ? 0 : 1;
    }
    std::cout << "summary\n";
    for (const auto &s : summary)
        std::cout << "  " << s << "\n";
    return failed == 0 ? 0 : 1;
}
