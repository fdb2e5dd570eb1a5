#include <pushkit/planner.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace pushkit
{

std::string to_string (Sampler s)
{
    switch (s)
    {
    case Sampler::ana:
        return "ana";
    case Sampler::geo:
        return "geo";
    case Sampler::rdn:
        return "rdn";
    }
    return "?";
}

std::string to_string (Optimizer o) { return o == Optimizer::rollout ? "rollout" : "direct"; }

Sampler parse_sampler (const std::string &s)
{
    if (s == "ana")
        return Sampler::ana;
    if (s == "geo")
        return Sampler::geo;
    if (s == "rdn")
        return Sampler::rdn;
    throw std::invalid_argument ("unknown sampler: " + s);
}

Optimizer parse_optimizer (const std::string &s)
{
    if (s == "rollout")
        return Optimizer::rollout;
    if (s == "direct")
        return Optimizer::direct;
    throw std::invalid_argument ("unknown optimizer: " + s);
}

void PlannerConfig::validate () const
{
    if (k < 1)
        throw std::invalid_argument ("k must be at least 1");
    if (!(temperature > 0.0))
        throw std::invalid_argument ("temperature must be positive");
    if (!(min_len > 0.0 && min_len < max_len))
        throw std::invalid_argument ("push length bounds must satisfy 0 < min_len < max_len");
    if (!(substep > 0.0))
        throw std::invalid_argument ("substep must be positive");
}

GoalMotion goal_motion (const Pose2 &current, const Pose2 &goal, const PlannerConfig &config)
{
    GoalMotion g;
    g.translation = goal.position - current.position;
    const double norm = g.translation.norm ();
    if (norm > config.goal_translation_cap)
        g.translation *= config.goal_translation_cap / norm;
    g.rotation = std::clamp (wrap_angle (goal.theta - current.theta), -config.goal_rotation_cap,
                             config.goal_rotation_cap);
    return g;
}

namespace
{

std::vector<std::size_t> uniform_subset (std::vector<std::size_t> pool, std::size_t k, Rng &rng)
{
    k = std::min (k, pool.size ());
    for (std::size_t i = 0; i < k; ++i)
    {
        std::uniform_int_distribution<std::size_t> pick (i, pool.size () - 1);
        std::swap (pool[i], pool[pick (rng)]);
    }
    pool.resize (k);
    return pool;
}

} // namespace

std::vector<std::size_t> sample_contacts_affordance (std::span<const double> scores, std::size_t k,
                                                     double temperature, Rng &rng)
{
    const std::size_t n = scores.size ();
    k = std::min (k, n);
    std::vector<std::size_t> order (n);
    std::iota (order.begin (), order.end (), 0);
    if (temperature < 1e-12)
    {
        std::stable_sort (order.begin (), order.end (),
                          [&] (std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
        order.resize (k);
        return order;
    }
    // Gumbel top-k equals sequential softmax sampling without replacement.
    const double s_min = *std::min_element (scores.begin (), scores.end ());
    std::uniform_real_distribution<double> unit (0.0, 1.0);
    std::vector<double> keys (n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double u = unit (rng);
        u = std::max (u, std::numeric_limits<double>::min ());
        keys[i] = -(scores[i] - s_min) / temperature - std::log (-std::log (u));
    }
    std::partial_sort (order.begin (), order.begin () + static_cast<std::ptrdiff_t> (k), order.end (),
                       [&] (std::size_t a, std::size_t b) { return keys[a] > keys[b] || (keys[a] == keys[b] && a < b); });
    order.resize (k);
    return order;
}

std::vector<std::size_t> sample_contacts_geo (const ShapeContour &contour_world, const Pose2 &pose,
                                              const GoalSpec &goal, std::size_t k, Rng &rng)
{
    const Vec2 &p = pose.position;
    const Vec2 m = goal.goal_pose.position - p;
    const double rot = wrap_angle (goal.goal_pose.theta - pose.theta);
    const bool small_rotation = std::abs (rot) < deg2rad (2.0);
    const std::size_t n = contour_world.size ();

    std::vector<std::size_t> all (n);
    std::iota (all.begin (), all.end (), 0);

    if (m.norm () < 1e-3)
    {
        if (small_rotation)
            return uniform_subset (all, k, rng);
        // no line m: keep points whose inward push turns the object the right way
        std::vector<std::size_t> turning;
        for (std::size_t i = 0; i < n; ++i)
            if (cross (contour_world.point (i) - p, -contour_world.normal (i)) * rot > 0.0)
                turning.push_back (i);
        return uniform_subset (turning.empty () ? all : turning, k, rng);
    }

    const Vec2 dir = m.normalized ();
    std::vector<std::size_t> behind;
    std::vector<std::size_t> region;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 rel = contour_world.point (i) - p;
        if (rel.dot (dir) >= 0.0)
            continue;
        behind.push_back (i);
        const double side = cross (dir, rel); // > 0: left of m
        bool keep = false;
        if (small_rotation)
            keep = std::abs (side) <= 0.02;
        else if (rot > 0.0)
            keep = side < 0.0;
        else
            keep = side > 0.0;
        if (keep)
            region.push_back (i);
    }
    if (!region.empty ())
        return uniform_subset (std::move (region), k, rng);
    if (!behind.empty ())
        return uniform_subset (std::move (behind), k, rng);
    return uniform_subset (std::move (all), k, rng);
}

std::vector<std::size_t> sample_contacts_rdn (const ShapeContour &contour, std::size_t k, Rng &rng)
{
    std::vector<std::size_t> all (contour.size ());
    std::iota (all.begin (), all.end (), 0);
    return uniform_subset (std::move (all), k, rng);
}

namespace
{

struct Truncated
{
    double angle = 0.0;
    double length = 0.0;
    double score = std::numeric_limits<double>::infinity ();
    MotionPrediction prediction;
    bool immediate_loss = false;
};

/// Rolls out `angle` over max_len and keeps the best-scoring prefix no shorter than min_len.
Truncated best_prefix (const ObjectState &state, const ShapeContour &contour, std::size_t index, double angle,
                       const GoalMotion &goal, const PlannerConfig &cfg)
{
    Truncated t;
    t.angle = angle;
    const PushAction full{index, angle, cfg.max_len};
    const RolloutResult res =
        simulate_push (state, contour, make_pusher_path (state.pose, contour, full), cfg.substep, true);
    if (!res.hit || res.prefixes.empty ())
    {
        t.immediate_loss = true;
        t.length = cfg.min_len;
        t.score = motion_score (goal, MotionPrediction{}, cfg.weights);
        return t;
    }
    const auto &first = res.prefixes.front ();
    t.immediate_loss = first.contact_lost && first.delta_position.norm () == 0.0 && first.delta_theta == 0.0;
    for (std::size_t m = 0; m < res.prefixes.size (); ++m)
    {
        const double len = std::min (cfg.substep * static_cast<double> (m + 1), cfg.max_len);
        if (len < cfg.min_len - 1e-9)
            continue;
        const double s = motion_score (goal, res.prefixes[m], cfg.weights);
        if (s < t.score)
        {
            t.score = s;
            t.length = len;
            t.prediction = res.prefixes[m];
        }
    }
    if (!std::isfinite (t.score))
    {
        // max_len shorter than one substep past min_len; fall back to the whole push
        t.length = cfg.max_len;
        t.prediction = res.prefixes.back ();
        t.score = motion_score (goal, t.prediction, cfg.weights);
    }
    return t;
}

Truncated golden_length (const ObjectState &state, const ShapeContour &contour, std::size_t index, double angle,
                         const GoalMotion &goal, const PlannerConfig &cfg)
{
    Truncated best;
    best.angle = angle;
    auto eval = [&] (double len) {
        const MotionPrediction m = rollout (state, contour, PushAction{index, angle, len}, cfg.substep);
        const double s = motion_score (goal, m, cfg.weights);
        if (s < best.score)
        {
            best.score = s;
            best.length = len;
            best.prediction = m;
        }
        return s;
    };
    const double phi = 0.5 * (std::sqrt (5.0) - 1.0);
    double a = cfg.min_len;
    double b = cfg.max_len;
    eval (a);
    eval (b);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = eval (x1);
    double f2 = eval (x2);
    while (b - a > 1e-3)
    {
        if (f1 <= f2)
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval (x1);
        }
        else
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval (x2);
        }
    }
    return best;
}

std::optional<double> parabola_vertex (const double x[3], const double s[3])
{
    const double denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    const double A = (x[2] * (s[1] - s[0]) + x[1] * (s[0] - s[2]) + x[0] * (s[2] - s[1])) / denom;
    const double B = (x[2] * x[2] * (s[0] - s[1]) + x[1] * x[1] * (s[2] - s[0]) + x[0] * x[0] * (s[1] - s[2])) / denom;
    if (!(A > 1e-15))
        return std::nullopt;
    return -B / (2.0 * A);
}

} // namespace

OptimizedPush optimize_push (const ObjectState &state, const ShapeContour &contour, std::size_t index,
                             const GoalMotion &goal, const PlannerConfig &config)
{
    constexpr std::size_t nb = RepresentativePushSet::kDirections;
    std::array<Truncated, nb> base;
    bool all_lost = true;
    std::size_t best = 0;
    for (std::size_t b = 0; b < nb; ++b)
    {
        base[b] = best_prefix (state, contour, index, deg2rad (RepresentativePushSet::angles_deg[b]), goal, config);
        all_lost = all_lost && base[b].immediate_loss;
        if (base[b].score < base[best].score)
            best = b;
    }
    if (all_lost)
    {
        const PushAction a{index, 0.0, config.min_len};
        const MotionPrediction m = rollout (state, contour, a, config.substep);
        return {a, motion_score (goal, m, config.weights), m};
    }

    // neighbours of the best base direction; at the boundary use the two inner ones
    const std::size_t lo = best == 0 ? 0 : (best == nb - 1 ? nb - 3 : best - 1);
    const double xs[3] = {base[lo].angle, base[lo + 1].angle, base[lo + 2].angle};
    const double ss[3] = {base[lo].score, base[lo + 1].score, base[lo + 2].score};
    const double bracket_lo = best == 0 ? base[0].angle : base[best - 1].angle;
    const double bracket_hi = best == nb - 1 ? base[nb - 1].angle : base[best + 1].angle;
    double angle = base[best].angle;
    if (const auto v = parabola_vertex (xs, ss))
        angle = std::clamp (*v, bracket_lo, bracket_hi);

    Truncated refined = config.length_search == LengthSearch::golden
                            ? golden_length (state, contour, index, angle, goal, config)
                            : best_prefix (state, contour, index, angle, goal, config);
    // the interpolated direction never replaces a better discrete push
    const Truncated &chosen = refined.score <= base[best].score ? refined : base[best];
    return {PushAction{index, chosen.angle, chosen.length}, chosen.score, chosen.prediction};
}

OptimizedPush optimize_push_direct (const AffordanceMap &map, std::size_t index, const GoalMotion &goal,
                                    const PlannerConfig &config)
{
    const ScoreWeights &w = config.weights;
    const double ref_len = RepresentativePushSet::lengths.back ();
    const Eigen::Vector3d g (goal.translation.x () / w.translation_unit, goal.translation.y () / w.translation_unit,
                             w.lambda * goal.rotation / w.rotation_unit);
    std::optional<OptimizedPush> best;
    for (std::size_t d = 0; d < RepresentativePushSet::kDirections; ++d)
    {
        const MotionPrediction &full = map.at (index, RepresentativePushSet::index (d, 1));
        const Eigen::Vector3d p (full.delta_position.x () / w.translation_unit,
                                 full.delta_position.y () / w.translation_unit,
                                 w.lambda * full.delta_theta / w.rotation_unit);
        const double pp = p.squaredNorm ();
        if (pp < 1e-12)
            continue;
        const double length = std::clamp (g.dot (p) / pp * ref_len, config.min_len, config.max_len);
        const double scale = length / ref_len;
        MotionPrediction m = full;
        m.delta_position *= scale;
        m.delta_theta *= scale;
        m.slide_distance *= scale;
        const double s = motion_score (goal, m, w);
        if (!best || s < best->score)
            best = OptimizedPush{PushAction{index, deg2rad (RepresentativePushSet::angles_deg[d]), length}, s, m};
    }
    if (!best)
    {
        const PushAction a{index, 0.0, config.min_len};
        return {a, motion_score (goal, MotionPrediction{}, w), MotionPrediction{}};
    }
    return *best;
}

PlanResult plan_step (const ObjectState &belief_mean, const ShapeContour &contour, const GoalSpec &goal,
                      const PlannerConfig &config, Rng &rng, const AffordanceMap *map)
{
    config.validate ();
    const GoalMotion gm = goal_motion (belief_mean.pose, goal.goal_pose, config);

    std::optional<AffordanceMap> local_map;
    const bool needs_map = config.sampler == Sampler::ana || config.optimizer == Optimizer::direct;
    if (needs_map && (map == nullptr || !map->is_fresh (belief_mean) || map->mode () != AffordanceMode::one_step))
    {
        local_map.emplace (compute_affordances (contour, belief_mean, AffordanceMode::one_step));
        map = &*local_map;
    }

    PlanResult out;
    switch (config.sampler)
    {
    case Sampler::ana:
    {
        const std::vector<double> scores = score_field (*map, gm, config.weights);
        out.candidates = sample_contacts_affordance (scores, config.k, config.temperature, rng);
        break;
    }
    case Sampler::geo:
        out.candidates =
            sample_contacts_geo (world_contour (contour, belief_mean.pose), belief_mean.pose, goal, config.k, rng);
        break;
    case Sampler::rdn:
        out.candidates = sample_contacts_rdn (contour, config.k, rng);
        break;
    }

    bool first = true;
    for (const std::size_t idx : out.candidates)
    {
        const OptimizedPush op = config.optimizer == Optimizer::rollout
                                     ? optimize_push (belief_mean, contour, idx, gm, config)
                                     : optimize_push_direct (*map, idx, gm, config);
        if (first || op.score < out.score)
        {
            out.action = op.action;
            out.score = op.score;
            out.prediction = op.prediction;
            first = false;
        }
    }
    return out;
}

} // namespace pushkit
