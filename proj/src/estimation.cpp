#include <pushkit/estimation.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pushkit
{

StateVec to_vector (const ObjectState &s)
{
    StateVec x;
    x << s.pose.position.x (), s.pose.position.y (), s.pose.theta, s.com.x (), s.com.y (), s.limit_param, s.mu;
    return x;
}

ObjectState to_state (const StateVec &x)
{
    ObjectState s;
    s.pose = Pose2 (x[kPx], x[kPy], x[kTheta]);
    s.com = {x[kCx], x[kCy]};
    s.limit_param = x[kL];
    s.mu = x[kMu];
    return s;
}

namespace
{

bool is_spd (const StateCov &m)
{
    if ((m - m.transpose ()).cwiseAbs ().maxCoeff () > 1e-9 * std::max (1.0, m.cwiseAbs ().maxCoeff ()))
        return false;
    Eigen::LLT<StateCov> llt (m);
    return llt.info () == Eigen::Success;
}

} // namespace

StateCov default_prior_covariance (const WorldConfig &world)
{
    StateVec sd;
    sd << std::max (world.obs_noise_pos, 1e-3), std::max (world.obs_noise_pos, 1e-3),
        std::max (world.obs_noise_theta, deg2rad (0.5)), 0.03, 0.03, 0.012, 0.12;
    return sd.cwiseAbs2 ().asDiagonal ();
}

PoseCov observation_covariance (const WorldConfig &world)
{
    // floor keeps R positive definite for noise-free worlds
    const double sp = std::max (world.obs_noise_pos, 1e-4);
    const double st = std::max (world.obs_noise_theta, 1e-3);
    return Eigen::Vector3d (sp * sp, sp * sp, st * st).asDiagonal ();
}

BeliefState init_belief (const Observation &obs0, double l0, double mu0, const StateCov &prior_cov)
{
    if (!is_spd (prior_cov))
        throw std::invalid_argument ("prior covariance must be symmetric positive definite");
    BeliefState b;
    b.mean << obs0.pose.position.x (), obs0.pose.position.y (), obs0.pose.theta, 0.0, 0.0, l0, mu0;
    b.covariance = prior_cov;
    return b;
}

StateCov process_noise (double push_length, const EkfConfig &c)
{
    const double scale = std::max (push_length, 0.0) / c.q_reference_length;
    StateVec d;
    d << c.q_pos * scale, c.q_pos * scale, c.q_theta * scale, c.q_com, c.q_com, c.q_l, c.q_mu;
    return d.asDiagonal ();
}

void constrain (StateVec &x, const ShapeContour &contour, const EkfConfig &config)
{
    x[kTheta] = wrap_angle (x[kTheta]);
    x[kL] = std::clamp (x[kL], config.l_min, config.l_max);
    x[kMu] = std::clamp (x[kMu], config.mu_min, config.mu_max);
    Vec2 c{x[kCx], x[kCy]};
    if (!contour.contains (c))
    {
        // pull toward the centroid until strictly inside
        const Vec2 g = contour.centroid ();
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 40; ++i)
        {
            const double mid = 0.5 * (lo + hi);
            if (contour.contains (g + mid * (c - g)))
                lo = mid;
            else
                hi = mid;
        }
        c = g + 0.98 * lo * (c - g);
        x[kCx] = c.x ();
        x[kCy] = c.y ();
    }
}

StateVec process_model (const StateVec &x, const ShapeContour &contour, const PusherPath &path,
                        const EkfConfig &config, bool *hit)
{
    ObjectState s = to_state (x);
    s.limit_param = std::max (s.limit_param, kMinLimitParam);
    s.mu = std::max (s.mu, 1e-6);
    const RolloutResult res = simulate_push (s, contour, path, config.substep);
    if (hit)
        *hit = res.hit;
    StateVec out = x;
    out[kPx] = x[kPx] + res.motion.delta_position.x ();
    out[kPy] = x[kPy] + res.motion.delta_position.y ();
    // unwrapped, keeps the Jacobian smooth across +-pi
    out[kTheta] = x[kTheta] + res.motion.delta_theta;
    return out;
}

StateCov process_jacobian (const StateVec &x, const ShapeContour &contour, const PusherPath &path,
                           const EkfConfig &config, const StateVec &steps)
{
    StateCov F;
    for (int j = 0; j < 7; ++j)
    {
        StateVec xp = x;
        StateVec xm = x;
        xp[j] += steps[j];
        xm[j] -= steps[j];
        F.col (j) = (process_model (xp, contour, path, config) - process_model (xm, contour, path, config)) /
                    (2.0 * steps[j]);
    }
    return F;
}

BeliefState predict (const BeliefState &belief, const PushAction &action, const ShapeContour &contour,
                     const EkfConfig &config)
{
    if (action.length <= 0.0)
    {
        BeliefState out = belief;
        out.covariance += process_noise (0.0, config);
        out.missed = false;
        return out;
    }
    return predict (belief, make_pusher_path (belief.state ().pose, contour, action), action.length, contour,
                    config);
}

BeliefState predict (const BeliefState &belief, const PusherPath &path, double push_length,
                     const ShapeContour &contour, const EkfConfig &config)
{
    BeliefState out = belief;
    out.outlier = false;
    const StateCov Q = process_noise (push_length, config);
    bool hit = false;
    StateVec next = process_model (belief.mean, contour, path, config, &hit);
    if (!hit || push_length <= 0.0)
    {
        out.missed = push_length > 0.0;
        out.covariance += out.missed ? config.miss_inflation * Q : Q;
        return out;
    }
    const StateCov F = process_jacobian (belief.mean, contour, path, config, config.fd_step);
    constrain (next, contour, config);
    out.mean = next;
    out.missed = false;
    StateCov P = F * belief.covariance * F.transpose () + Q;
    out.covariance = 0.5 * (P + P.transpose ());
    return out;
}

BeliefState update (const BeliefState &belief, const Observation &obs, const PoseCov &R, const EkfConfig &config)
{
    Eigen::LLT<PoseCov> r_check (R);
    if (r_check.info () != Eigen::Success)
        throw std::invalid_argument ("observation covariance must be positive definite");

    BeliefState out = belief;
    Eigen::Matrix<double, 3, 7> H = Eigen::Matrix<double, 3, 7>::Zero ();
    H.leftCols<3> ().setIdentity ();

    Eigen::Vector3d innovation;
    innovation << obs.pose.position.x () - belief.mean[kPx], obs.pose.position.y () - belief.mean[kPy],
        wrap_angle (obs.pose.theta - belief.mean[kTheta]);

    const PoseCov S = H * belief.covariance * H.transpose () + R;
    const Eigen::LDLT<PoseCov> S_ldlt (S);
    const double d2 = innovation.dot (S_ldlt.solve (innovation));
    out.reanchored = false;
    if (d2 > config.gate)
    {
        out.outlier = true;
        ++out.consecutive_outliers;
        if (config.reanchor_after > 0 && out.consecutive_outliers >= config.reanchor_after)
        {
            out.mean[kPx] = obs.pose.position.x ();
            out.mean[kPy] = obs.pose.position.y ();
            out.mean[kTheta] = obs.pose.theta;
            out.covariance.topRightCorner<3, 4> ().setZero ();
            out.covariance.bottomLeftCorner<4, 3> ().setZero ();
            out.covariance.topLeftCorner<3, 3> () = R;
            out.reanchored = true;
            out.consecutive_outliers = 0;
        }
        return out;
    }
    out.outlier = false;
    out.consecutive_outliers = 0;
    // K = P H^T S^-1
    const Eigen::Matrix<double, 7, 3> K = S_ldlt.solve (H * belief.covariance).transpose ();
    out.mean = belief.mean + K * innovation;
    const StateCov I_KH = StateCov::Identity () - K * H;
    StateCov P = I_KH * belief.covariance * I_KH.transpose () + K * R * K.transpose ();
    out.covariance = 0.5 * (P + P.transpose ());
    out.mean[kTheta] = wrap_angle (out.mean[kTheta]);
    out.mean[kL] = std::clamp (out.mean[kL], config.l_min, config.l_max);
    out.mean[kMu] = std::clamp (out.mean[kMu], config.mu_min, config.mu_max);
    return out;
}

} // namespace pushkit
