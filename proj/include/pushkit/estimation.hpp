#pragma once
/**
 * @file    estimation.hpp
 * @brief   Extended Kalman filter over the full object state (px, py, theta, cx, cy, l, mu).
 *
 * The process model is the substep pushing rollout; its Jacobian is taken by
 * central finite differences. Observations are noisy poses (H = [I3 | 0]).
 */

#include <pushkit/dynamics.hpp>
#include <pushkit/sim.hpp>

#include <Eigen/Dense>

namespace pushkit
{

using StateVec = Eigen::Matrix<double, 7, 1>;
using StateCov = Eigen::Matrix<double, 7, 7>;
using PoseCov = Eigen::Matrix3d;

enum StateIndex : int
{
    kPx = 0,
    kPy,
    kTheta,
    kCx,
    kCy,
    kL,
    kMu,
};

StateVec to_vector (const ObjectState &s);
ObjectState to_state (const StateVec &x);

struct EkfConfig
{
    double substep = kPlannerSubstep;
    double q_pos = 1e-3 * 1e-3;             ///< per reference push length, m^2
    double q_theta = 0.01 * 0.01;           ///< per reference push length, rad^2
    double q_reference_length = 0.05;       ///< m
    double q_com = 0.5e-3 * 0.5e-3;
    double q_l = 0.5e-3 * 0.5e-3;
    double q_mu = 0.01 * 0.01;
    double miss_inflation = 10.0;           ///< Q multiplier when the predicted push misses
    double gate = 16.266236196238129;       ///< chi-square(3) quantile at 0.999
    int reanchor_after = 2;                 ///< consecutive gated observations before the pose is reset; 0 disables
    double l_min = 1e-3;
    double l_max = kMaxLimitParam;
    double mu_min = 0.01;
    double mu_max = kMaxFriction;
    StateVec fd_step = (StateVec () << 1e-5, 1e-5, 1e-4, 1e-5, 1e-5, 1e-5, 1e-4).finished ();
};

struct BeliefState
{
    StateVec mean = StateVec::Zero ();
    StateCov covariance = StateCov::Identity ();
    bool outlier = false;     ///< last update was gated out
    bool reanchored = false;  ///< last update reset the pose to the observation
    int consecutive_outliers = 0;
    bool missed = false;      ///< last prediction's push missed the believed object

    [[nodiscard]] ObjectState state () const { return to_state (mean); }
};

StateCov default_prior_covariance (const WorldConfig &world);
PoseCov observation_covariance (const WorldConfig &world);

/// Throws std::invalid_argument if `prior_cov` is not symmetric positive definite.
BeliefState init_belief (const Observation &obs0, double l0, double mu0, const StateCov &prior_cov);

StateCov process_noise (double push_length, const EkfConfig &config);

/// Process map: state after pushing along `path`.
StateVec process_model (const StateVec &x, const ShapeContour &contour, const PusherPath &path,
                        const EkfConfig &config, bool *hit = nullptr);

/// Central-difference Jacobian of process_model with per-dimension steps `steps`.
StateCov process_jacobian (const StateVec &x, const ShapeContour &contour, const PusherPath &path,
                           const EkfConfig &config, const StateVec &steps);

BeliefState predict (const BeliefState &belief, const PushAction &action, const ShapeContour &contour,
                     const EkfConfig &config = {});
BeliefState predict (const BeliefState &belief, const PusherPath &path, double push_length,
                     const ShapeContour &contour, const EkfConfig &config = {});

/// Gated update. After `reanchor_after` consecutive gated observations the filter is
/// considered lost: the pose mean is set to the observation, the pose block of the
/// covariance to R, and pose/parameter cross-covariances are dropped.
BeliefState update (const BeliefState &belief, const Observation &obs, const PoseCov &R,
                    const EkfConfig &config = {});

/// Clamps l and mu and pulls the COM back inside the polygon.
void constrain (StateVec &x, const ShapeContour &contour, const EkfConfig &config);

} // namespace pushkit
