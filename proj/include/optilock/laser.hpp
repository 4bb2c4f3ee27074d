#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "optilock/field.hpp"

namespace optilock {

/// Evaluation mode of laser-backed operations: the closed-form locked
/// state, or full integration of the rate equations.
enum class EvalMode { ideal, dynamical };

/// Physical constants of one laser. Rates are in s^-1, mu and alpha are
/// dimensionless. Lasing threshold sits at mu = 1; the emitted
/// steady-state field magnitude is sqrt(mu - 1).
///
/// gamma_p and gamma_a (linear phase / amplitude anisotropy) are carried
/// for completeness but the model is the isotropic-cavity one; nonzero
/// values are rejected.
struct LaserParams {
    double mu = 2.0;
    double alpha = 0.0;
    double gamma_c = 1e12; // cavity field decay rate
    double gamma = 1e9;    // carrier decay rate
    double gamma_s = 50e9; // spin decay rate
    double gamma_p = 0.0;
    double gamma_a = 0.0;

    void validate() const;
};

/// Instantaneous dynamical state: the two polarized slowly varying field
/// amplitudes, the normalized population difference N and the population
/// inversion difference n.
struct LaserState {
    cdouble Ex{};
    cdouble Ey{};
    double N = 0.0;
    double n = 0.0;
};

/// Free-running fixed point: Ex = sqrt(mu - 1), Ey = 0, N = 1, n = 0.
LaserState free_running_state(const LaserParams& p);

/// Right-hand side of the rate equations, in SI time. The injection is
/// given in normalized field units; the physical injection rate added to
/// the field equations is gamma_c * injection.
LaserState derivatives(const LaserState& s, const LaserParams& p,
                       const JonesField& injection);

struct TrajectoryPoint {
    double t = 0.0; // seconds
    LaserState state;
};

struct IntegrationOptions {
    /// Fixed step in seconds; 0 selects the default 0.005 / gamma_c.
    /// Must not exceed 0.01 / gamma_c (explicit stepping at the fast
    /// cavity scale).
    double dt = 0.0;
    /// Record one point every record_stride steps (plus the final state).
    int record_stride = 1;
};

/// Fourth-order fixed-step integration of the rate equations under a
/// constant injection. Internally the system is stepped in dimensionless
/// time tau = gamma_c * t, which keeps all magnitudes near unity.
/// Throws DivergenceError (naming the failure time) if the state leaves
/// the finite range.
std::vector<TrajectoryPoint> integrate(const LaserState& start, const LaserParams& p,
                                       const JonesField& injection, double t_end,
                                       const IntegrationOptions& opt = {});

/// Time-varying injection variant; inj is sampled at the start of every
/// substep in seconds.
std::vector<TrajectoryPoint> integrate(const LaserState& start, const LaserParams& p,
                                       const std::function<JonesField(double)>& inj,
                                       double t_end, const IntegrationOptions& opt = {});

/// As integrate() but keeps only the final state (no trajectory storage).
LaserState integrate_final(const LaserState& start, const LaserParams& p,
                           const JonesField& injection, double t_end, double dt = 0.0);

/// Closed-form locked state under a constant injection.
struct SteadySolution {
    JonesField field;   // locked output, magnitude sqrt(mu - 1)
    double xi = 0.0;    // stable root of the truncated carrier equation
    cdouble beta{};     // transient decay rate (s^-1), Re(beta) > 0
    double theta = 0.0; // fixed phase offset -Arg(1 + i*alpha)
    /// False when ||injection|| > 0.1 * sqrt(mu-1): the truncation behind
    /// the closed form degrades outside the weak-coupling regime.
    bool weak_coupling_valid = true;
};

/// Steady-state normalization: field = injection/||injection|| *
/// e^{i theta} * sqrt(mu - 1). The output phase follows the injection,
/// the magnitude is regenerated independently of the injection level.
/// Throws NoLockingError on a zero injection.
SteadySolution steady_state_field(const JonesField& injection, const LaserParams& p);

/// Decay rate beta of the locking transient e^{-beta t}; scales linearly
/// with the injection magnitude.
cdouble convergence_rate(const JonesField& injection, const LaserParams& p);

/// Settling horizon used by dynamical-mode network evaluation.
double settling_time(const JonesField& injection, const LaserParams& p,
                     double decades = 100.0);

/// CSV with header t,re_ex,im_ex,re_ey,im_ey,N,n.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& traj);

} // namespace optilock
