#include "optilock/laser.hpp"

#include <cmath>
#include <ostream>

namespace optilock {

namespace {

constexpr double kDefaultDtTau = 0.005; // step in units of 1/gamma_c
constexpr double kMaxDtTau = 0.01;

struct Rates {
    cdouble dEx, dEy;
    double dN, dn;
};

// Derivative in dimensionless time tau = gamma_c * t. Injection in field
// units enters the field equations directly in these units.
struct TauSystem {
    double mu, alpha, gr, gs; // gr = gamma/gamma_c, gs = gamma_s/gamma_c

    Rates operator()(const LaserState& s, const JonesField& u) const {
        const cdouble ca{1.0, alpha};
        const double p = std::norm(s.Ex) + std::norm(s.Ey);
        const double im = std::imag(s.Ey * std::conj(s.Ex));
        constexpr cdouble i{0.0, 1.0};
        return {
            ca * ((s.N - 1.0) * s.Ex + i * s.n * s.Ey) + u.v,
            ca * ((s.N - 1.0) * s.Ey - i * s.n * s.Ex) + u.h,
            -gr * (s.N * (1.0 + p) - mu - 2.0 * s.n * im),
            -gs * s.n - gr * (s.n * p - 2.0 * s.N * im),
        };
    }
};

inline LaserState advance(const LaserState& s, const Rates& r, double dt) {
    return {s.Ex + dt * r.dEx, s.Ey + dt * r.dEy, s.N + dt * r.dN, s.n + dt * r.dn};
}

inline bool finite(const LaserState& s) {
    return std::isfinite(s.Ex.real()) && std::isfinite(s.Ex.imag()) &&
           std::isfinite(s.Ey.real()) && std::isfinite(s.Ey.imag()) &&
           std::isfinite(s.N) && std::isfinite(s.n);
}

double resolve_dt(const LaserParams& p, double dt) {
    if (dt == 0.0)
        return kDefaultDtTau / p.gamma_c;
    if (dt < 0.0 || dt > kMaxDtTau / p.gamma_c)
        throw Error("dt must be in (0, 0.01/gamma_c]");
    return dt;
}

// One RK4 step in tau units.
template <class InjectionAt>
LaserState rk4_step(const TauSystem& sys, const LaserState& s, double tau, double dtau,
                    const InjectionAt& inj) {
    const JonesField u0 = inj(tau);
    const JonesField um = inj(tau + 0.5 * dtau);
    const JonesField u1 = inj(tau + dtau);
    const Rates k1 = sys(s, u0);
    const Rates k2 = sys(advance(s, k1, 0.5 * dtau), um);
    const Rates k3 = sys(advance(s, k2, 0.5 * dtau), um);
    const Rates k4 = sys(advance(s, k3, dtau), u1);
    return {s.Ex + dtau / 6.0 * (k1.dEx + 2.0 * k2.dEx + 2.0 * k3.dEx + k4.dEx),
            s.Ey + dtau / 6.0 * (k1.dEy + 2.0 * k2.dEy + 2.0 * k3.dEy + k4.dEy),
            s.N + dtau / 6.0 * (k1.dN + 2.0 * k2.dN + 2.0 * k3.dN + k4.dN),
            s.n + dtau / 6.0 * (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn)};
}

template <class InjectionAt, class Sink>
LaserState run(const LaserState& start, const LaserParams& p, const InjectionAt& inj,
               double t_end, double dt, const Sink& sink) {
    p.validate();
    dt = resolve_dt(p, dt);
    const double dtau = dt * p.gamma_c;
    const long long steps = (t_end <= 0.0) ? 0 : std::llround(t_end / dt);
    const TauSystem sys{p.mu, p.alpha, p.gamma / p.gamma_c, p.gamma_s / p.gamma_c};

    LaserState s = start;
    sink(0.0, s);
    for (long long k = 0; k < steps; ++k) {
        s = rk4_step(sys, s, double(k) * dtau, dtau, inj);
        const double t = double(k + 1) * dt;
        if (!finite(s))
            throw DivergenceError("integration diverged at t = " + std::to_string(t) + " s", t);
        sink(t, s);
    }
    return s;
}

} // namespace

void LaserParams::validate() const {
    if (!(mu > 1.0))
        throw Error("mu must exceed the lasing threshold 1");
    if (!(gamma_c > 0.0) || !(gamma > 0.0) || !(gamma_s > 0.0))
        throw Error("gamma_c, gamma, gamma_s must be positive");
    if (gamma_p != 0.0 || gamma_a != 0.0)
        throw Error("anisotropies gamma_p, gamma_a are not modeled; set them to 0");
}

LaserState free_running_state(const LaserParams& p) {
    p.validate();
    return {cdouble{std::sqrt(p.mu - 1.0), 0.0}, cdouble{}, 1.0, 0.0};
}

LaserState derivatives(const LaserState& s, const LaserParams& p,
                       const JonesField& injection) {
    p.validate();
    const TauSystem sys{p.mu, p.alpha, p.gamma / p.gamma_c, p.gamma_s / p.gamma_c};
    const Rates r = sys(s, injection);
    // scale back to SI time
    return {r.dEx * p.gamma_c, r.dEy * p.gamma_c, r.dN * p.gamma_c, r.dn * p.gamma_c};
}

std::vector<TrajectoryPoint> integrate(const LaserState& start, const LaserParams& p,
                                       const JonesField& injection, double t_end,
                                       const IntegrationOptions& opt) {
    std::vector<TrajectoryPoint> traj;
    const int stride = opt.record_stride > 0 ? opt.record_stride : 1;
    long long count = 0;
    auto inj = [&](double) { return injection; };
    const LaserState last =
        run(start, p, inj, t_end, opt.dt,
            [&](double t, const LaserState& s) {
                if (count++ % stride == 0)
                    traj.push_back({t, s});
            });
    if ((count - 1) % stride != 0)
        traj.push_back({t_end, last});
    return traj;
}

std::vector<TrajectoryPoint> integrate(const LaserState& start, const LaserParams& p,
                                       const std::function<JonesField(double)>& inj,
                                       double t_end, const IntegrationOptions& opt) {
    std::vector<TrajectoryPoint> traj;
    const int stride = opt.record_stride > 0 ? opt.record_stride : 1;
    long long count = 0;
    const double inv_gc = 1.0 / p.gamma_c;
    auto inj_tau = [&](double tau) { return inj(tau * inv_gc); };
    const LaserState last =
        run(start, p, inj_tau, t_end, opt.dt,
            [&](double t, const LaserState& s) {
                if (count++ % stride == 0)
                    traj.push_back({t, s});
            });
    if ((count - 1) % stride != 0)
        traj.push_back({t_end, last});
    return traj;
}

LaserState integrate_final(const LaserState& start, const LaserParams& p,
                           const JonesField& injection, double t_end, double dt) {
    auto inj = [&](double) { return injection; };
    return run(start, p, inj, t_end, dt, [](double, const LaserState&) {});
}

SteadySolution steady_state_field(const JonesField& injection, const LaserParams& p) {
    p.validate();
    const double mag = injection.magnitude();
    if (mag == 0.0)
        throw NoLockingError("steady_state_field: zero injection, no locking");
    SteadySolution sol;
    const double root_gain = std::sqrt(p.mu - 1.0);
    sol.theta = -std::atan2(p.alpha, 1.0);
    const cdouble scale = std::polar(root_gain / mag, sol.theta);
    sol.field = {scale * injection.v, scale * injection.h};
    sol.xi = -mag / (std::sqrt(1.0 + p.alpha * p.alpha) * root_gain);
    sol.beta = -cdouble{1.0, p.alpha} * p.gamma_c * sol.xi;
    sol.weak_coupling_valid = mag <= 0.1 * root_gain;
    return sol;
}

cdouble convergence_rate(const JonesField& injection, const LaserParams& p) {
    return steady_state_field(injection, p).beta;
}

double settling_time(const JonesField& injection, const LaserParams& p, double decades) {
    return decades / steady_state_field(injection, p).beta.real();
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& traj) {
    os << "t,re_ex,im_ex,re_ey,im_ey,N,n\n";
    for (const auto& pt : traj) {
        const auto& s = pt.state;
        os << pt.t << ',' << s.Ex.real() << ',' << s.Ex.imag() << ',' << s.Ey.real()
           << ',' << s.Ey.imag() << ',' << s.N << ',' << s.n << '\n';
    }
}

} // namespace optilock
