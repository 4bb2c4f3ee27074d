#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "optilock/network.hpp"

namespace optilock {

// ---------------------------------------------------------------------------
// 1-D sum-of-signum approximation

/// phi(x) = sum_{k=-N..N} b[k+N] * sgn(x - k*a_step) + c, piecewise
/// constant with jumps only at the grid points k*a_step.
struct SignumApprox1D {
    double a_step = 1.0;
    int half_width = 0; // N
    std::vector<double> b; // 2N+1 weights
    double c = 0.0;
    double L = 1.0; // validity radius

    std::size_t terms() const { return b.size(); }
};

/// Step decomposition: b_k = (f(k*a + a/2) - f(k*a - a/2)) / 2 with
/// a = L/N, offset chosen so phi matches f at the first midpoint. The
/// sup error on [-L, L] is bounded by the modulus of continuity of f at
/// scale a. N = 0 falls back to the best constant.
SignumApprox1D fit_signum_1d(const std::function<double(double)>& f, double L, int N);

/// Direct evaluation with the sgn(0) = 0 convention at jump points.
double eval_signum_1d(const SignumApprox1D& approx, double x);

// ---------------------------------------------------------------------------
// Tikhonov-regularized sign_a expansions on a disc

/// g(z) ~ sum_i weights[i] * sign_a(z - centers[i], a) on |z| <= r0.
struct SignAExpansion {
    std::vector<cdouble> centers;
    std::vector<cdouble> weights;
    double a = 0.0;
    double r0 = 1.0;
};

cdouble eval_expansion(const SignAExpansion& e, cdouble z);

struct TikhonovReport {
    double fit_norm = 0.0;   // discrete H2 norm of g - sum b_i psi_i
    double objective = 0.0;  // sqrt(fit_norm^2 + gamma * |b|^2), the minimized value
    double condition = 0.0;  // condition estimate of (A + gamma I)
};

struct TikhonovOptions {
    int grid = 33;               // integration grid per axis over [-r0, r0]^2
    double max_condition = 1e14; // beyond this the solve raises ConditioningError
};

/// Solve min ||g - sum_i b_i sign_a(. - z_i)||_{H2(disc)}^2 + gamma |b|^2
/// over the complex weights b. The H2 inner product is discretized as
/// <(1-D)u, (1-D)v> on a uniform Cartesian grid masked to the disc, with
/// the 5-point Laplacian and one-sided differences at the mask boundary.
SignAExpansion tikhonov_fit(const std::function<cdouble(cdouble)>& g,
                            const std::vector<cdouble>& centers, double gamma, double a,
                            double r0, const TikhonovOptions& opt = {},
                            TikhonovReport* report = nullptr);

/// Square center grid with the given spacing, masked to |z| <= r1.
std::vector<cdouble> disc_center_grid(double spacing, double r1);

// ---------------------------------------------------------------------------
// Radon transform and the ridge decomposition

/// Line integral of f over {x . omega = s} by midpoint quadrature;
/// f must vanish outside the ball of radius support_radius.
double radon_transform(const std::function<double(double, double)>& f,
                       std::array<double, 2> omega, double s, double support_radius,
                       int quad_points = 4096);

/// Discrete Hilbert transform by the DFT multiplier -i*sgn(xi).
/// pad_factor > 1 zero-pads the signal before the transform and
/// truncates afterwards (used on compactly supported data to suppress
/// wrap-around); pad_factor = 1 is the exact periodic operator, an
/// involution up to sign on zero-mean band-limited signals.
std::vector<double> hilbert_transform(const std::vector<double>& w, int pad_factor = 4);

/// f(x) ~ constant + sum_k sum_l (V/2) coeffs[k][l] sign_a(x.dir_k - l*h).
struct RidgeApprox {
    std::vector<std::array<double, 2>> directions; // K unit vectors
    double direction_weight = 0.0;                 // V_k = 2*pi/K
    double h = 0.0;
    int half_width = 0;                            // L: levels run -L+1..L
    std::vector<std::vector<double>> coeffs;       // K x 2L
    double constant = 0.0;
    double a = 0.0;                                // smoothing of the steps
    double support_radius = 1.0;
};

struct RidgeOptions {
    double level_margin = 1.25; // s-grid covers [-margin*R, margin*R]
    int quad_points = 2048;
    double a = -1.0;            // < 0 selects h/2
};

/// Filtered-backprojection ridge decomposition for functions on R^2:
/// Radon transform on a (direction, offset) grid, d/ds, Hilbert
/// transform, discrete backprojection over K half-circle directions with
/// weights 2*pi/K, then per-direction decomposition into smoothed steps.
/// Requires K >= 8.
RidgeApprox ridge_decompose(const std::function<double(double, double)>& f,
                            double support_radius, int K, double h,
                            const RidgeOptions& opt = {});

double eval_ridge(const RidgeApprox& r, double x, double y);

// ---------------------------------------------------------------------------
// Network emission

/// One laser per signum term plus, when the offset is nonzero, one
/// constant laser pinned by its bias. Evaluates identically to
/// eval_signum_1d at real probe points.
LayeredModel emit_network(const SignumApprox1D& approx);

/// One laser per expansion center.
LayeredModel emit_network(const SignAExpansion& approx);

/// One laser per (direction, level) term. The two coordinates of the
/// plane are fed as two separate vertically polarized inputs, so each
/// laser argument x.dir - l*h stays real and the network reproduces
/// eval_ridge exactly.
LayeredModel emit_network(const RidgeApprox& approx);

// ---------------------------------------------------------------------------
// Serialization (complex numbers as [re, im] pairs)

std::string to_json(const SignumApprox1D&);
std::string to_json(const SignAExpansion&);
std::string to_json(const RidgeApprox&);
std::string to_json(const LayeredModel&);
SignumApprox1D signum_1d_from_json(const std::string&);
SignAExpansion expansion_from_json(const std::string&);
RidgeApprox ridge_from_json(const std::string&);
LayeredModel layered_from_json(const std::string&);

} // namespace optilock
