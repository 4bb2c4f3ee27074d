#include "optilock/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fftw3.h>
#include <json.hpp>

namespace optilock {

namespace {
using ordered_json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;
} // namespace

// ---------------------------------------------------------------------------
// 1-D sum-of-signum

SignumApprox1D fit_signum_1d(const std::function<double(double)>& f, double L, int N) {
    if (L <= 0.0)
        throw ShapeError("fit_signum_1d: L must be positive");
    if (N < 0)
        throw ShapeError("fit_signum_1d: N must be >= 0");
    SignumApprox1D approx;
    approx.L = L;
    approx.half_width = N;
    if (N == 0) {
        // no jumps representable: best constant in the sup norm
        double lo = f(-L), hi = f(-L);
        const int samples = 512;
        for (int i = 0; i <= samples; ++i) {
            const double v = f(-L + 2.0 * L * i / samples);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        approx.a_step = L;
        approx.b = {0.0};
        approx.c = 0.5 * (lo + hi);
        return approx;
    }
    const double a = L / N;
    approx.a_step = a;
    approx.b.resize(std::size_t(2 * N + 1));
    for (int k = -N; k <= N; ++k)
        approx.b[std::size_t(k + N)] = 0.5 * (f(k * a + a / 2.0) - f(k * a - a / 2.0));
    approx.c = 0.0;
    const double x0 = a / 2.0; // match f at the first midpoint
    approx.c = f(x0) - eval_signum_1d(approx, x0);
    return approx;
}

double eval_signum_1d(const SignumApprox1D& approx, double x) {
    double acc = approx.c;
    const int N = approx.half_width;
    for (int k = -N; k <= N; ++k) {
        const double d = x - k * approx.a_step;
        if (d > 0.0)
            acc += approx.b[std::size_t(k + N)];
        else if (d < 0.0)
            acc -= approx.b[std::size_t(k + N)];
        // sgn(0) = 0 at the jump itself
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Tikhonov fit

cdouble eval_expansion(const SignAExpansion& e, cdouble z) {
    cdouble acc{};
    for (std::size_t i = 0; i < e.centers.size(); ++i)
        acc += e.weights[i] * sign_a(z - e.centers[i], e.a);
    return acc;
}

std::vector<cdouble> disc_center_grid(double spacing, double r1) {
    if (spacing <= 0.0 || r1 <= 0.0)
        throw ShapeError("center grid needs positive spacing and radius");
    std::vector<cdouble> centers;
    const int m = int(std::floor(r1 / spacing));
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            const cdouble z{i * spacing, j * spacing};
            if (std::abs(z) <= r1)
                centers.push_back(z);
        }
    return centers;
}

namespace {

// (1 - Laplacian) of a grid function restricted to the disc mask.
// 5-point stencil; falls back to a shifted one-sided second difference
// where a neighbour leaves the mask.
Eigen::MatrixXcd one_minus_laplacian(const Eigen::MatrixXcd& F,
                                     const std::vector<std::vector<bool>>& mask,
                                     double hs) {
    const int n = int(F.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    auto in = [&](int i, int j) { return i >= 0 && j >= 0 && i < n && j < n && mask[std::size_t(i)][std::size_t(j)]; };
    const double inv_h2 = 1.0 / (hs * hs);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!mask[std::size_t(i)][std::size_t(j)])
                continue;
            cdouble d2x{}, d2y{};
            if (in(i, j - 1) && in(i, j + 1))
                d2x = F(i, j + 1) - 2.0 * F(i, j) + F(i, j - 1);
            else if (in(i, j + 1) && in(i, j + 2))
                d2x = F(i, j + 2) - 2.0 * F(i, j + 1) + F(i, j);
            else if (in(i, j - 1) && in(i, j - 2))
                d2x = F(i, j - 2) - 2.0 * F(i, j - 1) + F(i, j);
            if (in(i - 1, j) && in(i + 1, j))
                d2y = F(i + 1, j) - 2.0 * F(i, j) + F(i - 1, j);
            else if (in(i + 1, j) && in(i + 2, j))
                d2y = F(i + 2, j) - 2.0 * F(i + 1, j) + F(i, j);
            else if (in(i - 1, j) && in(i - 2, j))
                d2y = F(i - 2, j) - 2.0 * F(i - 1, j) + F(i, j);
            out(i, j) = F(i, j) - (d2x + d2y) * inv_h2;
        }
    return out;
}

} // namespace

SignAExpansion tikhonov_fit(const std::function<cdouble(cdouble)>& g,
                            const std::vector<cdouble>& centers, double gamma, double a,
                            double r0, const TikhonovOptions& opt, TikhonovReport* report) {
    if (centers.empty())
        throw ShapeError("tikhonov_fit: center grid is empty");
    if (gamma <= 0.0)
        throw ShapeError("tikhonov_fit: gamma must be positive");
    if (a < 0.0 || r0 <= 0.0)
        throw ShapeError("tikhonov_fit: need a >= 0 and r0 > 0");
    const int n = opt.grid;
    const double hs = 2.0 * r0 / n;

    std::vector<std::vector<bool>> mask(std::size_t(n), std::vector<bool>(std::size_t(n)));
    std::vector<double> coord(std::size_t(n));
    for (int i = 0; i < n; ++i)
        coord[std::size_t(i)] = -r0 + (i + 0.5) * hs;
    int npts = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool inside =
                coord[std::size_t(i)] * coord[std::size_t(i)] +
                    coord[std::size_t(j)] * coord[std::size_t(j)] <
                r0 * r0;
            mask[std::size_t(i)][std::size_t(j)] = inside;
            npts += inside;
        }

    const std::size_t i0 = centers.size();
    Eigen::MatrixXcd P(Eigen::Index(i0), npts); // (1-D)psi_i sampled on the mask
    Eigen::VectorXcd Gv(npts);
    {
        Eigen::MatrixXcd F(n, n);
        for (std::size_t ci = 0; ci < i0; ++ci) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    F(i, j) = sign_a(cdouble{coord[std::size_t(j)], coord[std::size_t(i)]} -
                                         centers[ci],
                                     a);
            const Eigen::MatrixXcd D = one_minus_laplacian(F, mask, hs);
            int p = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (mask[std::size_t(i)][std::size_t(j)])
                        P(Eigen::Index(ci), p++) = D(i, j);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                F(i, j) = g(cdouble{coord[std::size_t(j)], coord[std::size_t(i)]});
        const Eigen::MatrixXcd D = one_minus_laplacian(F, mask, hs);
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (mask[std::size_t(i)][std::size_t(j)])
                    Gv(p++) = D(i, j);
    }

    const double w = hs * hs; // midpoint rule cell area
    // normal equations of the discrete objective:
    // (M + gamma I) b = rhs with M_{ji} = <psi_i, psi_j>_{H2,disc}
    const Eigen::MatrixXcd M = (P.conjugate() * P.transpose()) * w;
    const Eigen::VectorXcd rhs = (P.conjugate() * Gv) * w;
    Eigen::MatrixXcd sys = M;
    sys.diagonal().array() += gamma;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    const double cond = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(cond < opt.max_condition))
        throw ConditioningError("tikhonov_fit: system condition " + std::to_string(cond) +
                                    " exceeds tolerance; refine gamma or the center grid",
                                cond);
    const Eigen::VectorXcd b = es.eigenvectors() *
                               (es.eigenvectors().adjoint() * rhs).cwiseQuotient(
                                   es.eigenvalues().cast<cdouble>());

    SignAExpansion out;
    out.centers = centers;
    out.a = a;
    out.r0 = r0;
    out.weights.resize(i0);
    for (std::size_t i = 0; i < i0; ++i)
        out.weights[i] = b(Eigen::Index(i));

    if (report) {
        const Eigen::VectorXcd resid = Gv - P.transpose() * b;
        const double fit2 = resid.squaredNorm() * w;
        report->fit_norm = std::sqrt(fit2);
        report->objective = std::sqrt(fit2 + gamma * b.squaredNorm());
        report->condition = cond;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Radon / Hilbert / ridge decomposition

double radon_transform(const std::function<double(double, double)>& f,
                       std::array<double, 2> omega, double s, double support_radius,
                       int quad_points) {
    const double nrm = std::hypot(omega[0], omega[1]);
    if (std::abs(nrm - 1.0) > 1e-9)
        throw ShapeError("radon_transform: omega must be a unit vector");
    const double t_max_sq = support_radius * support_radius - s * s;
    if (t_max_sq <= 0.0)
        return 0.0;
    const double T = std::sqrt(t_max_sq);
    const double h = 2.0 * T / quad_points;
    double acc = 0.0;
    for (int i = 0; i < quad_points; ++i) {
        const double t = -T + (i + 0.5) * h;
        acc += f(s * omega[0] - t * omega[1], s * omega[1] + t * omega[0]);
    }
    return acc * h;
}

std::vector<double> hilbert_transform(const std::vector<double>& w, int pad_factor) {
    if (w.empty())
        return {};
    if (pad_factor < 1)
        throw ShapeError("hilbert_transform: pad_factor must be >= 1");
    std::size_t m = 1;
    while (m < w.size() * std::size_t(pad_factor))
        m <<= 1;

    std::vector<fftw_complex> buf(m);
    for (std::size_t i = 0; i < m; ++i) {
        buf[i][0] = i < w.size() ? w[i] : 0.0;
        buf[i][1] = 0.0;
    }
    fftw_plan fwd = fftw_plan_dft_1d(int(m), buf.data(), buf.data(), FFTW_FORWARD,
                                     FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    // multiplier -i*sgn(xi); DC and Nyquist bins carry no sign
    buf[0][0] = buf[0][1] = 0.0;
    for (std::size_t k = 1; k < m / 2; ++k) {
        // (re, im) * (-i) = (im, -re)
        std::swap(buf[k][0], buf[k][1]);
        buf[k][1] = -buf[k][1];
        // (re, im) * (+i) = (-im, re)
        std::swap(buf[m - k][0], buf[m - k][1]);
        buf[m - k][0] = -buf[m - k][0];
    }
    buf[m / 2][0] = buf[m / 2][1] = 0.0;

    fftw_plan bwd = fftw_plan_dft_1d(int(m), buf.data(), buf.data(), FFTW_BACKWARD,
                                     FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);

    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = buf[i][0] / double(m);
    return out;
}

RidgeApprox ridge_decompose(const std::function<double(double, double)>& f,
                            double support_radius, int K, double h,
                            const RidgeOptions& opt) {
    if (K < 8)
        throw ShapeError("ridge_decompose: need at least 8 directions, got " +
                         std::to_string(K));
    if (h <= 0.0 || support_radius <= 0.0)
        throw ShapeError("ridge_decompose: h and support radius must be positive");

    RidgeApprox out;
    out.h = h;
    out.support_radius = support_radius;
    out.a = opt.a < 0.0 ? 0.5 * h : opt.a;
    out.direction_weight = 2.0 * kPi / K;
    const int L = int(std::ceil(opt.level_margin * support_radius / h));
    out.half_width = L;
    const int ns = 2 * L + 1;

    // n = 2 inversion constant: 0.5 * (2*pi)^(1-n) * (-1)^((n-2)/2)
    const double c2 = 1.0 / (4.0 * kPi);

    out.directions.resize(std::size_t(K));
    out.coeffs.assign(std::size_t(K), std::vector<double>(std::size_t(2 * L)));
    out.constant = 0.0;

    std::vector<double> rt(std::size_t(ns)), W(std::size_t(ns));
    for (int k = 0; k < K; ++k) {
        const double phi = kPi * (k + 0.5) / K; // half circle; the integrand is
                                                // symmetric under omega -> -omega
        const std::array<double, 2> omega{std::cos(phi), std::sin(phi)};
        out.directions[std::size_t(k)] = omega;

        for (int m = -L; m <= L; ++m)
            rt[std::size_t(m + L)] =
                radon_transform(f, omega, m * h, support_radius, opt.quad_points);

        // d/ds by central differences, one-sided at the ends
        for (int m = 0; m < ns; ++m) {
            double d;
            if (m == 0)
                d = (rt[1] - rt[0]) / h;
            else if (m == ns - 1)
                d = (rt[std::size_t(ns - 1)] - rt[std::size_t(ns - 2)]) / h;
            else
                d = (rt[std::size_t(m + 1)] - rt[std::size_t(m - 1)]) / (2.0 * h);
            W[std::size_t(m)] = c2 * d;
        }

        const std::vector<double> g = hilbert_transform(W, 4);

        auto& ck = out.coeffs[std::size_t(k)];
        double half_sum = 0.0;
        for (int l = -L + 1; l <= L; ++l) {
            ck[std::size_t(l + L - 1)] = g[std::size_t(l + L)] - g[std::size_t(l + L - 1)];
            half_sum += 0.5 * ck[std::size_t(l + L - 1)];
        }
        out.constant += out.direction_weight * (g[0] + half_sum);
    }
    return out;
}

double eval_ridge(const RidgeApprox& r, double x, double y) {
    double acc = r.constant;
    const int L = r.half_width;
    for (std::size_t k = 0; k < r.directions.size(); ++k) {
        const double s = x * r.directions[k][0] + y * r.directions[k][1];
        double dir_acc = 0.0;
        for (int l = -L + 1; l <= L; ++l) {
            const double u = s - l * r.h;
            dir_acc += r.coeffs[k][std::size_t(l + L - 1)] * u /
                       std::sqrt(u * u + r.a * r.a);
        }
        acc += 0.5 * r.direction_weight * dir_acc;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Network emission

namespace {

void append_constant_laser(LayeredModel& m, double value, std::size_t j0) {
    // a laser pinned by its bias emits sign(1) = 1; the C entry carries
    // the constant
    m.A.push_back(std::vector<cdouble>(j0, cdouble{}));
    m.E_ext.push_back(cdouble{1.0, 0.0});
    for (auto& row : m.C)
        row.push_back(cdouble{value, 0.0});
}

} // namespace

LayeredModel emit_network(const SignumApprox1D& approx) {
    LayeredModel m;
    m.a = 0.0;
    m.c0 = cdouble{1.0, 0.0};
    m.C.emplace_back();
    const int N = approx.half_width;
    for (int k = -N; k <= N; ++k) {
        const double bk = approx.b[std::size_t(k + N)];
        if (bk == 0.0)
            continue;
        m.A.push_back({cdouble{1.0, 0.0}});
        m.E_ext.push_back(cdouble{-k * approx.a_step, 0.0});
        m.C.front().push_back(cdouble{bk, 0.0});
    }
    if (approx.c != 0.0 || m.A.empty())
        append_constant_laser(m, approx.c, 1);
    return m;
}

LayeredModel emit_network(const SignAExpansion& approx) {
    LayeredModel m;
    m.a = approx.a;
    m.c0 = cdouble{1.0, 0.0};
    m.C.emplace_back();
    for (std::size_t i = 0; i < approx.centers.size(); ++i) {
        m.A.push_back({cdouble{1.0, 0.0}});
        m.E_ext.push_back(-approx.centers[i]);
        m.C.front().push_back(approx.weights[i]);
    }
    if (m.A.empty())
        append_constant_laser(m, 0.0, 1);
    return m;
}

LayeredModel emit_network(const RidgeApprox& approx) {
    LayeredModel m;
    m.a = approx.a;
    m.c0 = cdouble{1.0, 0.0};
    m.C.emplace_back();
    const int L = approx.half_width;
    for (std::size_t k = 0; k < approx.directions.size(); ++k) {
        const auto& omega = approx.directions[k];
        for (int l = -L + 1; l <= L; ++l) {
            const double c = approx.coeffs[k][std::size_t(l + L - 1)];
            if (c == 0.0)
                continue;
            m.A.push_back({cdouble{omega[0], 0.0}, cdouble{omega[1], 0.0}});
            m.E_ext.push_back(cdouble{-l * approx.h, 0.0});
            m.C.front().push_back(cdouble{0.5 * approx.direction_weight * c, 0.0});
        }
    }
    if (approx.constant != 0.0 || m.A.empty())
        append_constant_laser(m, approx.constant, 2);
    // keep A row widths consistent when the constant laser was first
    for (auto& row : m.A)
        row.resize(2, cdouble{});
    return m;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json cplx(cdouble z) { return ordered_json::array({z.real(), z.imag()}); }

cdouble cplx_of(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(path + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json parse_doc(const std::string& text, const char* expected_kind) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || doc["kind"] != expected_kind)
        throw SchemaError(std::string("document: expected kind '") + expected_kind + "'");
    return doc;
}

} // namespace

std::string to_json(const SignumApprox1D& s) {
    ordered_json j;
    j["kind"] = "signum_1d";
    j["a_step"] = s.a_step;
    j["half_width"] = s.half_width;
    j["b"] = s.b;
    j["c"] = s.c;
    j["L"] = s.L;
    return j.dump(2) + "\n";
}

SignumApprox1D signum_1d_from_json(const std::string& text) {
    const auto j = parse_doc(text, "signum_1d");
    SignumApprox1D s;
    s.a_step = j.at("a_step").get<double>();
    s.half_width = j.at("half_width").get<int>();
    s.b = j.at("b").get<std::vector<double>>();
    s.c = j.at("c").get<double>();
    s.L = j.at("L").get<double>();
    if (int(s.b.size()) != 2 * s.half_width + 1)
        throw SchemaError("b: expected 2N+1 weights");
    return s;
}

std::string to_json(const SignAExpansion& e) {
    ordered_json j;
    j["kind"] = "sign_a_expansion";
    j["a"] = e.a;
    j["r0"] = e.r0;
    j["centers"] = ordered_json::array();
    j["weights"] = ordered_json::array();
    for (auto z : e.centers)
        j["centers"].push_back(cplx(z));
    for (auto z : e.weights)
        j["weights"].push_back(cplx(z));
    return j.dump(2) + "\n";
}

SignAExpansion expansion_from_json(const std::string& text) {
    const auto j = parse_doc(text, "sign_a_expansion");
    SignAExpansion e;
    e.a = j.at("a").get<double>();
    e.r0 = j.at("r0").get<double>();
    for (std::size_t i = 0; i < j.at("centers").size(); ++i)
        e.centers.push_back(cplx_of(j["centers"][i], "centers[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < j.at("weights").size(); ++i)
        e.weights.push_back(cplx_of(j["weights"][i], "weights[" + std::to_string(i) + "]"));
    if (e.centers.size() != e.weights.size())
        throw SchemaError("weights: length must match centers");
    return e;
}

std::string to_json(const RidgeApprox& r) {
    ordered_json j;
    j["kind"] = "ridge";
    j["direction_weight"] = r.direction_weight;
    j["h"] = r.h;
    j["half_width"] = r.half_width;
    j["constant"] = r.constant;
    j["a"] = r.a;
    j["support_radius"] = r.support_radius;
    j["directions"] = ordered_json::array();
    for (const auto& d : r.directions)
        j["directions"].push_back(ordered_json::array({d[0], d[1]}));
    j["coeffs"] = r.coeffs;
    return j.dump(2) + "\n";
}

RidgeApprox ridge_from_json(const std::string& text) {
    const auto j = parse_doc(text, "ridge");
    RidgeApprox r;
    r.direction_weight = j.at("direction_weight").get<double>();
    r.h = j.at("h").get<double>();
    r.half_width = j.at("half_width").get<int>();
    r.constant = j.at("constant").get<double>();
    r.a = j.at("a").get<double>();
    r.support_radius = j.at("support_radius").get<double>();
    for (std::size_t i = 0; i < j.at("directions").size(); ++i) {
        const auto& d = j["directions"][i];
        if (!d.is_array() || d.size() != 2)
            throw SchemaError("directions[" + std::to_string(i) + "]: expected a pair");
        r.directions.push_back({d[0].get<double>(), d[1].get<double>()});
    }
    r.coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
    if (r.coeffs.size() != r.directions.size())
        throw SchemaError("coeffs: one row per direction required");
    for (const auto& row : r.coeffs)
        if (int(row.size()) != 2 * r.half_width)
            throw SchemaError("coeffs: rows must have 2L entries");
    return r;
}

std::string to_json(const LayeredModel& m) {
    ordered_json j;
    j["kind"] = "layered";
    j["a"] = m.a;
    j["c0"] = cplx(m.c0);
    auto dump_matrix = [](const std::vector<std::vector<cdouble>>& rows) {
        ordered_json out = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json r = ordered_json::array();
            for (auto z : row)
                r.push_back(cplx(z));
            out.push_back(r);
        }
        return out;
    };
    j["A"] = dump_matrix(m.A);
    j["C"] = dump_matrix(m.C);
    j["E_ext"] = ordered_json::array();
    for (auto z : m.E_ext)
        j["E_ext"].push_back(cplx(z));
    return j.dump(2) + "\n";
}

LayeredModel layered_from_json(const std::string& text) {
    const auto j = parse_doc(text, "layered");
    LayeredModel m;
    m.a = j.at("a").get<double>();
    m.c0 = cplx_of(j.at("c0"), "c0");
    auto read_matrix = [&](const char* key) {
        std::vector<std::vector<cdouble>> rows;
        for (std::size_t i = 0; i < j.at(key).size(); ++i) {
            std::vector<cdouble> row;
            for (std::size_t k = 0; k < j[key][i].size(); ++k)
                row.push_back(cplx_of(j[key][i][k], std::string(key) + "[" +
                                                        std::to_string(i) + "][" +
                                                        std::to_string(k) + "]"));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    m.A = read_matrix("A");
    m.C = read_matrix("C");
    for (std::size_t i = 0; i < j.at("E_ext").size(); ++i)
        m.E_ext.push_back(cplx_of(j["E_ext"][i], "E_ext[" + std::to_string(i) + "]"));
    m.validate();
    return m;
}

} // namespace optilock
