#include "optilock/signal_lab.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

namespace optilock {

std::vector<std::uint8_t> generate_bits(std::size_t length, std::uint64_t seed) {
    if (length < 1)
        throw ShapeError("generate_bits: length must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(length);
    for (auto& b : bits)
        b = std::uint8_t(rng() & 1u);
    return bits;
}

SymbolStream encode_three_input(const std::vector<std::uint8_t>& a,
                                const std::vector<std::uint8_t>& b,
                                const std::vector<std::uint8_t>& x) {
    if (a.size() != b.size() || a.size() != x.size())
        throw ShapeError("encode_three_input: bit sequences must have equal lengths");
    if (a.empty())
        throw ShapeError("encode_three_input: empty bit sequences");
    SymbolStream s;
    s.symbols.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double field = (2.0 * a[i] - 1.0) + (2.0 * b[i] - 1.0) + (2.0 * x[i] - 1.0);
        s.symbols.emplace_back(field, 0.0);
    }
    return s;
}

namespace {

std::pair<double, double> two_levels(const SymbolStream& stream) {
    double lo = std::abs(stream.symbols.front());
    double hi = lo;
    for (auto z : stream.symbols) {
        const double m = std::abs(z);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    if (hi - lo < 1e-12 * hi)
        throw ShapeError("stream carries a single magnitude level");
    for (auto z : stream.symbols) {
        const double m = std::abs(z);
        if (std::abs(m - lo) > 1e-9 * hi && std::abs(m - hi) > 1e-9 * hi)
            throw ShapeError("stream carries more than two magnitude levels");
    }
    return {lo, hi};
}

} // namespace

double extinction_ratio_db(const SymbolStream& stream) {
    const auto [lo, hi] = two_levels(stream);
    return 10.0 * std::log10((hi * hi) / (lo * lo));
}

SymbolStream scale_to_er(const SymbolStream& stream, double er_db) {
    if (er_db < 0.0)
        throw ShapeError("extinction ratio must be >= 0 dB");
    const auto [lo, hi] = two_levels(stream);
    const double new_lo = hi * std::pow(10.0, -er_db / 20.0);
    SymbolStream out;
    out.symbol_duration = stream.symbol_duration;
    out.symbols.reserve(stream.symbols.size());
    for (auto z : stream.symbols) {
        const double m = std::abs(z);
        const bool is_hi = std::abs(m - hi) <= std::abs(m - lo);
        out.symbols.push_back(z / m * (is_hi ? hi : new_lo));
    }
    return out;
}

LaserParams quench_laser_params() {
    LaserParams p;
    p.mu = 2.0;
    p.alpha = 0.0;
    p.gamma_c = 1e12;
    p.gamma = 1e10; // carrier transients must clear within a 1 ns slot
    p.gamma_s = 50e9;
    return p;
}

SymbolStream quench(const SymbolStream& stream, const LaserParams& params, EvalMode mode,
                    const QuenchOptions& opt) {
    if (stream.symbols.empty())
        throw ShapeError("quench: empty stream");
    SymbolStream out;
    out.symbol_duration = stream.symbol_duration;
    out.symbols.reserve(stream.symbols.size());
    const double theta = -std::atan2(params.alpha, 1.0);
    const cdouble gain = std::polar(std::sqrt(params.mu - 1.0), theta);

    if (mode == EvalMode::ideal) {
        for (auto z : stream.symbols) {
            if (std::abs(z) == 0.0)
                throw NoLockingError("quench: zero-magnitude symbol in ideal mode");
            out.symbols.push_back(gain * sign(z));
        }
        return out;
    }

    double peak = 0.0;
    for (auto z : stream.symbols)
        peak = std::max(peak, std::abs(z));
    if (peak == 0.0)
        throw NoLockingError("quench: all-zero stream");
    const double scale = opt.injection_scale / peak;

    LaserState state = free_running_state(params);
    for (auto z : stream.symbols) {
        state = integrate_final(state, params, vertical(z * scale),
                                stream.symbol_duration, opt.dt);
        out.symbols.push_back(state.Ex);
    }
    return out;
}

namespace {

DliResult dli_core(const SymbolStream& stream, const double* threshold) {
    if (stream.symbols.size() < 2)
        throw ShapeError("dli_demodulate: need at least 2 symbols");
    DliResult r;
    r.intensities.reserve(stream.symbols.size() - 1);
    for (std::size_t k = 1; k < stream.symbols.size(); ++k)
        r.intensities.push_back(0.25 *
                                std::norm(stream.symbols[k] + stream.symbols[k - 1]));
    if (threshold) {
        r.threshold = *threshold;
    } else {
        const auto [lo, hi] =
            std::minmax_element(r.intensities.begin(), r.intensities.end());
        r.threshold = 0.5 * (*lo + *hi);
    }
    r.bits.reserve(r.intensities.size());
    for (double v : r.intensities)
        r.bits.push_back(v >= r.threshold ? 1 : 0);
    return r;
}

} // namespace

DliResult dli_demodulate(const SymbolStream& stream) { return dli_core(stream, nullptr); }

DliResult dli_demodulate(const SymbolStream& stream, double threshold) {
    return dli_core(stream, &threshold);
}

std::vector<std::uint8_t> expected_dpsk_bits(const SymbolStream& stream) {
    if (stream.symbols.size() < 2)
        throw ShapeError("expected_dpsk_bits: need at least 2 symbols");
    std::vector<std::uint8_t> out;
    out.reserve(stream.symbols.size() - 1);
    auto phase_bit = [](cdouble z) { return z.real() > 0.0 ? 1 : 0; };
    for (std::size_t k = 1; k < stream.symbols.size(); ++k)
        out.push_back(phase_bit(stream.symbols[k]) == phase_bit(stream.symbols[k - 1]) ? 1
                                                                                       : 0);
    return out;
}

ThresholdScan best_threshold_errors(const std::vector<double>& intensities,
                                    const std::vector<std::uint8_t>& expected) {
    if (intensities.size() != expected.size())
        throw ShapeError("best_threshold_errors: length mismatch");
    // cluster intensities closer than any receiver could resolve
    std::vector<double> sorted = intensities;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> clusters;
    for (double v : sorted)
        if (clusters.empty() || v - clusters.back() > 1e-9)
            clusters.push_back(v);

    std::vector<double> candidates;
    candidates.push_back(clusters.front() - 1.0);
    for (std::size_t i = 1; i < clusters.size(); ++i)
        candidates.push_back(0.5 * (clusters[i - 1] + clusters[i]));
    candidates.push_back(clusters.back() + 1.0);

    ThresholdScan best;
    best.errors = intensities.size() + 1;
    for (double th : candidates) {
        std::size_t errors = 0;
        for (std::size_t k = 0; k < intensities.size(); ++k) {
            const int bit = intensities[k] >= th ? 1 : 0;
            errors += std::size_t(bit != expected[k]);
        }
        if (errors < best.errors) {
            best.errors = errors;
            best.threshold = th;
        }
    }
    return best;
}

ErSweepPoint er_sweep_point(const std::vector<std::uint8_t>& a,
                            const std::vector<std::uint8_t>& b,
                            const std::vector<std::uint8_t>& x, double er_db,
                            const LaserParams& params) {
    const SymbolStream native = encode_three_input(a, b, x);
    const SymbolStream scaled = scale_to_er(native, er_db);
    const std::vector<std::uint8_t> expected = expected_dpsk_bits(native);

    ErSweepPoint pt;
    pt.er_db = er_db;
    pt.total_bits = expected.size();

    const DliResult without = dli_demodulate(scaled);
    const ThresholdScan scan_without = best_threshold_errors(without.intensities, expected);
    pt.errors_without_laser = scan_without.errors;
    pt.best_threshold = scan_without.threshold;

    const SymbolStream quenched = quench(scaled, params, EvalMode::ideal);
    const DliResult with_laser = dli_demodulate(quenched);
    const ThresholdScan scan_with = best_threshold_errors(with_laser.intensities, expected);
    pt.errors_with_laser = scan_with.errors;
    return pt;
}

std::vector<ErSweepPoint> er_sweep(const std::vector<std::uint8_t>& a,
                                   const std::vector<std::uint8_t>& b,
                                   const std::vector<std::uint8_t>& x,
                                   const std::vector<double>& er_grid,
                                   const LaserParams& params) {
    if (er_grid.empty())
        throw ShapeError("er_sweep: empty extinction-ratio grid");
    std::vector<ErSweepPoint> out;
    out.reserve(er_grid.size());
    for (double er : er_grid)
        out.push_back(er_sweep_point(a, b, x, er, params));
    return out;
}

void write_er_sweep_csv(std::ostream& os, const std::vector<ErSweepPoint>& points) {
    os << "er_db,errors_without,errors_with,total_bits,best_threshold\n";
    for (const auto& p : points)
        os << p.er_db << ',' << p.errors_without_laser << ',' << p.errors_with_laser << ','
           << p.total_bits << ',' << p.best_threshold << '\n';
}

void write_stream_csv(std::ostream& os, const SymbolStream& stream) {
    os << "index,re,im,power,phase\n";
    for (std::size_t i = 0; i < stream.symbols.size(); ++i) {
        const cdouble z = stream.symbols[i];
        os << i << ',' << z.real() << ',' << z.imag() << ',' << std::norm(z) << ','
           << std::arg(z) << '\n';
    }
}

} // namespace optilock
