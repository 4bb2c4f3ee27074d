#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "optilock/laser.hpp"

namespace optilock {

/// One complex field sample per bit slot.
struct SymbolStream {
    std::vector<cdouble> symbols;
    double symbol_duration = 1e-9; // 1 Gbit/s slots
};

/// Deterministic pseudo-random bits: the low bit of successive
/// mt19937_64 outputs seeded with `seed`. Fully reproducible across
/// platforms (the generator sequence is pinned by the standard).
std::vector<std::uint8_t> generate_bits(std::size_t length, std::uint64_t seed);

/// Three phase-encoded unit-magnitude signals summed coherently:
/// field = (2A-1) + (2B-1) + (2X-1) in {-3,-1,+1,+3}. Power takes the
/// two levels {1, 9}, phase the two values {0, pi}.
SymbolStream encode_three_input(const std::vector<std::uint8_t>& a,
                                const std::vector<std::uint8_t>& b,
                                const std::vector<std::uint8_t>& x);

/// Extinction ratio of a two-level stream: 10*log10(P_high / P_low).
double extinction_ratio_db(const SymbolStream& stream);

/// Rescale the low magnitude level so the power ratio matches er_db,
/// keeping the high level and all phases. The stream must carry exactly
/// two magnitude levels.
SymbolStream scale_to_er(const SymbolStream& stream, double er_db);

struct QuenchOptions {
    /// Peak injection magnitude in field units for dynamical mode; keeps
    /// the laser in the weak-coupling regime where the regenerated
    /// magnitude stays within 1% of sqrt(mu-1).
    double injection_scale = 0.008;
    double dt = 0.0;
};

/// Parameters for the quenching laser. The carrier rate is set an order
/// above the 1 GHz symbol rate so amplitude transients die within one
/// slot.
LaserParams quench_laser_params();

/// Amplitude quenching by an injection-locked laser. Ideal mode replaces
/// every symbol by sign(z) * e^{i theta} * sqrt(mu-1); dynamical mode
/// integrates the rate equations across the stream, sampling at each
/// slot end, with the laser state carried between slots.
SymbolStream quench(const SymbolStream& stream, const LaserParams& params,
                    EvalMode mode = EvalMode::ideal,
                    const QuenchOptions& opt = {});

struct DliResult {
    std::vector<double> intensities; // length-1 shorter than the stream
    std::vector<std::uint8_t> bits;
    double threshold = 0.0;
};

/// Delay-line-interferometer demodulation: intensity_k =
/// |z_k + z_{k-1}|^2 / 4 (constructive port), decided against the given
/// threshold, or the midpoint of the observed intensity range when
/// omitted.
DliResult dli_demodulate(const SymbolStream& stream);
DliResult dli_demodulate(const SymbolStream& stream, double threshold);

/// Differential reference sequence: bit_k = XNOR of consecutive phase
/// bits of the stream (phase bit = sign of the real part).
std::vector<std::uint8_t> expected_dpsk_bits(const SymbolStream& stream);

/// Error count at the most favorable threshold: scans midpoints between
/// the sorted distinct intensity clusters (intensities closer than 1e-9
/// count as one cluster, below any physical receiver resolution).
struct ThresholdScan {
    std::size_t errors = 0;
    double threshold = 0.0;
};
ThresholdScan best_threshold_errors(const std::vector<double>& intensities,
                                    const std::vector<std::uint8_t>& expected);

struct ErSweepPoint {
    double er_db = 0.0;
    std::size_t errors_without_laser = 0;
    std::size_t errors_with_laser = 0;
    std::size_t total_bits = 0;
    double best_threshold = 0.0;
};

/// The quenching experiment at one extinction ratio: encode, scale,
/// demodulate with and without the laser, count errors at the best
/// threshold each.
ErSweepPoint er_sweep_point(const std::vector<std::uint8_t>& a,
                            const std::vector<std::uint8_t>& b,
                            const std::vector<std::uint8_t>& x, double er_db,
                            const LaserParams& params);

std::vector<ErSweepPoint> er_sweep(const std::vector<std::uint8_t>& a,
                                   const std::vector<std::uint8_t>& b,
                                   const std::vector<std::uint8_t>& x,
                                   const std::vector<double>& er_grid,
                                   const LaserParams& params);

/// Header: er_db,errors_without,errors_with,total_bits,best_threshold
void write_er_sweep_csv(std::ostream& os, const std::vector<ErSweepPoint>& points);

/// Columns: index, re, im, power, phase.
void write_stream_csv(std::ostream& os, const SymbolStream& stream);

} // namespace optilock
