#pragma once

#include <complex>
#include <span>
#include <vector>

#include "optilock/errors.hpp"

namespace optilock {

using cdouble = std::complex<double>;

/// Two-component complex field amplitude: vertical and horizontal
/// polarization. All field units are dimensionless; power = |field|^2.
struct JonesField {
    cdouble v{};
    cdouble h{};

    double power() const { return std::norm(v) + std::norm(h); }
    double magnitude() const;

    JonesField& operator+=(const JonesField& o) {
        v += o.v;
        h += o.h;
        return *this;
    }
};

inline JonesField operator+(JonesField a, const JonesField& b) { return a += b; }
inline JonesField operator*(cdouble w, const JonesField& f) { return {w * f.v, w * f.h}; }
inline JonesField operator*(const JonesField& f, cdouble w) { return w * f; }
bool operator==(const JonesField& a, const JonesField& b);

/// Vertically polarized field, the common case for network signals.
inline JonesField vertical(cdouble v) { return {v, cdouble{}}; }

/// z / |z|. Undefined at zero: the phase carries the information and a
/// zero field has none.
cdouble sign(cdouble z);

/// Smoothed normalization z / sqrt(|z|^2 + a^2). Total for a > 0 and
/// reduces to sign() at a = 0 (where z must be nonzero).
cdouble sign_a(cdouble z, double a);

/// gain * u / sqrt(power(u) + a^2): the two-component analogue of sign_a.
/// The vertical component equals sign_a(u.v, sqrt(|u.h|^2 + a^2)) * gain.
JonesField normalize_jones(const JonesField& u, double a, cdouble gain);

/// Coherent sum of input fields; the empty sum is the zero field.
JonesField combine_inputs(std::span<const JonesField> fields);

/// A passive optical element with a fixed (outputs x inputs) transfer
/// matrix, applied identically to both polarization components. Bias
/// sources have no inputs and emit a fixed field.
struct PassiveElement {
    enum class Kind { coupler, attenuator, phase_shifter, bias_source };

    Kind kind{Kind::attenuator};
    std::size_t inputs = 1;
    std::size_t outputs = 1;
    std::vector<std::vector<cdouble>> transfer; // outputs rows x inputs cols
    JonesField bias{};

    /// Lossless even m->n coupler: every output is (sum of inputs)/sqrt(m*n).
    /// Conserves total power for in-phase inputs; all singular values <= 1.
    static PassiveElement even_coupler(std::size_t m, std::size_t n);

    /// Coupler with an explicit transfer matrix. Rejects matrices whose
    /// largest singular value exceeds 1 (would create energy).
    static PassiveElement coupler(std::vector<std::vector<cdouble>> matrix);

    static PassiveElement attenuator(double loss_db);
    static PassiveElement phase_shifter(double radians);
    static PassiveElement bias_source(const JonesField& field);

    /// Field transmission factor of an attenuator: 10^(-dB/20).
    static double attenuation_factor(double loss_db);
};

/// transfer * inputs, componentwise per polarization.
std::vector<JonesField> apply_passive(const PassiveElement& el,
                                      std::span<const JonesField> inputs);

} // namespace optilock
