#include "optilock/field.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace optilock {

double JonesField::magnitude() const { return std::sqrt(power()); }

bool operator==(const JonesField& a, const JonesField& b) {
    return a.v == b.v && a.h == b.h;
}

cdouble sign(cdouble z) {
    const double m = std::abs(z);
    if (m == 0.0)
        throw UndefinedInputError("sign(0) is undefined: zero field carries no phase");
    return z / m;
}

cdouble sign_a(cdouble z, double a) {
    if (a < 0.0)
        throw UndefinedInputError("sign_a: smoothing parameter must be >= 0");
    if (a == 0.0)
        return sign(z);
    return z / std::sqrt(std::norm(z) + a * a);
}

JonesField normalize_jones(const JonesField& u, double a, cdouble gain) {
    const double p = u.power();
    if (a == 0.0 && p == 0.0)
        throw NoLockingError("cannot lock onto a zero injection field");
    const double denom = std::sqrt(p + a * a);
    return {gain * u.v / denom, gain * u.h / denom};
}

JonesField combine_inputs(std::span<const JonesField> fields) {
    JonesField sum{};
    for (const auto& f : fields)
        sum += f;
    return sum;
}

PassiveElement PassiveElement::even_coupler(std::size_t m, std::size_t n) {
    if (m == 0 || n == 0)
        throw ShapeError("coupler needs at least one input and one output");
    PassiveElement el;
    el.kind = Kind::coupler;
    el.inputs = m;
    el.outputs = n;
    const double c = 1.0 / std::sqrt(double(m) * double(n));
    el.transfer.assign(n, std::vector<cdouble>(m, cdouble{c, 0.0}));
    return el;
}

PassiveElement PassiveElement::coupler(std::vector<std::vector<cdouble>> matrix) {
    if (matrix.empty() || matrix.front().empty())
        throw ShapeError("coupler matrix must be non-empty");
    const std::size_t n = matrix.size();
    const std::size_t m = matrix.front().size();
    Eigen::MatrixXcd t(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix[i].size() != m)
            throw ShapeError("coupler matrix rows have inconsistent lengths");
        for (std::size_t j = 0; j < m; ++j)
            t(Eigen::Index(i), Eigen::Index(j)) = matrix[i][j];
    }
    const double smax = t.jacobiSvd().singularValues()(0);
    if (smax > 1.0 + 1e-9)
        throw ShapeError("coupler transfer matrix amplifies (largest singular value " +
                         std::to_string(smax) + " > 1)");
    PassiveElement el;
    el.kind = Kind::coupler;
    el.inputs = m;
    el.outputs = n;
    el.transfer = std::move(matrix);
    return el;
}

PassiveElement PassiveElement::attenuator(double loss_db) {
    if (loss_db < 0.0)
        throw ShapeError("attenuator loss must be >= 0 dB");
    PassiveElement el;
    el.kind = Kind::attenuator;
    el.inputs = el.outputs = 1;
    el.transfer = {{cdouble{attenuation_factor(loss_db), 0.0}}};
    return el;
}

PassiveElement PassiveElement::phase_shifter(double radians) {
    PassiveElement el;
    el.kind = Kind::phase_shifter;
    el.inputs = el.outputs = 1;
    el.transfer = {{std::polar(1.0, radians)}};
    return el;
}

PassiveElement PassiveElement::bias_source(const JonesField& field) {
    PassiveElement el;
    el.kind = Kind::bias_source;
    el.inputs = 0;
    el.outputs = 1;
    el.bias = field;
    return el;
}

double PassiveElement::attenuation_factor(double loss_db) {
    return std::pow(10.0, -loss_db / 20.0);
}

std::vector<JonesField> apply_passive(const PassiveElement& el,
                                      std::span<const JonesField> inputs) {
    if (inputs.size() != el.inputs)
        throw ShapeError("element expects " + std::to_string(el.inputs) +
                         " inputs, got " + std::to_string(inputs.size()));
    if (el.kind == PassiveElement::Kind::bias_source)
        return {el.bias};
    std::vector<JonesField> out(el.outputs);
    for (std::size_t i = 0; i < el.outputs; ++i) {
        JonesField acc{};
        for (std::size_t j = 0; j < el.inputs; ++j)
            acc += el.transfer[i][j] * inputs[j];
        out[i] = acc;
    }
    return out;
}

} // namespace optilock
