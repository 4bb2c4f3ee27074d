#include "optilock/gates.hpp"

#include <cmath>
#include <sstream>

namespace optilock {

PhaseBit make_bit(int value) {
    if (value != 0 && value != 1)
        throw ShapeError("phase bit value must be 0 or 1");
    return {value, cdouble{2.0 * value - 1.0, 0.0}};
}

PhaseBit decode_bit(cdouble field, double theta) {
    const cdouble referenced = field * std::polar(1.0, -theta);
    const int value = referenced.real() > 0.0 ? 1 : 0;
    return {value, cdouble{2.0 * value - 1.0, 0.0}};
}

NetworkSpec programmable_gate_spec(const LaserParams& params) {
    NetworkSpec spec;
    spec.inputs = {"in_a", "in_b", "in_x"};
    spec.outputs = {"out"};
    LaserNode ln;
    ln.params = params;
    spec.nodes.push_back({"gate", ln});
    for (int i = 0; i < 3; ++i)
        spec.edges.push_back({{Endpoint::Kind::input, i, 0},
                              {Endpoint::Kind::node, 0, 0},
                              cdouble{1.0, 0.0}});
    spec.edges.push_back({{Endpoint::Kind::node, 0, 0},
                          {Endpoint::Kind::output, 0, 0},
                          cdouble{1.0, 0.0}});
    return spec;
}

PhaseBit programmable_gate(PhaseBit A, PhaseBit B, PhaseBit X, EvalMode mode,
                           const LaserParams& params) {
    const double theta = -std::atan2(params.alpha, 1.0);
    if (mode == EvalMode::ideal) {
        const cdouble sum = A.field + B.field + X.field;
        const cdouble out = std::polar(std::sqrt(params.mu - 1.0), theta) * sign(sum);
        return decode_bit(out, theta);
    }
    const NetworkSpec spec = programmable_gate_spec(params);
    const JonesField in[3] = {vertical(A.field), vertical(B.field), vertical(X.field)};
    const auto out = eval_dag(spec, in, EvalMode::dynamical);
    return decode_bit(out.at(0).v, theta);
}

PhaseBit not_gate(PhaseBit b) {
    return {1 - b.value, -b.field};
}

int GateCircuit::add_and_or(Ref a, Ref b, Ref x) {
    gates.push_back({Gate::Kind::and_or, a, b, x});
    return int(gates.size()) - 1;
}

int GateCircuit::add_not(Ref a) {
    gates.push_back({Gate::Kind::not_op, a, {}, {}});
    return int(gates.size()) - 1;
}

std::vector<int> eval_circuit(const GateCircuit& circuit, const std::vector<int>& inputs,
                              EvalMode mode) {
    if (int(inputs.size()) != circuit.num_inputs)
        throw ShapeError("circuit has " + std::to_string(circuit.num_inputs) +
                         " inputs, got " + std::to_string(inputs.size()));
    std::vector<PhaseBit> value(circuit.gates.size());
    std::vector<bool> done(circuit.gates.size(), false);

    auto resolve = [&](const GateCircuit::Ref& r) -> PhaseBit {
        switch (r.kind) {
        case GateCircuit::Ref::Kind::input:
            if (r.index < 0 || r.index >= circuit.num_inputs)
                throw ShapeError("gate references input " + std::to_string(r.index) +
                                 " which is unassigned");
            return make_bit(inputs[std::size_t(r.index)]);
        case GateCircuit::Ref::Kind::constant:
            return make_bit(r.constant);
        case GateCircuit::Ref::Kind::gate:
            if (r.index < 0 || r.index >= int(circuit.gates.size()) ||
                !done[std::size_t(r.index)])
                throw TopologyError("gate operand references gate " +
                                    std::to_string(r.index) +
                                    " which is not yet evaluated (cycle or forward edge)");
            return value[std::size_t(r.index)];
        }
        throw ShapeError("bad operand reference");
    };

    // gates listed in topological order: operands may only point backwards
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const auto& gate = circuit.gates[g];
        if (gate.kind == GateCircuit::Gate::Kind::not_op)
            value[g] = not_gate(resolve(gate.a));
        else
            value[g] = programmable_gate(resolve(gate.a), resolve(gate.b), resolve(gate.x),
                                         mode);
        done[g] = true;
    }

    std::vector<int> out;
    out.reserve(circuit.outputs.size());
    for (int g : circuit.outputs) {
        if (g < 0 || g >= int(circuit.gates.size()))
            throw ShapeError("circuit output references missing gate");
        out.push_back(value[std::size_t(g)].value);
    }
    return out;
}

std::vector<TruthTableRow> gate_truth_table(EvalMode mode, const LaserParams& params) {
    std::vector<TruthTableRow> rows;
    const double theta = -std::atan2(params.alpha, 1.0);
    for (int x = 0; x <= 1; ++x)
        for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b) {
                const PhaseBit A = make_bit(a), B = make_bit(b), X = make_bit(x);
                TruthTableRow row{a, b, x, A.field + B.field + X.field, {}, 0};
                if (mode == EvalMode::ideal) {
                    row.out = std::polar(std::sqrt(params.mu - 1.0), theta) * sign(row.sum);
                } else {
                    const NetworkSpec spec = programmable_gate_spec(params);
                    const JonesField in[3] = {vertical(A.field), vertical(B.field),
                                              vertical(X.field)};
                    row.out = eval_dag(spec, in, EvalMode::dynamical).at(0).v;
                }
                row.bit = decode_bit(row.out, theta).value;
                rows.push_back(row);
            }
    return rows;
}

std::string format_truth_table(const std::vector<TruthTableRow>& rows) {
    std::ostringstream os;
    os << " A  B  X |  sum  |  out bit | program\n";
    os << "---------+-------+----------+--------\n";
    for (const auto& r : rows) {
        std::ostringstream sum;
        sum.setf(std::ios::showpos);
        sum << r.sum.real();
        os << ' ' << r.a << "  " << r.b << "  " << r.x << " | " << sum.str() << "    |     "
           << r.bit << "    | " << (r.x ? "OR" : "AND") << '\n';
    }
    return os.str();
}

std::string truth_table_csv(const std::vector<TruthTableRow>& rows) {
    std::ostringstream os;
    os << "a,b,x,sum_re,sum_im,out_re,out_im,bit,program\n";
    for (const auto& r : rows)
        os << r.a << ',' << r.b << ',' << r.x << ',' << r.sum.real() << ',' << r.sum.imag()
           << ',' << r.out.real() << ',' << r.out.imag() << ',' << r.bit << ','
           << (r.x ? "OR" : "AND") << '\n';
    return os.str();
}

} // namespace optilock
