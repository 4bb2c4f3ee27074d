#pragma once

#include <string>
#include <vector>

#include "optilock/network.hpp"

namespace optilock {

/// Phase-encoded bit: value 1 maps to field +1, value 0 to field -1
/// (phase shift pi), vertical polarization.
struct PhaseBit {
    int value = 0;
    cdouble field{-1.0, 0.0};
};

PhaseBit make_bit(int value);

/// Decode a field back into a bit by the sign of its phase-referenced
/// real part. theta is the fixed laser phase offset to compensate.
PhaseBit decode_bit(cdouble field, double theta = 0.0);

/// One laser fed by inputs A, B and program bias X, all at equal unit
/// magnitude. X = 0 programs AND, X = 1 programs OR. The summed field is
/// always odd (in {-3,-1,+1,+3}), so the sign decision is unambiguous.
PhaseBit programmable_gate(PhaseBit A, PhaseBit B, PhaseBit X,
                           EvalMode mode = EvalMode::ideal,
                           const LaserParams& params = {});

/// NOT is a pi phase shift.
PhaseBit not_gate(PhaseBit b);

/// Network spec of the single programmable gate: inputs in_a, in_b,
/// in_x; one laser; output out. Used by dynamical-mode evaluation and
/// shipped as the reference topology document.
NetworkSpec programmable_gate_spec(const LaserParams& params = {});

/// A DAG of programmable and NOT gates. Gate operands reference either
/// a circuit input or another gate's output, so one gate's result can
/// program the next stage on the fly.
struct GateCircuit {
    struct Ref {
        enum class Kind { input, gate, constant };
        Kind kind = Kind::input;
        int index = 0; // input index or gate index
        int constant = 0;
    };
    struct Gate {
        enum class Kind { and_or, not_op };
        Kind kind = Gate::Kind::and_or;
        Ref a, b, x; // not_op uses only a
    };

    int num_inputs = 0;
    std::vector<Gate> gates;
    std::vector<int> outputs; // gate indices

    static Ref input(int i) { return {Ref::Kind::input, i, 0}; }
    static Ref gate(int g) { return {Ref::Kind::gate, g, 0}; }
    static Ref constant(int v) { return {Ref::Kind::constant, 0, v}; }

    int add_and_or(Ref a, Ref b, Ref x);
    int add_not(Ref a);
};

/// Topological evaluation of the circuit on a full input assignment.
std::vector<int> eval_circuit(const GateCircuit& circuit, const std::vector<int>& inputs,
                              EvalMode mode = EvalMode::ideal);

struct TruthTableRow {
    int a, b, x;
    cdouble sum;   // combined field at the laser
    cdouble out;   // normalized output field
    int bit;
};

/// All 8 (A, B, X) rows of the programmable gate.
std::vector<TruthTableRow> gate_truth_table(EvalMode mode = EvalMode::ideal,
                                            const LaserParams& params = {});

std::string format_truth_table(const std::vector<TruthTableRow>& rows);
std::string truth_table_csv(const std::vector<TruthTableRow>& rows);

} // namespace optilock
