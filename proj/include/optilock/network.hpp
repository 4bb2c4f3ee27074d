#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optilock/field.hpp"
#include "optilock/laser.hpp"

namespace optilock {

/// Laser node of a network. Ideal evaluation applies the smoothed
/// normalization with emission gain sqrt(mu-1)*e^{i theta}, or c0 when
/// set. Dynamical evaluation integrates the rate equations; the
/// smoothing a is realized as a horizontal bias field of that magnitude.
struct LaserNode {
    LaserParams params;
    double a = 0.0;
    std::optional<cdouble> c0;
};

struct NetworkNode {
    std::string id;
    std::variant<LaserNode, PassiveElement> element;
};

/// One endpoint of an edge: an internal node port or an input/output
/// terminal.
struct Endpoint {
    enum class Kind { node, input, output };
    Kind kind = Kind::node;
    int index = 0; // node index, or position in inputs()/outputs()
    int port = 0;  // coupler port; 0 elsewhere
};

struct Edge {
    Endpoint from;
    Endpoint to;
    cdouble weight{1.0, 0.0};
};

/// A feed-forward network of lasers and passive elements. Signal flow is
/// nonreciprocal by construction: the edge graph must be acyclic.
///
/// Input terminals carry vertically polarized fields. Laser nodes sum
/// all incoming edges coherently; coupler ports take exactly one edge
/// each; attenuators and phase shifters take exactly one edge. Output
/// terminals sum their incoming edges.
struct NetworkSpec {
    std::vector<NetworkNode> nodes;
    std::vector<Edge> edges;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    int node_index(const std::string& id) const; // -1 when absent

    /// Structural checks: endpoint sanity, arity, acyclicity.
    /// Throws TopologyError / ShapeError / SchemaError.
    void validate() const;
};

/// Evaluate the network on the given input fields (one per input
/// terminal, vertically polarized). Nodes are evaluated in topological
/// order; results do not depend on the particular order chosen.
std::vector<JonesField> eval_dag(const NetworkSpec& spec,
                                 std::span<const JonesField> inputs,
                                 EvalMode mode = EvalMode::ideal);

/// Three-layer model: U_k = sum_j A[k][j] z_j + E_ext[k],
/// E_k = c0 * sign_a(U_k, a), out_l = sum_k C[l][k] E_k.
struct LayeredModel {
    std::vector<std::vector<cdouble>> A;     // k0 x j0
    std::vector<std::vector<cdouble>> C;     // l0 x k0
    std::vector<cdouble> E_ext;              // k0
    double a = 0.0;
    cdouble c0{1.0, 0.0};

    std::size_t num_inputs() const { return A.empty() ? 0 : A.front().size(); }
    std::size_t num_lasers() const { return A.size(); }
    std::size_t num_outputs() const { return C.size(); }

    void validate() const;
};

std::vector<cdouble> eval_layered(const LayeredModel& model,
                                  std::span<const cdouble> z);

/// Expand a layered model into an equivalent NetworkSpec (evaluates
/// identically through eval_dag in ideal mode).
NetworkSpec layered_to_spec(const LayeredModel& model,
                            const LaserParams& params = {});

/// JSON topology document I/O. load(save(spec)) == spec. Schema errors
/// carry the offending field path.
NetworkSpec load_spec(const std::string& json_text);
std::string save_spec(const NetworkSpec& spec);

} // namespace optilock
