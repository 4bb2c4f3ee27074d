#include "optilock/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include <json.hpp>

namespace optilock {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t element_inputs(const NetworkNode& n) {
    if (std::holds_alternative<LaserNode>(n.element))
        return std::size_t(-1); // any number, summed coherently
    return std::get<PassiveElement>(n.element).inputs;
}

std::size_t element_outputs(const NetworkNode& n) {
    if (std::holds_alternative<LaserNode>(n.element))
        return 1;
    return std::get<PassiveElement>(n.element).outputs;
}

} // namespace

int NetworkSpec::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id)
            return int(i);
    return -1;
}

void NetworkSpec::validate() const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (nodes[i].id == nodes[j].id)
                throw SchemaError("nodes[" + std::to_string(j) + "].id: duplicate id '" +
                                  nodes[j].id + "'");

    // per-port in-edge counts
    std::map<std::pair<int, int>, int> port_in_count;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& ed = edges[e];
        const std::string path = "edges[" + std::to_string(e) + "]";
        auto check_endpoint = [&](const Endpoint& ep, bool is_from) {
            const char* side = is_from ? ".from" : ".to";
            switch (ep.kind) {
            case Endpoint::Kind::node: {
                if (ep.index < 0 || ep.index >= int(nodes.size()))
                    throw SchemaError(path + side + ": node index out of range");
                const NetworkNode& n = nodes[std::size_t(ep.index)];
                const std::size_t arity = is_from ? element_outputs(n) : element_inputs(n);
                if (arity != std::size_t(-1) && (ep.port < 0 || std::size_t(ep.port) >= arity))
                    throw SchemaError(path + side + ": port " + std::to_string(ep.port) +
                                      " out of range for node '" + n.id + "'");
                if (!is_from && std::holds_alternative<PassiveElement>(n.element) &&
                    std::get<PassiveElement>(n.element).kind ==
                        PassiveElement::Kind::bias_source)
                    throw SchemaError(path + ".to: bias source '" + n.id +
                                      "' takes no inputs");
                break;
            }
            case Endpoint::Kind::input:
                if (!is_from)
                    throw SchemaError(path + ".to: input terminals cannot receive edges");
                if (ep.index < 0 || ep.index >= int(inputs.size()))
                    throw SchemaError(path + side + ": input terminal out of range");
                break;
            case Endpoint::Kind::output:
                if (is_from)
                    throw SchemaError(path + ".from: output terminals cannot feed edges");
                if (ep.index < 0 || ep.index >= int(outputs.size()))
                    throw SchemaError(path + side + ": output terminal out of range");
                break;
            }
        };
        check_endpoint(ed.from, true);
        check_endpoint(ed.to, false);
        if (ed.to.kind == Endpoint::Kind::node)
            port_in_count[{ed.to.index, ed.to.port}]++;
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t arity = element_inputs(nodes[i]);
        if (arity == std::size_t(-1))
            continue; // laser: free in-degree
        if (std::holds_alternative<PassiveElement>(nodes[i].element) &&
            std::get<PassiveElement>(nodes[i].element).kind ==
                PassiveElement::Kind::bias_source)
            continue;
        for (std::size_t port = 0; port < arity; ++port) {
            const int c = [&] {
                auto it = port_in_count.find({int(i), int(port)});
                return it == port_in_count.end() ? 0 : it->second;
            }();
            if (c != 1)
                throw ShapeError("node '" + nodes[i].id + "' port " + std::to_string(port) +
                                 " needs exactly 1 in-edge, has " + std::to_string(c));
        }
    }

    // acyclicity over node->node edges
    std::vector<int> indeg(nodes.size(), 0);
    std::vector<std::vector<int>> adj(nodes.size());
    for (const Edge& ed : edges)
        if (ed.from.kind == Endpoint::Kind::node && ed.to.kind == Endpoint::Kind::node) {
            adj[std::size_t(ed.from.index)].push_back(ed.to.index);
            indeg[std::size_t(ed.to.index)]++;
        }
    std::queue<int> q;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indeg[i] == 0)
            q.push(int(i));
    std::size_t seen = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        ++seen;
        for (int v : adj[std::size_t(u)])
            if (--indeg[std::size_t(v)] == 0)
                q.push(v);
    }
    if (seen != nodes.size())
        throw TopologyError("network contains a cycle; signal flow must be feed-forward");
}

namespace {

JonesField eval_laser(const LaserNode& ln, const JonesField& acc, EvalMode mode) {
    if (ln.a > 0.0 && (acc.h.real() != 0.0 || acc.h.imag() != 0.0))
        throw ShapeError("laser has both a smoothing parameter and a wired horizontal "
                         "component; use one or the other");
    if (mode == EvalMode::ideal) {
        if (ln.a == 0.0 && acc.power() == 0.0)
            throw NoLockingError("laser received zero total injection");
        const double theta = -std::atan2(ln.params.alpha, 1.0);
        const cdouble gain =
            ln.c0 ? *ln.c0 : std::polar(std::sqrt(ln.params.mu - 1.0), theta);
        return normalize_jones(acc, ln.a, gain);
    }
    // dynamical: smoothing realized as an orthogonally polarized bias
    JonesField inj = acc;
    inj.h += ln.a;
    const double t_end = settling_time(inj, ln.params);
    const LaserState fin =
        integrate_final(free_running_state(ln.params), ln.params, inj, t_end);
    JonesField out{fin.Ex, fin.Ey};
    if (ln.c0) {
        // c0 overrides the physical emission amplitude and phase
        const SteadySolution ss = steady_state_field(inj, ln.params);
        const cdouble phys = std::polar(std::sqrt(ln.params.mu - 1.0), ss.theta);
        out = out * (*ln.c0 / phys);
    }
    return out;
}

} // namespace

std::vector<JonesField> eval_dag(const NetworkSpec& spec,
                                 std::span<const JonesField> input_fields, EvalMode mode) {
    spec.validate();
    if (input_fields.size() != spec.inputs.size())
        throw ShapeError("network has " + std::to_string(spec.inputs.size()) +
                         " inputs, got " + std::to_string(input_fields.size()));
    for (std::size_t i = 0; i < input_fields.size(); ++i)
        if (input_fields[i].h != cdouble{})
            throw ShapeError("input '" + spec.inputs[i] +
                             "' must be vertically polarized (h = 0)");

    // out-port values per node
    std::vector<std::vector<JonesField>> value(spec.nodes.size());
    // accumulated in-port fields per node
    std::vector<std::vector<JonesField>> acc(spec.nodes.size());
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const std::size_t ar = element_inputs(spec.nodes[i]);
        acc[i].assign(ar == std::size_t(-1) ? 1 : std::max<std::size_t>(ar, 1), JonesField{});
    }

    std::vector<int> indeg(spec.nodes.size(), 0);
    std::vector<std::vector<int>> adj(spec.nodes.size());
    std::vector<std::vector<const Edge*>> out_edges(spec.nodes.size());
    for (const Edge& ed : spec.edges)
        if (ed.from.kind == Endpoint::Kind::node && ed.to.kind == Endpoint::Kind::node) {
            adj[std::size_t(ed.from.index)].push_back(ed.to.index);
            indeg[std::size_t(ed.to.index)]++;
            out_edges[std::size_t(ed.from.index)].push_back(&ed);
        }

    auto deliver_from = [&](int node) {
        for (const Edge* ed : out_edges[std::size_t(node)]) {
            const JonesField f =
                ed->weight * value[std::size_t(node)][std::size_t(ed->from.port)];
            acc[std::size_t(ed->to.index)][std::size_t(ed->to.port)] += f;
        }
    };

    // seed input-terminal edges
    for (const Edge& ed : spec.edges)
        if (ed.from.kind == Endpoint::Kind::input && ed.to.kind == Endpoint::Kind::node)
            acc[std::size_t(ed.to.index)][std::size_t(ed.to.port)] +=
                ed.weight * input_fields[std::size_t(ed.from.index)];

    std::queue<int> ready;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        if (indeg[i] == 0)
            ready.push(int(i));

    while (!ready.empty()) {
        const int u = ready.front();
        ready.pop();
        const NetworkNode& node = spec.nodes[std::size_t(u)];
        if (const auto* ln = std::get_if<LaserNode>(&node.element)) {
            JonesField total{};
            for (const auto& f : acc[std::size_t(u)])
                total += f;
            value[std::size_t(u)] = {eval_laser(*ln, total, mode)};
        } else {
            const auto& el = std::get<PassiveElement>(node.element);
            std::span<const JonesField> in(acc[std::size_t(u)].data(), el.inputs);
            value[std::size_t(u)] = apply_passive(el, in);
        }
        deliver_from(u);
        for (int v : adj[std::size_t(u)])
            if (--indeg[std::size_t(v)] == 0)
                ready.push(v);
    }

    std::vector<JonesField> out(spec.outputs.size());
    for (const Edge& ed : spec.edges) {
        if (ed.to.kind != Endpoint::Kind::output)
            continue;
        JonesField f{};
        if (ed.from.kind == Endpoint::Kind::input)
            f = input_fields[std::size_t(ed.from.index)];
        else
            f = value[std::size_t(ed.from.index)][std::size_t(ed.from.port)];
        out[std::size_t(ed.to.index)] += ed.weight * f;
    }
    return out;
}

void LayeredModel::validate() const {
    const std::size_t k0 = A.size();
    if (E_ext.size() != k0)
        throw ShapeError("E_ext length must match the laser count");
    const std::size_t j0 = num_inputs();
    for (const auto& row : A)
        if (row.size() != j0)
            throw ShapeError("A rows have inconsistent lengths");
    for (const auto& row : C)
        if (row.size() != k0)
            throw ShapeError("C rows must have one entry per laser");
    if (a < 0.0)
        throw ShapeError("smoothing a must be >= 0");
}

std::vector<cdouble> eval_layered(const LayeredModel& m, std::span<const cdouble> z) {
    m.validate();
    if (z.size() != m.num_inputs())
        throw ShapeError("layered model expects " + std::to_string(m.num_inputs()) +
                         " inputs, got " + std::to_string(z.size()));
    const std::size_t k0 = m.num_lasers();
    std::vector<cdouble> e(k0);
    for (std::size_t k = 0; k < k0; ++k) {
        cdouble u = m.E_ext[k];
        for (std::size_t j = 0; j < z.size(); ++j)
            u += m.A[k][j] * z[j];
        e[k] = m.c0 * sign_a(u, m.a);
    }
    std::vector<cdouble> out(m.num_outputs());
    for (std::size_t l = 0; l < out.size(); ++l) {
        cdouble s{};
        for (std::size_t k = 0; k < k0; ++k)
            s += m.C[l][k] * e[k];
        out[l] = s;
    }
    return out;
}

NetworkSpec layered_to_spec(const LayeredModel& m, const LaserParams& params) {
    m.validate();
    NetworkSpec spec;
    const std::size_t j0 = m.num_inputs(), k0 = m.num_lasers(), l0 = m.num_outputs();
    for (std::size_t j = 0; j < j0; ++j)
        spec.inputs.push_back("in" + std::to_string(j));
    for (std::size_t l = 0; l < l0; ++l)
        spec.outputs.push_back("out" + std::to_string(l));
    for (std::size_t k = 0; k < k0; ++k) {
        LaserNode ln;
        ln.params = params;
        ln.a = m.a;
        ln.c0 = m.c0;
        spec.nodes.push_back({"laser" + std::to_string(k), ln});
        if (m.E_ext[k] != cdouble{}) {
            spec.nodes.push_back({"bias" + std::to_string(k),
                                  PassiveElement::bias_source(vertical(m.E_ext[k]))});
            spec.edges.push_back({{Endpoint::Kind::node, int(spec.nodes.size() - 1), 0},
                                  {Endpoint::Kind::node, int(spec.nodes.size() - 2), 0},
                                  cdouble{1.0, 0.0}});
        }
    }
    for (std::size_t k = 0; k < k0; ++k) {
        const int laser = spec.node_index("laser" + std::to_string(k));
        for (std::size_t j = 0; j < j0; ++j)
            if (m.A[k][j] != cdouble{})
                spec.edges.push_back({{Endpoint::Kind::input, int(j), 0},
                                      {Endpoint::Kind::node, laser, 0},
                                      m.A[k][j]});
        for (std::size_t l = 0; l < l0; ++l)
            if (m.C[l][k] != cdouble{})
                spec.edges.push_back({{Endpoint::Kind::node, laser, 0},
                                      {Endpoint::Kind::output, int(l), 0},
                                      m.C[l][k]});
    }
    return spec;
}

// ---------------------------------------------------------------------------
// JSON document I/O

namespace {

cdouble parse_complex(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(path + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json dump_complex(cdouble z) { return ordered_json::array({z.real(), z.imag()}); }

double require_number(const ordered_json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

// "id" or "id:port"
std::pair<std::string, int> split_port(const std::string& ref, const std::string& path) {
    const auto colon = ref.find(':');
    if (colon == std::string::npos)
        return {ref, 0};
    const std::string id = ref.substr(0, colon);
    try {
        const int port = std::stoi(ref.substr(colon + 1));
        if (port < 0)
            throw std::invalid_argument("negative");
        return {id, port};
    } catch (const std::exception&) {
        throw SchemaError(path + ": bad port suffix in '" + ref + "'");
    }
}

Endpoint resolve_endpoint(const NetworkSpec& spec, const std::string& ref,
                          const std::string& path) {
    const auto [id, port] = split_port(ref, path);
    const int node = spec.node_index(id);
    if (node >= 0)
        return {Endpoint::Kind::node, node, port};
    for (std::size_t i = 0; i < spec.inputs.size(); ++i)
        if (spec.inputs[i] == id)
            return {Endpoint::Kind::input, int(i), port};
    for (std::size_t i = 0; i < spec.outputs.size(); ++i)
        if (spec.outputs[i] == id)
            return {Endpoint::Kind::output, int(i), port};
    throw SchemaError(path + ": unknown node or terminal '" + id + "'");
}

std::string endpoint_ref(const NetworkSpec& spec, const Endpoint& ep) {
    std::string id;
    switch (ep.kind) {
    case Endpoint::Kind::node: id = spec.nodes[std::size_t(ep.index)].id; break;
    case Endpoint::Kind::input: id = spec.inputs[std::size_t(ep.index)]; break;
    case Endpoint::Kind::output: id = spec.outputs[std::size_t(ep.index)]; break;
    }
    if (ep.port != 0)
        id += ":" + std::to_string(ep.port);
    return id;
}

NetworkNode parse_node(const ordered_json& j, const std::string& path) {
    if (!j.contains("id") || !j["id"].is_string())
        throw SchemaError(path + ".id: expected a string");
    if (!j.contains("type") || !j["type"].is_string())
        throw SchemaError(path + ".type: expected a string");
    NetworkNode node;
    node.id = j["id"].get<std::string>();
    const std::string type = j["type"].get<std::string>();
    const ordered_json params = j.contains("params") ? j["params"] : ordered_json::object();
    const std::string ppath = path + ".params";

    if (type == "laser") {
        LaserNode ln;
        if (params.contains("mu")) ln.params.mu = require_number(params, "mu", ppath);
        if (params.contains("alpha")) ln.params.alpha = require_number(params, "alpha", ppath);
        if (params.contains("gamma_c")) ln.params.gamma_c = require_number(params, "gamma_c", ppath);
        if (params.contains("gamma")) ln.params.gamma = require_number(params, "gamma", ppath);
        if (params.contains("gamma_s")) ln.params.gamma_s = require_number(params, "gamma_s", ppath);
        if (params.contains("gamma_p")) ln.params.gamma_p = require_number(params, "gamma_p", ppath);
        if (params.contains("gamma_a")) ln.params.gamma_a = require_number(params, "gamma_a", ppath);
        if (params.contains("a")) ln.a = require_number(params, "a", ppath);
        if (params.contains("c0")) ln.c0 = parse_complex(params["c0"], ppath + ".c0");
        if (!(ln.params.mu > 1.0))
            throw SchemaError(ppath + ".mu: must be > 1 (above threshold)");
        if (ln.a < 0.0)
            throw SchemaError(ppath + ".a: must be >= 0");
        node.element = ln;
    } else if (type == "coupler") {
        const double m = require_number(params, "inputs", ppath);
        const double n = require_number(params, "outputs", ppath);
        if (m < 1 || n < 1 || m != std::floor(m) || n != std::floor(n))
            throw SchemaError(ppath + ": inputs/outputs must be positive integers");
        node.element = PassiveElement::even_coupler(std::size_t(m), std::size_t(n));
    } else if (type == "attenuator") {
        node.element = PassiveElement::attenuator(require_number(params, "db", ppath));
    } else if (type == "phase") {
        node.element = PassiveElement::phase_shifter(require_number(params, "radians", ppath));
    } else if (type == "bias") {
        if (!params.contains("field") || !params["field"].is_array() ||
            params["field"].size() != 2)
            throw SchemaError(ppath + ".field: expected [[re,im],[re,im]]");
        JonesField f{parse_complex(params["field"][0], ppath + ".field[0]"),
                     parse_complex(params["field"][1], ppath + ".field[1]")};
        node.element = PassiveElement::bias_source(f);
    } else {
        throw SchemaError(path + ".type: unknown element type '" + type + "'");
    }
    return node;
}

ordered_json dump_node(const NetworkNode& node) {
    ordered_json j;
    j["id"] = node.id;
    if (const auto* ln = std::get_if<LaserNode>(&node.element)) {
        j["type"] = "laser";
        ordered_json p;
        p["mu"] = ln->params.mu;
        p["alpha"] = ln->params.alpha;
        p["gamma_c"] = ln->params.gamma_c;
        p["gamma"] = ln->params.gamma;
        p["gamma_s"] = ln->params.gamma_s;
        p["a"] = ln->a;
        if (ln->c0)
            p["c0"] = dump_complex(*ln->c0);
        j["params"] = p;
        return j;
    }
    const auto& el = std::get<PassiveElement>(node.element);
    switch (el.kind) {
    case PassiveElement::Kind::coupler:
        j["type"] = "coupler";
        j["params"] = {{"inputs", el.inputs}, {"outputs", el.outputs}};
        break;
    case PassiveElement::Kind::attenuator: {
        j["type"] = "attenuator";
        const double factor = el.transfer[0][0].real();
        j["params"] = {{"db", -20.0 * std::log10(factor)}};
        break;
    }
    case PassiveElement::Kind::phase_shifter:
        j["type"] = "phase";
        j["params"] = {{"radians", std::arg(el.transfer[0][0])}};
        break;
    case PassiveElement::Kind::bias_source:
        j["type"] = "bias";
        j["params"] = {{"field", ordered_json::array({dump_complex(el.bias.v),
                                                      dump_complex(el.bias.h)})}};
        break;
    }
    return j;
}

} // namespace

NetworkSpec load_spec(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("document: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("document: expected a JSON object");
    NetworkSpec spec;
    for (const char* key : {"nodes", "edges", "inputs", "outputs"})
        if (!doc.contains(key) || !doc[key].is_array())
            throw SchemaError(std::string(key) + ": expected an array");

    for (const auto& s : doc["inputs"]) {
        if (!s.is_string())
            throw SchemaError("inputs: entries must be strings");
        spec.inputs.push_back(s.get<std::string>());
    }
    for (const auto& s : doc["outputs"]) {
        if (!s.is_string())
            throw SchemaError("outputs: entries must be strings");
        spec.outputs.push_back(s.get<std::string>());
    }
    for (std::size_t i = 0; i < doc["nodes"].size(); ++i)
        spec.nodes.push_back(parse_node(doc["nodes"][i], "nodes[" + std::to_string(i) + "]"));

    for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
        const auto& je = doc["edges"][i];
        const std::string path = "edges[" + std::to_string(i) + "]";
        if (!je.contains("from") || !je["from"].is_string())
            throw SchemaError(path + ".from: expected a string reference");
        if (!je.contains("to") || !je["to"].is_string())
            throw SchemaError(path + ".to: expected a string reference");
        Edge e;
        e.from = resolve_endpoint(spec, je["from"].get<std::string>(), path + ".from");
        e.to = resolve_endpoint(spec, je["to"].get<std::string>(), path + ".to");
        e.weight = je.contains("weight") ? parse_complex(je["weight"], path + ".weight")
                                         : cdouble{1.0, 0.0};
        spec.edges.push_back(e);
    }
    spec.validate();
    return spec;
}

std::string save_spec(const NetworkSpec& spec) {
    ordered_json doc;
    doc["nodes"] = ordered_json::array();
    for (const auto& n : spec.nodes)
        doc["nodes"].push_back(dump_node(n));
    doc["edges"] = ordered_json::array();
    for (const auto& e : spec.edges) {
        ordered_json je;
        je["from"] = endpoint_ref(spec, e.from);
        je["to"] = endpoint_ref(spec, e.to);
        je["weight"] = dump_complex(e.weight);
        doc["edges"].push_back(je);
    }
    doc["inputs"] = spec.inputs;
    doc["outputs"] = spec.outputs;
    return doc.dump(2) + "\n";
}

} // namespace optilock
