#include "optilock/gol.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace optilock {

namespace {

// -12 dB field factor on the bias and feedback paths
const double kPathAtt = PassiveElement::attenuation_factor(12.0);
constexpr double kAliveThresholdPower = 1.0; // midpoint of {0, 2}

} // namespace

double cell_path_amplitude() { return std::sqrt(2.0 / 9.0); }

LaserParams gol_laser_params() {
    LaserParams p;
    p.mu = 2.0;
    p.alpha = 0.0;
    p.gamma_c = 1e12;
    p.gamma = 1e9;
    p.gamma_s = 50e9;
    return p;
}

CellInjections cell_injections(cdouble s, cdouble e) {
    const double x1 = cell_path_amplitude();
    const cdouble upper = (s + kPathAtt * e + kPathAtt * (-2.5 * x1)) / std::sqrt(3.0);
    const cdouble lower = (s + kPathAtt * (-3.5 * x1)) / std::sqrt(2.0);
    return {upper, lower};
}

bool conway_rule(bool alive, int n) {
    return alive ? (n == 2 || n == 3) : (n == 3);
}

namespace {

CellState formula_update(bool alive_prev, int n) {
    const double ea = ((n <= 2 && !alive_prev) || (n <= 1 && alive_prev)) ? -1.0 : 1.0;
    const double eb = (n <= 3) ? 1.0 : -1.0;
    CellState out;
    out.field = cdouble{ea + eb, 0.0};
    out.alive = ea > 0.0 && eb > 0.0;
    return out;
}

CellState dynamical_update(const CellInjections& inj, const LaserParams& params,
                           CellDynamics* carry, double settle) {
    CellDynamics local{free_running_state(params), free_running_state(params)};
    CellDynamics& dyn = carry ? *carry : local;
    dyn.upper = integrate_final(dyn.upper, params, vertical(inj.upper), settle);
    dyn.lower = integrate_final(dyn.lower, params, vertical(inj.lower), settle);
    const cdouble ea = dyn.upper.Ex;
    const cdouble eb = -dyn.lower.Ex; // pi shifter on the lower path
    CellState out;
    out.field = ea + eb;
    out.alive = out.total_power() >= kAliveThresholdPower;
    return out;
}

} // namespace

CellState cell_update(bool alive_prev, int n, CellMode mode, CellDynamics* carry,
                      double settle) {
    if (n < 0 || n > 8)
        throw ShapeError("living neighbour count must be in 0..8, got " + std::to_string(n));
    if (mode == CellMode::formula)
        return formula_update(alive_prev, n);
    const double x1 = cell_path_amplitude();
    const cdouble s = cdouble{n * x1 / 4.0, 0.0};
    const cdouble e = cdouble{alive_prev ? x1 : 0.0, 0.0};
    return dynamical_update(cell_injections(s, e), gol_laser_params(), carry, settle);
}

Grid Grid::from_bits(const std::vector<std::uint8_t>& bits, int width, int height) {
    if (width <= 0 || height <= 0 || int(bits.size()) != width * height)
        throw ShapeError("grid dimensions do not match the bit array");
    Grid g;
    g.width = width;
    g.height = height;
    g.fields.resize(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        g.fields[i] = bits[i] ? cdouble{2.0, 0.0} : cdouble{};
    return g;
}

bool Grid::alive_at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height)
        return false;
    return 0.5 * std::norm(fields[std::size_t(y) * std::size_t(width) + std::size_t(x)]) >=
           kAliveThresholdPower;
}

std::vector<std::uint8_t> Grid::to_bits() const {
    std::vector<std::uint8_t> bits(fields.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            bits[std::size_t(y) * std::size_t(width) + std::size_t(x)] =
                alive_at(x, y) ? 1 : 0;
    return bits;
}

Grid step_grid(const Grid& g, CellMode mode) {
    if (g.width <= 0 || g.height <= 0)
        throw ShapeError("grid must be non-empty");
    Grid next;
    next.width = g.width;
    next.height = g.height;
    next.fields.resize(g.fields.size());
    if (mode == CellMode::dynamical) {
        next.dynamics = g.dynamics;
        if (next.dynamics.empty())
            next.dynamics.assign(g.fields.size(),
                                 CellDynamics{free_running_state(gol_laser_params()),
                                              free_running_state(gol_laser_params())});
    }
    const double split = 1.0 / std::sqrt(18.0); // per-path share of the 2x9 coupler

    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const std::size_t idx = std::size_t(y) * std::size_t(g.width) + std::size_t(x);
            if (mode == CellMode::formula) {
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if ((dx || dy) && g.alive_at(x + dx, y + dy))
                            ++n;
                next.fields[idx] = cell_update(g.alive_at(x, y), n).field;
            } else {
                // propagate the actual complex per-path fields
                cdouble sum{};
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy)
                            continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height)
                            continue;
                        sum += g.fields[std::size_t(ny) * std::size_t(g.width) +
                                        std::size_t(nx)] *
                               split;
                    }
                const cdouble s = sum / 4.0; // 8x2 coupler arm: sum/sqrt(16)
                const cdouble e = g.fields[idx] * split;
                next.fields[idx] =
                    dynamical_update(cell_injections(s, e), gol_laser_params(),
                                     &next.dynamics[idx], 2e-9)
                        .field;
            }
        }
    }
    return next;
}

std::vector<std::uint8_t> boolean_oracle_step(const std::vector<std::uint8_t>& bits,
                                              int width, int height) {
    if (width <= 0 || height <= 0 || int(bits.size()) != width * height)
        throw ShapeError("bit array does not match the given dimensions");
    std::vector<std::uint8_t> next(bits.size());
    auto at = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= width || y >= height)
            return 0;
        return bits[std::size_t(y) * std::size_t(width) + std::size_t(x)] ? 1 : 0;
    };
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dx || dy)
                        n += at(x + dx, y + dy);
            next[std::size_t(y) * std::size_t(width) + std::size_t(x)] =
                conway_rule(at(x, y) != 0, n) ? 1 : 0;
        }
    return next;
}

GenerationRun run_generations(const Grid& seed, int count, CellMode mode) {
    if (count < 1)
        throw ShapeError("generation count must be >= 1");
    GenerationRun run;
    run.generations.reserve(std::size_t(count) + 1);
    run.generations.push_back(seed);
    std::vector<std::uint8_t> oracle = seed.to_bits();
    for (int gen = 1; gen <= count; ++gen) {
        run.generations.push_back(step_grid(run.generations.back(), mode));
        oracle = boolean_oracle_step(oracle, seed.width, seed.height);
        const auto got = run.generations.back().to_bits();
        for (int y = 0; y < seed.height; ++y)
            for (int x = 0; x < seed.width; ++x) {
                const std::size_t i =
                    std::size_t(y) * std::size_t(seed.width) + std::size_t(x);
                if (got[i] != oracle[i])
                    run.divergences.push_back(
                        {gen, x, y, oracle[i] != 0, got[i] != 0});
            }
    }
    return run;
}

Grid parse_grid(const std::string& text) {
    std::vector<std::uint8_t> bits;
    int width = -1, height = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (width < 0)
            width = int(line.size());
        else if (int(line.size()) != width)
            throw SchemaError("grid line " + std::to_string(height + 1) +
                              ": ragged row width");
        for (char c : line) {
            if (c == '#')
                bits.push_back(1);
            else if (c == '.')
                bits.push_back(0);
            else
                throw SchemaError(std::string("grid: unexpected character '") + c + "'");
        }
        ++height;
    }
    if (height == 0)
        throw SchemaError("grid: empty document");
    return Grid::from_bits(bits, width, height);
}

std::string format_grid(const Grid& g) {
    std::string out;
    out.reserve(std::size_t(g.height) * std::size_t(g.width + 1));
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x)
            out += g.alive_at(x, y) ? '#' : '.';
        out += '\n';
    }
    return out;
}

std::string divergence_report_json(const GenerationRun& run) {
    nlohmann::ordered_json j;
    j["generations"] = run.generations.size() - 1;
    j["divergence_count"] = run.divergences.size();
    if (run.divergences.empty()) {
        j["first_divergence"] = nullptr;
    } else {
        const auto& d = run.divergences.front();
        j["first_divergence"] = {{"generation", d.generation},
                                 {"x", d.x},
                                 {"y", d.y},
                                 {"expected", d.expected},
                                 {"got", d.got}};
    }
    j["divergences"] = nlohmann::ordered_json::array();
    for (const auto& d : run.divergences)
        j["divergences"].push_back({{"generation", d.generation},
                                    {"x", d.x},
                                    {"y", d.y},
                                    {"expected", d.expected},
                                    {"got", d.got}});
    return j.dump(2) + "\n";
}

Grid pulsar_17x17() {
    // period-3 oscillator centered in a 17x17 frame
    static const char* rows[] = {
        ".................",
        ".................",
        "....###...###....",
        ".................",
        "..#....#.#....#..",
        "..#....#.#....#..",
        "..#....#.#....#..",
        "....###...###....",
        ".................",
        "....###...###....",
        "..#....#.#....#..",
        "..#....#.#....#..",
        "..#....#.#....#..",
        ".................",
        "....###...###....",
        ".................",
        ".................",
    };
    std::string text;
    for (const char* r : rows) {
        text += r;
        text += '\n';
    }
    return parse_grid(text);
}

} // namespace optilock
