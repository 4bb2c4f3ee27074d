#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optilock/laser.hpp"

namespace optilock {

enum class CellMode { formula, dynamical };

/// Field amplitude of one per-path output of a living cell. A living
/// cell emits total power 2 split evenly over nine paths, so each path
/// carries power 2/9.
double cell_path_amplitude();

/// Output of one cell after an update: the combined two-laser field
/// before the output splitter. Total emitted power is |field|^2 / 2,
/// which sits at 2 (alive) or 0 (dead).
struct CellState {
    cdouble field{};
    bool alive = false;

    double total_power() const { return 0.5 * std::norm(field); }
};

/// Internal laser states of one cell, carried across generations in
/// dynamical mode.
struct CellDynamics {
    LaserState upper;
    LaserState lower;
};

/// Laser parameters used for the optical cell.
LaserParams gol_laser_params();

/// Injections seen by the two cell lasers given the combined neighbor
/// signal s (per-arm output of the 8x2 input coupler) and the feedback
/// path field e (the cell's own previous per-path output).
struct CellInjections {
    cdouble upper; // (s + att(e) + att(-2.5 x1)) / sqrt(3)
    cdouble lower; // (s + att(-3.5 x1)) / sqrt(2)
};
CellInjections cell_injections(cdouble s, cdouble e);

/// Update one cell from its previous liveness and the number of living
/// neighbours n in 0..8. Formula mode applies the two steady-state sign
/// rules directly; dynamical mode drives the optical path through the
/// rate equations for `settle` seconds per update. `carry` keeps laser
/// state across consecutive updates.
CellState cell_update(bool alive_prev, int n, CellMode mode = CellMode::formula,
                      CellDynamics* carry = nullptr, double settle = 2e-9);

/// A rectangular grid of optical cells with one shared bias source.
/// Cells hold complex output fields; fields are propagated between
/// generations, never regenerated.
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<cdouble> fields;                 // width*height, row-major
    std::vector<CellDynamics> dynamics;          // populated in dynamical mode

    static Grid from_bits(const std::vector<std::uint8_t>& bits, int width, int height);

    bool alive_at(int x, int y) const;
    std::vector<std::uint8_t> to_bits() const;
    bool operator==(const Grid& o) const { return to_bits() == o.to_bits() &&
                                                  width == o.width && height == o.height; }
};

/// Synchronous update of the whole grid; dead cells beyond the edge.
Grid step_grid(const Grid& g, CellMode mode = CellMode::formula);

/// Reference rule: standard Conway update on plain bits, dead boundary.
std::vector<std::uint8_t> boolean_oracle_step(const std::vector<std::uint8_t>& bits,
                                              int width, int height);

/// Conway's survival/birth rule for a single cell.
bool conway_rule(bool alive, int living_neighbours);

struct Divergence {
    int generation;
    int x, y;
    bool expected;
    bool got;
};

struct GenerationRun {
    std::vector<Grid> generations; // count+1 entries incl. the seed
    std::vector<Divergence> divergences;
    std::optional<Divergence> first_divergence() const {
        return divergences.empty() ? std::nullopt
                                   : std::optional<Divergence>(divergences.front());
    }
};

/// Evolve `count` generations, comparing every generation cell-for-cell
/// against the Boolean oracle run from the same seed.
GenerationRun run_generations(const Grid& seed, int count,
                              CellMode mode = CellMode::formula);

/// Plain-text grid format: one row per line, '#' alive, '.' dead.
Grid parse_grid(const std::string& text);
std::string format_grid(const Grid& g);

std::string divergence_report_json(const GenerationRun& run);

/// 17x17 period-3 seed pattern used by the cascaded-operation demo.
Grid pulsar_17x17();

} // namespace optilock
