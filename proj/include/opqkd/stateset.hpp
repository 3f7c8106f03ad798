#pragma once

// Domino-tiled complete orthogonal product bases of the n x n joint space.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opqkd/qcore.hpp"

namespace opqkd {

/// Coefficients of the nine-state 3x3 family. Each consecutive pair
/// (a,b), (c,d), (e,f), (g,h) must have unit squared norm.
struct SetParameters {
  Complex a, b, c, d, e, f, g, h;

  /// Every coefficient 1/sqrt(2).
  static SetParameters uniform();
  /// a = c = e = g = 1 and the rest 0: every state is a computational product.
  static SetParameters computational();
  /// Throws std::invalid_argument unless the four pair norms are 1 within 1e-10.
  void validate() const;
};

/// A grid cell: (A basis index, B basis index).
struct Cell {
  int a;
  int b;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Orientation { row, column, singleton };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Straight run of cells hosting as many mutually orthogonal states as it has
/// cells. Row tiles fix the A index, column tiles fix the B index.
/// `amplitudes[k][l]` is the amplitude of hosted state `hosted[k]` on
/// `cells[l]` along the free subsystem.
struct Tile {
  Orientation orientation;
  int fixed_index;
  std::vector<Cell> cells;
  std::vector<int> hosted;
  std::vector<std::vector<Complex>> amplitudes;

  [[nodiscard]] std::size_t length() const { return cells.size(); }
};

/// Tiling of the n x n grid. `display_order[k]` is the grid position at which
/// basis index k is drawn (shared by both subsystems); rotational symmetry is
/// judged in grid positions.
struct DominoLayout {
  int n = 0;
  std::vector<Tile> tiles;
  std::vector<int> display_order;
};

struct ProductState {
  int index;
  Ket ket_a;
  Ket ket_b;
};

class StateSet {
 public:
  /// Builds the states hosted by `layout` and checks every set invariant:
  /// exact partition of the grid, tile-local unitarity, tile length < n,
  /// labels forming [0, n^2), and completeness of the joint basis.
  /// Throws InvalidSet on any violation.
  static StateSet from_layout(DominoLayout layout);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] std::span<const ProductState> states() const { return states_; }
  [[nodiscard]] const ProductState& operator[](std::size_t i) const { return states_[i]; }
  [[nodiscard]] const DominoLayout& layout() const { return layout_; }

  /// tensor(ket_a, ket_b) of state i.
  [[nodiscard]] Ket joint_state(std::size_t i) const;

 private:
  StateSet(int n, std::vector<ProductState> states, DominoLayout layout)
      : n_(n), states_(std::move(states)), layout_(std::move(layout)) {}

  int n_;
  std::vector<ProductState> states_;
  DominoLayout layout_;
};

/// The nine states of the 3x3 family, labels 0..8 in the family's order.
StateSet build_3x3(const SetParameters& params);

/// Pinwheel family for n >= 3. Throws UnsupportedDimension for n < 3.
StateSet build_symmetric(int n);

/// Length-(n-1) ring tile entries: discrete Fourier amplitudes
/// amps[k][l] = exp(2 pi i k l / L) / sqrt(L).
std::vector<std::vector<Complex>> fourier_amplitudes(std::size_t length);

struct StateCondition {
  int index;
  bool a_ok;  // some other A-part is neither identical nor orthogonal
  bool b_ok;
};

struct ConditionReport {
  std::vector<StateCondition> states;
  bool pass = false;
};

ConditionReport check_conditions(const StateSet& set);

bool is_four_fold_symmetric(const DominoLayout& layout);

/// The n^2-dimensional basis whose i-th vector is tensor(ket_a(i), ket_b(i)).
MeasurementBasis bob_basis(const StateSet& set);

/// Structural diagnostics used by the validate command.
struct SetDiagnostics {
  double gram_deviation;       // joint states, max-norm
  double tile_unitarity;       // worst tile, max-norm
  std::size_t max_tile_length; // non-singleton tiles
  bool partition_ok;
};

SetDiagnostics diagnose(const StateSet& set);

}  // namespace opqkd
