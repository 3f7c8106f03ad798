#include "opqkd/stateset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "opqkd/errors.hpp"
#include "opqkd/tolerance.hpp"

namespace opqkd {

namespace {

Ket basis_superposition(int n, std::span<const int> indices, std::span<const Complex> amps) {
  std::vector<Complex> v(static_cast<std::size_t>(n));
  for (std::size_t l = 0; l < indices.size(); ++l) v[static_cast<std::size_t>(indices[l])] = amps[l];
  return Ket::from_amplitudes(std::move(v));
}

double unitarity_deviation(const std::vector<std::vector<Complex>>& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      Complex g{};
      for (std::size_t l = 0; l < m[i].size(); ++l) g += m[i][l] * std::conj(m[j][l]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// Joint Gram deviation using <Ai Bi|Aj Bj> = <Ai|Aj><Bi|Bj>.
double joint_gram_deviation(std::span<const ProductState> states) {
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i; j < states.size(); ++j) {
      const Complex g = inner(states[i].ket_a, states[j].ket_a) *
                        inner(states[i].ket_b, states[j].ket_b);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

void check_tile(const Tile& t, int n) {
  const std::size_t len = t.length();
  if (len == 0) throw InvalidSet("tile covers no cells");
  if (t.hosted.size() != len || t.amplitudes.size() != len) {
    throw InvalidSet("tile must host exactly one state per covered cell");
  }
  for (const auto& row : t.amplitudes) {
    if (row.size() != len) throw InvalidSet("tile amplitude row has wrong length");
  }
  for (const Cell& c : t.cells) {
    if (c.a < 0 || c.a >= n || c.b < 0 || c.b >= n) throw InvalidSet("tile cell out of range");
  }
  switch (t.orientation) {
    case Orientation::singleton:
      if (len != 1) throw InvalidSet("singleton tile must cover one cell");
      break;
    case Orientation::row:
      for (const Cell& c : t.cells) {
        if (c.a != t.fixed_index) throw InvalidSet("row tile cells must share the A index");
      }
      break;
    case Orientation::column:
      for (const Cell& c : t.cells) {
        if (c.b != t.fixed_index) throw InvalidSet("column tile cells must share the B index");
      }
      break;
  }
  if (len >= static_cast<std::size_t>(n)) {
    throw InvalidSet("tile covers a full grid line; such states are distinguishable");
  }
  if (unitarity_deviation(t.amplitudes) >= tol::kExact) {
    throw InvalidSet("tile amplitude matrix is not unitary");
  }
}

Tile pair_tile(Orientation o, int fixed, std::vector<Cell> cells, int first_label,
               Complex x, Complex y) {
  Tile t{o, fixed, std::move(cells), {first_label, first_label + 1}, {}};
  t.amplitudes = {{x, y}, {std::conj(y), -std::conj(x)}};
  return t;
}

DominoLayout three_by_three_layout(const SetParameters& p) {
  DominoLayout layout;
  layout.n = 3;
  // Basis |0> is drawn in the middle of the grid, which puts the singleton
  // at the centre and makes the four dominoes a pinwheel.
  layout.display_order = {1, 0, 2};
  layout.tiles.push_back(pair_tile(Orientation::row, 1, {{1, 1}, {1, 0}}, 0, p.a, p.b));
  layout.tiles.push_back(pair_tile(Orientation::column, 2, {{1, 2}, {0, 2}}, 2, p.c, p.d));
  layout.tiles.push_back(pair_tile(Orientation::row, 2, {{2, 0}, {2, 2}}, 4, p.e, p.f));
  layout.tiles.push_back(pair_tile(Orientation::column, 1, {{0, 1}, {2, 1}}, 6, p.g, p.h));
  layout.tiles.push_back(Tile{Orientation::singleton, 0, {{0, 0}}, {8}, {{1.0}}});
  return layout;
}

DominoLayout center_block_layout() {
  DominoLayout layout;
  layout.n = 2;
  layout.display_order = {0, 1};
  int label = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      layout.tiles.push_back(Tile{Orientation::singleton, a, {{a, b}}, {label++}, {{1.0}}});
    }
  }
  return layout;
}

// Shift `inner` one step toward the centre of an (inner.n + 2) grid and wrap
// it in four straight length-(n-1) tiles.
DominoLayout add_pinwheel_ring(const DominoLayout& inner) {
  const int n = inner.n + 2;
  DominoLayout out;
  out.n = n;
  out.display_order.resize(static_cast<std::size_t>(n));
  out.display_order.front() = 0;
  out.display_order.back() = n - 1;
  for (int k = 0; k < inner.n; ++k) {
    out.display_order[static_cast<std::size_t>(k + 1)] = inner.display_order[static_cast<std::size_t>(k)] + 1;
  }
  for (Tile t : inner.tiles) {
    t.fixed_index += 1;
    for (Cell& c : t.cells) {
      c.a += 1;
      c.b += 1;
    }
    out.tiles.push_back(std::move(t));
  }

  const auto len = static_cast<std::size_t>(n - 1);
  const auto amps = fourier_amplitudes(len);
  int label = inner.n * inner.n;
  auto ring_tile = [&](Orientation o, int fixed, auto cell_at) {
    Tile t{o, fixed, {}, {}, amps};
    for (std::size_t l = 0; l < len; ++l) {
      t.cells.push_back(cell_at(static_cast<int>(l)));
      t.hosted.push_back(label++);
    }
    out.tiles.push_back(std::move(t));
  };
  ring_tile(Orientation::row, 0, [](int l) { return Cell{0, l}; });
  ring_tile(Orientation::column, n - 1, [&](int l) { return Cell{l, n - 1}; });
  ring_tile(Orientation::row, n - 1, [&](int l) { return Cell{n - 1, l + 1}; });
  ring_tile(Orientation::column, 0, [](int l) { return Cell{l + 1, 0}; });
  return out;
}

}  // namespace

SetParameters SetParameters::uniform() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {r, r, r, r, r, r, r, r};
}

SetParameters SetParameters::computational() {
  return {1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
}

void SetParameters::validate() const {
  const std::array<std::pair<Complex, Complex>, 4> pairs{{{a, b}, {c, d}, {e, f}, {g, h}}};
  for (const auto& [x, y] : pairs) {
    if (!std::isfinite(std::abs(x)) || !std::isfinite(std::abs(y)) ||
        std::abs(std::norm(x) + std::norm(y) - 1.0) > tol::kExact) {
      throw std::invalid_argument("SetParameters: each coefficient pair must have unit norm");
    }
  }
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::row: return "row";
    case Orientation::column: return "column";
    case Orientation::singleton: return "singleton";
  }
  return "?";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "row") return Orientation::row;
  if (s == "column") return Orientation::column;
  if (s == "singleton") return Orientation::singleton;
  throw InvalidSet("unknown tile orientation '" + s + "'");
}

std::vector<std::vector<Complex>> fourier_amplitudes(std::size_t length) {
  std::vector<std::vector<Complex>> m(length, std::vector<Complex>(length));
  const double scale = 1.0 / std::sqrt(static_cast<double>(length));
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t l = 0; l < length; ++l) {
      // Reduce k*l mod L first so the angle stays in [0, 2 pi).
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % length) /
                           static_cast<double>(length);
      m[k][l] = std::polar(scale, angle);
    }
  }
  return m;
}

StateSet StateSet::from_layout(DominoLayout layout) {
  const int n = layout.n;
  if (n < 2) throw InvalidSet("layout dimension must be at least 2");
  const auto un = static_cast<std::size_t>(n);
  if (layout.display_order.empty()) {
    layout.display_order.resize(un);
    for (int k = 0; k < n; ++k) layout.display_order[static_cast<std::size_t>(k)] = k;
  }
  {
    auto order = layout.display_order;
    std::sort(order.begin(), order.end());
    for (int k = 0; k < n; ++k) {
      if (order.size() != un || order[static_cast<std::size_t>(k)] != k) {
        throw InvalidSet("display order must be a permutation of 0..n-1");
      }
    }
  }

  std::vector<int> coverage(un * un, 0);
  std::vector<int> label_seen(un * un, 0);
  std::vector<ProductState> states;
  states.reserve(un * un);
  for (const Tile& t : layout.tiles) {
    check_tile(t, n);
    std::vector<int> free_index;
    for (const Cell& c : t.cells) {
      ++coverage[static_cast<std::size_t>(c.a) * un + static_cast<std::size_t>(c.b)];
      free_index.push_back(t.orientation == Orientation::column ? c.a : c.b);
    }
    for (std::size_t k = 0; k < t.hosted.size(); ++k) {
      const int label = t.hosted[k];
      if (label < 0 || label >= n * n || label_seen[static_cast<std::size_t>(label)]++) {
        throw InvalidSet("state labels must be unique and in [0, n^2)");
      }
      const auto& amps = t.amplitudes[k];
      if (t.orientation == Orientation::column) {
        states.push_back({label, basis_superposition(n, free_index, amps),
                          Ket::basis(un, static_cast<std::size_t>(t.fixed_index))});
      } else {
        const int a = t.cells.front().a;
        states.push_back({label, Ket::basis(un, static_cast<std::size_t>(a)),
                          basis_superposition(n, free_index, amps)});
      }
    }
  }
  if (std::any_of(coverage.begin(), coverage.end(), [](int c) { return c != 1; })) {
    throw InvalidSet("tiles must cover every grid cell exactly once");
  }
  std::sort(states.begin(), states.end(),
            [](const ProductState& x, const ProductState& y) { return x.index < y.index; });
  if (joint_gram_deviation(states) >= tol::kValidation) {
    throw InvalidSet("joint states are not an orthonormal basis");
  }
  return StateSet(n, std::move(states), std::move(layout));
}

Ket StateSet::joint_state(std::size_t i) const {
  return tensor(states_[i].ket_a, states_[i].ket_b);
}

StateSet build_3x3(const SetParameters& params) {
  params.validate();
  return StateSet::from_layout(three_by_three_layout(params));
}

StateSet build_symmetric(int n) {
  if (n < 3) {
    throw UnsupportedDimension("no usable orthogonal product set exists for n = " +
                               std::to_string(n) + " (need n >= 3)");
  }
  DominoLayout layout = n % 2 == 1 ? three_by_three_layout(SetParameters::uniform())
                                   : center_block_layout();
  while (layout.n < n) layout = add_pinwheel_ring(layout);
  return StateSet::from_layout(std::move(layout));
}

ConditionReport check_conditions(const StateSet& set) {
  ConditionReport report;
  report.pass = true;
  const auto states = set.states();
  auto has_partner = [&](std::size_t i, auto part) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (j == i) continue;
      const Ket& x = part(states[i]);
      const Ket& y = part(states[j]);
      if (!states_equivalent(x, y) && !states_orthogonal(x, y)) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < states.size(); ++i) {
    StateCondition c{states[i].index,
                     has_partner(i, [](const ProductState& s) -> const Ket& { return s.ket_a; }),
                     has_partner(i, [](const ProductState& s) -> const Ket& { return s.ket_b; })};
    report.pass = report.pass && c.a_ok && c.b_ok;
    report.states.push_back(c);
  }
  return report;
}

bool is_four_fold_symmetric(const DominoLayout& layout) {
  const int n = layout.n;
  auto pos = [&](int k) {
    return layout.display_order.empty() ? k : layout.display_order[static_cast<std::size_t>(k)];
  };
  std::vector<std::vector<Cell>> shapes;
  std::vector<std::vector<Cell>> rotated;
  for (const Tile& t : layout.tiles) {
    std::vector<Cell> s;
    std::vector<Cell> r;
    for (const Cell& c : t.cells) {
      const Cell p{pos(c.a), pos(c.b)};
      s.push_back(p);
      r.push_back({p.b, n - 1 - p.a});
    }
    std::sort(s.begin(), s.end());
    std::sort(r.begin(), r.end());
    shapes.push_back(std::move(s));
    rotated.push_back(std::move(r));
  }
  std::sort(shapes.begin(), shapes.end());
  std::sort(rotated.begin(), rotated.end());
  return shapes == rotated;
}

MeasurementBasis bob_basis(const StateSet& set) {
  std::vector<Ket> v;
  v.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) v.push_back(set.joint_state(i));
  return MeasurementBasis(std::move(v));
}

SetDiagnostics diagnose(const StateSet& set) {
  SetDiagnostics d{};
  d.gram_deviation = joint_gram_deviation(set.states());
  const auto un = static_cast<std::size_t>(set.n());
  std::vector<int> coverage(un * un, 0);
  for (const Tile& t : set.layout().tiles) {
    d.tile_unitarity = std::max(d.tile_unitarity, unitarity_deviation(t.amplitudes));
    if (t.orientation != Orientation::singleton) {
      d.max_tile_length = std::max(d.max_tile_length, t.length());
    }
    for (const Cell& c : t.cells) {
      ++coverage[static_cast<std::size_t>(c.a) * un + static_cast<std::size_t>(c.b)];
    }
  }
  d.partition_ok = std::all_of(coverage.begin(), coverage.end(), [](int c) { return c == 1; });
  return d;
}

}  // namespace opqkd
