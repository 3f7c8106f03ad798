#include "opqkd/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "opqkd/tolerance.hpp"

namespace opqkd {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Ket Ket::from_amplitudes(std::vector<Complex> amps) {
  if (amps.size() < 2) throw std::invalid_argument("Ket: dimension must be at least 2");
  double norm2 = 0.0;
  for (const auto& z : amps) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("Ket: non-finite amplitude");
    }
    norm2 += std::norm(z);
  }
  if (!(norm2 > 0.0)) throw std::invalid_argument("Ket: zero vector");
  if (std::abs(norm2 - 1.0) > tol::kZero) {
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& z : amps) z *= scale;
  }
  return Ket(std::move(amps));
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("Ket::basis: index out of range");
  std::vector<Complex> amps(dim);
  amps[index] = 1.0;
  return from_amplitudes(std::move(amps));
}

Ket Ket::canonical_phase() const {
  auto it = std::find_if(amps_.begin(), amps_.end(),
                         [](const Complex& z) { return std::abs(z) > tol::kExact; });
  if (it == amps_.end()) return *this;
  if (it->imag() == 0.0 && it->real() >= 0.0) return *this;
  const Complex rot = std::conj(*it) / std::abs(*it);
  std::vector<Complex> out(amps_);
  for (auto& z : out) z *= rot;
  out[static_cast<std::size_t>(it - amps_.begin())] = std::abs(*it);
  return Ket(std::move(out));
}

MeasurementBasis::MeasurementBasis(std::vector<Ket> vectors) : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw std::invalid_argument("MeasurementBasis: empty");
  const std::size_t dim = vectors_.front().dim();
  if (vectors_.size() != dim) {
    throw std::invalid_argument("MeasurementBasis: need exactly dim vectors");
  }
  for (const auto& v : vectors_) require_same_dim(v.dim(), dim, "MeasurementBasis");
  if (gram_deviation(vectors_) >= tol::kExact) {
    throw std::invalid_argument("MeasurementBasis: vectors are not orthonormal");
  }
}

MeasurementBasis MeasurementBasis::computational(std::size_t dim) {
  std::vector<Ket> v;
  v.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) v.push_back(Ket::basis(dim, i));
  return MeasurementBasis(std::move(v));
}

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
  require_same_dim(x.size(), y.size(), "inner");
  Complex acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

Complex inner(const Ket& x, const Ket& y) { return inner(x.amplitudes(), y.amplitudes()); }

std::vector<Complex> tensor_amplitudes(std::span<const Complex> a,
                                       std::span<const Complex> b) {
  std::vector<Complex> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

Ket tensor(const Ket& a, const Ket& b) {
  return Ket::from_amplitudes(tensor_amplitudes(a.amplitudes(), b.amplitudes()));
}

std::vector<double> born_probabilities(const Ket& state, const MeasurementBasis& basis) {
  require_same_dim(state.dim(), basis.dim(), "born_probabilities");
  std::vector<double> p(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) p[i] = std::norm(inner(basis[i], state));
  return p;
}

Measurement projective_measure(const Ket& state, const MeasurementBasis& basis,
                               RngStream& rng) {
  const auto p = born_probabilities(state, basis);
  const std::size_t k = rng.sample(p);
  return {k, basis[k].canonical_phase()};
}

bool states_equivalent(const Ket& x, const Ket& y) {
  return std::abs(std::abs(inner(x, y)) - 1.0) < tol::kEquivalence;
}

bool states_orthogonal(const Ket& x, const Ket& y) {
  return std::abs(inner(x, y)) < tol::kEquivalence;
}

double gram_deviation(std::span<const Ket> vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i; j < vectors.size(); ++j) {
      const Complex g = inner(vectors[i], vectors[j]);
      const double dev = i == j ? std::abs(g - 1.0) : std::abs(g);
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace opqkd
