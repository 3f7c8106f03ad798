#pragma once

// Small-dimension pure-state algebra and projective measurement.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "opqkd/rng.hpp"

namespace opqkd {

using Complex = std::complex<double>;

/// Normalized pure state of one (or a joint) system, dim >= 2.
class Ket {
 public:
  /// Normalizes `amps`. Throws std::invalid_argument for dim < 2, non-finite
  /// components, or a zero vector.
  static Ket from_amplitudes(std::vector<Complex> amps);
  /// Computational basis state |index> of dimension `dim`.
  static Ket basis(std::size_t dim, std::size_t index);

  [[nodiscard]] std::size_t dim() const { return amps_.size(); }
  [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
  [[nodiscard]] const Complex& operator[](std::size_t i) const { return amps_[i]; }

  /// Same ray with the first nonzero amplitude made real and nonnegative.
  [[nodiscard]] Ket canonical_phase() const;

 private:
  explicit Ket(std::vector<Complex> amps) : amps_(std::move(amps)) {}
  std::vector<Complex> amps_;
};

/// Orthonormal complete basis; construction verifies the Gram matrix.
class MeasurementBasis {
 public:
  /// Throws std::invalid_argument if the vectors are not `dim` orthonormal
  /// kets of a common dimension (Gram max-norm deviation >= 1e-10).
  explicit MeasurementBasis(std::vector<Ket> vectors);
  static MeasurementBasis computational(std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return vectors_.size(); }
  [[nodiscard]] const Ket& operator[](std::size_t i) const { return vectors_[i]; }
  [[nodiscard]] std::span<const Ket> vectors() const { return vectors_; }

 private:
  std::vector<Ket> vectors_;
};

struct Measurement {
  std::size_t outcome;
  Ket collapsed;
};

/// <x|y>, conjugate-linear in x.
Complex inner(const Ket& x, const Ket& y);
Complex inner(std::span<const Complex> x, std::span<const Complex> y);

/// Raw Kronecker product, A index major. Bilinear; no normalization.
std::vector<Complex> tensor_amplitudes(std::span<const Complex> a,
                                       std::span<const Complex> b);
Ket tensor(const Ket& a, const Ket& b);

std::vector<double> born_probabilities(const Ket& state, const MeasurementBasis& basis);

Measurement projective_measure(const Ket& state, const MeasurementBasis& basis,
                               RngStream& rng);

bool states_equivalent(const Ket& x, const Ket& y);
bool states_orthogonal(const Ket& x, const Ket& y);

/// Max-norm deviation of the Gram matrix of `vectors` from the identity.
double gram_deviation(std::span<const Ket> vectors);

}  // namespace opqkd
