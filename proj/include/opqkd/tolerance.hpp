#pragma once

namespace opqkd::tol {

// Exactness checks at construction: normalization, orthogonality, unitarity.
inline constexpr double kExact = 1e-10;
// Pure-state identity / orthogonality comparisons.
inline constexpr double kEquivalence = 1e-9;
// Validation of assembled sets, where rounding accumulates with n.
inline constexpr double kValidation = 1e-9;
// Amplitudes below this are treated as structurally zero.
inline constexpr double kZero = 1e-14;

}  // namespace opqkd::tol
