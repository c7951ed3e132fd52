#pragma once

#include <utility>

#include "hpq/linalg.hpp"

namespace hpq {

/// Parameters of the log surrogate log(1 + |x|^q / p).
struct SurrogateParams {
  double p;
  double q;

  SurrogateParams(double p_, double q_);
};

enum class WeightKind { H, F };

/// Diagonal of one of the two IRLS weight matrices. H carries the
/// curvature weights (zero off the support); F is its reciprocal on the
/// support and zero elsewhere.
struct WeightDiagonal {
  Vector entries;
  WeightKind kind = WeightKind::H;
};

/// log(1 + |x|^q / p); even, increasing in |x|, zero at zero.
double h_value(double x, const SurrogateParams& params);

/// d/dx h at x > 0: q x^{q-1} / (p + x^q).
double h_derivative(double x, const SurrogateParams& params);

/// Sum of h_value over the entries.
double h_norm(const Vector& v, const SurrogateParams& params);

/// H and F diagonals at v. Entries with |v_i| <= zero_tol are treated as
/// exact zeros in both (keeps the IRLS support shrinking monotonically).
std::pair<WeightDiagonal, WeightDiagonal> weight_diagonals(
    const Vector& v, const SurrogateParams& params, double zero_tol);

/// Nonincreasing rearrangement: magnitudes sorted descending.
Vector rearrangement(const Vector& v);

}  // namespace hpq
