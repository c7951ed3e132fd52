#include "hpq/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "hpq/error.hpp"

namespace hpq {

SurrogateParams::SurrogateParams(double p_, double q_) : p(p_), q(q_) {
  require(std::isfinite(p) && p > 0.0, ErrorCode::OutOfRange, "surrogate: p must be > 0");
  require(std::isfinite(q) && q > 0.0 && q <= 1.0, ErrorCode::OutOfRange,
          "surrogate: q must be in (0, 1]");
}

double h_value(double x, const SurrogateParams& params) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  return std::log1p(std::pow(ax, params.q) / params.p);
}

double h_derivative(double x, const SurrogateParams& params) {
  const double xq = std::pow(x, params.q);
  return params.q * xq / (x * (params.p + xq));
}

double h_norm(const Vector& v, const SurrogateParams& params) {
  double s = 0.0;
  for (double x : v) s += h_value(x, params);
  return s;
}

std::pair<WeightDiagonal, WeightDiagonal> weight_diagonals(
    const Vector& v, const SurrogateParams& params, double zero_tol) {
  WeightDiagonal H{Vector(v.size(), 0.0), WeightKind::H};
  WeightDiagonal F{Vector(v.size(), 0.0), WeightKind::F};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double ax = std::abs(v[i]);
    if (ax <= zero_tol) continue;
    // h'(|x|)/|x| = q / (|x|^{2-q} (p + |x|^q))
    const double xq = std::pow(ax, params.q);
    const double h = params.q / (ax * ax / xq * (params.p + xq));
    H.entries[i] = h;
    F.entries[i] = 1.0 / h;
  }
  return {std::move(H), std::move(F)};
}

Vector rearrangement(const Vector& v) {
  Vector mu(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mu[i] = std::abs(v[i]);
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  return mu;
}

}  // namespace hpq
