#include "quadfeat/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace quadfeat {

double beta_d(double d) {
  if (!(d >= 1.0)) throw std::invalid_argument("beta_d: d must be >= 1");
  const double dp1 = d + 1.0;
  // ln[(d^{-d/(d+1)} + d^{1/(d+1)}) 2^{(6d+1)/(d+1)} (d/(d+1))^{d/(d+1)}]
  // with the first factor rewritten d^{1/(d+1)} (1 + 1/d)
  const double log_sum = std::log(d) / dp1 + std::log1p(1.0 / d);
  const double log_pow2 = (6.0 * d + 1.0) / dp1 * std::numbers::ln2;
  const double log_ratio = d / dp1 * (std::log(d) - std::log(dp1));
  return std::exp(log_sum + log_pow2 + log_ratio);
}

namespace {

void check_common(const BoundInputs& b) {
  if (!(b.d >= 1.0)) throw std::invalid_argument("bound: d must be >= 1");
  if (!(b.eps > 0.0)) throw std::invalid_argument("bound: eps must be positive");
  if (!(b.delta > 0.0 && b.delta < 1.0))
    throw std::invalid_argument("bound: delta must be in (0, 1)");
  if (!(b.l > 0.0)) throw std::invalid_argument("bound: l must be positive");
  if (!(b.sigma_p > 0.0))
    throw std::invalid_argument("bound: sigma_p must be positive");
  if (!(b.kappa > 0.0)) throw std::invalid_argument("bound: kappa must be positive");
  if (!(b.mu > 0.0)) throw std::invalid_argument("bound: mu must be positive");
  if (!(b.M > 0.0)) throw std::invalid_argument("bound: M must be positive");
}

DRequirement ceil_requirement(double value) {
  DRequirement out;
  if (value <= 0.0) {
    out.vacuous = true;
    return out;
  }
  const double c = std::ceil(value);
  constexpr double kMax = 1.8446744073709552e19;  // 2^64
  out.D = c >= kMax ? std::numeric_limits<std::uint64_t>::max()
                    : static_cast<std::uint64_t>(c);
  return out;
}

}  // namespace

DRequirement required_D_quadrature(const BoundInputs& b) {
  check_common(b);
  const double d = b.d;
  const double bracket =
      2.0 / (1.0 + 1.0 / d) * std::log(b.sigma_p * b.l * b.kappa * b.mu / b.eps) +
      std::log(beta_d(d) / b.delta);
  if (bracket <= 0.0) return {0, true};
  const double coeff = 8.0 * b.M * b.M * (d + 1.0) / (b.eps * b.eps);
  return ceil_requirement(coeff * bracket);
}

DRequirement required_D_rff(const BoundInputs& b) {
  check_common(b);
  const double d = b.d;
  const double bracket = 2.0 / (1.0 + 1.0 / d) * std::log(b.sigma_p * b.l / b.eps) +
                         std::log(beta_d(d) / b.delta) +
                         d / (d + 1.0) * std::log((3.0 * d + 3.0) / (2.0 * d));
  if (bracket <= 0.0) return {0, true};
  const double coeff = 8.0 * (d + 1.0) / (b.eps * b.eps);
  return ceil_requirement(coeff * bracket);
}

DRequirement required_D_krr(const BoundInputs& b) {
  check_common(b);
  if (!(b.lambda0 > 0.0))
    throw std::invalid_argument("bound: lambda0 must be positive");
  if (b.sigma_y < 0.0)
    throw std::invalid_argument("bound: sigma_y must be nonnegative");
  if (b.sigma_y == 0.0) return {0, true};  // no labels, no constraint
  const double d = b.d;
  const double lam = b.lambda0;
  const double amplified = b.sigma_y * (lam + 1.0) / (lam * lam * b.eps);
  const double bracket =
      2.0 / (1.0 + 1.0 / d) *
          std::log(b.sigma_p * b.l * b.kappa * b.mu * amplified) +
      std::log(beta_d(d) / b.delta);
  if (bracket <= 0.0) return {0, true};
  const double coeff =
      8.0 * b.M * b.M * (d + 1.0) * b.sigma_y * b.sigma_y * (lam + 1.0) *
      (lam + 1.0) / (lam * lam * lam * lam * b.eps * b.eps);
  return ceil_requirement(coeff * bracket);
}

double variance_bound_sr33(int d, int n, double kappa) {
  if (d <= 2) throw std::invalid_argument("variance_bound_sr33: d must be > 2");
  if (n < 1) throw std::invalid_argument("variance_bound_sr33: n must be >= 1");
  if (!(kappa > 0.0))
    throw std::invalid_argument("variance_bound_sr33: kappa must be positive");
  const double k2 = kappa * kappa;
  return (2.0 + k2 * k2 + k2) / (static_cast<double>(n) * (d - 2.0));
}

}  // namespace quadfeat
