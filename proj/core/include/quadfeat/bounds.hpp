#pragma once

#include <cstdint>

namespace quadfeat {

// Dimension constant of the uniform-error probability bound; evaluated in
// log-space, finite and positive for all d >= 1, maximal at d = 86
// (about 64.74) with limit 64.
double beta_d(double d);

struct BoundInputs {
  double d = 1.0;        // input dimension
  double eps = 0.1;      // target uniform error
  double delta = 0.05;   // failure probability
  double l = 1.0;        // diameter of the data domain
  double sigma_p = 1.0;  // kernel spectral scale
  double kappa = 1.0;    // sup |phi|
  double mu = 1.0;       // sup |phi'|
  double M = 0.5;        // sup |(1 - f_xy(rho z))/rho^2|
  double lambda0 = 1.0;  // regularization ratio lambda/n
  double sigma_y = 1.0;  // label scale sqrt(mean y^2)
};

// A feature-count requirement.  vacuous means the probability bound holds
// for every D (log bracket nonpositive, or degenerate inputs), so no
// constraint is imposed and D is 0.
struct DRequirement {
  std::uint64_t D = 0;
  bool vacuous = false;
};

// Smallest D certifying sup-error <= eps with probability >= 1-delta for
// the quadrature features:
//   D >= (8 M^2 (d+1)/eps^2) [ (2/(1+1/d)) ln(sigma_p l kappa mu / eps)
//                              + ln(beta_d / delta) ].
DRequirement required_D_quadrature(const BoundInputs& b);

// The matching guarantee for classic random Fourier features:
//   D >= (8 (d+1)/eps^2) [ (2/(1+1/d)) ln(sigma_p l / eps)
//         + ln(beta_d / delta) + (d/(d+1)) ln((3d+3)/(2d)) ].
DRequirement required_D_rff(const BoundInputs& b);

// Downstream kernel-ridge-regression guarantee:
//   D >= 8 M^2 (d+1) sigma_y^2 ((lambda0+1)/(lambda0^2 eps))^2
//        [ (2/(1+1/d)) ln(sigma_y sigma_p l kappa mu (lambda0+1)
//                          / (lambda0^2 eps)) + ln(beta_d / delta) ].
DRequirement required_D_krr(const BoundInputs& b);

// Variance of the n-sample average of degree-(3,3) stochastic
// spherical-radial estimates: <= (2 + kappa^4 + kappa^2)/(n (d-2)).
double variance_bound_sr33(int d, int n, double kappa);

}  // namespace quadfeat
