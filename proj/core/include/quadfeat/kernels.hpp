#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace quadfeat {

// Pointwise feature nonlinearity paired with each kernel.  CosSin emits
// two components per projection; the others one.
enum class Nonlinearity { CosSin, Heaviside, ReLU };

int phi_components(Nonlinearity nl);

struct KernelKind {
  enum class Type { Gaussian, ArcCos0, ArcCos1 };

  Type type = Type::Gaussian;
  double gamma = 1.0;  // Gaussian only

  static KernelKind gaussian(double gamma);
  static KernelKind gaussian_for_dim(int d);  // default bandwidth gamma = 1/d
  static KernelKind arccos0() { return {Type::ArcCos0, 0.0}; }
  static KernelKind arccos1() { return {Type::ArcCos1, 0.0}; }

  Nonlinearity nonlinearity() const;
  const char* name() const;
};

// k(x, y) in closed form.  The arc-cosine kernels need nonzero inputs;
// the angle argument is clamped to [-1, 1] before acos.
double kernel_exact(const KernelKind& k, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

// Integrand value given only the two projections ux = w.x and uy = w.y
// (every supported kernel's integrand factors through them).  For the
// Gaussian the bandwidth enters here as the sqrt(2 gamma) input scale.
double integrand_at(const KernelKind& k, double ux, double uy);

// f(w; x, y) with E_{w ~ N(0,I)} f = k(x, y)
double integrand(const KernelKind& k, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y, const Eigen::VectorXd& w);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Plain Monte Carlo over w ~ N(0, I): the reference every quadrature
// estimate is judged against.  std_error is the sample standard error
// (infinite when samples == 1).
McEstimate mc_oracle(const KernelKind& k, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y, long samples,
                     std::uint64_t seed);

}  // namespace quadfeat
