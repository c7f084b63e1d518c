#include "quadfeat/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quadfeat/rng.hpp"

namespace quadfeat {

int phi_components(Nonlinearity nl) { return nl == Nonlinearity::CosSin ? 2 : 1; }

KernelKind KernelKind::gaussian(double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("KernelKind::gaussian: gamma must be positive");
  return {Type::Gaussian, gamma};
}

KernelKind KernelKind::gaussian_for_dim(int d) {
  if (d < 1)
    throw std::invalid_argument("KernelKind::gaussian_for_dim: dim must be >= 1");
  return {Type::Gaussian, 1.0 / static_cast<double>(d)};
}

Nonlinearity KernelKind::nonlinearity() const {
  switch (type) {
    case Type::Gaussian: return Nonlinearity::CosSin;
    case Type::ArcCos0: return Nonlinearity::Heaviside;
    case Type::ArcCos1: return Nonlinearity::ReLU;
  }
  throw std::logic_error("KernelKind::nonlinearity: bad type");
}

const char* KernelKind::name() const {
  switch (type) {
    case Type::Gaussian: return "gaussian";
    case Type::ArcCos0: return "arccos0";
    case Type::ArcCos1: return "arccos1";
  }
  throw std::logic_error("KernelKind::name: bad type");
}

namespace {

double angle_between(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     double* nx_out, double* ny_out) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0)
    throw std::domain_error("arc-cosine kernel: inputs must be nonzero");
  const double c = std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
  *nx_out = nx;
  *ny_out = ny;
  return std::acos(c);
}

double heaviside(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? 0.0 : 0.5); }

}  // namespace

double kernel_exact(const KernelKind& k, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_exact: dimension mismatch");
  switch (k.type) {
    case KernelKind::Type::Gaussian:
      return std::exp(-k.gamma * (x - y).squaredNorm());
    case KernelKind::Type::ArcCos0: {
      double nx, ny;
      const double theta = angle_between(x, y, &nx, &ny);
      return 1.0 - theta / std::numbers::pi;
    }
    case KernelKind::Type::ArcCos1: {
      double nx, ny;
      const double theta = angle_between(x, y, &nx, &ny);
      return nx * ny / std::numbers::pi *
             (std::sin(theta) + (std::numbers::pi - theta) * std::cos(theta));
    }
  }
  throw std::logic_error("kernel_exact: bad type");
}

double integrand_at(const KernelKind& k, double ux, double uy) {
  switch (k.type) {
    case KernelKind::Type::Gaussian:
      return std::cos(std::sqrt(2.0 * k.gamma) * (ux - uy));
    case KernelKind::Type::ArcCos0:
      return 2.0 * heaviside(ux) * heaviside(uy);
    case KernelKind::Type::ArcCos1:
      return 2.0 * std::max(0.0, ux) * std::max(0.0, uy);
  }
  throw std::logic_error("integrand_at: bad type");
}

double integrand(const KernelKind& k, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  if (x.size() != y.size() || x.size() != w.size())
    throw std::invalid_argument("integrand: dimension mismatch");
  return integrand_at(k, w.dot(x), w.dot(y));
}

McEstimate mc_oracle(const KernelKind& k, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y, long samples,
                     std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("mc_oracle: samples must be >= 1");
  if (x.size() != y.size())
    throw std::invalid_argument("mc_oracle: dimension mismatch");
  Rng rng(seed);
  const auto d = x.size();
  Eigen::VectorXd w(d);
  double mean = 0.0;
  double m2 = 0.0;  // Welford
  for (long i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) w[j] = rng.gaussian();
    const double f = integrand_at(k, w.dot(x), w.dot(y));
    const double delta = f - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (f - mean);
  }
  McEstimate out;
  out.mean = mean;
  out.std_error =
      samples > 1
          ? std::sqrt(m2 / static_cast<double>(samples - 1) /
                      static_cast<double>(samples))
          : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace quadfeat
