#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "quadfeat/kernels.hpp"
#include "quadfeat/structured.hpp"

namespace quadfeat {

// Radius law for one stochastic spherical-radial sample: the default draws
// one chi(d+2) radius per simplex vertex; Shared uses a single radius for
// all vertices (A/B switch, not the default).
enum class RhoMode { PerVertex, Shared };

// One degree-(3,3) stochastic spherical-radial sample: an orthogonal
// rotation Q, d+1 radii, and the node weights they induce.  The origin
// weight satisfies a0^2 + sum_j d/((d+1) rho_j^2) = 1; the radius vector
// is redrawn whole until a0^2 >= 0.
struct SRSample {
  int dim = 0;
  OrthogonalOp q;
  Eigen::VectorXd rho;  // d+1 entries
  double a0 = 0.0;
  Eigen::VectorXd a;    // a_j = sqrt(d/(2(d+1))) / rho_j
  int draws = 0;        // radius vectors drawn until acceptance
};

// d >= 3: below that the radius law's inverse moments diverge and the
// variance analysis breaks down.
SRSample sample_sr33(int d, std::uint64_t seed, const OrthogonalSampler& q_source,
                     RhoMode mode = RhoMode::PerVertex);

// Rotated vertex directions Q v_j as rows of a (d+1) x d matrix.
Eigen::MatrixXd sr33_directions(const SRSample& s);

// The rule applied to an arbitrary integrand:
//   (1 - sum_j d/((d+1) rho_j^2)) f(0)
//     + d/(d+1) * sum_j [f(-rho_j Q v_j) + f(rho_j Q v_j)] / (2 rho_j^2).
// Exact for every polynomial of total degree <= 3 under the standard
// Gaussian weight, for every accepted sample.
double sr33_apply(const SRSample& s,
                  const std::function<double(const Eigen::VectorXd&)>& f);

// Kernel-integrand specializations; O(d log d + d) per call with a
// butterfly Q because the integrand only needs scalar projections.
double sr33_estimate(const SRSample& s, const KernelKind& k,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Reduced even-integrand form: sums the +rho_j Q v_j nodes only.  Only
// valid when the integrand is even in w (Gaussian kernel).
double sr33_estimate_even(const SRSample& s, const KernelKind& k,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Degree-(1,1) rule: a single standard-normal node, i.e. one Monte Carlo
// draw of the integrand.
double sr11_estimate(int d, std::uint64_t seed, const KernelKind& k,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Explicit feature map stacking n independent SR samples.
//
// Accounted feature dimension: D = 2n(d+1) + 1.  Scalar storage differs:
// the map emits one slot-group of n per-block constants (slots 0..n-1,
// block k's constant is a0_k phi(0) / sqrt(n)), then per block 2(d+1)
// projection nodes (+rho_j then -rho_j order) with phi_components(phi)
// scalars per node, everything carrying the global 1/sqrt(n).  With that
// layout psi(x).psi(y) equals the average over blocks of the SR rule
// value exactly.
class FeatureMap {
 public:
  FeatureMap(KernelKind kernel, int d, int n, std::vector<SRSample> blocks);

  const KernelKind& kernel() const { return kernel_; }
  int input_dim() const { return d_; }
  int blocks() const { return n_; }
  int accounted_dim() const { return 2 * n_ * (d_ + 1) + 1; }
  int feature_dim() const {
    return n_ + 2 * n_ * (d_ + 1) * phi_components(kernel_.nonlinearity());
  }
  const SRSample& block(int k) const { return samples_[static_cast<std::size_t>(k)]; }

  void map_point(const double* x, double* out) const;
  Eigen::VectorXd map_point(const Eigen::VectorXd& x) const;

  // rows of X mapped to rows of the result; NxD for N input rows
  Eigen::MatrixXd map_rows(const Eigen::MatrixXd& x) const;

 private:
  KernelKind kernel_;
  int d_;
  int n_;
  std::vector<SRSample> samples_;
  SimplexVertices simplex_;
};

FeatureMap build_feature_map(const KernelKind& k, int d, int n,
                             std::uint64_t seed,
                             const OrthogonalSampler& q_source,
                             RhoMode mode = RhoMode::PerVertex);

}  // namespace quadfeat
