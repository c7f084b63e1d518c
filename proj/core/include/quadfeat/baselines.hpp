#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "quadfeat/kernels.hpp"

namespace quadfeat {

enum class BaselineKind { G, Gort, Rom, Qmc };

const char* baseline_name(BaselineKind kind);

// Halton points, coordinate j using the j-th prime as radical-inverse
// base, starting at index 1 + skip.  All entries lie strictly in (0,1).
Eigen::MatrixXd halton_sequence(int d, int count, long skip);

// Inverse standard-normal CDF, Acklam's rational approximation polished
// by one Halley step; |relative error| well under 1e-9 and identical on
// every platform, unlike library erf_inv.
double inverse_normal_cdf(double p);

// Feature map k(x,y) ~ (1/D) phi(Mx).phi(My) with M built per kind:
//   G     iid standard normal rows
//   Gort  stacked chi(d)-scaled Haar orthogonal blocks
//   Rom   sqrt(m) * S D1 S D2 S D3 per block (S = normalized Hadamard of
//         size m = d padded to a power of two, D_i random signs)
//   Qmc   Halton points through the inverse normal CDF
// Rom operates in the padded dimension (inputs zero-padded); every kind
// stacks independent blocks and truncates to exactly D rows.
class BaselineMap {
 public:
  BaselineMap(BaselineKind kind, KernelKind kernel, int d, int D,
              std::uint64_t seed);

  BaselineKind kind() const { return kind_; }
  const KernelKind& kernel() const { return kernel_; }
  int input_dim() const { return d_; }
  int rows() const { return D_; }
  int padded_dim() const { return padded_; }
  int feature_dim() const {
    return D_ * phi_components(kernel_.nonlinearity());
  }
  // the projection matrix; rows() x input_dim() (Rom: cols = padded_dim())
  const Eigen::MatrixXd& matrix() const { return m_; }

  void map_point(const double* x, double* out) const;
  Eigen::VectorXd map_point(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd map_rows(const Eigen::MatrixXd& x) const;

 private:
  BaselineKind kind_;
  KernelKind kernel_;
  int d_;
  int D_;
  int padded_;
  Eigen::MatrixXd m_;
};

BaselineMap build_baseline_map(BaselineKind kind, const KernelKind& kernel,
                               int d, int D, std::uint64_t seed);

}  // namespace quadfeat
