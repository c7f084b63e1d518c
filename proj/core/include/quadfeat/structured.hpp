#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

namespace quadfeat {

// In-place Walsh-Hadamard transform, normalized so the operator is
// orthogonal: y = H x / sqrt(n).  n must be a power of two.
void fwht_normalized(double* x, int n);
Eigen::VectorXd fwht_normalized(Eigen::VectorXd x);

// Vertices of a regular simplex in R^d: d+1 unit vectors with pairwise
// dot products -1/d and zero sum.  Row m of every vertex below the
// diagonal shares one coefficient, so storage and projection are O(d):
//   v_j[m] = -off_[m]        for m < j
//   v_j[j] = diag_[j]        for j < d
//   v_j[m] = 0               for m > j
// and the last vertex is -off_ in full.
class SimplexVertices {
 public:
  explicit SimplexVertices(int d);

  int dim() const { return d_; }
  Eigen::VectorXd vertex(int j) const;
  Eigen::MatrixXd dense() const;  // (d+1) x d, row j = v_j

  // out[j] = v_j . z for all j, one O(d) sweep via the prefix sum
  // P_j = sum_{m<j} off_[m] z[m]:  v_j.z = diag_[j] z[j] - P_j.
  void project(const double* z, double* out) const;

 private:
  int d_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd off_;
};

// Orthogonal matrix assembled from log2(d) layers of paired Givens
// rotations.  apply() runs the layers directly in O(d log d) with O(d)
// stored angles; dense() multiplies out explicit per-layer matrices and
// exists as an independent path for testing.
//
// For d not a power of two the rule is: build the factors at the next
// power of two, drop trailing rows/columns, and replace any rotation
// whose partner index fell off the end by a passthrough coefficient 1.
// A single truncated matrix can have structurally deficient columns, so
// the sampled operator is a product of `replicates` truncated butterflies
// interleaved with uniform permutations; three replicates make every
// entry generically nonzero.  Power-of-two dims use one replicate and no
// permutation.
class ButterflyOrthogonal {
 public:
  ButterflyOrthogonal() = default;  // empty op; fill via sample()

  // Angles come from uniformly distributed points on the sphere S^{p-1}
  // (p = padded dim), decoded so that at the padded size each replicate's
  // first column equals its source point exactly.  Same (d, seed,
  // replicates) always rebuilds the same operator.
  static ButterflyOrthogonal sample(int d, std::uint64_t seed, int replicates = 3);

  int dim() const { return d_; }
  int padded_dim() const { return padded_; }
  int replicates() const { return static_cast<int>(angles_.size()); }

  void apply(const double* x, double* y) const;            // y = B x
  void apply_transpose(const double* x, double* y) const;  // y = B^T x
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd dense() const;

  // angle layout: entry i-1 holds the angle with 1-based index i; the
  // rotation covering block start p at half-width h reads index p+h
  const std::vector<std::vector<double>>& angle_sets() const { return angles_; }
  const std::vector<std::vector<int>>& permutations() const { return perms_; }

 private:
  void apply_factor(int r, double* x, double* scratch) const;
  void apply_factor_transpose(int r, double* x, double* scratch) const;

  int d_ = 0;
  int padded_ = 0;
  std::vector<std::vector<double>> angles_;  // one set per replicate, size padded-1
  std::vector<std::vector<int>> perms_;      // one per replicate; empty when unused
};

// Haar-distributed orthogonal matrix: QR of an iid Gaussian matrix with
// the sign ambiguity fixed by an independent Rademacher column flip.
Eigen::MatrixXd haar_qr_orthogonal(int d, std::uint64_t seed);

// Explicitly materialized orthogonal operator with the same call surface
// as ButterflyOrthogonal.
class DenseOrthogonal {
 public:
  explicit DenseOrthogonal(Eigen::MatrixXd m) : m_(std::move(m)) {}

  int dim() const { return static_cast<int>(m_.rows()); }
  void apply(const double* x, double* y) const;
  void apply_transpose(const double* x, double* y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const {
    return m_.transpose() * x;
  }
  const Eigen::MatrixXd& dense() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

using OrthogonalOp = std::variant<ButterflyOrthogonal, DenseOrthogonal>;

int op_dim(const OrthogonalOp& op);
void op_apply(const OrthogonalOp& op, const double* x, double* y);
void op_apply_transpose(const OrthogonalOp& op, const double* x, double* y);
Eigen::MatrixXd op_dense(const OrthogonalOp& op);

enum class QSource { Butterfly, HaarQr };

// Deterministic factory for the orthogonal blocks used by the quadrature
// rules: equal (kind, seed) gives bit-identical operators.
struct OrthogonalSampler {
  QSource kind = QSource::Butterfly;
  std::uint64_t seed = 0;

  OrthogonalOp sample(int d) const;
  OrthogonalSampler child(std::uint64_t index) const;
};

}  // namespace quadfeat
