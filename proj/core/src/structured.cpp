#include "quadfeat/structured.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadfeat/rng.hpp"

namespace quadfeat {

void fwht_normalized(double* x, int n) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fwht_normalized: length must be a power of two");
  for (int h = 1; h < n; h <<= 1) {
    for (int p = 0; p < n; p += 2 * h) {
      for (int i = p; i < p + h; ++i) {
        const double a = x[i];
        const double b = x[i + h];
        x[i] = a + b;
        x[i + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) x[i] *= scale;
}

Eigen::VectorXd fwht_normalized(Eigen::VectorXd x) {
  fwht_normalized(x.data(), static_cast<int>(x.size()));
  return x;
}

SimplexVertices::SimplexVertices(int d) : d_(d), diag_(d), off_(d) {
  if (d < 1) throw std::invalid_argument("SimplexVertices: dim must be >= 1");
  double s = 1.0;  // running prefix product S_m, S_0 = 1
  for (int m = 0; m < d; ++m) {
    const double dm = static_cast<double>(d - m);
    diag_[m] = s;
    off_[m] = s / dm;
    s *= std::sqrt(1.0 - 1.0 / (dm * dm));
  }
}

Eigen::VectorXd SimplexVertices::vertex(int j) const {
  if (j < 0 || j > d_) throw std::out_of_range("SimplexVertices::vertex");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
  for (int m = 0; m < j && m < d_; ++m) v[m] = -off_[m];
  if (j < d_) v[j] = diag_[j];
  return v;
}

Eigen::MatrixXd SimplexVertices::dense() const {
  Eigen::MatrixXd m(d_ + 1, d_);
  for (int j = 0; j <= d_; ++j) m.row(j) = vertex(j).transpose();
  return m;
}

void SimplexVertices::project(const double* z, double* out) const {
  double prefix = 0.0;  // sum_{m<j} off_[m] z[m]
  for (int j = 0; j < d_; ++j) {
    out[j] = diag_[j] * z[j] - prefix;
    prefix += off_[j] * z[j];
  }
  out[d_] = -prefix;
}

namespace {

int next_pow2(int d) {
  int p = 1;
  while (p < d) p <<= 1;
  return p;
}

// Decodes a unit vector u in R^size into the size-1 rotation angles of a
// butterfly whose first column reproduces u.  Internal nodes compare the
// norms of the two halves (angle in [0, pi/2]); the leaf pair keeps the
// signs (angle in (-pi, pi]).  Angle with 1-based index i lands in
// angles[i-1].  Returns the norm of u[p..p+size).
double extract_angles(const double* u, int p, int size, double* angles) {
  const int h = size / 2;
  if (size == 2) {
    angles[p] = std::atan2(u[p + 1], u[p]);
    return std::hypot(u[p], u[p + 1]);
  }
  const double top = extract_angles(u, p, h, angles);
  const double bottom = extract_angles(u, p + h, h, angles);
  angles[p + h - 1] = std::atan2(bottom, top);
  return std::hypot(top, bottom);
}

std::vector<double> sphere_point(int n, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (;;) {
    double norm2 = 0.0;
    for (auto& e : u) {
      e = rng.gaussian();
      norm2 += e * e;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& e : u) e *= inv;
      return u;
    }
  }
}

}  // namespace

ButterflyOrthogonal ButterflyOrthogonal::sample(int d, std::uint64_t seed,
                                                int replicates) {
  if (d < 1) throw std::invalid_argument("ButterflyOrthogonal: dim must be >= 1");
  if (replicates < 1)
    throw std::invalid_argument("ButterflyOrthogonal: replicates must be >= 1");
  ButterflyOrthogonal b;
  b.d_ = d;
  b.padded_ = next_pow2(d);
  const bool exact = (b.padded_ == d);
  const int t = exact ? 1 : replicates;
  for (int r = 0; r < t; ++r) {
    Rng rng(derive_seed(seed, seed_tag::kButterflyAngles,
                        static_cast<std::uint64_t>(r)));
    std::vector<double> angles(static_cast<std::size_t>(b.padded_ - 1));
    if (b.padded_ >= 2) {
      const std::vector<double> u = sphere_point(b.padded_, rng);
      extract_angles(u.data(), 0, b.padded_, angles.data());
    }
    b.angles_.push_back(std::move(angles));
  }
  if (!exact) {
    for (int r = 0; r < t; ++r) {
      Rng rng(derive_seed(seed, seed_tag::kButterflyPerm,
                          static_cast<std::uint64_t>(r)));
      b.perms_.push_back(rng.permutation(d));
    }
  }
  return b;
}

// One truncated butterfly factor, coarsest layer first.  A pair whose
// high index fell off the end passes through unchanged; high indices are
// monotone within a block, so the inner loop can stop at the first miss.
void ButterflyOrthogonal::apply_factor(int r, double* x, double* /*scratch*/) const {
  const auto& ang = angles_[static_cast<std::size_t>(r)];
  for (int h = padded_ / 2; h >= 1; h >>= 1) {
    for (int p = 0; p < d_; p += 2 * h) {
      const double th = ang[static_cast<std::size_t>(p + h - 1)];
      const double c = std::cos(th);
      const double s = std::sin(th);
      const int top = std::min(h, d_ - p);
      for (int i = 0; i < top; ++i) {
        const int a = p + i;
        const int bidx = p + h + i;
        if (bidx >= d_) break;
        const double xa = x[a];
        const double xb = x[bidx];
        x[a] = c * xa - s * xb;
        x[bidx] = s * xa + c * xb;
      }
    }
  }
}

void ButterflyOrthogonal::apply_factor_transpose(int r, double* x,
                                                 double* /*scratch*/) const {
  const auto& ang = angles_[static_cast<std::size_t>(r)];
  for (int h = 1; h <= padded_ / 2; h <<= 1) {
    for (int p = 0; p < d_; p += 2 * h) {
      const double th = ang[static_cast<std::size_t>(p + h - 1)];
      const double c = std::cos(th);
      const double s = std::sin(th);
      const int top = std::min(h, d_ - p);
      for (int i = 0; i < top; ++i) {
        const int a = p + i;
        const int bidx = p + h + i;
        if (bidx >= d_) break;
        const double xa = x[a];
        const double xb = x[bidx];
        x[a] = c * xa + s * xb;
        x[bidx] = -s * xa + c * xb;
      }
    }
  }
}

void ButterflyOrthogonal::apply(const double* x, double* y) const {
  std::copy(x, x + d_, y);
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(d_));
  for (int r = replicates() - 1; r >= 0; --r) {
    if (!perms_.empty()) {
      const auto& p = perms_[static_cast<std::size_t>(r)];
      for (int i = 0; i < d_; ++i)
        scratch[static_cast<std::size_t>(i)] = y[p[static_cast<std::size_t>(i)]];
      std::copy(scratch.begin(), scratch.begin() + d_, y);
    }
    apply_factor(r, y, scratch.data());
  }
}

void ButterflyOrthogonal::apply_transpose(const double* x, double* y) const {
  std::copy(x, x + d_, y);
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(d_));
  for (int r = 0; r < replicates(); ++r) {
    apply_factor_transpose(r, y, scratch.data());
    if (!perms_.empty()) {
      const auto& p = perms_[static_cast<std::size_t>(r)];
      for (int i = 0; i < d_; ++i)
        scratch[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = y[i];
      std::copy(scratch.begin(), scratch.begin() + d_, y);
    }
  }
}

Eigen::VectorXd ButterflyOrthogonal::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(d_);
  apply(x.data(), y.data());
  return y;
}

Eigen::VectorXd ButterflyOrthogonal::apply_transpose(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(d_);
  apply_transpose(x.data(), y.data());
  return y;
}

Eigen::MatrixXd ButterflyOrthogonal::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d_, d_);
  for (int r = replicates() - 1; r >= 0; --r) {
    if (!perms_.empty()) {
      const auto& perm = perms_[static_cast<std::size_t>(r)];
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d_, d_);
      for (int i = 0; i < d_; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
      m = p * m;
    }
    const auto& ang = angles_[static_cast<std::size_t>(r)];
    for (int h = padded_ / 2; h >= 1; h >>= 1) {
      Eigen::MatrixXd layer = Eigen::MatrixXd::Identity(d_, d_);
      for (int p = 0; p < d_; p += 2 * h) {
        const double th = ang[static_cast<std::size_t>(p + h - 1)];
        const double c = std::cos(th);
        const double s = std::sin(th);
        for (int i = 0; i < h && p + i < d_; ++i) {
          const int a = p + i;
          const int bidx = p + h + i;
          if (bidx >= d_) break;
          layer(a, a) = c;
          layer(a, bidx) = -s;
          layer(bidx, a) = s;
          layer(bidx, bidx) = c;
        }
      }
      m = layer * m;
    }
  }
  return m;
}

Eigen::MatrixXd haar_qr_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("haar_qr_orthogonal: dim must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)  // row-major fill
    for (int j = 0; j < d; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  // independent column sign flips remove the factorization's sign bias
  for (int j = 0; j < d; ++j)
    if (rng.next_u64() & 1) q.col(j) = -q.col(j);
  return q;
}

void DenseOrthogonal::apply(const double* x, double* y) const {
  Eigen::Map<const Eigen::VectorXd> xv(x, m_.cols());
  Eigen::Map<Eigen::VectorXd> yv(y, m_.rows());
  yv.noalias() = m_ * xv;
}

void DenseOrthogonal::apply_transpose(const double* x, double* y) const {
  Eigen::Map<const Eigen::VectorXd> xv(x, m_.rows());
  Eigen::Map<Eigen::VectorXd> yv(y, m_.cols());
  yv.noalias() = m_.transpose() * xv;
}

int op_dim(const OrthogonalOp& op) {
  return std::visit([](const auto& o) { return o.dim(); }, op);
}

void op_apply(const OrthogonalOp& op, const double* x, double* y) {
  std::visit([&](const auto& o) { o.apply(x, y); }, op);
}

void op_apply_transpose(const OrthogonalOp& op, const double* x, double* y) {
  std::visit([&](const auto& o) { o.apply_transpose(x, y); }, op);
}

Eigen::MatrixXd op_dense(const OrthogonalOp& op) {
  return std::visit([](const auto& o) -> Eigen::MatrixXd { return o.dense(); }, op);
}

OrthogonalOp OrthogonalSampler::sample(int d) const {
  if (kind == QSource::Butterfly) return ButterflyOrthogonal::sample(d, seed);
  return DenseOrthogonal(haar_qr_orthogonal(d, seed));
}

OrthogonalSampler OrthogonalSampler::child(std::uint64_t index) const {
  return {kind, derive_seed(seed, seed_tag::kOrthoChild, index)};
}

}  // namespace quadfeat
