#include "quadfeat/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "quadfeat/rng.hpp"

namespace quadfeat {

SRSample sample_sr33(int d, std::uint64_t seed, const OrthogonalSampler& q_source,
                     RhoMode mode) {
  if (d < 3) throw std::invalid_argument("sample_sr33: dim must be >= 3");
  SRSample s;
  s.dim = d;
  // rotation and radii on separate child streams; the sample's own seed
  // drives both so the q_source can be reused across samples
  const OrthogonalSampler qs{q_source.kind,
                             derive_seed(seed, seed_tag::kSrQ, q_source.seed)};
  s.q = qs.sample(d);
  Rng rng(derive_seed(seed, seed_tag::kSrRadii));

  const int nv = d + 1;
  const double ratio = static_cast<double>(d) / (static_cast<double>(d) + 1.0);
  s.rho.resize(nv);
  int attempts = 0;
  for (;;) {
    if (++attempts > 1000)
      throw std::runtime_error("sample_sr33: radius resampling did not accept");
    if (mode == RhoMode::PerVertex) {
      for (int j = 0; j < nv; ++j) s.rho[j] = rng.chi(d + 2);
    } else {
      s.rho.setConstant(rng.chi(d + 2));
    }
    double sum = 0.0;
    for (int j = 0; j < nv; ++j) sum += ratio / (s.rho[j] * s.rho[j]);
    if (sum <= 1.0) {
      s.a0 = std::sqrt(1.0 - sum);
      break;
    }
  }
  s.draws = attempts;
  const double base = std::sqrt(ratio / 2.0);
  s.a = base / s.rho.array();
  return s;
}

Eigen::MatrixXd sr33_directions(const SRSample& s) {
  const int d = s.dim;
  const SimplexVertices simplex(d);
  Eigen::MatrixXd dirs(d + 1, d);
  Eigen::VectorXd out(d);
  for (int j = 0; j <= d; ++j) {
    const Eigen::VectorXd v = simplex.vertex(j);
    op_apply(s.q, v.data(), out.data());
    dirs.row(j) = out.transpose();
  }
  return dirs;
}

double sr33_apply(const SRSample& s,
                  const std::function<double(const Eigen::VectorXd&)>& f) {
  const int d = s.dim;
  const double ratio = static_cast<double>(d) / (static_cast<double>(d) + 1.0);
  const Eigen::MatrixXd dirs = sr33_directions(s);
  double acc = s.a0 * s.a0 * f(Eigen::VectorXd::Zero(d));
  for (int j = 0; j <= d; ++j) {
    const double r = s.rho[j];
    const Eigen::VectorXd w = r * dirs.row(j).transpose();
    acc += ratio * (f(-w) + f(w)) / (2.0 * r * r);
  }
  return acc;
}

namespace {

// projections of x and y onto every rotated vertex direction, O(d log d)
// for a butterfly Q: one transpose apply then the simplex prefix sweep
void project_pair(const SRSample& s, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y, std::vector<double>& px,
                  std::vector<double>& py) {
  const int d = s.dim;
  thread_local std::vector<double> tx, ty;
  tx.resize(static_cast<std::size_t>(d));
  ty.resize(static_cast<std::size_t>(d));
  op_apply_transpose(s.q, x.data(), tx.data());
  op_apply_transpose(s.q, y.data(), ty.data());
  const SimplexVertices simplex(d);
  px.resize(static_cast<std::size_t>(d) + 1);
  py.resize(static_cast<std::size_t>(d) + 1);
  simplex.project(tx.data(), px.data());
  simplex.project(ty.data(), py.data());
}

}  // namespace

double sr33_estimate(const SRSample& s, const KernelKind& k,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != s.dim || y.size() != s.dim)
    throw std::invalid_argument("sr33_estimate: dimension mismatch");
  const int d = s.dim;
  const double ratio = static_cast<double>(d) / (static_cast<double>(d) + 1.0);
  thread_local std::vector<double> px, py;
  project_pair(s, x, y, px, py);
  double acc = s.a0 * s.a0 * integrand_at(k, 0.0, 0.0);
  for (int j = 0; j <= d; ++j) {
    const double r = s.rho[j];
    const double u = r * px[static_cast<std::size_t>(j)];
    const double v = r * py[static_cast<std::size_t>(j)];
    acc += ratio * (integrand_at(k, -u, -v) + integrand_at(k, u, v)) /
           (2.0 * r * r);
  }
  return acc;
}

double sr33_estimate_even(const SRSample& s, const KernelKind& k,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (k.type != KernelKind::Type::Gaussian)
    throw std::invalid_argument(
        "sr33_estimate_even: integrand must be even in w (Gaussian kernel)");
  if (x.size() != s.dim || y.size() != s.dim)
    throw std::invalid_argument("sr33_estimate_even: dimension mismatch");
  const int d = s.dim;
  const double ratio = static_cast<double>(d) / (static_cast<double>(d) + 1.0);
  thread_local std::vector<double> px, py;
  project_pair(s, x, y, px, py);
  double acc = s.a0 * s.a0 * integrand_at(k, 0.0, 0.0);
  for (int j = 0; j <= d; ++j) {
    const double r = s.rho[j];
    acc += ratio *
           integrand_at(k, r * px[static_cast<std::size_t>(j)],
                        r * py[static_cast<std::size_t>(j)]) /
           (r * r);
  }
  return acc;
}

double sr11_estimate(int d, std::uint64_t seed, const KernelKind& k,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != d || y.size() != d)
    throw std::invalid_argument("sr11_estimate: dimension mismatch");
  Rng rng(seed);
  double ux = 0.0;
  double uy = 0.0;
  for (int i = 0; i < d; ++i) {
    const double w = rng.gaussian();
    ux += w * x[i];
    uy += w * y[i];
  }
  return integrand_at(k, ux, uy);
}

FeatureMap::FeatureMap(KernelKind kernel, int d, int n,
                       std::vector<SRSample> blocks)
    : kernel_(kernel), d_(d), n_(n), samples_(std::move(blocks)), simplex_(d) {
  if (n_ < 1) throw std::invalid_argument("FeatureMap: need at least one block");
  if (static_cast<int>(samples_.size()) != n_)
    throw std::invalid_argument("FeatureMap: block count mismatch");
  for (const auto& s : samples_)
    if (s.dim != d_) throw std::invalid_argument("FeatureMap: block dim mismatch");
}

void FeatureMap::map_point(const double* x, double* out) const {
  const Nonlinearity nl = kernel_.nonlinearity();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_));
  // the integrand's factor 2 for the arc-cosine kernels splits as
  // sqrt(2) per feature factor
  const double kscale = nl == Nonlinearity::CosSin ? 1.0 : std::numbers::sqrt2;
  const double gauss_scale =
      nl == Nonlinearity::CosSin ? std::sqrt(2.0 * kernel_.gamma) : 1.0;
  const double phi0 = nl == Nonlinearity::Heaviside ? 0.5
                      : nl == Nonlinearity::CosSin ? 1.0
                                                   : 0.0;

  thread_local std::vector<double> tx, proj;
  tx.resize(static_cast<std::size_t>(d_));
  proj.resize(static_cast<std::size_t>(d_) + 1);

  std::size_t off = static_cast<std::size_t>(n_);
  for (int k = 0; k < n_; ++k) {
    const SRSample& s = samples_[static_cast<std::size_t>(k)];
    out[k] = s.a0 * phi0 * kscale * inv_sqrt_n;
    op_apply_transpose(s.q, x, tx.data());
    simplex_.project(tx.data(), proj.data());
    // + nodes for all vertices, then - nodes, matching the row stacking
    for (int sign = 0; sign < 2; ++sign) {
      const double sgn = sign == 0 ? 1.0 : -1.0;
      for (int j = 0; j <= d_; ++j) {
        const double w = s.a[j] * kscale * inv_sqrt_n;
        const double u = sgn * gauss_scale * s.rho[j] * proj[static_cast<std::size_t>(j)];
        switch (nl) {
          case Nonlinearity::CosSin:
            out[off++] = w * std::cos(u);
            out[off++] = w * std::sin(u);
            break;
          case Nonlinearity::Heaviside:
            out[off++] = w * (u > 0.0 ? 1.0 : (u < 0.0 ? 0.0 : 0.5));
            break;
          case Nonlinearity::ReLU:
            out[off++] = w * std::max(0.0, u);
            break;
        }
      }
    }
  }
}

Eigen::VectorXd FeatureMap::map_point(const Eigen::VectorXd& x) const {
  if (x.size() != d_)
    throw std::invalid_argument("FeatureMap::map_point: dimension mismatch");
  Eigen::VectorXd out(feature_dim());
  map_point(x.data(), out.data());
  return out;
}

Eigen::MatrixXd FeatureMap::map_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != d_)
    throw std::invalid_argument("FeatureMap::map_rows: dimension mismatch");
  Eigen::MatrixXd out(x.rows(), feature_dim());
  Eigen::VectorXd row(d_);
  Eigen::VectorXd mapped(feature_dim());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    map_point(row.data(), mapped.data());
    out.row(i) = mapped.transpose();
  }
  return out;
}

FeatureMap build_feature_map(const KernelKind& k, int d, int n,
                             std::uint64_t seed,
                             const OrthogonalSampler& q_source, RhoMode mode) {
  if (n < 1) throw std::invalid_argument("build_feature_map: n must be >= 1");
  std::vector<SRSample> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b)
    blocks.push_back(sample_sr33(
        d, derive_seed(seed, seed_tag::kFeatureBlock, static_cast<std::uint64_t>(b)),
        q_source, mode));
  return FeatureMap(k, d, n, std::move(blocks));
}

}  // namespace quadfeat
