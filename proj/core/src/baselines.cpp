#include "quadfeat/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quadfeat/rng.hpp"
#include "quadfeat/structured.hpp"

namespace quadfeat {

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::G: return "g";
    case BaselineKind::Gort: return "gort";
    case BaselineKind::Rom: return "rom";
    case BaselineKind::Qmc: return "qmc";
  }
  throw std::logic_error("baseline_name: bad kind");
}

namespace {

constexpr int kHaltonPrimes[64] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
    43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
    103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
    173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(long i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

int next_pow2(int d) {
  int p = 1;
  while (p < d) p <<= 1;
  return p;
}

}  // namespace

Eigen::MatrixXd halton_sequence(int d, int count, long skip) {
  if (d < 1 || d > 64)
    throw std::invalid_argument("halton_sequence: dim must be in [1, 64]");
  if (count < 0 || skip < 0)
    throw std::invalid_argument("halton_sequence: count and skip must be >= 0");
  Eigen::MatrixXd h(count, d);
  for (int r = 0; r < count; ++r) {
    const long index = skip + r + 1;  // index 0 would give the all-zero point
    for (int j = 0; j < d; ++j)
      h(r, j) = radical_inverse(index, kHaltonPrimes[j]);
  }
  return h;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must be in (0, 1)");
  // Acklam's coefficients
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // one Halley step against erfc pins the relative error near 1e-15
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

BaselineMap::BaselineMap(BaselineKind kind, KernelKind kernel, int d, int D,
                         std::uint64_t seed)
    : kind_(kind), kernel_(kernel), d_(d), D_(D) {
  if (d < 1) throw std::invalid_argument("BaselineMap: dim must be >= 1");
  if (D < 1) throw std::invalid_argument("BaselineMap: D must be >= 1");
  padded_ = kind == BaselineKind::Rom ? next_pow2(d) : d;

  switch (kind) {
    case BaselineKind::G: {
      Rng rng(derive_seed(seed, seed_tag::kBaselineBlock, 0ULL));
      m_.resize(D, d);
      for (int i = 0; i < D; ++i)  // row-major fill
        for (int j = 0; j < d; ++j) m_(i, j) = rng.gaussian();
      break;
    }
    case BaselineKind::Gort: {
      m_.resize(D, d);
      const int nblocks = (D + d - 1) / d;
      int row = 0;
      for (int blk = 0; blk < nblocks; ++blk) {
        const Eigen::MatrixXd q = haar_qr_orthogonal(
            d, derive_seed(seed, seed_tag::kBaselineBlock, static_cast<std::uint64_t>(blk), 0ULL));
        Rng rng(derive_seed(seed, seed_tag::kBaselineBlock,
                            static_cast<std::uint64_t>(blk), 1ULL));
        for (int i = 0; i < d && row < D; ++i, ++row)
          m_.row(row) = rng.chi(d) * q.row(i);
      }
      break;
    }
    case BaselineKind::Rom: {
      const int m = padded_;
      m_.resize(D, m);
      const int nblocks = (D + m - 1) / m;
      const double scale = std::sqrt(static_cast<double>(m));
      Eigen::VectorXd col(m);
      int row = 0;
      for (int blk = 0; blk < nblocks; ++blk) {
        Rng rng(derive_seed(seed, seed_tag::kBaselineBlock,
                            static_cast<std::uint64_t>(blk)));
        // sign diagonals drawn in application order D1, D2, D3
        Eigen::VectorXd signs[3];
        for (auto& s : signs) {
          s.resize(m);
          for (int i = 0; i < m; ++i) s[i] = (rng.next_u64() & 1) ? 1.0 : -1.0;
        }
        Eigen::MatrixXd block(m, m);
        for (int j = 0; j < m; ++j) {
          col.setZero();
          col[j] = 1.0;
          // sqrt(m) * S D1 S D2 S D3 e_j with S = normalized Hadamard
          for (int f = 2; f >= 0; --f) {
            col.array() *= signs[f].array();
            fwht_normalized(col.data(), m);
          }
          block.col(j) = scale * col;
        }
        const int take = std::min(m, D - row);
        m_.middleRows(row, take) = block.topRows(take);
        row += take;
      }
      break;
    }
    case BaselineKind::Qmc: {
      const Eigen::MatrixXd h = halton_sequence(d, D, 100);
      m_.resize(D, d);
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < d; ++j) m_(i, j) = inverse_normal_cdf(h(i, j));
      break;
    }
  }
}

void BaselineMap::map_point(const double* x, double* out) const {
  thread_local Eigen::VectorXd xp, u;
  if (kind_ == BaselineKind::Rom) {
    xp.setZero(padded_);
    for (int i = 0; i < d_; ++i) xp[i] = x[i];
    u.noalias() = m_ * xp;
  } else {
    Eigen::Map<const Eigen::VectorXd> xv(x, d_);
    u.noalias() = m_ * xv;
  }
  const Nonlinearity nl = kernel_.nonlinearity();
  const double inv = 1.0 / std::sqrt(static_cast<double>(D_));
  const double gauss_scale =
      nl == Nonlinearity::CosSin ? std::sqrt(2.0 * kernel_.gamma) : 1.0;
  const double amp = nl == Nonlinearity::CosSin ? inv : inv * std::numbers::sqrt2;
  std::size_t off = 0;
  for (int i = 0; i < D_; ++i) {
    const double v = gauss_scale * u[i];
    switch (nl) {
      case Nonlinearity::CosSin:
        out[off++] = amp * std::cos(v);
        out[off++] = amp * std::sin(v);
        break;
      case Nonlinearity::Heaviside:
        out[off++] = amp * (v > 0.0 ? 1.0 : (v < 0.0 ? 0.0 : 0.5));
        break;
      case Nonlinearity::ReLU:
        out[off++] = amp * std::max(0.0, v);
        break;
    }
  }
}

Eigen::VectorXd BaselineMap::map_point(const Eigen::VectorXd& x) const {
  if (x.size() != d_)
    throw std::invalid_argument("BaselineMap::map_point: dimension mismatch");
  Eigen::VectorXd out(feature_dim());
  map_point(x.data(), out.data());
  return out;
}

Eigen::MatrixXd BaselineMap::map_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != d_)
    throw std::invalid_argument("BaselineMap::map_rows: dimension mismatch");
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

BaselineMap build_baseline_map(BaselineKind kind, const KernelKind& kernel,
                               int d, int D, std::uint64_t seed) {
  return BaselineMap(kind, kernel, d, D, seed);
}

}  // namespace quadfeat
