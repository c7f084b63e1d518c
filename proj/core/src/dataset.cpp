#include "quadfeat/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "quadfeat/rng.hpp"

namespace quadfeat {

DataFormat data_format_from_string(const std::string& s) {
  if (s == "csv") return DataFormat::Csv;
  if (s == "libsvm") return DataFormat::Libsvm;
  throw std::invalid_argument("unknown data format: " + s);
}

namespace {

bool parse_double(const std::string& field, double* out) {
  const char* b = field.data();
  const char* e = b + field.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t' || *(e - 1) == '\r')) --e;
  if (b == e) return false;
  const auto [ptr, ec] = std::from_chars(b, e, *out);
  return ec == std::errc() && ptr == e;
}

[[noreturn]] void parse_fail(const std::string& path, long line,
                             const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

Dataset finish(std::string name, std::vector<std::vector<double>> rows,
               std::optional<std::vector<double>> labels,
               const std::string& path) {
  if (rows.size() < 2)
    throw std::runtime_error(path + ": need at least 2 data rows");
  const std::size_t d = rows.front().size();
  if (d < 1) throw std::runtime_error(path + ": rows are empty");
  Dataset out;
  out.name = std::move(name);
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v))
        throw std::runtime_error(path + ": non-finite value in data");
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  if (labels) {
    out.y.emplace(static_cast<Eigen::Index>(labels->size()));
    for (std::size_t i = 0; i < labels->size(); ++i)
      (*out.y)[static_cast<Eigen::Index>(i)] = (*labels)[i];
  }
  return out;
}

Dataset load_csv(const std::string& path, std::ifstream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool ok = true;
    while (std::getline(ss, field, ',')) {
      double v;
      if (!parse_double(field, &v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first) {  // header line
        first = false;
        continue;
      }
      parse_fail(path, lineno, "non-numeric field");
    }
    if (row.empty()) parse_fail(path, lineno, "empty row");
    if (width == 0) width = row.size();
    if (row.size() != width) parse_fail(path, lineno, "inconsistent column count");
    rows.push_back(std::move(row));
    first = false;
  }
  return finish(path, std::move(rows), std::nullopt, path);
}

Dataset load_libsvm(const std::string& path, std::ifstream& in) {
  std::vector<std::vector<std::pair<long, double>>> sparse;
  std::vector<double> labels;
  std::string line;
  long lineno = 0;
  long width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    double label;
    if (!parse_double(tok, &label)) parse_fail(path, lineno, "bad label");
    std::vector<std::pair<long, double>> row;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        parse_fail(path, lineno, "expected index:value, got '" + tok + "'");
      double idx_d, val;
      if (!parse_double(tok.substr(0, colon), &idx_d) || idx_d < 1.0 ||
          idx_d != std::floor(idx_d))
        parse_fail(path, lineno, "bad feature index in '" + tok + "'");
      if (!parse_double(tok.substr(colon + 1), &val))
        parse_fail(path, lineno, "bad feature value in '" + tok + "'");
      const long idx = static_cast<long>(idx_d);
      row.emplace_back(idx, val);
      width = std::max(width, idx);
    }
    labels.push_back(label);
    sparse.push_back(std::move(row));
  }
  if (width < 1) throw std::runtime_error(path + ": no features found");
  std::vector<std::vector<double>> rows;
  rows.reserve(sparse.size());
  for (const auto& s : sparse) {
    std::vector<double> dense(static_cast<std::size_t>(width), 0.0);
    for (const auto& [idx, val] : s)
      dense[static_cast<std::size_t>(idx - 1)] = val;
    rows.push_back(std::move(dense));
  }
  return finish(path, std::move(rows), std::move(labels), path);
}

}  // namespace

Dataset load_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Dataset d = format == DataFormat::Csv ? load_csv(path, in)
                                        : load_libsvm(path, in);
  // keep the basename as the dataset name
  const auto slash = path.find_last_of('/');
  d.name = slash == std::string::npos ? path : path.substr(slash + 1);
  return d;
}

Dataset make_gaussian_clusters(int rows, int dim, int clusters,
                               std::uint64_t seed) {
  if (rows < 2 || dim < 1 || clusters < 1)
    throw std::invalid_argument("make_gaussian_clusters: bad shape");
  Rng rng(derive_seed(seed, seed_tag::kSynthetic, 0ULL));
  Eigen::MatrixXd centers(clusters, dim);
  for (int c = 0; c < clusters; ++c)
    for (int j = 0; j < dim; ++j) centers(c, j) = rng.gaussian();
  Dataset out;
  out.name = "gaussian-clusters";
  out.x.resize(rows, dim);
  for (int i = 0; i < rows; ++i) {
    const auto c = static_cast<int>(rng.below(static_cast<std::uint64_t>(clusters)));
    for (int j = 0; j < dim; ++j)
      out.x(i, j) = centers(c, j) + 0.5 * rng.gaussian();
  }
  return out;
}

Dataset make_uniform_cube(int rows, int dim, std::uint64_t seed) {
  if (rows < 2 || dim < 1)
    throw std::invalid_argument("make_uniform_cube: bad shape");
  Rng rng(derive_seed(seed, seed_tag::kSynthetic, 1ULL));
  Dataset out;
  out.name = "uniform-cube";
  out.x.resize(rows, dim);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dim; ++j) out.x(i, j) = 2.0 * rng.uniform() - 1.0;
  return out;
}

void standardize_columns(Dataset& data) {
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    auto col = data.x.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double var = col.squaredNorm() / static_cast<double>(col.size());
    if (var > 0.0) col /= std::sqrt(var);
  }
}

}  // namespace quadfeat
