#include "quadfeat/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "quadfeat/rng.hpp"

namespace quadfeat {

using nlohmann::json;

const char* method_name(Method m) {
  switch (m) {
    case Method::Sr33Butterfly: return "sr33-butterfly";
    case Method::Sr33HaarQr: return "sr33-haarqr";
    case Method::G: return "g";
    case Method::Gort: return "gort";
    case Method::Rom: return "rom";
    case Method::Qmc: return "qmc";
  }
  throw std::logic_error("method_name: bad method");
}

Method method_from_string(const std::string& s) {
  if (s == "sr33-butterfly" || s == "sr33") return Method::Sr33Butterfly;
  if (s == "sr33-haarqr" || s == "sr33-haar") return Method::Sr33HaarQr;
  if (s == "g") return Method::G;
  if (s == "gort") return Method::Gort;
  if (s == "rom") return Method::Rom;
  if (s == "qmc") return Method::Qmc;
  throw std::invalid_argument("unknown method: " + s);
}

KernelKind kernel_from_name(const std::string& name, int d,
                            std::optional<double> gamma) {
  if (name == "gaussian")
    return gamma ? KernelKind::gaussian(*gamma) : KernelKind::gaussian_for_dim(d);
  if (name == "arccos0") return KernelKind::arccos0();
  if (name == "arccos1") return KernelKind::arccos1();
  throw std::invalid_argument("unknown kernel: " + name);
}

AnyMapper build_mapper(Method m, const KernelKind& k, int d, int n,
                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_mapper: n must be >= 1");
  const int D = 2 * n * (d + 1) + 1;
  switch (m) {
    case Method::Sr33Butterfly:
      return build_feature_map(k, d, n, seed,
                               OrthogonalSampler{QSource::Butterfly, seed});
    case Method::Sr33HaarQr:
      return build_feature_map(k, d, n, seed,
                               OrthogonalSampler{QSource::HaarQr, seed});
    case Method::G:
      return build_baseline_map(BaselineKind::G, k, d, D, seed);
    case Method::Gort:
      return build_baseline_map(BaselineKind::Gort, k, d, D, seed);
    case Method::Rom:
      return build_baseline_map(BaselineKind::Rom, k, d, D, seed);
    case Method::Qmc:
      return build_baseline_map(BaselineKind::Qmc, k, d, D, seed);
  }
  throw std::logic_error("build_mapper: bad method");
}

int mapper_feature_dim(const AnyMapper& m) {
  return std::visit([](const auto& v) { return v.feature_dim(); }, m);
}

int mapper_accounted_rows(const AnyMapper& m) {
  if (const auto* f = std::get_if<FeatureMap>(&m)) return f->accounted_dim();
  return std::get<BaselineMap>(m).rows();
}

int mapper_padded_dim(const AnyMapper& m) {
  if (const auto* b = std::get_if<BaselineMap>(&m)) return b->padded_dim();
  return std::get<FeatureMap>(m).input_dim();
}

Eigen::MatrixXd mapper_map_rows(const AnyMapper& m, const Eigen::MatrixXd& x) {
  return std::visit([&](const auto& v) { return v.map_rows(x); }, m);
}

Eigen::MatrixXd gram_exact(const KernelKind& k, const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows();
  if (m < 2) throw std::invalid_argument("gram_exact: need at least 2 rows");
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = kernel_exact(k, xi, x.row(j).transpose());
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

double relative_frobenius_error(const Eigen::MatrixXd& k,
                                const Eigen::MatrixXd& k_hat) {
  if (k.rows() != k_hat.rows() || k.cols() != k_hat.cols())
    throw std::invalid_argument("relative_frobenius_error: shape mismatch");
  const double denom = k.norm();
  if (denom == 0.0)
    throw std::invalid_argument("relative_frobenius_error: exact norm is zero");
  return (k - k_hat).norm() / denom;
}

Dataset DatasetSpec::realize(std::uint64_t seed) const {
  switch (type) {
    case Type::GaussianClusters:
      return make_gaussian_clusters(rows, dim, clusters, seed);
    case Type::UniformCube:
      return make_uniform_cube(rows, dim, seed);
    case Type::File:
      return load_dataset(path, format);
  }
  throw std::logic_error("DatasetSpec::realize: bad type");
}

namespace {

const json& require_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end())
    throw std::invalid_argument(std::string("config: missing field '") + name + "'");
  return *it;
}

int require_positive_int(const json& j, const char* name) {
  const json& f = require_field(j, name);
  if (!f.is_number_integer() || f.get<long long>() < 1)
    throw std::invalid_argument(std::string("config: '") + name +
                                "' must be a positive integer");
  return f.get<int>();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  ExperimentConfig cfg;
  const json& ds = require_field(j, "dataset");
  if (!ds.is_object())
    throw std::invalid_argument("config: 'dataset' must be an object");
  const json& type = require_field(ds, "type");
  if (!type.is_string())
    throw std::invalid_argument("config: 'dataset.type' must be a string");
  const std::string type_s = type.get<std::string>();
  if (type_s == "gaussian-clusters") {
    cfg.dataset.type = DatasetSpec::Type::GaussianClusters;
    cfg.dataset.rows = require_positive_int(ds, "rows");
    cfg.dataset.dim = require_positive_int(ds, "dim");
    cfg.dataset.clusters = require_positive_int(ds, "clusters");
  } else if (type_s == "uniform-cube") {
    cfg.dataset.type = DatasetSpec::Type::UniformCube;
    cfg.dataset.rows = require_positive_int(ds, "rows");
    cfg.dataset.dim = require_positive_int(ds, "dim");
  } else if (type_s == "file") {
    cfg.dataset.type = DatasetSpec::Type::File;
    const json& path = require_field(ds, "path");
    if (!path.is_string())
      throw std::invalid_argument("config: 'dataset.path' must be a string");
    cfg.dataset.path = path.get<std::string>();
    const auto fmt = ds.find("format");
    cfg.dataset.format =
        fmt == ds.end() ? DataFormat::Csv
                        : data_format_from_string(fmt->get<std::string>());
  } else {
    throw std::invalid_argument("config: unknown dataset.type '" + type_s + "'");
  }

  const json& kernels = require_field(j, "kernels");
  if (!kernels.is_array() || kernels.empty())
    throw std::invalid_argument("config: 'kernels' must be a non-empty array");
  for (const auto& k : kernels) {
    if (!k.is_string())
      throw std::invalid_argument("config: 'kernels' entries must be strings");
    const std::string name = k.get<std::string>();
    kernel_from_name(name, 1, 1.0);  // validates the name
    if (std::find(cfg.kernels.begin(), cfg.kernels.end(), name) != cfg.kernels.end())
      throw std::invalid_argument("config: duplicate kernel '" + name + "'");
    cfg.kernels.push_back(name);
  }

  const json& methods = require_field(j, "methods");
  if (!methods.is_array() || methods.empty())
    throw std::invalid_argument("config: 'methods' must be a non-empty array");
  for (const auto& m : methods) {
    if (!m.is_string())
      throw std::invalid_argument("config: 'methods' entries must be strings");
    cfg.methods.push_back(method_from_string(m.get<std::string>()));
  }

  const json& nv = require_field(j, "n_values");
  if (!nv.is_array() || nv.empty())
    throw std::invalid_argument("config: 'n_values' must be a non-empty array");
  for (const auto& n : nv) {
    if (!n.is_number_integer() || n.get<long long>() < 1)
      throw std::invalid_argument("config: 'n_values' entries must be positive integers");
    cfg.n_values.push_back(n.get<int>());
  }

  cfg.subset_size = require_positive_int(j, "subset_size");
  cfg.runs = require_positive_int(j, "runs");
  const json& seed = require_field(j, "seed");
  if (!seed.is_number_integer())
    throw std::invalid_argument("config: 'seed' must be an integer");
  cfg.seed = seed.get<std::uint64_t>();

  if (const auto it = j.find("gamma"); it != j.end()) {
    if (!it->is_number() || it->get<double>() <= 0.0)
      throw std::invalid_argument("config: 'gamma' must be a positive number");
    cfg.gamma = it->get<double>();
  }
  if (const auto it = j.find("standardize"); it != j.end()) {
    if (!it->is_boolean())
      throw std::invalid_argument("config: 'standardize' must be a boolean");
    cfg.standardize = it->get<bool>();
  }
  if (const auto it = j.find("timing"); it != j.end()) {
    if (!it->is_boolean())
      throw std::invalid_argument("config: 'timing' must be a boolean");
    cfg.timing = it->get<bool>();
  }
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return config_from_json(os.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int thread_cap() {
  if (const char* env = std::getenv("QUADFEAT_THREADS")) {
    int v = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), v);
    if (res.ec == std::errc() && v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int t = std::max(1, std::min(threads, count));
  if (t == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += t) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

ErrorReport run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
  const int big_n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.dim());
  if (cfg.subset_size < 2 || cfg.subset_size > big_n)
    throw std::invalid_argument("run_experiment: subset_size must be in [2, N]");
  if (cfg.runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");
  if (cfg.kernels.empty() || cfg.methods.empty() || cfg.n_values.empty())
    throw std::invalid_argument("run_experiment: empty kernels/methods/n_values");

  ErrorReport report;
  report.dataset = data.name;
  const std::size_t n_methods = cfg.methods.size();
  report.rows.resize(cfg.kernels.size() * cfg.n_values.size() *
                     static_cast<std::size_t>(cfg.runs) * n_methods);

  const int workers = thread_cap();
  std::size_t cell_base = 0;
  for (std::size_t ki = 0; ki < cfg.kernels.size(); ++ki) {
    const KernelKind kernel = kernel_from_name(cfg.kernels[ki], d, cfg.gamma);
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const int n = cfg.n_values[ni];
      const int feat_d = 2 * n * (d + 1) + 1;
      // runs within the cell are independent given their derived seeds
      parallel_for(cfg.runs, workers, [&](int run) {
        const std::uint64_t subset_seed =
            derive_seed(cfg.seed, seed_tag::kSubset, static_cast<std::uint64_t>(ki),
                        static_cast<std::uint64_t>(ni), static_cast<std::uint64_t>(run));
        Rng subset_rng(subset_seed);
        const std::vector<int> idx =
            subset_rng.sample_without_replacement(big_n, cfg.subset_size);
        Eigen::MatrixXd xs(cfg.subset_size, d);
        for (int i = 0; i < cfg.subset_size; ++i)
          xs.row(i) = data.x.row(idx[static_cast<std::size_t>(i)]);
        const Eigen::MatrixXd k_exact = gram_exact(kernel, xs);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          const Method method = cfg.methods[mi];
          const std::uint64_t map_seed = derive_seed(
              cfg.seed, seed_tag::kMap, static_cast<std::uint64_t>(ki),
              static_cast<std::uint64_t>(ni), static_cast<std::uint64_t>(run),
              static_cast<std::uint64_t>(mi));
          const AnyMapper mapper = build_mapper(method, kernel, d, n, map_seed);
          const auto t0 = std::chrono::steady_clock::now();
          const Eigen::MatrixXd z = mapper_map_rows(mapper, xs);
          const double seconds = elapsed_seconds(t0);
          const Eigen::MatrixXd k_hat = z * z.transpose();
          RunRecord rec;
          rec.dataset = data.name;
          rec.kernel = cfg.kernels[ki];
          rec.method = method;
          rec.n = n;
          rec.d_feature = feat_d;
          rec.run = run;
          rec.rel_frobenius_error = relative_frobenius_error(k_exact, k_hat);
          rec.has_timing = cfg.timing;
          rec.map_seconds = cfg.timing ? seconds : 0.0;
          report.rows[cell_base + static_cast<std::size_t>(run) * n_methods + mi] =
              std::move(rec);
        }
      });
      cell_base += static_cast<std::size_t>(cfg.runs) * n_methods;
    }
  }
  return report;
}

std::vector<CellSummary> summarize(const ErrorReport& report) {
  // cells keyed by (kernel, method, n) in first-appearance order
  std::vector<CellSummary> cells;
  std::vector<std::vector<double>> samples;
  for (const auto& row : report.rows) {
    std::size_t c = 0;
    for (; c < cells.size(); ++c) {
      if (cells[c].kernel == row.kernel && cells[c].method == row.method &&
          cells[c].n == row.n)
        break;
    }
    if (c == cells.size()) {
      CellSummary s;
      s.dataset = row.dataset;
      s.kernel = row.kernel;
      s.method = row.method;
      s.n = row.n;
      s.d_feature = row.d_feature;
      cells.push_back(s);
      samples.emplace_back();
    }
    samples[c].push_back(row.rel_frobenius_error);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = samples[c];
    const auto count = static_cast<double>(v.size());
    double mean = 0.0;
    for (const double e : v) mean += e;
    mean /= count;
    double var = 0.0;
    if (v.size() > 1) {
      for (const double e : v) var += (e - mean) * (e - mean);
      var /= count - 1.0;
    }
    cells[c].runs = static_cast<int>(v.size());
    cells[c].mean_error = mean;
    cells[c].ci95_half = v.size() > 1 ? 1.96 * std::sqrt(var / count) : 0.0;
  }
  return cells;
}

std::string report_to_csv(const ErrorReport& report) {
  std::ostringstream os;
  os << "dataset,kernel,method,n,D,run,rel_frobenius_error,map_seconds\n";
  for (const auto& r : report.rows) {
    os << r.dataset << ',' << r.kernel << ',' << method_name(r.method) << ','
       << r.n << ',' << r.d_feature << ',' << r.run << ','
       << format_double(r.rel_frobenius_error) << ',';
    if (r.has_timing) os << format_double(r.map_seconds);
    os << '\n';
  }
  return os.str();
}

std::string report_to_json(const ErrorReport& report) {
  json cells_json = json::object();
  for (const auto& cell : summarize(report)) {
    json& k = cells_json[cell.kernel];
    json& m = k[method_name(cell.method)];
    json& n = m[std::to_string(cell.n)];
    n["D"] = cell.d_feature;
    n["runs"] = cell.runs;
    n["mean_error"] = cell.mean_error;
    n["ci95_half"] = cell.ci95_half;
  }
  json out;
  out["schema"] = report.schema;
  out["dataset"] = report.dataset;
  out["cells"] = {{report.dataset, std::move(cells_json)}};
  return out.dump(2) + "\n";
}

WalltimeStats walltime_mapping(Method m, const KernelKind& k, int d, int D,
                               int batch, int repeats, std::uint64_t seed) {
  if (batch < 1 || repeats < 1)
    throw std::invalid_argument("walltime_mapping: batch and repeats must be >= 1");
  const int slot = 2 * (d + 1);
  int n = 1;
  if (m == Method::Sr33Butterfly || m == Method::Sr33HaarQr) {
    if (D < slot + 1 || (D - 1) % slot != 0)
      throw std::invalid_argument(
          "walltime_mapping: quadrature methods need D = 2n(d+1)+1");
    n = (D - 1) / slot;
  } else {
    n = std::max(1, (D - 1) / slot);  // unused by baselines beyond build_mapper
  }

  AnyMapper mapper =
      m == Method::Sr33Butterfly || m == Method::Sr33HaarQr
          ? build_mapper(m, k, d, n, seed)
          : AnyMapper(build_baseline_map(
                m == Method::G      ? BaselineKind::G
                : m == Method::Gort ? BaselineKind::Gort
                : m == Method::Rom  ? BaselineKind::Rom
                                    : BaselineKind::Qmc,
                k, d, D, seed));

  Rng rng(derive_seed(seed, seed_tag::kSynthetic, 2ULL));
  Eigen::MatrixXd x(batch, d);
  for (int i = 0; i < batch; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.gaussian();

  mapper_map_rows(mapper, x);  // warm-up, discarded
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd z = mapper_map_rows(mapper, x);
    times.push_back(elapsed_seconds(t0));
  }
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  WalltimeStats stats;
  stats.median_seconds = sorted.size() % 2 == 1
                             ? sorted[mid]
                             : 0.5 * (sorted[mid - 1] + sorted[mid]);
  double mean = 0.0;
  for (const double t : times) mean += t;
  stats.mean_seconds = mean / static_cast<double>(times.size());
  stats.repeats = repeats;
  stats.batch = batch;
  stats.d_feature = mapper_accounted_rows(mapper);
  return stats;
}

}  // namespace quadfeat
