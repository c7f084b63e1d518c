#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "quadfeat/baselines.hpp"
#include "quadfeat/dataset.hpp"
#include "quadfeat/kernels.hpp"
#include "quadfeat/quadrature.hpp"

namespace quadfeat {

enum class Method { Sr33Butterfly, Sr33HaarQr, G, Gort, Rom, Qmc };

const char* method_name(Method m);
Method method_from_string(const std::string& s);

// Kernel by config name; Gaussian bandwidth falls back to 1/d.
KernelKind kernel_from_name(const std::string& name, int d,
                            std::optional<double> gamma);

// Either mapper family behind one call surface.  Feature counts are
// matched through the accounted dimension D = 2n(d+1)+1: quadrature maps
// take n blocks, baselines get D projection rows.
using AnyMapper = std::variant<FeatureMap, BaselineMap>;

AnyMapper build_mapper(Method m, const KernelKind& k, int d, int n,
                       std::uint64_t seed);
int mapper_feature_dim(const AnyMapper& m);
int mapper_accounted_rows(const AnyMapper& m);
int mapper_padded_dim(const AnyMapper& m);  // differs from input dim for Rom only
Eigen::MatrixXd mapper_map_rows(const AnyMapper& m, const Eigen::MatrixXd& x);

Eigen::MatrixXd gram_exact(const KernelKind& k, const Eigen::MatrixXd& x);
double relative_frobenius_error(const Eigen::MatrixXd& k,
                                const Eigen::MatrixXd& k_hat);

struct DatasetSpec {
  enum class Type { GaussianClusters, UniformCube, File };
  Type type = Type::GaussianClusters;
  int rows = 0;
  int dim = 0;
  int clusters = 1;
  std::string path;
  DataFormat format = DataFormat::Csv;

  Dataset realize(std::uint64_t seed) const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<std::string> kernels;
  std::vector<Method> methods;
  std::vector<int> n_values;
  int subset_size = 0;
  int runs = 1;
  std::uint64_t seed = 0;
  std::optional<double> gamma;  // Gaussian bandwidth; default 1/d
  bool standardize = false;
  bool timing = false;  // record map walltimes (breaks byte determinism)
};

// Parses and validates the JSON config, naming the offending field on
// failure.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

struct RunRecord {
  std::string dataset;
  std::string kernel;
  Method method = Method::G;
  int n = 0;
  int d_feature = 0;  // accounted D
  int run = 0;
  double rel_frobenius_error = 0.0;
  double map_seconds = 0.0;
  bool has_timing = false;
};

struct CellSummary {
  std::string dataset;
  std::string kernel;
  Method method = Method::G;
  int n = 0;
  int d_feature = 0;
  int runs = 0;
  double mean_error = 0.0;
  double ci95_half = 0.0;  // 1.96 * stderr; 0 when runs == 1
};

struct ErrorReport {
  int schema = 1;
  std::string dataset;
  std::vector<RunRecord> rows;
};

std::vector<CellSummary> summarize(const ErrorReport& report);
std::string report_to_csv(const ErrorReport& report);
std::string report_to_json(const ErrorReport& report);

// The full experiment loop: per (kernel, n) cell, `runs` repetitions with
// fresh subsets and fresh maps, every method sharing the subset, exact
// Gram, and accounted D of its cell run.  A pure function of (config,
// dataset) when timing is off.
ErrorReport run_experiment(const ExperimentConfig& cfg, const Dataset& data);

struct WalltimeStats {
  double median_seconds = 0.0;
  double mean_seconds = 0.0;
  int repeats = 0;
  int batch = 0;
  int d_feature = 0;
};

// Times mapping `batch` random points, one warm-up repeat discarded.
// For quadrature methods D must equal 2n(d+1)+1 for some n >= 1.
WalltimeStats walltime_mapping(Method m, const KernelKind& k, int d, int D,
                               int batch, int repeats, std::uint64_t seed);

// Worker cap: QUADFEAT_THREADS when set (>= 1), hardware concurrency
// otherwise.
int thread_cap();

// Static round-robin parallel loop; fn(i) must only touch slot i state.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Shortest round-trip decimal rendering; the report writers use it so
// identical doubles always serialize identically.
std::string format_double(double v);

}  // namespace quadfeat
