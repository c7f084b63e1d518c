#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

namespace quadfeat {

struct Dataset {
  std::string name;
  Eigen::MatrixXd x;  // N x d
  std::optional<Eigen::VectorXd> y;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

enum class DataFormat { Csv, Libsvm };

DataFormat data_format_from_string(const std::string& s);

// CSV: comma-separated numeric rows, a non-numeric first line is treated
// as a header.  Libsvm: "<label> idx:val ...", 1-based indices, absent
// indices zero; width is the largest index seen.  Parse failures name
// the offending line; the parsed matrix contains no NaN/Inf and has
// N >= 2, d >= 1.
Dataset load_dataset(const std::string& path, DataFormat format);

// Bundled synthetic generators used by tests and example configs.
Dataset make_gaussian_clusters(int rows, int dim, int clusters,
                               std::uint64_t seed);
Dataset make_uniform_cube(int rows, int dim, std::uint64_t seed);

// Column-wise zero mean, unit (population) variance; constant columns
// are left centered.
void standardize_columns(Dataset& data);

}  // namespace quadfeat
