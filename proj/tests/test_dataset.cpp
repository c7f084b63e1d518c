#include "doctest.h"

#include <quadfeat/dataset.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <unistd.h>

using namespace quadfeat;

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("quadfeat_test_" + std::to_string(++counter) + "_" +
              std::to_string(::getpid()) + ".txt"))
                .string();
    std::ofstream out(path_);
    out << content;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

bool throws_with(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const std::exception& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("dataset: csv parsing with and without header") {
  TempFile plain("1,2\n3,4\n5.5,-6e-1\n");
  const Dataset d = load_dataset(plain.path(), DataFormat::Csv);
  REQUIRE(d.rows() == 3);
  REQUIRE(d.dim() == 2);
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(2, 1) == -0.6);
  CHECK_FALSE(d.y.has_value());

  TempFile with_header("alpha,beta\n1,2\n3,4\n");
  const Dataset h = load_dataset(with_header.path(), DataFormat::Csv);
  REQUIRE(h.rows() == 2);
  CHECK(h.x(1, 1) == 4.0);

  TempFile blank_lines("\n1,2\n\n3,4\n\n");
  CHECK(load_dataset(blank_lines.path(), DataFormat::Csv).rows() == 2);
}

TEST_CASE("dataset: csv errors carry the line number") {
  TempFile bad_field("1,2\n3,oops\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(bad_field.path(), DataFormat::Csv); }, ":2:"));

  TempFile ragged("1,2\n3\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(ragged.path(), DataFormat::Csv); },
      "inconsistent column count"));

  TempFile one_row("1,2\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(one_row.path(), DataFormat::Csv); },
      "at least 2 data rows"));

  TempFile nonfinite("1,2\nnan,4\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(nonfinite.path(), DataFormat::Csv); },
      "non-finite"));

  CHECK_THROWS_AS((void)load_dataset("/nonexistent/quadfeat.csv", DataFormat::Csv),
                  std::runtime_error);
}

TEST_CASE("dataset: libsvm parsing") {
  TempFile f("1 1:0.5 3:2.0\n-1 2:1.25\n# comment\n3 1:-1\n");
  const Dataset d = load_dataset(f.path(), DataFormat::Libsvm);
  REQUIRE(d.rows() == 3);
  REQUIRE(d.dim() == 3);
  CHECK(d.x(0, 0) == 0.5);
  CHECK(d.x(0, 1) == 0.0);
  CHECK(d.x(0, 2) == 2.0);
  CHECK(d.x(1, 1) == 1.25);
  CHECK(d.x(2, 0) == -1.0);
  REQUIRE(d.y.has_value());
  CHECK((*d.y)[0] == 1.0);
  CHECK((*d.y)[1] == -1.0);
  CHECK((*d.y)[2] == 3.0);

  TempFile no_colon("1 3\n2 1:1\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(no_colon.path(), DataFormat::Libsvm); },
      "index:value"));
  TempFile bad_index("1 0:3\n2 1:1\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(bad_index.path(), DataFormat::Libsvm); },
      "bad feature index"));
  TempFile bad_label("x 1:3\n2 1:1\n");
  CHECK(throws_with(
      [&] { (void)load_dataset(bad_label.path(), DataFormat::Libsvm); },
      "bad label"));
}

TEST_CASE("dataset: format names") {
  CHECK(data_format_from_string("csv") == DataFormat::Csv);
  CHECK(data_format_from_string("libsvm") == DataFormat::Libsvm);
  CHECK_THROWS_AS((void)data_format_from_string("parquet"), std::invalid_argument);
}

TEST_CASE("dataset: synthetic generators") {
  const Dataset g = make_gaussian_clusters(500, 16, 10, 97);
  CHECK(g.rows() == 500);
  CHECK(g.dim() == 16);
  CHECK(g.name == "gaussian-clusters");
  const Dataset g2 = make_gaussian_clusters(500, 16, 10, 97);
  CHECK((g.x - g2.x).lpNorm<Eigen::Infinity>() == 0.0);
  const Dataset g3 = make_gaussian_clusters(500, 16, 10, 98);
  CHECK((g.x - g3.x).lpNorm<Eigen::Infinity>() > 1e-6);
  // ten clusters of tight points: within-row spread well below data spread
  CHECK(g.x.array().abs().maxCoeff() < 10.0);

  const Dataset u = make_uniform_cube(400, 5, 31);
  CHECK(u.rows() == 400);
  CHECK(u.dim() == 5);
  CHECK(u.x.minCoeff() >= -1.0);
  CHECK(u.x.maxCoeff() <= 1.0);
  CHECK(u.x.minCoeff() < -0.9);  // actually fills the cube
  CHECK(u.x.maxCoeff() > 0.9);

  CHECK_THROWS_AS((void)make_gaussian_clusters(1, 4, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)make_uniform_cube(10, 0, 1), std::invalid_argument);
}

TEST_CASE("dataset: standardize_columns") {
  Dataset d = make_gaussian_clusters(300, 6, 4, 11);
  d.x.col(2).setConstant(7.0);  // constant column stays centered, not scaled
  standardize_columns(d);
  for (int j = 0; j < 6; ++j) {
    const double mean = d.x.col(j).mean();
    CHECK(std::abs(mean) < 1e-12);
    const double var = d.x.col(j).squaredNorm() / static_cast<double>(d.rows());
    if (j == 2) {
      CHECK(var == 0.0);
    } else {
      CHECK(std::abs(var - 1.0) < 1e-10);
    }
  }
}
