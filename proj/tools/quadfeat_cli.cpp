#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "quadfeat/baselines.hpp"
#include "quadfeat/bounds.hpp"
#include "quadfeat/dataset.hpp"
#include "quadfeat/experiment.hpp"
#include "quadfeat/kernels.hpp"
#include "quadfeat/quadrature.hpp"
#include "quadfeat/rng.hpp"
#include "quadfeat/structured.hpp"

namespace {

using namespace quadfeat;

struct MapArgs {
  std::string input;
  std::string format = "csv";
  std::string kernel = "gaussian";
  std::optional<double> gamma;
  std::string method = "sr33";
  int n = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string output;
};

struct ApproxArgs {
  std::string config;
  std::string output_prefix = "report";
};

struct WalltimeArgs {
  std::string method = "sr33";
  std::string kernel = "gaussian";
  std::optional<double> gamma;
  int d = 0;
  int dim = 0;
  int n = 0;
  int batch = 1000;
  int repeats = 50;
  std::uint64_t seed = 0;
};

struct BoundArgs {
  std::string prop;
  BoundInputs inputs;
  int n = 1;
  std::uint64_t seed = 0;
};

int resolve_feature_rows(int d, int n, int dim, bool quadrature_method) {
  const int slot = 2 * (d + 1);
  if (n > 0 && dim > 0)
    throw std::invalid_argument("give either --n or --dim, not both");
  if (n > 0) return slot * n + 1;
  if (dim > 0) {
    if (quadrature_method && ((dim - 1) % slot != 0 || (dim - 1) / slot < 1))
      throw std::invalid_argument(
          "quadrature methods need --dim = 2n(d+1)+1 for integer n >= 1");
    return dim;
  }
  throw std::invalid_argument("one of --n or --dim is required");
}

int cmd_map(const MapArgs& args) {
  const Dataset data = load_dataset(args.input, data_format_from_string(args.format));
  const int d = static_cast<int>(data.dim());
  const KernelKind kernel = kernel_from_name(args.kernel, d, args.gamma);
  const Method method = method_from_string(args.method);
  const bool is_quadrature =
      method == Method::Sr33Butterfly || method == Method::Sr33HaarQr;
  const int feat_rows = resolve_feature_rows(d, args.n, args.dim, is_quadrature);
  const int slot = 2 * (d + 1);
  const int n = is_quadrature ? (feat_rows - 1) / slot : std::max(1, (feat_rows - 1) / slot);

  std::cout << "seed: " << args.seed << "\n";
  const AnyMapper mapper =
      is_quadrature
          ? build_mapper(method, kernel, d, n, args.seed)
          : AnyMapper(build_baseline_map(method == Method::G      ? BaselineKind::G
                                         : method == Method::Gort ? BaselineKind::Gort
                                         : method == Method::Rom  ? BaselineKind::Rom
                                                                  : BaselineKind::Qmc,
                                         kernel, d, feat_rows, args.seed));
  const Eigen::MatrixXd z = mapper_map_rows(mapper, data.x);

  std::ofstream out(args.output);
  if (!out) throw std::runtime_error("cannot write " + args.output);
  out << "# method=" << method_name(method) << " kernel=" << kernel.name();
  if (kernel.type == KernelKind::Type::Gaussian)
    out << " gamma=" << format_double(kernel.gamma);
  out << " seed=" << args.seed << " D=" << mapper_accounted_rows(mapper)
      << " padded_dim=" << mapper_padded_dim(mapper)
      << " columns=" << mapper_feature_dim(mapper) << "\n";
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      if (j) out << ',';
      out << format_double(z(i, j));
    }
    out << '\n';
  }
  std::cout << "mapped " << z.rows() << " points, D=" << mapper_accounted_rows(mapper)
            << ", columns=" << z.cols() << " -> " << args.output << "\n";
  return 0;
}

int cmd_approx_error(const ApproxArgs& args) {
  const ExperimentConfig cfg = config_from_file(args.config);
  std::cout << "seed: " << cfg.seed << "\n";
  Dataset data = cfg.dataset.realize(cfg.seed);
  if (cfg.standardize) standardize_columns(data);
  const ErrorReport report = run_experiment(cfg, data);

  const std::string csv_path = args.output_prefix + ".csv";
  const std::string json_path = args.output_prefix + ".json";
  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out << report_to_csv(report);
  }
  {
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write " + json_path);
    out << report_to_json(report);
  }
  for (const auto& cell : summarize(report)) {
    std::cout << cell.kernel << " " << method_name(cell.method) << " n=" << cell.n
              << " D=" << cell.d_feature
              << " mean_error=" << format_double(cell.mean_error)
              << " ci95_half=" << format_double(cell.ci95_half) << "\n";
  }
  std::cout << "wrote " << csv_path << " " << json_path << "\n";
  return 0;
}

int cmd_walltime(const WalltimeArgs& args) {
  if (args.d < 1) throw std::invalid_argument("--d must be >= 1");
  const KernelKind kernel = kernel_from_name(args.kernel, args.d, args.gamma);
  const Method method = method_from_string(args.method);
  const bool is_quadrature =
      method == Method::Sr33Butterfly || method == Method::Sr33HaarQr;
  const int feat_rows = resolve_feature_rows(args.d, args.n, args.dim, is_quadrature);
  std::cout << "seed: " << args.seed << "\n";
  const WalltimeStats stats = walltime_mapping(method, kernel, args.d, feat_rows,
                                               args.batch, args.repeats, args.seed);
  std::cout << "method: " << method_name(method) << "\n"
            << "d: " << args.d << "\n"
            << "D: " << stats.d_feature << "\n"
            << "batch: " << stats.batch << "\n"
            << "repeats: " << stats.repeats << "\n"
            << "median_seconds: " << format_double(stats.median_seconds) << "\n"
            << "mean_seconds: " << format_double(stats.mean_seconds) << "\n";
  return 0;
}

int cmd_bound(const BoundArgs& args) {
  std::cout << "seed: " << args.seed << "\n";
  std::cout << "beta_d: " << format_double(beta_d(args.inputs.d)) << "\n";
  if (args.prop == "variance") {
    const double v = variance_bound_sr33(static_cast<int>(args.inputs.d), args.n,
                                         args.inputs.kappa);
    std::cout << "variance_bound: " << format_double(v) << "\n";
    return 0;
  }
  DRequirement req;
  if (args.prop == "3.1-quad") {
    req = required_D_quadrature(args.inputs);
  } else if (args.prop == "3.1-rff") {
    req = required_D_rff(args.inputs);
  } else if (args.prop == "krr") {
    req = required_D_krr(args.inputs);
  } else {
    throw std::invalid_argument("unknown --prop '" + args.prop + "'");
  }
  std::cout << "D: " << req.D << "\n"
            << "vacuous: " << (req.vacuous ? "true" : "false") << "\n";
  return 0;
}

// fast invariant sweep; every check is deterministic and seconds-scale
int cmd_selftest(std::uint64_t seed) {
  std::cout << "seed: " << seed << "\n";
  int failures = 0;
  const auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
    x[0] = 1.0;
    const Eigen::VectorXd h = fwht_normalized(x);
    const Eigen::VectorXd back = fwht_normalized(h);
    check((h.array() - 1.0 / std::sqrt(8.0)).abs().maxCoeff() < 1e-14 &&
              (back - x).cwiseAbs().maxCoeff() < 1e-14,
          "hadamard transform is orthogonal and involutive");
  }
  {
    const int d = 33;
    const SimplexVertices simplex(d);
    const Eigen::MatrixXd v = simplex.dense();
    double worst = 0.0;
    for (int j = 0; j <= d; ++j)
      worst = std::max(worst, std::abs(v.row(j).norm() - 1.0));
    const Eigen::MatrixXd g = v * v.transpose();
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j)
        worst = std::max(worst,
                         std::abs(g(i, j) - (i == j ? 1.0 : -1.0 / d)));
    worst = std::max(worst, v.colwise().sum().cwiseAbs().maxCoeff());
    check(worst < 1e-12, "simplex identities (norms, dots, zero sum)");
  }
  {
    const auto b = ButterflyOrthogonal::sample(64, derive_seed(seed, 1ULL));
    const Eigen::MatrixXd dense = b.dense();
    const double orth =
        (dense.transpose() * dense - Eigen::MatrixXd::Identity(64, 64))
            .cwiseAbs()
            .maxCoeff();
    Rng rng(derive_seed(seed, 2ULL));
    Eigen::VectorXd x(64);
    for (int i = 0; i < 64; ++i) x[i] = rng.gaussian();
    const double agree = (b.apply(x) - dense * x).cwiseAbs().maxCoeff();
    check(orth < 1e-10 && agree < 1e-10, "butterfly orthogonality and apply/dense agreement");
  }
  {
    const auto b = ButterflyOrthogonal::sample(15, derive_seed(seed, 3ULL));
    check(b.dense().cwiseAbs().minCoeff() > 0.0,
          "non-power-of-two composite has no structural zeros");
  }
  {
    const OrthogonalSampler qs{QSource::Butterfly, derive_seed(seed, 4ULL)};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const SRSample s = sample_sr33(8, derive_seed(seed, 5ULL, static_cast<std::uint64_t>(i)), qs);
      double sum = s.a0 * s.a0;
      for (int j = 0; j <= 8; ++j) sum += 8.0 / 9.0 / (s.rho[j] * s.rho[j]);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    check(worst < 1e-12, "origin-weight identity across samples");
  }
  {
    const OrthogonalSampler qs{QSource::Butterfly, derive_seed(seed, 6ULL)};
    double worst = 0.0;
    for (int d : {3, 5}) {
      for (int rep = 0; rep < 10; ++rep) {
        const SRSample s =
            sample_sr33(d, derive_seed(seed, 7ULL, static_cast<std::uint64_t>(d),
                                       static_cast<std::uint64_t>(rep)),
                        qs);
        for (int i = 0; i < d; ++i) {
          for (int j = i; j < d; ++j) {
            const double got = sr33_apply(s, [&](const Eigen::VectorXd& w) {
              return w[i] * w[j];
            });
            worst = std::max(worst, std::abs(got - (i == j ? 1.0 : 0.0)));
            const double odd = sr33_apply(s, [&](const Eigen::VectorXd& w) {
              return w[i] * w[i] * w[j];
            });
            if (i != j) worst = std::max(worst, std::abs(odd));
          }
        }
        worst = std::max(
            worst,
            std::abs(sr33_apply(s, [](const Eigen::VectorXd&) { return 1.0; }) - 1.0));
      }
    }
    check(worst < 1e-10, "rule exactness on monomials of degree <= 3");
  }
  {
    const OrthogonalSampler qs{QSource::Butterfly, derive_seed(seed, 8ULL)};
    Rng rng(derive_seed(seed, 9ULL));
    const KernelKind k = KernelKind::gaussian_for_dim(8);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const SRSample s =
          sample_sr33(8, derive_seed(seed, 10ULL, static_cast<std::uint64_t>(rep)), qs);
      Eigen::VectorXd x(8), y(8);
      for (int i = 0; i < 8; ++i) {
        x[i] = rng.gaussian();
        y[i] = rng.gaussian();
      }
      worst = std::max(worst, std::abs(sr33_estimate(s, k, x, y) -
                                       sr33_estimate_even(s, k, x, y)));
    }
    check(worst < 1e-12, "reduced even rule matches the full rule");
  }
  {
    Rng rng(derive_seed(seed, 11ULL));
    double worst = 0.0;
    for (const KernelKind& k :
         {KernelKind::gaussian_for_dim(8), KernelKind::arccos0(),
          KernelKind::arccos1()}) {
      for (int rep = 0; rep < 20; ++rep) {
        const std::uint64_t ms = derive_seed(seed, 12ULL, static_cast<std::uint64_t>(rep));
        const FeatureMap f = build_feature_map(
            k, 8, 3, ms, OrthogonalSampler{QSource::Butterfly, ms});
        Eigen::VectorXd x(8), y(8);
        for (int i = 0; i < 8; ++i) {
          x[i] = rng.gaussian();
          y[i] = rng.gaussian();
        }
        double rule = 0.0;
        for (int b = 0; b < 3; ++b)
          rule += sr33_estimate(f.block(b), k, x, y);
        rule /= 3.0;
        worst = std::max(worst,
                         std::abs(f.map_point(x).dot(f.map_point(y)) - rule));
      }
    }
    check(worst < 1e-10, "feature inner products match block-averaged rule values");
  }
  {
    check(beta_d(86) > 64.65 && beta_d(86) < 64.75 &&
              std::abs(beta_d(1) - 16.0) < 1e-9,
          "probability-bound dimension constant spot values");
  }
  {
    const Eigen::MatrixXd h = halton_sequence(2, 4, 0);
    const bool ok = std::abs(h(0, 0) - 0.5) < 1e-15 &&
                    std::abs(h(1, 0) - 0.25) < 1e-15 &&
                    std::abs(h(2, 0) - 0.75) < 1e-15 &&
                    std::abs(h(3, 0) - 0.125) < 1e-15 &&
                    std::abs(h(0, 1) - 1.0 / 3.0) < 1e-15;
    check(ok, "halton radical-inverse prefix");
  }

  if (failures == 0) {
    std::cout << "selftest: all checks passed\n";
    return 0;
  }
  std::cout << "selftest: " << failures << " check(s) failed\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadrature-based random features toolkit"};
  app.require_subcommand(1);

  MapArgs map_args;
  CLI::App* map_cmd = app.add_subcommand("map", "map a dataset to explicit features");
  map_cmd->add_option("--input", map_args.input, "dataset path")->required();
  map_cmd->add_option("--format", map_args.format, "csv or libsvm");
  map_cmd->add_option("--kernel", map_args.kernel, "gaussian, arccos0, or arccos1");
  double map_gamma = 0.0;
  CLI::Option* map_gamma_opt =
      map_cmd->add_option("--gamma", map_gamma, "Gaussian bandwidth (default 1/d)");
  map_cmd->add_option("--method", map_args.method,
                      "sr33[-butterfly], sr33-haarqr, g, gort, rom, qmc");
  map_cmd->add_option("--n", map_args.n, "number of quadrature blocks");
  map_cmd->add_option("--dim", map_args.dim, "accounted feature dimension D");
  map_cmd->add_option("--seed", map_args.seed, "master seed");
  map_cmd->add_option("--output", map_args.output, "output CSV path")->required();

  ApproxArgs approx_args;
  CLI::App* approx_cmd =
      app.add_subcommand("approx-error", "kernel approximation error experiment");
  approx_cmd->add_option("--config", approx_args.config, "experiment config JSON")
      ->required();
  approx_cmd->add_option("--output-prefix", approx_args.output_prefix,
                         "report file prefix");

  WalltimeArgs wt_args;
  CLI::App* wt_cmd = app.add_subcommand("walltime", "feature mapping walltime");
  wt_cmd->add_option("--method", wt_args.method, "mapper to time");
  wt_cmd->add_option("--kernel", wt_args.kernel, "kernel");
  double wt_gamma = 0.0;
  CLI::Option* wt_gamma_opt =
      wt_cmd->add_option("--gamma", wt_gamma, "Gaussian bandwidth (default 1/d)");
  wt_cmd->add_option("--d", wt_args.d, "input dimension")->required();
  wt_cmd->add_option("--dim", wt_args.dim, "accounted feature dimension D");
  wt_cmd->add_option("--n", wt_args.n, "number of quadrature blocks");
  wt_cmd->add_option("--batch", wt_args.batch, "points per repeat");
  wt_cmd->add_option("--repeats", wt_args.repeats, "timed repeats");
  wt_cmd->add_option("--seed", wt_args.seed, "master seed");

  BoundArgs bound_args;
  CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate feature-count bounds");
  bound_cmd->add_option("--prop", bound_args.prop, "3.1-quad, 3.1-rff, krr, or variance")
      ->required();
  bound_cmd->add_option("--d", bound_args.inputs.d, "input dimension");
  bound_cmd->add_option("--eps", bound_args.inputs.eps, "target error");
  bound_cmd->add_option("--delta", bound_args.inputs.delta, "failure probability");
  bound_cmd->add_option("--l", bound_args.inputs.l, "domain diameter");
  bound_cmd->add_option("--sigma-p", bound_args.inputs.sigma_p, "kernel spectral scale");
  bound_cmd->add_option("--kappa", bound_args.inputs.kappa, "sup |phi|");
  bound_cmd->add_option("--mu", bound_args.inputs.mu, "sup |phi'|");
  bound_cmd->add_option("--M", bound_args.inputs.M, "integrand curvature bound");
  bound_cmd->add_option("--lambda0", bound_args.inputs.lambda0, "regularization ratio");
  bound_cmd->add_option("--sigma-y", bound_args.inputs.sigma_y, "label scale");
  bound_cmd->add_option("--n", bound_args.n, "sample count (variance bound)");
  bound_cmd->add_option("--seed", bound_args.seed, "unused; printed for uniformity");

  std::uint64_t selftest_seed = 0;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "fast invariant sweep");
  selftest_cmd->add_option("--seed", selftest_seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (map_cmd->parsed()) {
      if (map_gamma_opt->count()) map_args.gamma = map_gamma;
      return cmd_map(map_args);
    }
    if (approx_cmd->parsed()) return cmd_approx_error(approx_args);
    if (wt_cmd->parsed()) {
      if (wt_gamma_opt->count()) wt_args.gamma = wt_gamma;
      return cmd_walltime(wt_args);
    }
    if (bound_cmd->parsed()) return cmd_bound(bound_args);
    if (selftest_cmd->parsed()) return cmd_selftest(selftest_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
