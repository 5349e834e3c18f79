// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "datasel/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "datasel/approx.h"
#include "datasel/dataset.h"
#include "datasel/error.h"
#include "datasel/eval.h"
#include "datasel/format.h"
#include "datasel/io.h"
#include "datasel/kernel.h"
#include "datasel/select.h"

namespace datasel::cli {

namespace {

struct RunConfig {
  std::string data;
  std::string label_col;
  std::string synthetic;
  int n_per_class = 150;
  int classes = 2;
  int components_per_class = 8;
  int dim = 2;
  double separation = 2.0;
  double sigma = 0.5;
  std::uint64_t data_seed = 0;

  std::string kernel = "rbf";
  double gamma = 1.0;
  int degree = 2;
  double coef0 = 1.0;
  double scale = 1.0;

  std::vector<std::string> strategies;
  int m = 0;
  std::vector<double> fractions;
  double ridge = 0.0;
  double ted_gamma = 1.0;
  double ted_c = 1.0;
  int max_iter = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int knn_k = 5;
  std::string weights;
  std::string selection;
  std::vector<double> mix_ratios;
  std::string mix_base = kStrategyTedGreedy;
  double spectral_tol = kDefaultSpectralTolerance;
  std::string out = ".";
};

struct Loaded {
  Dataset dataset;
  std::optional<ConditionalDistribution> truth;
};

Loaded LoadData(const RunConfig& cfg) {
  const bool has_csv = !cfg.data.empty();
  const bool has_synthetic = !cfg.synthetic.empty();
  if (has_csv == has_synthetic) {
    throw InvalidArgument("exactly one of --data and --synthetic is required");
  }
  if (has_csv) {
    std::optional<std::string> label;
    if (!cfg.label_col.empty()) label = cfg.label_col;
    return Loaded{LoadCsv(cfg.data, label), std::nullopt};
  }
  if (cfg.synthetic != "mixture") {
    throw InvalidArgument("unknown synthetic generator '" + cfg.synthetic +
                          "' (expected 'mixture')");
  }
  if (cfg.n_per_class < 1 || cfg.classes < 2 || cfg.components_per_class < 1 ||
      cfg.dim < 1 || !(cfg.sigma > 0.0) || !(cfg.separation > 0.0)) {
    throw InvalidArgument("synthetic mixture: need n-per-class >= 1, "
                          "classes >= 2, components-per-class >= 1, "
                          "dim >= 1, sigma > 0, separation > 0");
  }
  // One component per class sits on a circle of radius `separation`; more
  // components go on a grid with that spacing.
  SyntheticData data =
      cfg.components_per_class == 1
          ? MakeGaussianMixture(
                cfg.data_seed, cfg.n_per_class,
                CircleCenters(cfg.classes, cfg.dim, cfg.separation), cfg.sigma)
          : MakeGaussianMixture(
                cfg.data_seed, cfg.n_per_class,
                GridLayout(cfg.classes, cfg.components_per_class, cfg.dim,
                           cfg.separation),
                cfg.sigma);
  return Loaded{std::move(data.dataset), std::move(data.posterior)};
}

KernelSpec BuildKernel(const RunConfig& cfg, bool gamma_given,
                       const Dataset& dataset) {
  KernelSpec spec;
  spec.family = ParseKernelFamily(cfg.kernel);
  spec.gamma = gamma_given ? cfg.gamma : DefaultRbfGamma(dataset.features());
  spec.degree = cfg.degree;
  spec.coef0 = cfg.coef0;
  spec.scale = cfg.scale;
  spec.Validate();
  return spec;
}

Eigen::VectorXd ReadWeights(const std::string& path, int n) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InvalidArgument("weights file '" + path + "' not found");
  }
  std::istringstream in(ReadFile(path));
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(line.data() + first, line.data() + last + 1, v);
    if (ec != std::errc() || ptr != line.data() + last + 1) {
      throw InvalidArgument("weights: '" + line + "' is not a number");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != n) {
    throw InvalidArgument("weights: expected " + std::to_string(n) +
                          " values, found " + std::to_string(values.size()));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), n);
}

StrategyOptions BuildStrategyOptions(const RunConfig& cfg, int n) {
  StrategyOptions options;
  options.ridge = cfg.ridge;
  options.ted_gamma = cfg.ted_gamma;
  options.ted_c = cfg.ted_c;
  options.max_iter = cfg.max_iter;
  options.tol = cfg.tol;
  options.knn_k = cfg.knn_k;
  options.seed = cfg.seed;
  if (!cfg.weights.empty()) options.weights = ReadWeights(cfg.weights, n);
  if (cfg.knn_k < 1) throw InvalidArgument("--knn-k must be >= 1");
  return options;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void Emit(std::ostream& out, const std::string& path, const std::string& body) {
  WriteFileAtomic(path, body);
  out << "wrote " << path << "\n";
}

void RunSelect(const RunConfig& cfg, bool gamma_given, bool m_given,
               bool fraction_given, std::ostream& out) {
  const Loaded data = LoadData(cfg);
  const int n = data.dataset.size();
  if (cfg.strategies.size() != 1) {
    throw InvalidArgument("select: exactly one --strategy is required");
  }
  if (m_given == fraction_given) {
    throw InvalidArgument("select: exactly one of --m and --fraction is required");
  }
  if (fraction_given && cfg.fractions.size() != 1) {
    throw InvalidArgument("select: --fraction takes a single value");
  }
  const std::string& id = cfg.strategies.front();
  if (!IsKnownStrategy(id)) throw InvalidArgument("unknown strategy '" + id + "'");
  const int m = m_given ? cfg.m : SelectionSizeForFraction(cfg.fractions[0], n);
  CheckSelectionSize(n, m);

  const StrategyOptions options = BuildStrategyOptions(cfg, n);
  const bool needs_kernel = id == kStrategyTedGreedy ||
                            id == kStrategyTedSequential ||
                            id == kStrategyInverseDiagonal;
  GramMatrix k;
  if (needs_kernel) k = Gram(BuildKernel(cfg, gamma_given, data.dataset),
                             data.dataset.features());
  const SelectionResult result = RunStrategy(id, data.dataset, k, m, options);
  Emit(out, JoinPath(cfg.out, "selection.json"), FormatSelectionJson(result));
  Emit(out, JoinPath(cfg.out, "indices.txt"), FormatIndices(result.order));
}

void RunDiagnose(const RunConfig& cfg, bool gamma_given, std::ostream& out) {
  if (cfg.selection.empty()) {
    throw InvalidArgument("diagnose: --selection is required");
  }
  const std::vector<int> indices = ReadSelectionFile(cfg.selection);
  const Loaded data = LoadData(cfg);
  const Dataset& ds = data.dataset;
  const SelectionMask mask(indices);
  mask.Validate(ds.size());
  if (mask.empty()) throw InvalidArgument("diagnose: empty selection");

  std::optional<ConditionalDistribution> p = data.truth;
  if (!p && ds.has_labels()) {
    p = ConditionalDistribution::OneHot(ds.labels(), ds.class_count());
  }
  if (!p) {
    throw InvalidArgument("diagnose: needs labels or a synthetic posterior");
  }
  const GramMatrix k = Gram(BuildKernel(cfg, gamma_given, ds), ds.features());
  const SpectralModel spectrum = ComputeSpectralModel(k, cfg.spectral_tol);
  const BoundReport report = ComputeBoundReport(k, mask, spectrum, *p);
  const PowerProfile profile = ComputePowerProfile(k, mask);
  Emit(out, JoinPath(cfg.out, "bound_report.json"),
       FormatBoundReportJson(report));
  Emit(out, JoinPath(cfg.out, "power_profile.csv"),
       FormatPowerProfileCsv(profile));
}

void RunSweepCommand(const RunConfig& cfg, bool gamma_given,
                     std::ostream& out) {
  const Loaded data = LoadData(cfg);
  const Dataset& ds = data.dataset;
  if (!ds.has_labels()) throw InvalidArgument("sweep: labels are required");
  SweepOptions options;
  options.strategies = cfg.strategies;
  if (options.strategies.empty()) {
    options.strategies = {kStrategyRandom, kStrategyFacilityLocation,
                          kStrategyTedGreedy, kStrategyInverseDiagonal};
  }
  options.fractions = cfg.fractions;
  if (options.fractions.empty()) {
    for (int i = 1; i <= 18; ++i) options.fractions.push_back(0.05 * i);
  }
  options.strategy = BuildStrategyOptions(cfg, ds.size());
  options.spectral_tol = cfg.spectral_tol;
  const KernelSpec kernel = BuildKernel(cfg, gamma_given, ds);

  std::vector<SweepRecord> records = RunSweep(ds, kernel, options, data.truth);
  if (!cfg.mix_ratios.empty()) {
    const std::vector<SweepRecord> mixed =
        RunMixedSweep(ds, kernel, cfg.mix_base, cfg.mix_ratios, options,
                      data.truth);
    records.insert(records.end(), mixed.begin(), mixed.end());
  }
  Emit(out, JoinPath(cfg.out, "sweep.csv"), FormatSweepCsv(records));
  Emit(out, JoinPath(cfg.out, "summary.json"),
       FormatSummaryJson(SummarizeSweep(records)));
}

void RunGram(const RunConfig& cfg, bool gamma_given, std::ostream& out) {
  const Loaded data = LoadData(cfg);
  const GramMatrix k =
      Gram(BuildKernel(cfg, gamma_given, data.dataset), data.dataset.features());
  Emit(out, JoinPath(cfg.out, "gram.csv"), FormatMatrixCsv(k.values));
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Kernel-based training-data selection and diagnostics",
               "datasel"};
  app.set_config("--config", "", "Flat key=value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--data", cfg.data, "CSV dataset with a header row");
  app.add_option("--label-col", cfg.label_col, "Label column name");
  app.add_option("--synthetic", cfg.synthetic, "Synthetic generator: mixture");
  app.add_option("--n-per-class", cfg.n_per_class, "Mixture points per class");
  app.add_option("--classes", cfg.classes, "Mixture class count");
  app.add_option("--components-per-class", cfg.components_per_class,
                 "Mixture components per class (1: circle, else grid)");
  app.add_option("--dim", cfg.dim, "Mixture dimension");
  app.add_option("--separation", cfg.separation, "Circle radius or grid spacing");
  app.add_option("--sigma", cfg.sigma, "Mixture component std-dev");
  app.add_option("--data-seed", cfg.data_seed, "Mixture sampling seed");
  app.add_option("--kernel", cfg.kernel, "linear, rbf, cosine or poly");
  CLI::Option* gamma_opt =
      app.add_option("--gamma", cfg.gamma, "rbf gamma (default 1/(d Var x))");
  app.add_option("--degree", cfg.degree, "Polynomial degree");
  app.add_option("--coef0", cfg.coef0, "Polynomial offset");
  app.add_option("--scale", cfg.scale, "Kernel scale c");
  app.add_option("--strategy", cfg.strategies, "Strategy id (list for sweep)")
      ->delimiter(',');
  CLI::Option* m_opt = app.add_option("--m", cfg.m, "Selection size");
  CLI::Option* fraction_opt =
      app.add_option("--fraction", cfg.fractions,
                     "Selection size as a fraction of N (list for sweep)")
          ->delimiter(',');
  app.add_option("--ridge", cfg.ridge, "TED ridge");
  app.add_option("--ted-gamma", cfg.ted_gamma, "Sequential TED sparsity gamma");
  app.add_option("--ted-c", cfg.ted_c, "Sequential TED kernel scale c");
  app.add_option("--max-iter", cfg.max_iter, "Sequential TED iteration cap");
  app.add_option("--tol", cfg.tol, "Sequential TED relative beta tolerance");
  app.add_option("--seed", cfg.seed, "Selection seed");
  app.add_option("--knn-k", cfg.knn_k, "k for the k-NN classifier");
  app.add_option("--weights", cfg.weights, "Per-point weights, one per line");
  app.add_option("--selection", cfg.selection,
                 "selection.json or index list (diagnose)");
  app.add_option("--mix-ratios", cfg.mix_ratios,
                 "Selected-to-random ratios for a mixed sweep")
      ->delimiter(',');
  app.add_option("--mix-base", cfg.mix_base, "Base strategy for mixed sweeps");
  app.add_option("--spectral-tol", cfg.spectral_tol,
                 "Relative eigenvalue cutoff");
  app.add_option("--out", cfg.out, "Output directory");

  CLI::App* select = app.add_subcommand("select", "Select a subset");
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Bound report and power profile");
  CLI::App* sweep = app.add_subcommand("sweep", "Objective vs error sweep");
  CLI::App* gram = app.add_subcommand("gram", "Write the Gram matrix");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const bool gamma_given = gamma_opt->count() > 0;
  try {
    if (select->parsed()) {
      RunSelect(cfg, gamma_given, m_opt->count() > 0,
                fraction_opt->count() > 0, out);
    } else if (diagnose->parsed()) {
      RunDiagnose(cfg, gamma_given, out);
    } else if (sweep->parsed()) {
      RunSweepCommand(cfg, gamma_given, out);
    } else if (gram->parsed()) {
      RunGram(cfg, gamma_given, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace datasel::cli
