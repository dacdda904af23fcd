#include "seed/applications.hpp"

#include "seed/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace seed {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double approx_error(const DataMatrix& X, const ColumnIndexSet& S) {
  if (S.empty()) throw InvalidArgument("approx_error: empty index set");
  const double total = X.mat().squaredNorm();
  if (total == 0.0) return 0.0;
  const Matrix projected = least_squares_project(X, S);
  return (X.mat() - projected).squaredNorm() / total;
}

std::vector<ApproxCurve> error_curve(const DataMatrix& X, std::vector<SamplerSpec> methods,
                                     const std::vector<Index>& L_grid,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::optional<OasisConfig>& oasis_cfg) {
  if (seeds.empty()) throw InvalidArgument("error_curve: at least one seed is required");
  for (Index L : L_grid) {
    if (L < 0 || L > X.cols()) throw InvalidArgument("error_curve: L grid value out of range");
  }

  std::vector<ApproxCurve> curves;
  curves.reserve(methods.size());
  for (SamplerSpec spec : methods) {
    ApproxCurve curve;
    curve.method = to_string(spec.method);
    curve.sizes = L_grid;
    curve.mean_errors.resize(L_grid.size(), 0.0);
    curve.stderr_errors.resize(L_grid.size(), 0.0);
    curve.mean_seconds.resize(L_grid.size(), 0.0);

    for (std::size_t li = 0; li < L_grid.size(); ++li) {
      const Index L = L_grid[li];
      std::vector<double> errors;
      errors.reserve(seeds.size());
      double time_sum = 0.0;
      for (std::uint64_t s : seeds) {
        if (L == 0) {
          errors.push_back(1.0);  // empty basis scores 1 by convention
          continue;
        }
        spec.count = L;
        spec.seed = s;
        std::optional<OasisConfig> ocfg = oasis_cfg;
        if (ocfg.has_value()) {
          ocfg->max_columns = L;
          ocfg->seed = s;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const SelectionRun run = select_columns(X, spec, ocfg);
        time_sum += seconds_since(t0);
        errors.push_back(approx_error(X, run.selected));
        if (curve.method == "oasis" && curve.delta_trace.size() < run.delta_trace.size()) {
          curve.delta_trace = run.delta_trace;
        }
      }

      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= static_cast<double>(errors.size());
      double var = 0.0;
      for (double e : errors) var += (e - mean) * (e - mean);
      const double stderr_mean =
          errors.size() > 1
              ? std::sqrt(var / static_cast<double>(errors.size() - 1)) /
                    std::sqrt(static_cast<double>(errors.size()))
              : 0.0;
      curve.mean_errors[li] = mean;
      curve.stderr_errors[li] = stderr_mean;
      curve.mean_seconds[li] = time_sum / static_cast<double>(seeds.size());
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

DataMatrix denoise(const DataMatrix& X, const SeedConfig& cfg) {
  const SeedDecomposition dec = seed_decompose(X, cfg);
  return DataMatrix(reconstruct(dec));
}

OutlierReport detect_outliers(const DataMatrix& X, SeedConfig cfg, std::optional<int> threshold) {
  if (!cfg.stop.residual_tol.has_value()) {
    throw InvalidArgument("detect_outliers: Error stopping (eps) is required");
  }
  if (cfg.variant != Variant::zero_diag) {
    throw InvalidArgument("detect_outliers: the zero_diag variant is required");
  }
  // Sparsity must be demand-driven: k_max defaults to the atom budget.
  if (!cfg.stop.max_atoms.has_value()) {
    cfg.stop.max_atoms = static_cast<int>(cfg.sampler.count);
  }

  const SeedDecomposition dec = seed_decompose(X, cfg);

  OutlierReport report;
  report.sparsity.reserve(dec.code.cols.size());
  for (const SparseVector& c : dec.code.cols) {
    report.sparsity.push_back(static_cast<int>(c.support.size()));
  }
  const std::size_t n = report.sparsity.size();
  report.is_outlier.assign(n, false);

  if (threshold.has_value()) {
    report.mode = ThresholdMode::fixed;
    report.threshold = static_cast<double>(*threshold);
    for (std::size_t j = 0; j < n; ++j) {
      report.is_outlier[j] = report.sparsity[j] > *threshold;
    }
    return report;
  }

  // Learn the threshold with a 1-D 2-means split of the sparsity levels.
  report.mode = ThresholdMode::kmeans;
  Matrix points(1, static_cast<Index>(n));
  for (std::size_t j = 0; j < n; ++j) points(0, static_cast<Index>(j)) = report.sparsity[j];

  KMeansConfig km;
  km.k = 2;
  km.seed = cfg.sampler.seed;
  const KMeansResult split = kmeans(points, km);

  const double mean0 = split.centroids(0, 0);
  const double mean1 = split.centroids(0, 1);
  const int hi = mean1 > mean0 ? 1 : 0;
  report.low_confidence = std::abs(mean1 - mean0) <= 1.0 + 1e-12;
  report.threshold = (mean0 + mean1) / 2.0;
  if (report.low_confidence) {
    // Unimodal sparsity: no evidence of outliers.
    return report;
  }
  for (std::size_t j = 0; j < n; ++j) {
    report.is_outlier[j] = split.labels[j] == hi;
  }
  return report;
}

}  // namespace seed
