// Command-line front end: fixture generation, column selection, SEED
// decomposition, co-clustering, denoising, outlier detection and
// approximation benchmarks, with optional JSON run reports.

#include <CLI11.hpp>
#include <json.hpp>

#include "seed/applications.hpp"
#include "seed/coclustering.hpp"
#include "seed/io.hpp"
#include "seed/parallel.hpp"
#include "seed/pipeline.hpp"
#include "seed/synth.hpp"
#include "seed/version.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace seed;

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

json to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(finite_or_zero(x));
  return out;
}

struct CommonOptions {
  std::string input;
  std::string format = "auto";
  bool no_transpose = false;
  std::string out;
  std::string report;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct DecomposeOptions {
  std::string method = "oasis";
  Index L = 0;
  std::optional<double> delta;
  std::optional<double> eps;
  std::optional<int> kmax;
  std::string variant = "diag";
};

void add_common_io(CLI::App* cmd, CommonOptions& opt, bool input_required = true) {
  auto* in = cmd->add_option("--input", opt.input, "input matrix file");
  if (input_required) in->required();
  cmd->add_option("--format", opt.format, "input format: auto|csv|seedbin")
      ->check(CLI::IsMember({"auto", "csv", "seedbin"}));
  cmd->add_flag("--no-transpose", opt.no_transpose,
                "treat CSV rows as dimensions instead of data points");
  cmd->add_option("--out", opt.out, "output file");
  cmd->add_option("--report", opt.report, "write a JSON run report here");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--threads", opt.threads, "worker thread cap (0 = all cores)");
}

void add_decompose_flags(CLI::App* cmd, DecomposeOptions& opt) {
  cmd->add_option("--method", opt.method, "column sampler: oasis|random|ses|leverage")
      ->check(CLI::IsMember({"oasis", "random", "ses", "leverage"}));
  cmd->add_option("--L", opt.L, "number of columns to select")->required();
  cmd->add_option("--delta", opt.delta, "oASIS stop threshold (absolute)");
  cmd->add_option("--eps", opt.eps, "OMP residual stop (Error)");
  cmd->add_option("--kmax", opt.kmax, "OMP sparsity stop (Sparse)");
  cmd->add_option("--variant", opt.variant, "sampled-column coding: diag|zerodiag")
      ->check(CLI::IsMember({"diag", "zerodiag"}));
}

DataMatrix load_input(const CommonOptions& opt) {
  const MatrixFormat fmt = opt.format == "csv"       ? MatrixFormat::csv
                           : opt.format == "seedbin" ? MatrixFormat::seedbin
                                                     : detect_format(opt.input);
  return load_matrix(opt.input, fmt, !opt.no_transpose);
}

SeedConfig make_config(const CommonOptions& common, const DecomposeOptions& dec) {
  SeedConfig cfg;
  cfg.sampler.method = sampler_method_from_string(dec.method);
  cfg.sampler.count = dec.L;
  cfg.sampler.seed = common.seed;
  cfg.stop.max_atoms = dec.kmax;
  cfg.stop.residual_tol = dec.eps;
  cfg.variant = variant_from_string(dec.variant);
  cfg.oasis.max_columns = dec.L;
  cfg.oasis.seed = common.seed;
  cfg.oasis.delta_stop = dec.delta;
  return cfg;
}

json config_echo(const CommonOptions& common, const DecomposeOptions* dec) {
  json cfg;
  cfg["input"] = common.input;
  cfg["seed"] = common.seed;
  if (dec != nullptr) {
    cfg["method"] = dec->method;
    cfg["L"] = static_cast<std::int64_t>(dec->L);
    if (dec->delta) cfg["delta"] = finite_or_zero(*dec->delta);
    if (dec->eps) cfg["eps"] = finite_or_zero(*dec->eps);
    if (dec->kmax) cfg["kmax"] = *dec->kmax;
    cfg["variant"] = dec->variant;
  }
  return cfg;
}

class ReportWriter {
 public:
  ReportWriter(std::string command, const CommonOptions& common)
      : path_(common.report), start_(std::chrono::steady_clock::now()) {
    body_["schema_version"] = kReportSchemaVersion;
    body_["tool_version"] = kVersion;
    body_["command"] = std::move(command);
    body_["seed"] = common.seed;
    body_["threads"] = max_threads();
  }

  json& config() { return body_["config"]; }
  json& metrics() { return body_["metrics"]; }
  void set(const std::string& key, json value) { body_[key] = std::move(value); }

  void write() {
    if (path_.empty()) return;
    body_["timings"]["total_sec"] = finite_or_zero(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    std::ofstream out(path_);
    if (!out) throw DataError("'" + path_ + "': cannot open report for writing");
    out << body_.dump(2) << '\n';
  }

 private:
  std::string path_;
  json body_;
  std::chrono::steady_clock::time_point start_;
};

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw DataError("'" + path + "': cannot open for writing");
  for (const std::string& l : lines) out << l << '\n';
}

// ----- synth -----------------------------------------------------------------

struct SynthOptions {
  std::string preset = "uos-paper";
  Index m = 40;
  Index n = 200;
  Index rank = 10;
  double sigma = 0.0;
  std::string labels_out;
};

int run_synth(const CommonOptions& common, const SynthOptions& opt) {
  if (common.out.empty()) throw InvalidArgument("synth: --out is required");

  std::optional<DataMatrix> data;
  std::vector<int> labels;
  Index rank = 0;
  json meta;

  if (opt.preset == "uos-paper") {
    SynthDataset ds = gen_union_of_subspaces(uos_paper_spec(common.seed));
    data = std::move(ds.data);
    labels = std::move(ds.labels);
    rank = ds.true_rank;
    meta["preset"] = "uos-paper";
    meta["ambient_dim"] = 200;  // our choice; the construction leaves it open
    meta["noise_sigma"] = 0.0;
  } else if (opt.preset == "five-subspaces") {
    SynthDataset ds = gen_union_of_subspaces(five_subspace_spec(common.seed));
    data = std::move(ds.data);
    labels = std::move(ds.labels);
    rank = ds.true_rank;
    meta["preset"] = "five-subspaces";
  } else if (opt.preset == "lowrank") {
    data = gen_low_rank(opt.m, opt.n, opt.rank, opt.sigma, common.seed);
    rank = opt.rank;
    meta["preset"] = "lowrank";
    meta["noise_sigma"] = opt.sigma;
  } else if (opt.preset == "dup") {
    data = gen_duplicated_columns(opt.m, opt.rank, opt.n / std::max<Index>(opt.rank, 1),
                                  common.seed);
    rank = opt.rank;
    meta["preset"] = "dup";
  } else {
    throw InvalidArgument("synth: unknown preset '" + opt.preset + "'");
  }

  save_matrix(common.out, *data, detect_format(common.out));
  if (!opt.labels_out.empty()) {
    std::vector<std::string> lines;
    lines.reserve(labels.size());
    for (int l : labels) lines.push_back(std::to_string(l));
    write_lines(opt.labels_out, lines);
  }

  ReportWriter report("synth", common);
  report.config() = config_echo(common, nullptr);
  report.config()["preset"] = opt.preset;
  report.metrics()["rows"] = static_cast<std::int64_t>(data->rows());
  report.metrics()["cols"] = static_cast<std::int64_t>(data->cols());
  report.metrics()["rank"] = static_cast<std::int64_t>(rank);
  report.metrics()["fixture"] = meta;
  report.write();

  std::cout << "wrote " << data->rows() << "x" << data->cols() << " matrix (rank " << rank
            << ") to " << common.out << '\n';
  return 0;
}

// ----- select ----------------------------------------------------------------

int run_select(const CommonOptions& common, const DecomposeOptions& dec) {
  const DataMatrix X = load_input(common);
  SeedConfig cfg = make_config(common, dec);
  cfg.sampler.validate(X.rows(), X.cols());

  const SelectionRun run = select_columns(X, cfg.sampler, cfg.oasis);

  if (!common.out.empty()) {
    std::vector<std::string> lines;
    for (Index i : run.selected) lines.push_back(std::to_string(i));
    write_lines(common.out, lines);
  }

  ReportWriter report("select", common);
  report.config() = config_echo(common, &dec);
  json idx = json::array();
  for (Index i : run.selected) idx.push_back(static_cast<std::int64_t>(i));
  report.metrics()["selected"] = idx;
  report.metrics()["stopped_early"] = run.stopped_early;
  report.set("delta_trace", to_json(run.delta_trace));
  report.write();

  std::cout << "selected " << run.selected.size() << " columns"
            << (run.stopped_early ? " (stopped early)" : "") << '\n';
  return 0;
}

// ----- decompose / denoise -----------------------------------------------------

int run_decompose(const CommonOptions& common, const DecomposeOptions& dec) {
  const DataMatrix X = load_input(common);
  const SeedConfig cfg = make_config(common, dec);
  const SeedDecomposition d = seed_decompose(X, cfg);

  if (!common.out.empty()) save_decomposition(common.out, d);

  Index nnz = 0;
  for (const SparseVector& c : d.code.cols) nnz += static_cast<Index>(c.support.size());

  ReportWriter report("decompose", common);
  report.config() = config_echo(common, &dec);
  report.metrics()["atoms"] = static_cast<std::int64_t>(d.dictionary.atom_count());
  report.metrics()["nonzeros"] = static_cast<std::int64_t>(nnz);
  report.set("delta_trace", to_json(d.delta_trace));
  report.write();

  std::cout << "decomposed into " << d.dictionary.atom_count() << " atoms, " << nnz
            << " nonzeros\n";
  return 0;
}

int run_denoise(const CommonOptions& common, const DecomposeOptions& dec) {
  if (common.out.empty()) throw InvalidArgument("denoise: --out is required");
  const DataMatrix X = load_input(common);
  const SeedConfig cfg = make_config(common, dec);
  const DataMatrix denoised = denoise(X, cfg);
  save_matrix(common.out, denoised, detect_format(common.out));

  ReportWriter report("denoise", common);
  report.config() = config_echo(common, &dec);
  report.metrics()["rel_change"] =
      finite_or_zero((X.mat() - denoised.mat()).norm() / X.mat().norm());
  report.write();

  std::cout << "wrote denoised matrix to " << common.out << '\n';
  return 0;
}

// ----- approx ------------------------------------------------------------------

int run_approx(const CommonOptions& common, const std::vector<std::string>& methods,
               const std::vector<Index>& grid, int trials, const DecomposeOptions& dec) {
  const DataMatrix X = load_input(common);
  if (grid.empty()) throw InvalidArgument("approx: at least one --L is required");
  if (trials < 1) throw InvalidArgument("approx: --trials must be positive");

  std::vector<SamplerSpec> specs;
  for (const std::string& name : methods) {
    SamplerSpec s;
    s.method = sampler_method_from_string(name);
    specs.push_back(s);
  }
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < trials; ++t) seeds.push_back(common.seed + static_cast<std::uint64_t>(t));

  OasisConfig ocfg;
  ocfg.delta_stop = dec.delta;
  const auto curves = error_curve(X, specs, grid, seeds, ocfg);

  ReportWriter report("approx", common);
  report.config() = config_echo(common, &dec);
  report.config()["trials"] = trials;
  json jcurves = json::array();
  for (const ApproxCurve& c : curves) {
    json jc;
    jc["method"] = c.method;
    json sizes = json::array();
    for (Index L : c.sizes) sizes.push_back(static_cast<std::int64_t>(L));
    jc["L"] = sizes;
    jc["mean_error"] = to_json(c.mean_errors);
    jc["stderr"] = to_json(c.stderr_errors);
    jc["mean_seconds"] = to_json(c.mean_seconds);
    if (!c.delta_trace.empty()) jc["delta_trace"] = to_json(c.delta_trace);
    jcurves.push_back(std::move(jc));
  }
  report.metrics()["curves"] = jcurves;
  report.write();

  for (const ApproxCurve& c : curves) {
    std::cout << c.method << ":";
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
      std::printf(" L=%ld err=%.3e", static_cast<long>(c.sizes[i]), c.mean_errors[i]);
    }
    std::cout << '\n';
  }
  return 0;
}

// ----- cluster -------------------------------------------------------------------

int run_cluster(const CommonOptions& common, const DecomposeOptions& dec, int k) {
  const DataMatrix X = load_input(common);
  const SeedConfig cfg = make_config(common, dec);
  const SeedDecomposition d = seed_decompose(X, cfg);

  CoClusterConfig ccfg;
  ccfg.clusters = k;
  ccfg.seed = common.seed;
  const CoClusterResult r = cocluster(d.code, ccfg);

  if (!common.out.empty()) {
    std::vector<std::string> lines;
    for (int l : r.col_labels) lines.push_back(std::to_string(l));
    write_lines(common.out, lines);
  }

  ReportWriter report("cluster", common);
  report.config() = config_echo(common, &dec);
  report.config()["k"] = k;
  json rows = json::array(), cols = json::array();
  for (int l : r.row_labels) rows.push_back(l);
  for (int l : r.col_labels) cols.push_back(l);
  report.metrics()["row_labels"] = rows;
  report.metrics()["col_labels"] = cols;
  report.metrics()["ncut_printed"] = to_json(r.ncut_printed);
  report.metrics()["ncut_conventional"] = to_json(r.ncut_conventional);
  report.metrics()["degenerate"] = r.degenerate;
  report.set("delta_trace", to_json(d.delta_trace));
  report.write();

  double total_cut = 0.0;
  for (double c : r.ncut_conventional) total_cut += c;
  std::cout << "clustered into " << k << " classes; mean conventional ncut "
            << total_cut / static_cast<double>(k) << (r.degenerate ? " (degenerate)" : "")
            << '\n';
  return 0;
}

// ----- outliers --------------------------------------------------------------------

int run_outliers(const CommonOptions& common, const DecomposeOptions& dec,
                 std::optional<int> threshold) {
  const DataMatrix X = load_input(common);
  SeedConfig cfg = make_config(common, dec);
  cfg.variant = Variant::zero_diag;

  const OutlierReport r = detect_outliers(X, cfg, threshold);

  if (!common.out.empty()) {
    std::vector<std::string> lines;
    for (bool o : r.is_outlier) lines.push_back(o ? "1" : "0");
    write_lines(common.out, lines);
  }

  int n_outliers = 0;
  json sparsity = json::array();
  for (std::size_t j = 0; j < r.sparsity.size(); ++j) {
    sparsity.push_back(r.sparsity[j]);
    if (r.is_outlier[j]) ++n_outliers;
  }

  ReportWriter report("outliers", common);
  report.config() = config_echo(common, &dec);
  report.metrics()["sparsity"] = sparsity;
  report.metrics()["threshold"] = finite_or_zero(r.threshold);
  report.metrics()["mode"] = r.mode == ThresholdMode::fixed ? "fixed" : "kmeans";
  report.metrics()["low_confidence"] = r.low_confidence;
  report.metrics()["outliers"] = n_outliers;
  report.write();

  std::cout << "flagged " << n_outliers << " of " << r.sparsity.size() << " columns"
            << (r.low_confidence ? " (low confidence)" : "") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SEED: sparse self-expressive matrix decomposition"};
  app.require_subcommand(1);

  CommonOptions common;
  DecomposeOptions dec;
  SynthOptions synth_opt;
  std::vector<std::string> approx_methods{"oasis"};
  std::vector<Index> approx_grid;
  int approx_trials = 5;
  int cluster_k = 2;
  std::optional<int> outlier_threshold;

  CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic fixture");
  add_common_io(c_synth, common, /*input_required=*/false);
  c_synth->add_option("--preset", synth_opt.preset, "uos-paper|five-subspaces|lowrank|dup");
  c_synth->add_option("--m", synth_opt.m, "rows (lowrank/dup)");
  c_synth->add_option("--n", synth_opt.n, "columns (lowrank/dup)");
  c_synth->add_option("--rank", synth_opt.rank, "rank / distinct columns (lowrank/dup)");
  c_synth->add_option("--sigma", synth_opt.sigma, "noise level (lowrank)");
  c_synth->add_option("--labels-out", synth_opt.labels_out, "ground-truth labels file");

  CLI::App* c_select = app.add_subcommand("select", "column selection only");
  add_common_io(c_select, common);
  add_decompose_flags(c_select, dec);

  CLI::App* c_decompose = app.add_subcommand("decompose", "full SEED decomposition");
  add_common_io(c_decompose, common);
  add_decompose_flags(c_decompose, dec);

  CLI::App* c_approx = app.add_subcommand("approx", "approximation error curves");
  add_common_io(c_approx, common);
  c_approx->add_option("--method", approx_methods, "samplers to benchmark")->delimiter(',');
  c_approx->add_option("--L", approx_grid, "factorization sizes")->delimiter(',')->required();
  c_approx->add_option("--trials", approx_trials, "seeds per (method, L) cell");
  c_approx->add_option("--delta", dec.delta, "oASIS stop threshold (absolute)");

  CLI::App* c_cluster = app.add_subcommand("cluster", "SEED + bipartite co-clustering");
  add_common_io(c_cluster, common);
  add_decompose_flags(c_cluster, dec);
  c_cluster->add_option("--k", cluster_k, "number of clusters")->required();

  CLI::App* c_denoise = app.add_subcommand("denoise", "reconstruct through the decomposition");
  add_common_io(c_denoise, common);
  add_decompose_flags(c_denoise, dec);

  CLI::App* c_outliers = app.add_subcommand("outliers", "sparsity-based outlier detection");
  add_common_io(c_outliers, common);
  add_decompose_flags(c_outliers, dec);
  c_outliers->add_option("--threshold", outlier_threshold, "fixed sparsity threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "SEED-ERR: usage: " << e.what() << '\n';
    return 1;
  }

  try {
    if (common.threads > 0) set_max_threads(common.threads);
    if (c_synth->parsed()) return run_synth(common, synth_opt);
    if (c_select->parsed()) return run_select(common, dec);
    if (c_decompose->parsed()) return run_decompose(common, dec);
    if (c_approx->parsed()) {
      return run_approx(common, approx_methods, approx_grid, approx_trials, dec);
    }
    if (c_cluster->parsed()) return run_cluster(common, dec, cluster_k);
    if (c_denoise->parsed()) return run_denoise(common, dec);
    if (c_outliers->parsed()) return run_outliers(common, dec, outlier_threshold);
    std::cerr << "SEED-ERR: usage: no subcommand\n";
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "SEED-ERR: usage: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "SEED-ERR: data: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "SEED-ERR: numerical: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "SEED-ERR: internal: " << e.what() << '\n';
    return 3;
  }
}
