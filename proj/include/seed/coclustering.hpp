#pragma once

#include "seed/sparse_coding.hpp"
#include "seed/types.hpp"

#include <cstdint>
#include <vector>

namespace seed {

struct CoClusterConfig {
  int clusters = 2;  // k >= 2
  std::uint64_t seed = 0;
  double svd_tol = 1e-10;
  int svd_max_iter = 10000;
  int kmeans_restarts = 10;
};

/// |V| as an edge-weight matrix between atoms (rows) and data points
/// (columns), with per-side degrees. Zero-degree nodes are recorded rather
/// than rejected.
struct BipartiteGraph {
  Matrix weights;      // L x N, non-negative
  Vector row_degrees;  // row sums
  Vector col_degrees;  // column sums
  std::vector<Index> zero_degree_rows;
  std::vector<Index> zero_degree_cols;
};

BipartiteGraph make_bipartite_graph(const SparseCode& V);

struct CoClusterResult {
  std::vector<int> row_labels;  // one per atom (row of V)
  std::vector<int> col_labels;  // one per data point (column of V)
  int clusters = 0;
  Matrix row_embedding;  // embedding_dim x L, column per atom
  Matrix col_embedding;  // embedding_dim x N, column per point
  std::vector<double> ncut_printed;
  std::vector<double> ncut_conventional;
  /// Set when the spectral gap vanishes (second singular value ~ 0) and the
  /// embedding carries no cluster information.
  bool degenerate = false;
  std::vector<Index> zero_degree_rows;
  std::vector<Index> zero_degree_cols;
  /// Classes whose ncut had a zero-mass row or column term (term taken as 0).
  std::vector<int> zero_mass_classes;
};

/// Bipartite spectral co-clustering of the weights |V|: normalizes by the
/// inverse square-root degree on both sides, takes ceil(log2 k) + 1 leading
/// singular triplets (dropping the first), embeds rows and columns, and
/// jointly k-means the stacked embedding into k clusters. Zero-degree nodes
/// are held out of the fit and assigned to the nearest centroid afterwards.
CoClusterResult cocluster(const SparseCode& V, const CoClusterConfig& cfg);

struct NcutValues {
  std::vector<double> per_class;
  std::vector<bool> zero_row_mass;  // flagged classes whose row term was 0/0
  std::vector<bool> zero_col_mass;
};

/// Normalized-cut cost with within-block mass in both numerators, evaluated
/// exactly as printed; a perfect block-diagonal partition scores 2 per class.
NcutValues ncut_printed(const Matrix& weights, const std::vector<int>& row_labels,
                        const std::vector<int>& col_labels, int k);

/// Conventional normalized cut: numerator is the mass leaving the block, so
/// lower is better and a perfect block-diagonal partition scores 0.
NcutValues ncut_conventional(const Matrix& weights, const std::vector<int>& row_labels,
                             const std::vector<int>& col_labels, int k);

/// Benchmark-harness baselines, desk scale only (both are O(N^2)).
/// Self-expressive affinity |V| + |V|^T from coding every column against all
/// others.
Matrix ssc_omp_affinity(const DataMatrix& X, const StoppingRule& stop);
/// Symmetric k-nearest-neighbor graph with unit weights.
Matrix nn_affinity(const DataMatrix& X, int neighbors);

}  // namespace seed
