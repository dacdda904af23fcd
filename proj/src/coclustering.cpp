#include "seed/coclustering.hpp"

#include "seed/core.hpp"
#include "seed/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seed {

namespace {

constexpr double kDegreeFloor = 1e-12;
constexpr double kDegenerateGap = 1e-10;

void check_labels(const std::vector<int>& labels, int k, const char* what) {
  for (int l : labels) {
    if (l < 0 || l >= k) throw InvalidArgument(std::string(what) + ": label out of range [0, k)");
  }
}

struct ClassMasses {
  Matrix block;      // k x k: mass between row class r and column class c
  Vector row_total;  // mass of each row class over all columns
  Vector col_total;  // mass of all rows into each column class
};

ClassMasses class_masses(const Matrix& weights, const std::vector<int>& row_labels,
                         const std::vector<int>& col_labels, int k) {
  if (static_cast<Index>(row_labels.size()) != weights.rows() ||
      static_cast<Index>(col_labels.size()) != weights.cols()) {
    throw InvalidArgument("ncut: label lengths do not match the weight matrix");
  }
  check_labels(row_labels, k, "ncut");
  check_labels(col_labels, k, "ncut");

  ClassMasses m;
  m.block = Matrix::Zero(k, k);
  for (Index i = 0; i < weights.rows(); ++i) {
    for (Index j = 0; j < weights.cols(); ++j) {
      m.block(row_labels[static_cast<std::size_t>(i)], col_labels[static_cast<std::size_t>(j)]) +=
          std::abs(weights(i, j));
    }
  }
  m.row_total = m.block.rowwise().sum();
  m.col_total = m.block.colwise().sum().transpose();
  return m;
}

}  // namespace

NcutValues ncut_printed(const Matrix& weights, const std::vector<int>& row_labels,
                        const std::vector<int>& col_labels, int k) {
  const ClassMasses m = class_masses(weights, row_labels, col_labels, k);
  NcutValues out;
  out.per_class.resize(static_cast<std::size_t>(k), 0.0);
  out.zero_row_mass.resize(static_cast<std::size_t>(k), false);
  out.zero_col_mass.resize(static_cast<std::size_t>(k), false);
  for (int c = 0; c < k; ++c) {
    const double within = m.block(c, c);
    double value = 0.0;
    if (m.row_total(c) > 0.0) {
      value += within / m.row_total(c);
    } else {
      out.zero_row_mass[static_cast<std::size_t>(c)] = true;
    }
    if (m.col_total(c) > 0.0) {
      value += within / m.col_total(c);
    } else {
      out.zero_col_mass[static_cast<std::size_t>(c)] = true;
    }
    out.per_class[static_cast<std::size_t>(c)] = value;
  }
  return out;
}

NcutValues ncut_conventional(const Matrix& weights, const std::vector<int>& row_labels,
                             const std::vector<int>& col_labels, int k) {
  const ClassMasses m = class_masses(weights, row_labels, col_labels, k);
  NcutValues out;
  out.per_class.resize(static_cast<std::size_t>(k), 0.0);
  out.zero_row_mass.resize(static_cast<std::size_t>(k), false);
  out.zero_col_mass.resize(static_cast<std::size_t>(k), false);
  for (int c = 0; c < k; ++c) {
    const double within = m.block(c, c);
    double value = 0.0;
    if (m.row_total(c) > 0.0) {
      value += (m.row_total(c) - within) / m.row_total(c);
    } else {
      out.zero_row_mass[static_cast<std::size_t>(c)] = true;
    }
    if (m.col_total(c) > 0.0) {
      value += (m.col_total(c) - within) / m.col_total(c);
    } else {
      out.zero_col_mass[static_cast<std::size_t>(c)] = true;
    }
    out.per_class[static_cast<std::size_t>(c)] = value;
  }
  return out;
}

BipartiteGraph make_bipartite_graph(const SparseCode& V) {
  BipartiteGraph g;
  g.weights = V.abs_dense();
  g.row_degrees = g.weights.rowwise().sum();
  g.col_degrees = g.weights.colwise().sum().transpose();
  for (Index i = 0; i < g.weights.rows(); ++i) {
    if (g.row_degrees(i) <= 0.0) g.zero_degree_rows.push_back(i);
  }
  for (Index j = 0; j < g.weights.cols(); ++j) {
    if (g.col_degrees(j) <= 0.0) g.zero_degree_cols.push_back(j);
  }
  return g;
}

CoClusterResult cocluster(const SparseCode& V, const CoClusterConfig& cfg) {
  if (cfg.clusters < 2) throw InvalidArgument("cocluster: k must be at least 2");
  const BipartiteGraph graph = make_bipartite_graph(V);
  const Matrix& weights = graph.weights;
  const Index L = weights.rows();
  const Index N = weights.cols();
  if (static_cast<Index>(cfg.clusters) > L + N) {
    throw InvalidArgument("cocluster: k exceeds the number of graph nodes");
  }

  CoClusterResult result;
  result.clusters = cfg.clusters;
  result.zero_degree_rows = graph.zero_degree_rows;
  result.zero_degree_cols = graph.zero_degree_cols;
  const Vector& row_deg = graph.row_degrees;
  const Vector& col_deg = graph.col_degrees;

  const Vector row_scale = (row_deg.cwiseMax(kDegreeFloor)).cwiseSqrt().cwiseInverse();
  const Vector col_scale = (col_deg.cwiseMax(kDegreeFloor)).cwiseSqrt().cwiseInverse();
  const Matrix normalized = row_scale.asDiagonal() * weights * col_scale.asDiagonal();

  const Index wanted = static_cast<Index>(std::ceil(std::log2(static_cast<double>(cfg.clusters)))) + 1;
  const Index n_triplets = std::max<Index>(2, std::min(wanted, std::min(L, N)));
  const SvdTriplets svd =
      leading_singular_vectors(normalized, n_triplets, cfg.svd_tol, cfg.svd_max_iter);

  if (svd.values(0) <= 0.0 || svd.values(1) <= kDegenerateGap * svd.values(0)) {
    result.degenerate = true;
  }

  // Discard the leading triplet; embed rows via D_r^{-1/2} U and columns via
  // D_c^{-1/2} V.
  const Index dims = n_triplets - 1;
  result.row_embedding = Matrix(dims, L);
  result.col_embedding = Matrix(dims, N);
  for (Index i = 0; i < L; ++i) {
    result.row_embedding.col(i) = row_scale(i) * svd.left.row(i).tail(dims).transpose();
  }
  for (Index j = 0; j < N; ++j) {
    result.col_embedding.col(j) = col_scale(j) * svd.right.row(j).tail(dims).transpose();
  }

  // Joint k-means over the stacked node embedding. Zero-degree nodes are held
  // out of the fit and assigned to the nearest centroid afterwards.
  std::vector<Index> fit_nodes;
  fit_nodes.reserve(static_cast<std::size_t>(L + N));
  for (Index i = 0; i < L; ++i) {
    if (row_deg(i) > 0.0) fit_nodes.push_back(i);
  }
  for (Index j = 0; j < N; ++j) {
    if (col_deg(j) > 0.0) fit_nodes.push_back(L + j);
  }
  if (static_cast<Index>(cfg.clusters) > static_cast<Index>(fit_nodes.size())) {
    throw NumericalError("cocluster: fewer connected nodes than clusters");
  }

  auto node_coord = [&](Index node) {
    return node < L ? result.row_embedding.col(node) : result.col_embedding.col(node - L);
  };

  Matrix fit_points(dims, static_cast<Index>(fit_nodes.size()));
  for (std::size_t t = 0; t < fit_nodes.size(); ++t) {
    fit_points.col(static_cast<Index>(t)) = node_coord(fit_nodes[t]);
  }

  KMeansConfig km;
  km.k = cfg.clusters;
  km.seed = cfg.seed;
  km.restarts = cfg.kmeans_restarts;
  const KMeansResult clusters = kmeans(fit_points, km);

  std::vector<int> node_labels(static_cast<std::size_t>(L + N), -1);
  for (std::size_t t = 0; t < fit_nodes.size(); ++t) {
    node_labels[static_cast<std::size_t>(fit_nodes[t])] = clusters.labels[t];
  }
  for (Index node = 0; node < L + N; ++node) {
    if (node_labels[static_cast<std::size_t>(node)] >= 0) continue;
    int best = 0;
    double best_d = (node_coord(node) - clusters.centroids.col(0)).squaredNorm();
    for (int c = 1; c < cfg.clusters; ++c) {
      const double d = (node_coord(node) - clusters.centroids.col(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    node_labels[static_cast<std::size_t>(node)] = best;
  }

  result.row_labels.assign(node_labels.begin(), node_labels.begin() + L);
  result.col_labels.assign(node_labels.begin() + L, node_labels.end());

  const NcutValues printed = ncut_printed(weights, result.row_labels, result.col_labels, cfg.clusters);
  const NcutValues conventional =
      ncut_conventional(weights, result.row_labels, result.col_labels, cfg.clusters);
  result.ncut_printed = printed.per_class;
  result.ncut_conventional = conventional.per_class;
  for (int c = 0; c < cfg.clusters; ++c) {
    if (printed.zero_row_mass[static_cast<std::size_t>(c)] ||
        printed.zero_col_mass[static_cast<std::size_t>(c)]) {
      result.zero_mass_classes.push_back(c);
    }
  }
  return result;
}

Matrix ssc_omp_affinity(const DataMatrix& X, const StoppingRule& stop) {
  std::vector<Index> all(static_cast<std::size_t>(X.cols()));
  std::iota(all.begin(), all.end(), Index{0});
  const Dictionary D(X, ColumnIndexSet(all));
  const SparseCode V = omp_zero_diag(X, D, stop);  // O(N^2), desk scale only
  const Matrix A = V.abs_dense();
  return A + A.transpose();
}

Matrix nn_affinity(const DataMatrix& X, int neighbors) {
  const Index n = X.cols();
  if (neighbors < 1 || static_cast<Index>(neighbors) >= n) {
    throw InvalidArgument("nn_affinity: neighbor count out of range");
  }
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> dist;
    dist.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((X.col(i) - X.col(j)).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
    for (int t = 0; t < neighbors; ++t) {
      A(i, dist[static_cast<std::size_t>(t)].second) = 1.0;
      A(dist[static_cast<std::size_t>(t)].second, i) = 1.0;
    }
  }
  return A;
}

}  // namespace seed
