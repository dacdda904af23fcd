#pragma once

#include "seed/types.hpp"

#include <cstdint>
#include <vector>

namespace seed {

/// Union-of-subspaces construction. Subspace bases are drawn from one shared
/// orthonormal frame: consecutive subspaces share `overlap_dims` coordinates,
/// the remaining directions are disjoint. Points are unit-normalized basis
/// combinations with Gaussian coefficients; outliers are normalized Gaussian
/// vectors; noise_sigma adds entrywise Gaussian noise after normalization.
struct UoSSpec {
  Index ambient_dim = 0;
  std::vector<Index> subspace_dims;
  std::vector<Index> points_per_subspace;
  Index overlap_dims = 0;
  Index n_outliers = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// dim(span of the subspaces) + n_outliers, capped at min(m, N).
  Index analytic_rank() const;
  Index total_points() const;
};

struct SynthDataset {
  DataMatrix data;
  std::vector<int> labels;  // subspace id, -1 for outliers
  Index true_rank = 0;
};

SynthDataset gen_union_of_subspaces(const UoSSpec& spec);

/// m x r and r x n Gaussian factors plus optional entrywise noise.
DataMatrix gen_low_rank(Index m, Index n, Index r, double noise_sigma, std::uint64_t seed);

/// `distinct` random unit columns, each repeated `copies` times in a round of
/// blocks (column j is a copy of original j % distinct ... laid out
/// contiguously per original).
DataMatrix gen_duplicated_columns(Index m, Index distinct, Index copies, std::uint64_t seed);

/// Blob-like clusters on low-dimensional subspaces: each cluster sits inside
/// its own `subspace_dim`-dimensional subspace, spread around a center
/// direction, unit-normalized, with entrywise noise added afterwards. Cluster
/// centers are normalize(shared + center_separation * gaussian), so small
/// separations give nearby clusters and large ones nearly orthogonal clusters.
/// Returns ground-truth cluster labels.
SynthDataset gen_subspace_clusters(Index ambient_dim, int clusters, Index subspace_dim,
                                   Index points_per_cluster, double within_spread,
                                   double noise_sigma, std::uint64_t seed,
                                   double center_separation = 2.0);

/// The two-subspace benchmark fixture: m=200 (the ambient dimension is our
/// choice, recorded here), k=20 with a 3-dimensional overlap, 300+100 inlier
/// points, 50 outliers, noiseless. Analytic rank 87.
UoSSpec uos_paper_spec(std::uint64_t seed);

/// Five independent 20-dimensional subspaces in R^200, 100 points each, plus
/// 50 outliers. Analytic rank 150.
UoSSpec five_subspace_spec(std::uint64_t seed);

}  // namespace seed
