#include "seed/synth.hpp"

#include "seed/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace seed {

void UoSSpec::validate() const {
  if (ambient_dim < 1) throw InvalidArgument("uos: ambient dimension must be positive");
  if (subspace_dims.size() != points_per_subspace.size()) {
    throw InvalidArgument("uos: subspace_dims and points_per_subspace must align");
  }
  Index frame = 0;
  for (std::size_t i = 0; i < subspace_dims.size(); ++i) {
    const Index k = subspace_dims[i];
    if (k < 1 || k >= ambient_dim) throw InvalidArgument("uos: subspace dimension must be in [1, m)");
    if (points_per_subspace[i] < 0) throw InvalidArgument("uos: negative point count");
    if (overlap_dims >= k) throw InvalidArgument("uos: overlap must be smaller than every subspace");
    frame += k;
    if (i > 0) frame -= overlap_dims;
  }
  if (overlap_dims < 0) throw InvalidArgument("uos: overlap must be non-negative");
  if (n_outliers < 0) throw InvalidArgument("uos: negative outlier count");
  if (noise_sigma < 0.0) throw InvalidArgument("uos: negative noise sigma");
  if (frame > ambient_dim) {
    throw InvalidArgument("uos: subspace dimensions exceed the ambient dimension");
  }
  if (total_points() < 1) throw InvalidArgument("uos: the dataset would be empty");
}

Index UoSSpec::total_points() const {
  return std::accumulate(points_per_subspace.begin(), points_per_subspace.end(), Index{0}) +
         n_outliers;
}

Index UoSSpec::analytic_rank() const {
  Index span = 0;
  for (std::size_t i = 0; i < subspace_dims.size(); ++i) {
    span += subspace_dims[i];
    if (i > 0) span -= overlap_dims;
  }
  return std::min(span + n_outliers, std::min(ambient_dim, total_points()));
}

namespace {

// Orthonormal frame from the QR factorization of a Gaussian matrix.
Matrix random_frame(Index rows, Index cols, Rng& rng) {
  const Matrix g = rng.normal_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q;
}

}  // namespace

SynthDataset gen_union_of_subspaces(const UoSSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const std::size_t p = spec.subspace_dims.size();
  Index frame_dims = 0;
  for (std::size_t i = 0; i < p; ++i) {
    frame_dims += spec.subspace_dims[i];
    if (i > 0) frame_dims -= spec.overlap_dims;
  }
  const Matrix frame = random_frame(spec.ambient_dim, frame_dims, rng);

  Matrix X(spec.ambient_dim, spec.total_points());
  std::vector<int> labels(static_cast<std::size_t>(spec.total_points()));

  Index col = 0;
  Index frame_offset = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const Index k = spec.subspace_dims[i];
    // Consecutive subspaces share the trailing `overlap_dims` coordinates of
    // the previous block.
    const Index start = frame_offset;
    const auto basis = frame.middleCols(start, k);
    for (Index t = 0; t < spec.points_per_subspace[i]; ++t) {
      Vector point = basis * rng.normal_vector(k);
      const double norm = point.norm();
      if (norm > 0.0) point /= norm;
      X.col(col) = point;
      labels[static_cast<std::size_t>(col)] = static_cast<int>(i);
      ++col;
    }
    frame_offset += k - spec.overlap_dims;
  }

  for (Index t = 0; t < spec.n_outliers; ++t) {
    Vector point = rng.normal_vector(spec.ambient_dim);
    const double norm = point.norm();
    if (norm > 0.0) point /= norm;
    X.col(col) = point;
    labels[static_cast<std::size_t>(col)] = -1;
    ++col;
  }

  if (spec.noise_sigma > 0.0) {
    X += spec.noise_sigma * rng.normal_matrix(X.rows(), X.cols());
  }

  return SynthDataset{DataMatrix(std::move(X)), std::move(labels), spec.analytic_rank()};
}

DataMatrix gen_low_rank(Index m, Index n, Index r, double noise_sigma, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidArgument("gen_low_rank: dimensions must be positive");
  if (r < 1 || r > std::min(m, n)) throw InvalidArgument("gen_low_rank: rank out of range");
  Rng rng(seed);
  Matrix X = rng.normal_matrix(m, r) * rng.normal_matrix(r, n);
  if (noise_sigma > 0.0) X += noise_sigma * rng.normal_matrix(m, n);
  return DataMatrix(std::move(X));
}

DataMatrix gen_duplicated_columns(Index m, Index distinct, Index copies, std::uint64_t seed) {
  if (distinct < 1 || copies < 1) throw InvalidArgument("gen_duplicated_columns: counts must be positive");
  if (distinct > m) throw InvalidArgument("gen_duplicated_columns: more distinct columns than rows");
  Rng rng(seed);
  Matrix originals = rng.normal_matrix(m, distinct);
  for (Index j = 0; j < distinct; ++j) originals.col(j).normalize();
  Matrix X(m, distinct * copies);
  for (Index j = 0; j < distinct; ++j) {
    for (Index c = 0; c < copies; ++c) X.col(j * copies + c) = originals.col(j);
  }
  return DataMatrix(std::move(X));
}

SynthDataset gen_subspace_clusters(Index ambient_dim, int clusters, Index subspace_dim,
                                   Index points_per_cluster, double within_spread,
                                   double noise_sigma, std::uint64_t seed,
                                   double center_separation) {
  if (clusters < 1) throw InvalidArgument("gen_subspace_clusters: clusters must be positive");
  if (subspace_dim < 1 || subspace_dim > ambient_dim) {
    throw InvalidArgument("gen_subspace_clusters: subspace dimension out of range");
  }
  if (points_per_cluster < 1) throw InvalidArgument("gen_subspace_clusters: empty clusters");
  if (!(center_separation > 0.0)) {
    throw InvalidArgument("gen_subspace_clusters: center_separation must be positive");
  }
  Rng rng(seed);

  const Index n = static_cast<Index>(clusters) * points_per_cluster;
  Matrix X(ambient_dim, n);
  std::vector<int> labels(static_cast<std::size_t>(n));

  const Vector shared = rng.normal_vector(ambient_dim).normalized();

  Index col = 0;
  for (int c = 0; c < clusters; ++c) {
    Vector center = shared + center_separation * rng.normal_vector(ambient_dim).normalized();
    center.normalize();
    // The center direction plus subspace_dim - 1 fresh directions span the
    // cluster's subspace; the blob stays inside it.
    Matrix basis(ambient_dim, subspace_dim);
    basis.col(0) = center;
    const Matrix extra = random_frame(ambient_dim, subspace_dim - 1 > 0 ? subspace_dim - 1 : 1, rng);
    for (Index d = 1; d < subspace_dim; ++d) {
      Vector w = extra.col(d - 1);
      for (Index p = 0; p < d; ++p) w -= basis.col(p).dot(w) * basis.col(p);
      basis.col(d) = w.normalized();
    }
    for (Index t = 0; t < points_per_cluster; ++t) {
      Vector coeff = within_spread * rng.normal_vector(subspace_dim);
      coeff(0) += 1.0;
      Vector point = basis * coeff;
      const double norm = point.norm();
      if (norm > 0.0) point /= norm;
      X.col(col) = point;
      labels[static_cast<std::size_t>(col)] = c;
      ++col;
    }
  }

  if (noise_sigma > 0.0) {
    X += noise_sigma * rng.normal_matrix(X.rows(), X.cols());
  }

  const Index rank = std::min(std::min(static_cast<Index>(clusters) * subspace_dim, ambient_dim), n);
  return SynthDataset{DataMatrix(std::move(X)), std::move(labels), rank};
}

UoSSpec uos_paper_spec(std::uint64_t seed) {
  UoSSpec spec;
  spec.ambient_dim = 200;
  spec.subspace_dims = {20, 20};
  spec.points_per_subspace = {300, 100};
  spec.overlap_dims = 3;
  spec.n_outliers = 50;
  spec.noise_sigma = 0.0;
  spec.seed = seed;
  return spec;
}

UoSSpec five_subspace_spec(std::uint64_t seed) {
  UoSSpec spec;
  spec.ambient_dim = 200;
  spec.subspace_dims = {20, 20, 20, 20, 20};
  spec.points_per_subspace = {100, 100, 100, 100, 100};
  spec.overlap_dims = 0;
  spec.n_outliers = 50;
  spec.noise_sigma = 0.0;
  spec.seed = seed;
  return spec;
}

}  // namespace seed
