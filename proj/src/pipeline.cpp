#include "seed/pipeline.hpp"

#include "seed/parallel.hpp"

#include <algorithm>
#include <utility>

namespace seed {

std::string to_string(Variant v) {
  return v == Variant::diagonal ? "diag" : "zerodiag";
}

Variant variant_from_string(const std::string& name) {
  if (name == "diag" || name == "diagonal") return Variant::diagonal;
  if (name == "zerodiag" || name == "zero_diag") return Variant::zero_diag;
  throw InvalidArgument("unknown variant '" + name + "'");
}

void SeedConfig::validate_and_sync(Index rows, Index cols) {
  sampler.validate(rows, cols);
  stop.validate();
  if (sampler.method == SamplerMethod::oasis) {
    if (oasis.max_columns == 0) {
      oasis.max_columns = sampler.count;
      if (oasis.seed == 0) oasis.seed = sampler.seed;
    } else if (oasis.max_columns != sampler.count) {
      throw InvalidArgument("seed config: oasis.max_columns disagrees with sampler L");
    }
    oasis.validate(cols);
  }
}

SeedDecomposition seed_decompose(const DataMatrix& X, SeedConfig cfg) {
  cfg.validate_and_sync(X.rows(), X.cols());

  // Zero columns cannot be normalized if selected and are rejected outright
  // rather than silently skipped.
  for (Index j = 0; j < X.cols(); ++j) {
    if (X.col(j).norm() == 0.0) {
      throw NumericalError("seed_decompose: column " + std::to_string(j) + " of X is zero");
    }
  }

  // Step I: column subset selection, then normalize into D.
  SelectionRun selection = select_columns(X, cfg.sampler, cfg.oasis);
  Dictionary dictionary(X, selection.selected);
  const Index n_atoms = dictionary.atom_count();
  const Index n = X.cols();

  // Step II: greedy sparse recovery of every column against D.
  SparseCode code;
  code.rows = n_atoms;
  code.cols.resize(static_cast<std::size_t>(n));

  std::vector<Index> unsampled;
  unsampled.reserve(static_cast<std::size_t>(n - n_atoms));
  for (Index j = 0; j < n; ++j) {
    if (!selection.selected.contains(j)) unsampled.push_back(j);
  }

  if (!unsampled.empty()) {
    Matrix rest(X.rows(), static_cast<Index>(unsampled.size()));
    for (std::size_t t = 0; t < unsampled.size(); ++t) rest.col(static_cast<Index>(t)) = X.col(unsampled[t]);
    const SparseCode rest_code = batch_omp(DataMatrix(std::move(rest)), dictionary, cfg.stop);
    for (std::size_t t = 0; t < unsampled.size(); ++t) {
      code.cols[static_cast<std::size_t>(unsampled[t])] = rest_code.cols[t];
    }
  }

  if (cfg.variant == Variant::diagonal) {
    // Each sampled column is exactly its own normalized atom times alpha.
    for (Index pos = 0; pos < n_atoms; ++pos) {
      SparseVector sv;
      sv.support.push_back(pos);
      sv.coeffs.push_back(dictionary.source_norms()(pos));
      sv.residual_norm = 0.0;
      code.cols[static_cast<std::size_t>(selection.selected[pos])] = std::move(sv);
    }
  } else {
    const DataMatrix sampled(selection.selected.gather(X.mat()));
    const SparseCode sampled_code = omp_zero_diag(sampled, dictionary, cfg.stop);
    for (Index pos = 0; pos < n_atoms; ++pos) {
      code.cols[static_cast<std::size_t>(selection.selected[pos])] =
          sampled_code.cols[static_cast<std::size_t>(pos)];
    }
  }

  SeedDecomposition dec{std::move(dictionary), std::move(code), std::move(selection.selected),
                        std::move(selection.delta_trace), cfg.variant, X.rows(), X.cols()};
  return dec;
}

Matrix reconstruct(const SeedDecomposition& dec) {
  Matrix out = Matrix::Zero(dec.input_rows, dec.input_cols);
  const Matrix& atoms = dec.dictionary.atoms();
  parallel_for(dec.input_cols, [&](Index b, Index e) {
    for (Index j = b; j < e; ++j) {
      const SparseVector& c = dec.code.cols[static_cast<std::size_t>(j)];
      for (std::size_t t = 0; t < c.support.size(); ++t) {
        out.col(j) += c.coeffs[t] * atoms.col(c.support[t]);
      }
    }
  });
  return out;
}

}  // namespace seed
