#pragma once

#include "seed/oasis.hpp"
#include "seed/samplers.hpp"
#include "seed/sparse_coding.hpp"
#include "seed/types.hpp"

#include <string>
#include <vector>

namespace seed {

enum class Variant { diagonal, zero_diag };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct SeedConfig {
  SamplerSpec sampler;
  StoppingRule stop;
  Variant variant = Variant::diagonal;
  OasisConfig oasis;  // honored when sampler.method == oasis

  /// Checks the stopping rule and reconciles L between sampler and oasis
  /// sub-configs (oasis.max_columns is filled from sampler.count when unset;
  /// a conflicting pair is rejected).
  void validate_and_sync(Index rows, Index cols);
};

struct SeedDecomposition {
  Dictionary dictionary;            // D, normalized selected columns
  SparseCode code;                  // V, L x N column-sparse
  ColumnIndexSet selected;          // original indices of the atoms
  std::vector<double> delta_trace;  // per-step max |Delta| (oASIS sampler)
  Variant variant = Variant::diagonal;
  Index input_rows = 0;
  Index input_cols = 0;

  const Vector& alpha() const { return dictionary.source_norms(); }
};

/// SEED: column selection, normalization into D, then greedy sparse recovery
/// of every column against D. Sampled columns are coded per the variant:
/// diagonal gives the exact single-atom representation with coefficient
/// alpha_i; zero_diag represents each selected column over the other selected
/// columns. Zero columns in X are rejected up front.
SeedDecomposition seed_decompose(const DataMatrix& X, SeedConfig cfg);

/// Dense X_hat = D * V. Columns with empty support reconstruct to zero.
Matrix reconstruct(const SeedDecomposition& dec);

}  // namespace seed
