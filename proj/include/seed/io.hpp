#pragma once

#include "seed/pipeline.hpp"
#include "seed/types.hpp"

#include <string>

namespace seed {

enum class MatrixFormat { csv, seedbin };

/// Picks seedbin for .bin/.seedbin extensions (or a SEED magic header), csv
/// otherwise.
MatrixFormat detect_format(const std::string& path);

/// CSV default orientation is one data point per row; `transpose_csv = true`
/// (the default) transposes on load so points become columns. Parse errors
/// carry the 1-based row/column location. seedbin is the binary format below
/// and ignores the transpose flag.
DataMatrix load_matrix(const std::string& path, MatrixFormat format, bool transpose_csv = true);

void save_matrix(const std::string& path, const DataMatrix& X, MatrixFormat format,
                 bool transpose_csv = true);

/// seedbin layout: magic "SEED", u32 version (1), u64 m, u64 N, then m*N
/// little-endian IEEE doubles in column-major order. Round trips bit-exactly.
inline constexpr char kSeedbinMagic[4] = {'S', 'E', 'E', 'D'};

/// Decomposition container: magic "SEDC", u32 version (1), u8 variant,
/// u64 m, u64 N, u64 L, selected indices (u64 each), alpha (f64 each), atoms
/// (m*L f64 column-major), per column u32 nnz + nnz * (u32 row, f64 coeff) +
/// f64 residual norm, then u32 trace length + f64 trace entries.
inline constexpr char kDecompositionMagic[4] = {'S', 'E', 'D', 'C'};

void save_decomposition(const std::string& path, const SeedDecomposition& dec);
SeedDecomposition load_decomposition(const std::string& path);

}  // namespace seed
