#include "seed/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "seedbin i/o assumes a little-endian host");

namespace seed {

namespace {

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

template <class T>
void write_pod(std::ostream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

template <class T>
T read_pod(std::istream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("'" + path + "': truncated file");
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("'" + path + "': cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("'" + path + "': cannot open for writing");
  return out;
}

DataMatrix load_seedbin(const std::string& path) {
  std::ifstream in = open_input(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSeedbinMagic, 4) != 0) {
    throw DataError("'" + path + "': not a seedbin file (bad magic)");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != 1) throw DataError("'" + path + "': unsupported seedbin version");
  const auto rows = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto cols = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  if (rows < 1 || cols < 1 || rows > (1 << 28) || cols > (1 << 28)) {
    throw DataError("'" + path + "': implausible matrix dimensions");
  }
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows * cols)));
  if (!in) throw DataError("'" + path + "': truncated seedbin payload");
  return DataMatrix(std::move(m));
}

void save_seedbin(const std::string& path, const DataMatrix& X) {
  std::ofstream out = open_output(path);
  write_bytes(out, kSeedbinMagic, 4);
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(X.rows()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(X.cols()));
  write_bytes(out, X.mat().data(), sizeof(double) * static_cast<std::size_t>(X.rows() * X.cols()));
  if (!out) throw DataError("'" + path + "': write failed");
}

DataMatrix load_csv(const std::string& path, bool transpose) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t field_no = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      ++field_no;
      std::string_view field(line.data() + start, end - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw DataError("'" + path + "': cannot parse value at row " + std::to_string(line_no) +
                        ", column " + std::to_string(field_no));
      }
      row.push_back(value);
      start = end + 1;
      if (end == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("'" + path + "': row " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("'" + path + "': empty CSV file");

  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.front().size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  // Default orientation: one data point per line, so transpose to columns.
  if (transpose) m.transposeInPlace();
  return DataMatrix(std::move(m));
}

void save_csv(const std::string& path, const DataMatrix& X, bool transpose) {
  std::ofstream out = open_output(path);
  const Matrix m = transpose ? X.mat().transpose() : X.mat();
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("'" + path + "': write failed");
}

}  // namespace

MatrixFormat detect_format(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".bin" || ext == ".seedbin") return MatrixFormat::seedbin;
  if (ext == ".csv") return MatrixFormat::csv;
  // Fall back to probing the magic bytes.
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {0, 0, 0, 0};
  if (in && in.read(magic, 4) && std::memcmp(magic, kSeedbinMagic, 4) == 0) {
    return MatrixFormat::seedbin;
  }
  return MatrixFormat::csv;
}

DataMatrix load_matrix(const std::string& path, MatrixFormat format, bool transpose_csv) {
  return format == MatrixFormat::seedbin ? load_seedbin(path) : load_csv(path, transpose_csv);
}

void save_matrix(const std::string& path, const DataMatrix& X, MatrixFormat format,
                 bool transpose_csv) {
  if (format == MatrixFormat::seedbin) {
    save_seedbin(path, X);
  } else {
    save_csv(path, X, transpose_csv);
  }
}

void save_decomposition(const std::string& path, const SeedDecomposition& dec) {
  std::ofstream out = open_output(path);
  write_bytes(out, kDecompositionMagic, 4);
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint8_t>(out, dec.variant == Variant::diagonal ? 0 : 1);
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(dec.input_rows));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(dec.input_cols));
  const Index L = dec.dictionary.atom_count();
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(L));
  for (Index p = 0; p < L; ++p) {
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(dec.selected[p]));
  }
  write_bytes(out, dec.alpha().data(), sizeof(double) * static_cast<std::size_t>(L));
  write_bytes(out, dec.dictionary.atoms().data(),
              sizeof(double) * static_cast<std::size_t>(dec.input_rows * L));
  for (const SparseVector& c : dec.code.cols) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.support.size()));
    for (std::size_t t = 0; t < c.support.size(); ++t) {
      write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.support[t]));
      write_pod<double>(out, c.coeffs[t]);
    }
    write_pod<double>(out, c.residual_norm);
  }
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dec.delta_trace.size()));
  for (double d : dec.delta_trace) write_pod<double>(out, d);
  if (!out) throw DataError("'" + path + "': write failed");
}

SeedDecomposition load_decomposition(const std::string& path) {
  std::ifstream in = open_input(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kDecompositionMagic, 4) != 0) {
    throw DataError("'" + path + "': not a decomposition file (bad magic)");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != 1) throw DataError("'" + path + "': unsupported decomposition version");
  const auto variant = read_pod<std::uint8_t>(in, path) == 0 ? Variant::diagonal : Variant::zero_diag;
  const auto rows = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto cols = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  const auto L = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  if (rows < 1 || cols < 1 || L < 1 || L > cols) {
    throw DataError("'" + path + "': implausible decomposition header");
  }

  std::vector<Index> sources(static_cast<std::size_t>(L));
  for (Index p = 0; p < L; ++p) {
    sources[static_cast<std::size_t>(p)] = static_cast<Index>(read_pod<std::uint64_t>(in, path));
  }
  Vector alpha(L);
  in.read(reinterpret_cast<char*>(alpha.data()), static_cast<std::streamsize>(sizeof(double) * L));
  Matrix atoms(rows, L);
  in.read(reinterpret_cast<char*>(atoms.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows * L)));
  if (!in) throw DataError("'" + path + "': truncated decomposition payload");

  SparseCode code;
  code.rows = L;
  code.cols.resize(static_cast<std::size_t>(cols));
  for (Index j = 0; j < cols; ++j) {
    SparseVector& c = code.cols[static_cast<std::size_t>(j)];
    const auto nnz = read_pod<std::uint32_t>(in, path);
    if (static_cast<Index>(nnz) > L) throw DataError("'" + path + "': corrupt column support");
    c.support.resize(nnz);
    c.coeffs.resize(nnz);
    for (std::uint32_t t = 0; t < nnz; ++t) {
      c.support[t] = static_cast<Index>(read_pod<std::uint32_t>(in, path));
      c.coeffs[t] = read_pod<double>(in, path);
    }
    c.residual_norm = read_pod<double>(in, path);
  }
  const auto trace_len = read_pod<std::uint32_t>(in, path);
  std::vector<double> trace(trace_len);
  for (std::uint32_t t = 0; t < trace_len; ++t) trace[t] = read_pod<double>(in, path);

  SeedDecomposition dec{Dictionary::from_atoms(std::move(atoms), sources, std::move(alpha)),
                        std::move(code),
                        ColumnIndexSet(sources),
                        std::move(trace),
                        variant,
                        rows,
                        cols};
  return dec;
}

}  // namespace seed
