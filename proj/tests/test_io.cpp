#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seed/io.hpp"
#include "seed/pipeline.hpp"
#include "seed/rng.hpp"
#include "seed/synth.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

using namespace seed;

namespace {

std::filesystem::path scratch_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "seed_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("csv default orientation: rows are data points") {
  const auto p = scratch_file("points.csv");
  write_text(p, "1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  const DataMatrix X = load_matrix(p.string(), MatrixFormat::csv);
  CHECK(X.rows() == 4);  // dimensions
  CHECK(X.cols() == 3);  // points
  CHECK(X.mat()(0, 0) == 1.0);
  CHECK(X.mat()(3, 0) == 4.0);
  CHECK(X.mat()(0, 2) == 9.0);

  const DataMatrix Y = load_matrix(p.string(), MatrixFormat::csv, /*transpose_csv=*/false);
  CHECK(Y.rows() == 3);
  CHECK(Y.cols() == 4);
}

TEST_CASE("csv round trip is value-exact") {
  Rng rng(1);
  const DataMatrix X(rng.normal_matrix(7, 5) * 1e-3);
  const auto p = scratch_file("roundtrip.csv");
  save_matrix(p.string(), X, MatrixFormat::csv);
  const DataMatrix Y = load_matrix(p.string(), MatrixFormat::csv);
  REQUIRE(Y.rows() == X.rows());
  REQUIRE(Y.cols() == X.cols());
  CHECK((X.mat() - Y.mat()).cwiseAbs().maxCoeff() <= 1e-15 * X.mat().cwiseAbs().maxCoeff());
}

TEST_CASE("csv parse errors carry the 1-based location") {
  const auto p = scratch_file("bad.csv");
  write_text(p, "1,2,3\n4,5,abc\n");
  try {
    load_matrix(p.string(), MatrixFormat::csv);
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("column 3") != std::string::npos);
  }
}

TEST_CASE("csv rejects NaN and ragged rows") {
  const auto p = scratch_file("nan.csv");
  write_text(p, "1,2\nnan,4\n");
  CHECK_THROWS_AS(load_matrix(p.string(), MatrixFormat::csv), DataError);

  const auto q = scratch_file("ragged.csv");
  write_text(q, "1,2,3\n4,5\n");
  CHECK_THROWS_AS(load_matrix(q.string(), MatrixFormat::csv), DataError);
}

TEST_CASE("seedbin round trip is bit-identical") {
  Rng rng(2);
  const DataMatrix X(rng.normal_matrix(13, 9));
  const auto p = scratch_file("matrix.bin");
  save_matrix(p.string(), X, MatrixFormat::seedbin);
  const DataMatrix Y = load_matrix(p.string(), MatrixFormat::seedbin);
  REQUIRE(Y.rows() == X.rows());
  REQUIRE(Y.cols() == X.cols());
  CHECK(std::memcmp(X.mat().data(), Y.mat().data(),
                    sizeof(double) * static_cast<std::size_t>(X.rows() * X.cols())) == 0);
}

TEST_CASE("seedbin header is the documented layout") {
  Rng rng(3);
  const DataMatrix X(rng.normal_matrix(2, 3));
  const auto p = scratch_file("header.bin");
  save_matrix(p.string(), X, MatrixFormat::seedbin);

  std::ifstream in(p, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::memcmp(magic, "SEED", 4) == 0);
  std::uint32_t version;
  in.read(reinterpret_cast<char*>(&version), 4);
  CHECK(version == 1);
  std::uint64_t m = 0, n = 0;
  in.read(reinterpret_cast<char*>(&m), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  CHECK(m == 2);
  CHECK(n == 3);
  CHECK(std::filesystem::file_size(p) == 4 + 4 + 8 + 8 + 6 * 8);
}

TEST_CASE("format detection by extension and magic") {
  Rng rng(4);
  const DataMatrix X(rng.normal_matrix(3, 3));
  const auto bin = scratch_file("detect.bin");
  save_matrix(bin.string(), X, MatrixFormat::seedbin);
  CHECK(detect_format(bin.string()) == MatrixFormat::seedbin);

  const auto dat = scratch_file("detect.dat");  // no known extension: probe magic
  save_matrix(dat.string(), X, MatrixFormat::seedbin);
  CHECK(detect_format(dat.string()) == MatrixFormat::seedbin);

  const auto csv = scratch_file("detect.csv");
  save_matrix(csv.string(), X, MatrixFormat::csv);
  CHECK(detect_format(csv.string()) == MatrixFormat::csv);
}

TEST_CASE("decomposition round trip preserves everything") {
  const DataMatrix X = gen_low_rank(12, 30, 5, 0.01, 5);
  SeedConfig cfg;
  cfg.sampler.method = SamplerMethod::oasis;
  cfg.sampler.count = 8;
  cfg.sampler.seed = 6;
  cfg.stop.max_atoms = 4;
  cfg.variant = Variant::zero_diag;
  const SeedDecomposition a = seed_decompose(X, cfg);

  const auto p = scratch_file("dec.seeddec");
  save_decomposition(p.string(), a);
  const SeedDecomposition b = load_decomposition(p.string());

  CHECK(b.variant == a.variant);
  CHECK(b.input_rows == a.input_rows);
  CHECK(b.input_cols == a.input_cols);
  CHECK(b.selected.order() == a.selected.order());
  CHECK(b.dictionary.atoms() == a.dictionary.atoms());
  CHECK(b.alpha() == a.alpha());
  CHECK(b.delta_trace == a.delta_trace);
  REQUIRE(b.code.cols.size() == a.code.cols.size());
  for (std::size_t j = 0; j < a.code.cols.size(); ++j) {
    CHECK(b.code.cols[j].support == a.code.cols[j].support);
    CHECK(b.code.cols[j].coeffs == a.code.cols[j].coeffs);
    CHECK(b.code.cols[j].residual_norm == a.code.cols[j].residual_norm);
  }

  // Reconstructions must agree exactly.
  CHECK(reconstruct(a) == reconstruct(b));
}

TEST_CASE("missing files are data errors") {
  CHECK_THROWS_AS(load_matrix("/nonexistent/path.bin", MatrixFormat::seedbin), DataError);
  CHECK_THROWS_AS(load_decomposition("/nonexistent/path.seeddec"), DataError);
}
