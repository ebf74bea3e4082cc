#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "lcs/constructions.hpp"
#include "lcs/matrix_io.hpp"
#include "lcs/numtheory.hpp"
#include "lcs/reference.hpp"
#include "lcs/rng.hpp"
#include "support/oracles.hpp"

using namespace lcs;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/lcs_test_") + stem + "_" + std::to_string(::getpid());
}

}  // namespace

TEST_SUITE_BEGIN("constructions");

TEST_CASE("generator for p = 7 is the frozen sign pattern") {
  const PartialCirculantMatrix mat = legendre_partial_circulant(PrimeModulus(7));
  // squares mod 7 are {1, 2, 4}
  const std::vector<std::int8_t> expect{1, 1, 1, -1, 1, -1, -1};
  REQUIRE(mat.generator.size() == 7);
  for (std::size_t t = 0; t < 7; ++t) CHECK(mat.generator[t] == expect[t]);
  CHECK(mat.p == 7);
  CHECK(mat.rows == 5);  // ceil(7^(3/4))
  CHECK(mat.scale == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("row count honors rounding mode and alpha bounds") {
  const PrimeModulus p(997);
  CHECK(row_count(p, 3, 4) == 178);
  CHECK(row_count(p, 3, 4, Rounding::kFloor) == 177);
  CHECK(row_count(p, 1, 1) == 997);
  CHECK(row_count(p, 1, 2) == 32);  // ceil(sqrt(997))
  CHECK_THROWS_AS(row_count(p, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(row_count(p, 1, 0), std::invalid_argument);
}

TEST_CASE("dense expansion matches the entrywise definition for every odd prime up to 101") {
  for (std::uint64_t q : primes_in_range(3, 101)) {
    const PrimeModulus p(q);
    const PartialCirculantMatrix mat = legendre_partial_circulant(p);
    const Eigen::MatrixXd dense = to_dense(mat);
    const Eigen::MatrixXd ref =
        reference::dense_from_definition(p, mat.rows, mat.scale);
    REQUIRE(dense.rows() == ref.rows());
    REQUIRE(dense.cols() == ref.cols());
    // same scale double times the same sign: bitwise equality, no tolerance
    CHECK((dense.array() == ref.array()).all());
  }
}

TEST_CASE("each row is the cyclic right shift of the previous one") {
  const PrimeModulus p(53);
  const PartialCirculantMatrix mat = legendre_partial_circulant(p);
  for (std::uint64_t i = 0; i + 1 < mat.rows; ++i)
    for (std::uint64_t j = 0; j + 1 < mat.p; ++j)
      CHECK(mat.entry(i + 1, j + 1) == mat.entry(i, j));
  // wrap column: entry(i+1, 0) picks up generator index p-1-i
  for (std::uint64_t i = 0; i + 1 < mat.rows; ++i)
    CHECK(mat.entry(i + 1, 0) == mat.entry(i, mat.p - 1));
  // first row reads the generator in order
  for (std::uint64_t j = 0; j < mat.p; ++j)
    CHECK(mat.entry(0, j) ==
          mat.scale * static_cast<double>(mat.generator[j]));
}

TEST_CASE("columns have unit norm") {
  for (std::uint64_t q : {7ull, 53ull, 199ull}) {
    const Eigen::MatrixXd dense =
        to_dense(legendre_partial_circulant(PrimeModulus(q)));
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      CHECK(dense.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("row restriction keeps the section and optionally rescales") {
  const PrimeModulus p(101);
  const PartialCirculantMatrix full = legendre_partial_circulant(p);
  REQUIRE(full.rows == 32);

  const PartialCirculantMatrix cut = full.restricted(13, true);
  CHECK(cut.rows == 13);
  CHECK(cut.scale == doctest::Approx(1.0 / std::sqrt(13.0)).epsilon(1e-15));
  const Eigen::MatrixXd direct =
      to_dense(legendre_partial_circulant_rows(p, 13));
  CHECK((to_dense(cut).array() == direct.array()).all());

  const PartialCirculantMatrix raw = full.restricted(13, false);
  CHECK(raw.scale == full.scale);
  CHECK(to_dense(raw).isApprox(to_dense(full).topRows(13), 1e-15));

  CHECK_THROWS_AS(full.restricted(0, true), std::invalid_argument);
  CHECK_THROWS_AS(full.restricted(full.p + 1, true), std::invalid_argument);
}

TEST_CASE("dense expansion enforces its memory budget") {
  const PartialCirculantMatrix mat = legendre_partial_circulant(PrimeModulus(997));
  CHECK_THROWS_AS(to_dense(mat, 64), std::length_error);
}

TEST_CASE("shifted-argument matrix follows its defining formula") {
  const PrimeModulus p(53);
  const std::uint64_t m = 5, n = 4, x = 3;
  const Eigen::MatrixXd a = random_legendre_matrix(p, m, n, x);
  const double scale = 1.0 / std::sqrt(5.0);
  const auto qr = oracles::quadratic_residues(53);
  for (std::uint64_t j = 0; j < n; ++j)
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t arg = (x + m * j + i + 1) % 53;
      const int sym = oracles::legendre_by_squares(arg, 53, qr);
      CHECK(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            doctest::Approx(scale * sym).epsilon(1e-15));
    }
  // in-range offsets never hit the zero symbol, so columns stay unit
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    CHECK(a.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(random_legendre_matrix(p, 0, 4, 0), std::invalid_argument);
}

TEST_CASE("polynomial-evaluation matrix: shape, support, overlap bound") {
  const PrimeModulus q(3);
  const Eigen::MatrixXd d = devore_matrix(q, 2);
  REQUIRE(d.rows() == 9);
  REQUIRE(d.cols() == 27);

  const double v = 1.0 / std::sqrt(3.0);
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    CHECK(d.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    int nonzeros = 0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      if (d(i, j) == 0.0) continue;
      ++nonzeros;
      CHECK(d(i, j) == doctest::Approx(v).epsilon(1e-15));
    }
    CHECK(nonzeros == 3);  // one evaluation row per base point
  }

  // column 0 is the zero polynomial: support rows a*q + 0
  CHECK(d(0, 0) != 0.0);
  CHECK(d(3, 0) != 0.0);
  CHECK(d(6, 0) != 0.0);
  // column 1 (constant polynomial 1): rows a*q + 1
  CHECK(d(1, 1) != 0.0);
  CHECK(d(4, 1) != 0.0);
  CHECK(d(7, 1) != 0.0);

  // distinct polynomials of degree <= 2 agree on at most 2 points
  for (Eigen::Index a = 0; a < d.cols(); ++a)
    for (Eigen::Index b = a + 1; b < d.cols(); ++b) {
      int overlap = 0;
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        if (d(i, a) != 0.0 && d(i, b) != 0.0) ++overlap;
      CHECK(overlap <= 2);
    }
}

TEST_CASE("polynomial-evaluation matrix at q = 13 has the documented shape") {
  const Eigen::MatrixXd d = devore_matrix(PrimeModulus(13), 2);
  CHECK(d.rows() == 169);
  CHECK(d.cols() == 2197);
  for (Eigen::Index j : {0, 1, 500, 2196})
    CHECK(d.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(devore_matrix(PrimeModulus(13), 2, 1024), std::length_error);
  CHECK_THROWS_AS(devore_matrix(PrimeModulus(13), 0), std::invalid_argument);
}

TEST_CASE("chirp frame: unit columns and two-valued correlations") {
  const PrimeModulus p(5);
  const Eigen::MatrixXcd c = chirp_matrix(p);
  REQUIRE(c.rows() == 5);
  REQUIRE(c.cols() == 25);
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    CHECK(c.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));

  const double cross = 1.0 / std::sqrt(5.0);
  for (Eigen::Index a = 0; a < c.cols(); ++a)
    for (Eigen::Index b = a + 1; b < c.cols(); ++b) {
      const double g = std::abs(c.col(a).dot(c.col(b)));
      const bool same_quadratic = (a / 5) == (b / 5);
      // same quadratic coefficient: orthogonal; different: magnitude p^(-1/2)
      if (same_quadratic)
        CHECK(g <= 1e-12);
      else
        CHECK(g == doctest::Approx(cross).epsilon(1e-12));
    }
}

TEST_CASE("chirp column selection agrees with the full frame") {
  const PrimeModulus p(7);
  const Eigen::MatrixXcd full = chirp_matrix(p);
  const std::vector<std::uint64_t> pick{0, 6, 7, 13, 48};
  const Eigen::MatrixXcd sel = chirp_columns(p, pick);
  REQUIRE(sel.cols() == static_cast<Eigen::Index>(pick.size()));
  for (std::size_t t = 0; t < pick.size(); ++t)
    CHECK((sel.col(static_cast<Eigen::Index>(t)) -
           full.col(static_cast<Eigen::Index>(pick[t])))
              .norm() <= 1e-14);
  CHECK_THROWS_AS(chirp_columns(p, {49}), std::out_of_range);
}

TEST_CASE("random sign matrix: determinism, alphabet, rough balance") {
  const Eigen::MatrixXd a = bernoulli_matrix(40, 60, 12345);
  const Eigen::MatrixXd b = bernoulli_matrix(40, 60, 12345);
  CHECK((a.array() == b.array()).all());
  const Eigen::MatrixXd c = bernoulli_matrix(40, 60, 12346);
  CHECK_FALSE((a.array() == c.array()).all());

  const double v = 1.0 / std::sqrt(40.0);
  int plus = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      CHECK(std::abs(a(i, j)) == doctest::Approx(v).epsilon(1e-15));
      plus += a(i, j) > 0 ? 1 : 0;
    }
  // 2400 fair signs: expect ~1200, allow five sigmas
  CHECK(std::abs(plus - 1200) < 5 * std::sqrt(2400.0) / 2 + 60);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    CHECK(a.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("text round trip is bit exact for real matrices") {
  Rng rng(7);
  Eigen::MatrixXd m(9, 5);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.next_gaussian();
  m(0, 0) = 0.1;  // not exactly representable; round trip must still be exact
  m(1, 1) = -1e-308;
  m(2, 2) = 1e307;

  const std::string path = temp_path("roundtrip_real");
  save_matrix(m, path);
  const LoadedMatrix back = load_matrix(path);
  REQUIRE_FALSE(back.is_complex);
  REQUIRE(back.real.rows() == m.rows());
  REQUIRE(back.real.cols() == m.cols());
  CHECK((back.real.array() == m.array()).all());
  std::remove(path.c_str());
}

TEST_CASE("text round trip is bit exact for complex matrices") {
  const Eigen::MatrixXcd m = chirp_matrix(PrimeModulus(5));
  const std::string path = temp_path("roundtrip_cplx");
  save_matrix(m, path);
  const LoadedMatrix back = load_matrix(path);
  REQUIRE(back.is_complex);
  REQUIRE(back.cplx.rows() == m.rows());
  REQUIRE(back.cplx.cols() == m.cols());
  CHECK((back.cplx.array() == m.array()).all());
  std::remove(path.c_str());
}

TEST_CASE("loader rejects malformed input") {
  const std::string path = temp_path("malformed");
  auto write_file = [&](const char* text) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(text, f);
    std::fclose(f);
  };

  CHECK_THROWS_AS(load_matrix("/nonexistent/definitely/missing"), std::runtime_error);

  write_file("2 2 real\n1 2 3\n");  // one value short
  CHECK_THROWS_AS(load_matrix(path), std::runtime_error);

  write_file("0 3 real\n");
  CHECK_THROWS_AS(load_matrix(path), std::runtime_error);

  write_file("2 2 quaternion\n1 2 3 4\n");
  CHECK_THROWS_AS(load_matrix(path), std::runtime_error);

  write_file("2 2 real\n1 2 3 nope\n");
  CHECK_THROWS_AS(load_matrix(path), std::runtime_error);

  write_file("2 2\n1 2 3 4\n");  // kind defaults to real
  const LoadedMatrix ok = load_matrix(path);
  CHECK_FALSE(ok.is_complex);
  CHECK(ok.real(1, 1) == 4.0);
  std::remove(path.c_str());
}

TEST_CASE("sign bitmap export writes plain bitmap pixels") {
  Eigen::MatrixXd m(2, 3);
  m << 1, -1, 0,
      -1, 1, -1;
  const std::string path = temp_path("bitmap");
  save_sign_bitmap(m, path);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char magic[3] = {0, 0, 0};
  int w = 0, h = 0;
  REQUIRE(std::fscanf(f, "%2s %d %d", magic, &w, &h) == 3);
  CHECK(std::string(magic) == "P1");
  CHECK(w == 3);
  CHECK(h == 2);
  std::vector<int> px(6, -1);
  for (int& v : px) REQUIRE(std::fscanf(f, "%d", &v) == 1);
  std::fclose(f);
  // nonnegative -> 0 (white), negative -> 1 (black), row-major
  const std::vector<int> expect{0, 1, 0, 1, 0, 1};
  CHECK(px == expect);
  std::remove(path.c_str());
}

TEST_SUITE_END();
