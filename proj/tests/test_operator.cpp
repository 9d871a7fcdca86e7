#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "cesarolab/norms.hpp"
#include "cesarolab/operator.hpp"

using namespace cesarolab;

TEST_CASE("weighted shift: action on basis vectors") {
  const WeightedShift t(0.3, 8);
  CHECK(t.apply(basis_vector(8, 1)).isZero());

  const ComplexVector y = t.apply(basis_vector(8, 2));
  CHECK(y(0).real() == doctest::Approx(std::pow(2.0, 0.3)));
  CHECK(y(0).real() == doctest::Approx(1.2311).epsilon(1e-4));
  CHECK(y.tail(7).isZero());

  for (double beta : {0.1, 0.3, 0.5, 1.0, 2.0}) {
    const WeightedShift s(beta, 6);
    const ComplexVector z = s.apply(s.apply(basis_vector(6, 3)));
    CHECK(z(0).real() == doctest::Approx(std::pow(3.0, beta)).epsilon(1e-14));
    CHECK(z.tail(5).isZero());
  }
}

TEST_CASE("weighted shift: telescoping transfer matches step-by-step weights") {
  const WeightedShift t(0.37, 50);
  for (std::size_t j = 1; j <= 50; ++j) {
    double product = 1.0;
    for (std::size_t n = 0; n < j; ++n) {
      CHECK(t.transfer(j, n) == doctest::Approx(product).epsilon(1e-13));
      CHECK(t.transfer(j, n) ==
            doctest::Approx(std::pow(double(j) / double(j - n), 0.37)).epsilon(1e-13));
      product *= t.weight(j - n);
    }
    CHECK(t.transfer(j, j) == 0.0);
  }
}

TEST_CASE("weighted shift: construction errors") {
  CHECK_THROWS_AS(WeightedShift(0.0, 4), Error);
  CHECK_THROWS_AS(WeightedShift(-1.0, 4), Error);
  CHECK_THROWS_AS(WeightedShift(0.3, 1), Error);
}

TEST_CASE("weighted shift: materialized forms agree with lazy application") {
  const WeightedShift t(0.4, 12);
  const ComplexMatrix m = t.materialize();
  ComplexMatrix power = ComplexMatrix::Identity(12, 12);
  for (std::size_t n = 0; n < 14; ++n) {
    CHECK((t.materialize_power(n) - power).cwiseAbs().maxCoeff() <= 1e-13);
    power = m * power;
  }
  const std::vector<Complex> c = {Complex(0.5, 0.1), -1.0, 0.0, Complex(0.0, 2.0)};
  const ComplexMatrix poly = t.materialize_poly(c);
  const ComplexMatrix ref = c[0] * ComplexMatrix::Identity(12, 12) + c[1] * m + c[3] * m * m * m;
  CHECK((poly - ref).cwiseAbs().maxCoeff() <= 1e-13);
  ComplexVector x(12);
  for (int i = 0; i < 12; ++i) x(i) = Complex(i + 1.0, 0.5 - i);
  CHECK((t.apply_poly(c, x) - ref * x).norm() <= 1e-12);
  CHECK((t.apply_poly_adjoint(c, x) - ref.adjoint() * x).norm() <= 1e-12);
  CHECK((t.apply_adjoint(x) - m.adjoint() * x).norm() <= 1e-12);
}

TEST_CASE("dense operators") {
  const DenseOperator a = assani();
  ComplexMatrix p = ComplexMatrix::Identity(2, 2);
  for (int n = 0; n < 5; ++n) p = a.matrix() * p;
  ComplexMatrix expected(2, 2);
  expected << -1.0, 10.0, 0.0, -1.0;
  CHECK((p - expected).norm() == 0.0);
  CHECK(operator_pnorm(p, NormIndex::inf()).value == 11.0);

  const DenseOperator id = identity_operator(4);
  ComplexMatrix q = id.matrix();
  for (int n = 0; n < 7; ++n) q = id.matrix() * q;
  CHECK(q.isIdentity());

  CHECK_THROWS_AS(build_dense({{1.0, 2.0}, {3.0}}), Error);
  CHECK_NOTHROW(build_dense({{1.0, 2.0}, {3.0, Complex(0.0, 1.0)}}));
}

TEST_CASE("assani power norms are 2n+1") {
  const auto table = operator_power_norm_table(LinearOperator(assani()), 10000, NormIndex::inf());
  for (std::size_t n = 0; n <= 10000; ++n) REQUIRE(table.values[n] == 2.0 * n + 1.0);
  CHECK(table.method == "exact");
}

TEST_CASE("dense matrix text format") {
  std::istringstream good("2\n1,0 0,-1\n0.5,0.25 -3,0\n");
  const DenseOperator m = parse_dense(good);
  CHECK(m.matrix()(0, 1) == Complex(0.0, -1.0));
  CHECK(m.matrix()(1, 0) == Complex(0.5, 0.25));

  std::istringstream short_rows("2\n1,0 0,0\n0,0\n");
  CHECK_THROWS_AS(parse_dense(short_rows), Error);
  std::istringstream extra("1\n1,0 2,0\n");
  CHECK_THROWS_AS(parse_dense(extra), Error);
  std::istringstream bad("2\n1 0,0\n0,0 1,0\n");
  CHECK_THROWS_AS(parse_dense(bad), Error);

  const auto path = std::filesystem::temp_directory_path() / "cesarolab_matrix_test.txt";
  ComplexMatrix r(3, 3);
  r << Complex(0.1, 0.2), 1.0 / 3.0, -2.0, 0.0, Complex(1e-300, -7.5), 4.0, 1.0, 1.0, 1.0;
  save_dense(DenseOperator(r, "r"), path);
  CHECK(load_dense(path).matrix() == r);
  std::filesystem::remove(path);
}

TEST_CASE("orbit tables") {
  const WeightedShift t(0.3, 16);
  const auto e1 = orbit(t, basis_vector(16, 1), 6, 1.0);
  CHECK(e1.values[0] == 1.0);
  for (std::size_t j = 1; j <= 6; ++j) CHECK(e1.values[j] == 0.0);

  const auto e4 = orbit(t, basis_vector(16, 4), 3, 2.0);
  CHECK(e4.values[3] == doctest::Approx(std::pow(4.0, 0.3)));
  CHECK(e4.values[3] == doctest::Approx(1.5157).epsilon(1e-4));

  ComplexVector x(5);
  x << 1.0, Complex(0.0, 2.0), -1.0, 0.5, 3.0;
  const auto id = orbit(identity_operator(5), x, 20, 3.0);
  for (double v : id.values) CHECK(v == doctest::Approx(id.values[0]));
}

TEST_CASE("orbit: truncation too small is a hard error") {
  const WeightedShift t(0.3, 8);
  try {
    orbit(t, basis_vector(8, 6), 3, 1.0);
    FAIL("expected truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation_too_small);
  }
  CHECK_NOTHROW(orbit(t, basis_vector(8, 5), 3, 1.0));
}

TEST_CASE("orbit states match repeated dense application") {
  const WeightedShift t(0.45, 20);
  ComplexVector x = ComplexVector::Zero(20);
  for (int i = 0; i < 8; ++i) x(i) = Complex(1.0 + i, -0.5 * i);
  const Orbit o = orbit_states(t, x, 12);
  const ComplexMatrix m = t.materialize();
  ComplexVector y = x;
  for (std::size_t j = 0; j <= 12; ++j) {
    CHECK((o.states[j] - y).norm() <= 1e-12);
    y = m * y;
  }
}

TEST_CASE("shift power norms: closed form") {
  CHECK(shift_norm_closed_form(0.3, 3) == doctest::Approx(1.5157).epsilon(1e-4));
  CHECK(shift_norm_closed_form(0.7, 0) == 1.0);
  CHECK(shift_norm_closed_form(0.5, 99) == doctest::Approx(10.0).epsilon(1e-15));

  for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()}) {
    const auto table = operator_power_norm_table(WeightedShift(0.3, 2 * 41), 40, p);
    CHECK(table.values[0] == doctest::Approx(1.0));
    CHECK(table.values[3] == doctest::Approx(1.5157).epsilon(1e-4));
    for (std::size_t n = 0; n <= 40; ++n)
      CHECK(table.values[n] == doctest::Approx(shift_norm_closed_form(0.3, n)).epsilon(1e-9));
  }

  // beta = (alpha - eps) / p
  const double alpha = 0.8, eps = 0.2, p = 2.0;
  const auto table = operator_power_norm_table(WeightedShift((alpha - eps) / p, 130), 64, p);
  for (std::size_t n = 0; n <= 64; ++n)
    CHECK(table.values[n] ==
          doctest::Approx(std::pow(n + 1.0, (alpha - eps) / p)).epsilon(1e-9));

  CHECK_THROWS_AS(operator_power_norm_table(WeightedShift(0.3, 10), 5, 1.0), Error);
}

TEST_CASE("shift power norms: matrix route") {
  for (std::size_t n : {0u, 1u, 3u, 17u, 60u}) {
    const WeightedShift t(0.3, 2 * (n + 1));
    const ComplexMatrix m = t.materialize_power(n);
    for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()})
      CHECK(operator_pnorm(m, p).value ==
            doctest::Approx(shift_norm_closed_form(0.3, n)).epsilon(1e-9));
  }
}

TEST_CASE("mixing criterion series") {
  const auto rep = mixing_criterion_series(WeightedShift(0.3, 64), 40);
  CHECK(rep.at(0, "n") == 1.0);
  CHECK(rep.at(0, "value") == 1.0);
  CHECK(rep.at(31, "n") == 32.0);
  CHECK(rep.at(31, "value") == doctest::Approx(0.3536).epsilon(1e-4));
  const auto v = rep.column("value");
  const auto c = rep.column("closed_form");
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i] == doctest::Approx(c[i]).epsilon(1e-12));
    if (i) CHECK(v[i] < v[i - 1]);
  }
  CHECK_THROWS_AS(mixing_criterion_series(WeightedShift(0.3, 10), 10), Error);
}
