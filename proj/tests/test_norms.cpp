#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "doctest.h"

#include "cesarolab/norms.hpp"
#include "cesarolab/parallel.hpp"
#include "cesarolab/random.hpp"

using namespace cesarolab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("vector_pnorm") {
  for (double p : {1.0, 1.5, 2.0, 7.0}) CHECK(vector_pnorm(basis_vector(6, 3), p) == 1.0);
  CHECK(vector_pnorm(basis_vector(6, 3), NormIndex::inf()) == 1.0);
  CHECK(vector_pnorm(ComplexVector::Ones(4), 2.0) == doctest::Approx(2.0));
  // (1/2)(e_1 + ... + e_4)
  CHECK(vector_pnorm(ComplexVector::Constant(4, 0.5), 2.0) == doctest::Approx(1.0));
  ComplexVector x(2);
  x << Complex(3.0, 4.0), -1.0;
  CHECK(vector_pnorm(x, 1.0) == doctest::Approx(6.0));
  CHECK(vector_pnorm(x, NormIndex::inf()) == doctest::Approx(5.0));
  CHECK(vector_pnorm(x, 3.0) == doctest::Approx(std::cbrt(126.0)));
  CHECK_THROWS_AS(vector_pnorm(x, 0.5), Error);
  CHECK(NormIndex::parse("inf").is_inf());
  CHECK(NormIndex::parse("1.5").value() == 1.5);
  CHECK_THROWS_AS(NormIndex::parse("two"), Error);
}

TEST_CASE("operator_pnorm: closed-form cases") {
  const auto id = identity_operator(5);
  for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex(3.0), NormIndex::inf()})
    CHECK(operator_pnorm(id, p).value == doctest::Approx(1.0));
  CHECK(operator_pnorm(assani(), NormIndex::inf()).value == 3.0);
  CHECK(operator_pnorm(assani(), 1.0).value == 3.0);

  const WeightedShift t(0.3, 8);
  const ComplexMatrix m = t.materialize();
  const NormResult r = operator_pnorm(ComplexMatrix(m * m * m), 1.0);
  CHECK(r.value == doctest::Approx(std::pow(4.0, 0.3)));
  CHECK(r.method == NormMethod::exact);
  CHECK(operator_pnorm(ComplexMatrix(m * m * m), 3.0).method == NormMethod::sampled_lower_bound);
}

TEST_CASE("operator_pnorm: p = 2 against SVD, norming vectors reproduce values") {
  Rng rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = random_disc_matrix(3 + trial % 9, rng);
    const double sigma = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()(0);
    const NormResult r2 = operator_pnorm(m, 2.0);
    CHECK(rel(r2.value, sigma) <= 1e-8);
    for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()}) {
      const NormResult r = operator_pnorm(m, p);
      REQUIRE(r.method == NormMethod::exact);
      CHECK(std::abs(vector_pnorm(r.norming_vector, p) - 1.0) <= 1e-12);
      CHECK(rel(vector_pnorm(m * r.norming_vector, p), r.value) <= 1e-9);
    }
  }
}

TEST_CASE("sampled lower bounds stay below exact values") {
  Rng rng(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_disc_matrix(6, rng);
    const double exact = operator_pnorm(m, 2.0).value;
    Rng probe(99, static_cast<std::uint64_t>(trial));
    for (int s = 0; s < 500; ++s) {
      const ComplexVector x = random_unit_vector(6, 6, 2.0, probe);
      REQUIRE(vector_pnorm(m * x, 2.0) <= exact * (1.0 + 1e-9));
    }
    // Riesz-Thorin: ||M||_3 <= ||M||_1^{1/3} ||M||_inf^{2/3}
    const NormResult r3 = operator_pnorm(m, 3.0);
    CHECK(r3.method == NormMethod::sampled_lower_bound);
    const double bound = std::pow(operator_pnorm(m, 1.0).value, 1.0 / 3.0) *
                         std::pow(operator_pnorm(m, NormIndex::inf()).value, 2.0 / 3.0);
    CHECK(r3.value <= bound * (1.0 + 1e-12));
    CHECK(rel(vector_pnorm(m * r3.norming_vector, 3.0), r3.value) <= 1e-9);
  }
}

TEST_CASE("shift polynomial norms agree with the materialized matrix") {
  const WeightedShift t(0.35, 24);
  const std::vector<Complex> c = {0.25, Complex(0.0, -1.0), 0.0, 0.5, -0.125};
  const ComplexMatrix m = t.materialize_poly(c);
  for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()}) {
    const NormResult lazy = shift_poly_pnorm(t, c, p);
    const NormResult dense = operator_pnorm(m, p);
    CHECK(rel(lazy.value, dense.value) <= 1e-9);
    CHECK(rel(vector_pnorm(m * lazy.norming_vector, p), lazy.value) <= 1e-9);
  }
  CHECK(shift_poly_pnorm(t, c, 3.0).value <= operator_pnorm(m, 1.0).value);
}

TEST_CASE("submultiplicativity spot check") {
  Rng rng(3, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_disc_matrix(5, rng) * 0.5;
    std::vector<ComplexMatrix> powers{ComplexMatrix::Identity(5, 5)};
    for (int j = 1; j <= 8; ++j) powers.push_back(powers.back() * m);
    for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()})
      for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
          CHECK(operator_pnorm(powers[a + b], p).value <=
                operator_pnorm(powers[a], p).value * operator_pnorm(powers[b], p).value *
                        (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("resolvent_norm") {
  const auto id = identity_operator(3);
  CHECK(resolvent_norm(id.matrix(), 2.0, 2.0).norm.value == doctest::Approx(1.0));

  const double l = 1.5;
  const auto r = resolvent_norm(assani().matrix(), l, NormIndex::inf());
  CHECK(r.norm.value == doctest::Approx((l + 3.0) / ((l + 1.0) * (l + 1.0))));
  CHECK(r.norm.value == doctest::Approx(0.72));
  CHECK(r.residual <= 1e-10);

  double previous = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double v = resolvent_norm(assani().matrix(), -(1.0 + eps), NormIndex::inf()).norm.value;
    CHECK(v == doctest::Approx(1.0 / eps + 2.0 / (eps * eps)).epsilon(1e-9));
    CHECK(v > previous);
    previous = v;
  }

  try {
    resolvent_norm(2.0 * ComplexMatrix::Identity(2, 2), 2.0, 1.0);
    FAIL("expected spectral point error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::spectral_point);
  }
}

TEST_CASE("resolvent residual stays small on random probes") {
  Rng rng(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_disc_matrix(8, rng) * 0.2;
    for (double r : {1.1, 1.01, 1.000001}) {
      const Complex lambda = std::polar(r, 0.3 * trial);
      CHECK(resolvent_norm(m, lambda, 2.0).residual <= 1e-10);
    }
  }
}

TEST_CASE("kreiss_probe: identity and assani") {
  const auto grid = KreissGrid::standard();
  CHECK(grid.radii.size() == 6);
  const auto id = kreiss_probe(identity_operator(3), 2.0, grid, KreissMode::classic);
  CHECK(std::stod(id.meta.at("supremum")) == doctest::Approx(1.0));
  // attained first at theta = 0 for the first radius
  CHECK(id.meta.at("supremum_row") == "0");
  for (double v : id.column("residual")) CHECK(v <= 1e-10);

  const auto a = kreiss_probe(assani(), NormIndex::inf(), grid, KreissMode::classic);
  bool found = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (std::abs(a.at(i, "radius") - (1.0 + 1e-3)) < 1e-15 &&
        std::abs(a.at(i, "theta") - std::numbers::pi) < 1e-12) {
      CHECK(a.at(i, "value") == doctest::Approx(2001.0).epsilon(1e-9));
      found = true;
    }
  }
  CHECK(found);
  CHECK(std::stod(a.meta.at("supremum")) > 1e5);

  const auto u = kreiss_probe(identity_operator(2), 2.0, KreissGrid::standard(16, 30),
                              KreissMode::uniform);
  CHECK(std::stod(u.meta.at("supremum")) <= 1.0 + 1e-12);
  CHECK(u.rows.size() == 6 * 16 * 31);
}

TEST_CASE("kreiss_probe: shift in the bounded regime stays bounded under refinement") {
  const DenseOperator t(WeightedShift(0.2, 48).materialize(), "shift");
  const double coarse =
      std::stod(kreiss_probe(t, 1.0, KreissGrid::standard(32), KreissMode::classic)
                    .meta.at("supremum"));
  const double fine =
      std::stod(kreiss_probe(t, 1.0, KreissGrid::standard(128), KreissMode::classic)
                    .meta.at("supremum"));
  CHECK(std::isfinite(fine));
  CHECK(fine <= 1.05 * coarse);
  CHECK(fine < 10.0);
}

TEST_CASE("kreiss_probe is independent of the thread count") {
  const DenseOperator t(WeightedShift(0.3, 12).materialize(), "shift");
  set_thread_count(1);
  const auto a = kreiss_probe(t, 2.0, KreissGrid::standard(16, 5), KreissMode::uniform);
  set_thread_count(4);
  const auto b = kreiss_probe(t, 2.0, KreissGrid::standard(16, 5), KreissMode::uniform);
  set_thread_count(1);
  CHECK(a.rows == b.rows);
  CHECK(a.meta == b.meta);
}

TEST_CASE("spectrum_unit_circle_report") {
  const auto a = spectrum_unit_circle_report(assani());
  REQUIRE(a.eigenvalues.size() == 2);
  for (const auto& e : a.eigenvalues) CHECK(std::abs(e.eigenvalue + 1.0) <= 1e-12);
  CHECK(a.on_circle.size() == 2);
  CHECK_FALSE(a.peripheral_in_one);

  const auto id = spectrum_unit_circle_report(identity_operator(3));
  CHECK(id.peripheral_in_one);
  CHECK(id.on_circle.size() == 3);

  const auto half = spectrum_unit_circle_report(
      DenseOperator(0.5 * ComplexMatrix::Identity(4, 4), "half"));
  CHECK(half.on_circle.empty());
  CHECK(half.peripheral_in_one);

  CHECK_THROWS_AS(spectrum_unit_circle_report(identity_operator(65)), Error);
}
