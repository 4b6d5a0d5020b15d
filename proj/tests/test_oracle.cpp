#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "localmax/normcore.hpp"
#include "localmax/oracle.hpp"
#include "test_support.hpp"

using namespace localmax;
using namespace localmax::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("lattice search finds optima that lie on the lattice") {
  oracle::GridSpec grid;
  grid.step = 0.1;

  WeightSet capped = WeightSet::uniform_cap(3, 0.6);
  CHECK(oracle::brute_linmax(capped, vec({3.0, 2.0, 1.0}), grid) ==
        doctest::Approx(2.6).epsilon(1e-12));

  WeightSet full = WeightSet::full_simplex(4);
  CHECK(oracle::brute_linmax(full, vec({1.0, 7.0, 3.0, 2.0}), grid) ==
        doctest::Approx(7.0).epsilon(1e-12));

  WeightSet point = WeightSet::smoothed(MarginalDist(vec({0.75, 0.25})), 0.5);
  Vector v = vec({2.0, -1.0});
  CHECK(oracle::brute_linmax(point, v, grid) ==
        doctest::Approx(linmax(point, v).value).epsilon(1e-12));

  WeightSet single = WeightSet::singleton(MarginalDist(vec({0.3, 0.7})));
  CHECK(oracle::brute_linmax(single, v, grid) ==
        doctest::Approx(0.3 * 2.0 - 0.7).epsilon(1e-12));
}

TEST_CASE("lattice search never exceeds the exact solver and refines with step") {
  auto rng = make_rng(31);
  oracle::GridSpec coarse;
  coarse.step = 0.25;
  oracle::GridSpec fine;
  fine.step = 0.05;
  for (int trial = 0; trial < 30; ++trial) {
    Index n = 2 + static_cast<Index>(trial % 3);
    WeightSet set = WeightSet::uniform_cap(n, 0.7);
    Vector v = random_vector(rng, n);
    double exact = linmax(set, v).value;
    double lo = oracle::brute_linmax(set, v, coarse);
    double hi = oracle::brute_linmax(set, v, fine);
    CHECK(lo <= exact + 1e-12);
    CHECK(hi <= exact + 1e-12);
    CHECK(hi >= lo - 1e-12);
  }
}

TEST_CASE("lattice search rejects unusable resolutions") {
  WeightSet set = WeightSet::uniform_cap(3, 0.4);
  Vector v = vec({1.0, 2.0, 3.0});
  oracle::GridSpec coarse;
  coarse.step = 0.5;
  CHECK_THROWS_AS(oracle::brute_linmax(set, v, coarse), std::runtime_error);

  oracle::GridSpec bad_step;
  bad_step.step = 0.0;
  CHECK_THROWS_AS(oracle::brute_linmax(set, v, bad_step), std::invalid_argument);

  oracle::GridSpec tiny_guard;
  tiny_guard.step = 0.01;
  tiny_guard.max_points = 10;
  CHECK_THROWS_AS(oracle::brute_linmax(set, v, tiny_guard), std::runtime_error);

  CHECK_THROWS_AS(oracle::brute_linmax(set, vec({1.0, 2.0}), {}), std::invalid_argument);
}

TEST_CASE("brute norm search brackets the certified norm") {
  auto rng = make_rng(32);
  oracle::GridSpec grid;
  grid.step = 0.02;

  Matrix I = Matrix::Identity(2, 2);
  WeightSet full2 = WeightSet::full_simplex(2);
  oracle::BruteNorm ident = oracle::brute_local_max_norm(I, full2, full2, grid);
  CHECK(ident.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ident.tolerance > 0.0);

  for (int trial = 0; trial < 4; ++trial) {
    Matrix X = random_matrix(rng, 3, 2);
    WeightSet R = (trial % 2 == 0)
                      ? WeightSet::capped_multiplicative(random_marginals(rng, 3), 0.5, 2.0)
                      : WeightSet::lower_bounded(3, 0.4);
    WeightSet C = WeightSet::uniform_cap(2, 0.8);
    NormCertificate cert = local_max_norm(X, R, C);
    oracle::BruteNorm brute = oracle::brute_local_max_norm(X, R, C, grid);
    CHECK(brute.value <= cert.value + cert.gap + 1e-9);
    CHECK(cert.value <= brute.value + brute.tolerance + 1e-9);
  }

  WeightSet p = WeightSet::singleton(MarginalDist(vec({0.25, 0.75})));
  WeightSet q = WeightSet::singleton(MarginalDist(vec({0.5, 0.5})));
  Matrix X = random_matrix(rng, 2, 2);
  oracle::BruteNorm fixed = oracle::brute_local_max_norm(X, p, q, grid);
  CHECK(fixed.value ==
        doctest::Approx(weighted_trace_norm(X, vec({0.25, 0.75}), vec({0.5, 0.5})))
            .epsilon(1e-12));
  CHECK(fixed.tolerance == 0.0);
}

TEST_CASE("brute norm search enforces its guards") {
  Matrix X = Matrix::Ones(4, 4);
  WeightSet full = WeightSet::full_simplex(4);
  oracle::GridSpec grid;
  grid.step = 0.02;
  CHECK_THROWS_AS(oracle::brute_local_max_norm(X, full, full, grid), std::runtime_error);
  CHECK_THROWS_AS(
      oracle::brute_local_max_norm(Matrix::Ones(2, 4), full, full, grid),
      std::invalid_argument);
}

TEST_CASE("factorizations produce positive semidefinite witness blocks") {
  auto rng = make_rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix X = random_matrix(rng, 4, 3);
    Vector r = random_marginals(rng, 4).weights();
    Vector c = random_marginals(rng, 3).weights();
    Factorization fac = optimal_factorization(X, r, c);
    oracle::PsdWitness witness = oracle::psd_witness(fac.A, fac.B);

    double scale = witness.block.cwiseAbs().maxCoeff();
    CHECK(witness.min_eigenvalue >= -1e-10 * (1.0 + scale));
    CHECK((witness.block.topRightCorner(4, 3) - X).norm() <= 1e-8 * (1.0 + X.norm()));
    for (Index i = 0; i < 4; ++i)
      CHECK(witness.block(i, i) ==
            doctest::Approx(fac.A.row(i).squaredNorm()).epsilon(1e-12));
    for (Index j = 0; j < 3; ++j)
      CHECK(witness.block(4 + j, 4 + j) ==
            doctest::Approx(fac.B.row(j).squaredNorm()).epsilon(1e-12));
  }

  CHECK_THROWS_AS(oracle::psd_witness(Matrix::Ones(2, 2), Matrix::Ones(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("witness blocks factor back into consistent factors") {
  auto rng = make_rng(34);
  Matrix X = random_matrix(rng, 3, 4);
  Factorization fac =
      optimal_factorization(X, Vector::Constant(3, 1.0 / 3.0), Vector::Constant(4, 0.25));
  oracle::PsdWitness witness = oracle::psd_witness(fac.A, fac.B);
  Factorization back = oracle::factor_psd_block(witness.block, 3);
  CHECK((back.A * back.B.transpose() - X).norm() <= 1e-9 * (1.0 + X.norm()));
  CHECK((back.A * back.A.transpose() - fac.A * fac.A.transpose()).norm() <=
        1e-9 * (1.0 + witness.block.norm()));

  Matrix ones = Matrix::Ones(2, 2);
  Factorization unit = oracle::factor_psd_block(ones, 1);
  CHECK(unit.A.rows() == 1);
  CHECK(unit.B.rows() == 1);
  CHECK((unit.A * unit.B.transpose())(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-certificates are rejected as witness blocks") {
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(oracle::factor_psd_block(indefinite, 1), std::invalid_argument);

  Matrix skew(2, 2);
  skew << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(oracle::factor_psd_block(skew, 1), std::invalid_argument);

  Matrix I = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(oracle::factor_psd_block(I, 0), std::invalid_argument);
  CHECK_THROWS_AS(oracle::factor_psd_block(I, 3), std::invalid_argument);
  CHECK_THROWS_AS(oracle::factor_psd_block(Matrix::Ones(2, 3), 1), std::invalid_argument);
}

TEST_CASE("unit crosses stay inside the unit ball") {
  auto rng = make_rng(35);
  MarginalDist p = random_marginals(rng, 4);
  MarginalDist q = random_marginals(rng, 3);
  oracle::HullReport exponent = oracle::hull_check(
      WeightSet::capped_exponent(p, 0.3, 0.5), WeightSet::capped_exponent(q, 0.3, 0.5),
      100, 91);
  CHECK(exponent.trials == 100);
  CHECK(exponent.violations == 0);
  CHECK(exponent.max_value <= 1.0 + 1e-5);
  CHECK(exponent.max_value >= 1.0 - 1e-4);

  oracle::HullReport fixed =
      oracle::hull_check(WeightSet::singleton(p), WeightSet::singleton(q), 50, 92);
  CHECK(fixed.violations == 0);
  CHECK(fixed.max_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dual estimates respect the rank-one comparison") {
  auto rng = make_rng(36);
  const double grothendieck = 1.7823;
  for (Index n : {2, 3}) {
    Matrix Y = random_matrix(rng, n, n);
    WeightSet full = WeightSet::full_simplex(n);
    oracle::DualityCheck check = oracle::duality_check(Y, full, full, 40, 71);
    CHECK(check.rank_one_supremum > 0.0);
    CHECK(check.dual_estimate <= grothendieck * check.rank_one_supremum + 1e-9);
    CHECK(check.dual_estimate >= check.rank_one_supremum - 1e-4 * (1.0 + check.rank_one_supremum));
  }
  CHECK_THROWS_AS(
      oracle::duality_check(Matrix::Ones(2, 3), WeightSet::full_simplex(3),
                            WeightSet::full_simplex(3), 8, 1),
      std::invalid_argument);
}
