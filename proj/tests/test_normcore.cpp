#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

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

double gram_trace_norm(const Matrix& X, const Vector& r, const Vector& c) {
  Matrix M = r.cwiseSqrt().asDiagonal() * X * c.cwiseSqrt().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(M.transpose() * M));
  double total = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    total += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
  return total;
}

double plain_trace_norm(const Matrix& X) {
  Eigen::BDCSVD<Matrix> svd(X);
  return svd.singularValues().sum();
}

}  // namespace

TEST_CASE("weighted trace norm matches hand-computed values") {
  for (Index n : {2, 5}) {
    Matrix I = Matrix::Identity(n, n);
    Vector u = Vector::Constant(n, 1.0 / static_cast<double>(n));
    CHECK(weighted_trace_norm(I, u, u) == doctest::Approx(1.0).epsilon(1e-12));
  }

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 4.0;
  Vector half = vec({0.5, 0.5});
  CHECK(weighted_trace_norm(D, half, half) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("weighted trace norm of a rank-one matrix splits into vector factors") {
  auto rng = make_rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Index n = 2 + static_cast<Index>(trial % 4);
    Index m = 2 + static_cast<Index>(trial % 3);
    Vector u = random_vector(rng, n);
    Vector v = random_vector(rng, m);
    Vector r = random_marginals(rng, n).weights();
    Vector c = random_marginals(rng, m).weights();
    Matrix X = u * v.transpose();
    double expect = std::sqrt(r.dot(u.cwiseAbs2())) * std::sqrt(c.dot(v.cwiseAbs2()));
    CHECK(weighted_trace_norm(X, r, c) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("weighted trace norm agrees with a Gram eigenvalue route") {
  auto rng = make_rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    Index n = 2 + static_cast<Index>(trial % 5);
    Index m = 2 + static_cast<Index>(trial % 4);
    Matrix X = random_matrix(rng, n, m);
    Vector r = random_marginals(rng, n).weights();
    Vector c = random_marginals(rng, m).weights();
    double direct = weighted_trace_norm(X, r, c);
    double viagram = gram_trace_norm(X, r, c);
    CHECK(direct == doctest::Approx(viagram).epsilon(1e-8));
  }
}

TEST_CASE("weighted trace norm rejects bad input") {
  Matrix X = Matrix::Ones(2, 2);
  Vector u = vec({0.5, 0.5});
  Matrix bad = X;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(weighted_trace_norm(bad, u, u), std::invalid_argument);
  CHECK_THROWS_AS(weighted_trace_norm(X, vec({-0.1, 1.1}), u), std::invalid_argument);
  CHECK_THROWS_AS(weighted_trace_norm(X, vec({0.5, 0.3, 0.2}), u), std::invalid_argument);
}

TEST_CASE("optimal factorization reconstructs the matrix and balances the penalty") {
  Matrix I = Matrix::Identity(2, 2);
  Vector u = vec({0.5, 0.5});
  Factorization fac = optimal_factorization(I, u, u);
  CHECK((fac.A * fac.B.transpose() - I).norm() <= 1e-12);
  double row_side = u.dot(squared_row_norms(fac.A));
  double col_side = u.dot(squared_row_norms(fac.B));
  CHECK(row_side == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(col_side == doctest::Approx(1.0).epsilon(1e-12));

  auto rng = make_rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix X = random_matrix(rng, 5, 4);
    Vector r = random_marginals(rng, 5).weights();
    Vector c = random_marginals(rng, 4).weights();
    Factorization f = optimal_factorization(X, r, c);
    CHECK((f.A * f.B.transpose() - X).norm() <= 1e-8);
    double norm = weighted_trace_norm(X, r, c);
    CHECK(r.dot(squared_row_norms(f.A)) == doctest::Approx(norm).epsilon(1e-9));
    CHECK(c.dot(squared_row_norms(f.B)) == doctest::Approx(norm).epsilon(1e-9));
  }
}

TEST_CASE("optimal factorization of a rank-one matrix keeps one column") {
  auto rng = make_rng(14);
  Vector a = random_vector(rng, 4);
  Vector b = random_vector(rng, 3);
  Matrix X = a * b.transpose();
  Vector r = Vector::Constant(4, 0.25);
  Vector c = Vector::Constant(3, 1.0 / 3.0);
  Factorization f = optimal_factorization(X, r, c);
  CHECK(f.A.cols() == 1);
  CHECK((f.A * f.B.transpose() - X).norm() <= 1e-10);
}

TEST_CASE("optimal factorization survives vanishing weights") {
  auto rng = make_rng(15);
  Matrix X = random_matrix(rng, 3, 2);
  Vector r = vec({0.5, 0.5, 0.0});
  Vector c = vec({0.7, 0.3});
  Factorization f = optimal_factorization(X, r, c);
  CHECK((f.A * f.B.transpose() - X).norm() <= 1e-6);
}

TEST_CASE("norm with singleton sets reduces to the weighted trace norm") {
  auto rng = make_rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix X = random_matrix(rng, 4, 3);
    MarginalDist p = random_marginals(rng, 4);
    MarginalDist q = random_marginals(rng, 3);
    WeightSet R = WeightSet::singleton(p);
    WeightSet C = WeightSet::singleton(q);
    NormCertificate cert = local_max_norm(X, R, C);
    CHECK(cert.value ==
          doctest::Approx(weighted_trace_norm(X, p.weights(), q.weights())).epsilon(1e-12));
    CHECK(cert.iterations == 1);
    CHECK(cert.converged);
    CHECK((cert.row_weights - p.weights()).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK((cert.col_weights - q.weights()).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
}

TEST_CASE("uniform caps at one over n give the scaled trace norm") {
  auto rng = make_rng(17);
  Matrix X = random_matrix(rng, 4, 4);
  WeightSet R = WeightSet::uniform_cap(4, 0.25);
  NormCertificate cert = local_max_norm(X, R, R);
  CHECK(cert.value == doctest::Approx(plain_trace_norm(X) / 4.0).epsilon(1e-10));
  CHECK(cert.converged);

  Matrix Y = random_matrix(rng, 3, 5);
  NormCertificate rect = local_max_norm(Y, WeightSet::uniform_cap(3, 1.0 / 3.0),
                                        WeightSet::uniform_cap(5, 0.2));
  CHECK(rect.value ==
        doctest::Approx(plain_trace_norm(Y) / std::sqrt(15.0)).epsilon(1e-10));
}

TEST_CASE("full simplices recover known max norm values") {
  Matrix I = Matrix::Identity(2, 2);
  WeightSet full2 = WeightSet::full_simplex(2);
  NormCertificate ident = local_max_norm(I, full2, full2);
  CHECK(ident.converged);
  CHECK(ident.value == doctest::Approx(1.0).epsilon(1e-6));

  Matrix H(2, 2);
  H << 1.0, 1.0, 1.0, -1.0;
  NormCertificate had = local_max_norm(H, full2, full2);
  CHECK(had.converged);
  CHECK(had.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
}

TEST_CASE("norm agrees with the lattice oracle on small instances") {
  auto rng = make_rng(18);
  oracle::GridSpec grid;
  grid.step = 0.02;
  for (int trial = 0; trial < 6; ++trial) {
    Index n = 2 + static_cast<Index>(trial % 2);
    Matrix X = random_matrix(rng, n, 2);
    WeightSet R = (trial % 2 == 0)
                      ? WeightSet::full_simplex(n)
                      : WeightSet::capped_exponent(random_marginals(rng, n), 0.3, 0.6);
    WeightSet C = WeightSet::uniform_cap(2, 0.7);
    NormCertificate cert = local_max_norm(X, R, C);
    oracle::BruteNorm brute = oracle::brute_local_max_norm(X, R, C, grid);
    CHECK(brute.value <= cert.value + cert.gap + 1e-9);
    CHECK(cert.value <= brute.value + brute.tolerance + 1e-9);
  }
}

TEST_CASE("capped exponent endpoints match their reference families") {
  auto rng = make_rng(19);
  Matrix X = random_matrix(rng, 4, 3);
  MarginalDist p = random_marginals(rng, 4);
  MarginalDist q = random_marginals(rng, 3);

  NormCertificate touniform = local_max_norm(X, WeightSet::capped_exponent(p, 0.4, 1.0),
                                             WeightSet::capped_exponent(q, 0.4, 1.0));
  NormCertificate simplex =
      local_max_norm(X, WeightSet::full_simplex(4), WeightSet::full_simplex(3));
  CHECK(touniform.value == doctest::Approx(simplex.value).epsilon(1e-10));

  NormCertificate topoint = local_max_norm(X, WeightSet::capped_exponent(p, 0.4, 0.0),
                                           WeightSet::capped_exponent(q, 0.4, 0.0));
  Vector pr = 0.6 * p.weights() + Vector::Constant(4, 0.4 / 4.0);
  Vector qc = 0.6 * q.weights() + Vector::Constant(3, 0.4 / 3.0);
  CHECK(topoint.iterations == 1);
  CHECK(topoint.value == doctest::Approx(weighted_trace_norm(X, pr, qc)).epsilon(1e-10));
}

TEST_CASE("certificates are internally consistent") {
  auto rng = make_rng(20);
  for (int trial = 0; trial < 8; ++trial) {
    Index n = 3 + static_cast<Index>(trial % 3);
    Index m = 2 + static_cast<Index>(trial % 4);
    Matrix X = random_matrix(rng, n, m);
    WeightSet R = WeightSet::uniform_cap(n, 0.5);
    WeightSet C = WeightSet::capped_exponent(random_marginals(rng, m), 0.2, 0.5);
    NormCertificate cert = local_max_norm(X, R, C);

    CHECK(cert.gap >= 0.0);
    CHECK(weighted_trace_norm(X, cert.row_weights, cert.col_weights) ==
          doctest::Approx(cert.value).epsilon(1e-10));
    CHECK((cert.A * cert.B.transpose() - X).norm() <= 1e-8 * (1.0 + X.norm()));
    double penalty = 0.5 * (linmax(R, squared_row_norms(cert.A)).value +
                            linmax(C, squared_row_norms(cert.B)).value);
    CHECK(penalty == doctest::Approx(cert.value + cert.gap).epsilon(1e-10));
    double member = weighted_trace_norm(X, R.interior_point(), C.interior_point());
    CHECK(member <= cert.value + cert.gap + 1e-9);
  }
}

TEST_CASE("norm obeys scaling, triangle, and cap monotonicity") {
  auto rng = make_rng(21);
  WeightSet R = WeightSet::uniform_cap(3, 0.6);
  WeightSet C = WeightSet::uniform_cap(4, 0.4);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix X = random_matrix(rng, 3, 4);
    Matrix Y = random_matrix(rng, 3, 4);
    NormCertificate cx = local_max_norm(X, R, C);
    NormCertificate cy = local_max_norm(Y, R, C);
    NormCertificate cxy = local_max_norm(X + Y, R, C);
    NormCertificate c2x = local_max_norm(2.0 * X, R, C);
    CHECK(cxy.value <= cx.value + cx.gap + cy.value + cy.gap + 1e-9);
    CHECK(std::abs(c2x.value - 2.0 * cx.value) <= c2x.gap + 2.0 * cx.gap + 1e-9);

    NormCertificate tight = local_max_norm(X, WeightSet::uniform_cap(3, 0.4), C);
    CHECK(tight.value <= cx.value + cx.gap + 1e-9);
  }

  Matrix Z = Matrix::Zero(3, 4);
  NormCertificate zero = local_max_norm(Z, R, C);
  CHECK(zero.value == 0.0);
  CHECK(zero.gap <= 1e-12);
  CHECK(zero.converged);
}

TEST_CASE("norm validates its arguments") {
  Matrix X = Matrix::Ones(2, 3);
  WeightSet R = WeightSet::full_simplex(2);
  WeightSet C = WeightSet::full_simplex(3);
  CHECK_THROWS_AS(local_max_norm(X, C, R), std::invalid_argument);
  NormOptions bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(local_max_norm(X, R, C, bad_tol), std::invalid_argument);
  NormOptions bad_iters;
  bad_iters.max_iterations = 0;
  CHECK_THROWS_AS(local_max_norm(X, R, C, bad_iters), std::invalid_argument);
}

TEST_CASE("balanced penalty handles degenerate inputs") {
  Matrix Z = Matrix::Zero(3, 2);
  BalancedPenalty zero = balanced_penalty(Z);
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);

  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(balanced_penalty(bad), std::invalid_argument);
  CHECK_THROWS_AS(balanced_penalty(Matrix::Ones(2, 2), 0.0), std::invalid_argument);
}

TEST_CASE("balanced penalty of the identity matches the closed form") {
  Matrix I = Matrix::Identity(2, 2);
  BalancedPenalty bp = balanced_penalty(I);
  CHECK(bp.value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4));
  CHECK(bp.converged);
  CHECK(bp.alpha >= 1.0);
  CHECK(bp.alpha <= std::sqrt(2.0) + 1e-9);
}

TEST_CASE("balanced penalty scales linearly and matches a dense scan") {
  auto rng = make_rng(22);
  for (int trial = 0; trial < 2; ++trial) {
    Matrix X = random_matrix(rng, 3, 3);
    BalancedPenalty bp = balanced_penalty(X);
    BalancedPenalty bp3 = balanced_penalty(3.0 * X);
    CHECK(bp3.value == doctest::Approx(3.0 * bp.value).epsilon(2e-4));

    double hi = std::sqrt(3.0);
    double scan_best = std::numeric_limits<double>::infinity();
    int points = 1733;
    for (int i = 0; i < points; ++i) {
      double alpha = 1.0 + (hi - 1.0) * i / (points - 1);
      double t = 1.0 / (1.0 + alpha * alpha);
      NormCertificate cert = local_max_norm(X, WeightSet::lower_bounded(3, t),
                                            WeightSet::lower_bounded(3, t));
      double omega = 1.0 / ((1.0 + 2.0 * t));
      scan_best = std::min(scan_best, (alpha + 1.0 / alpha) * cert.value / omega);
    }
    CHECK(bp.value == doctest::Approx(scan_best).epsilon(1e-4));
  }
}

TEST_CASE("vector decomposition follows the prefix-mass rule") {
  MarginalDist uniform4 = MarginalDist::uniform(4);
  Vector u = vec({1.0, -3.0, 2.0, 0.5});

  Decomposition whole = decompose_vector(u, uniform4, 1.0);
  CHECK(whole.support == 4);
  CHECK((whole.spike - u).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(whole.flat.lpNorm<Eigen::Infinity>() <= 1e-12);

  Decomposition top = decompose_vector(u, uniform4, 4.0);
  CHECK(top.support == 1);
  CHECK(top.partial == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top.spike == vec({0.0, -3.0, 0.0, 0.0}));
  CHECK(top.flat == vec({1.0, 0.0, 2.0, 0.5}));

  Decomposition pair = decompose_vector(u, uniform4, 2.0);
  CHECK(pair.support == 2);
  CHECK(pair.partial == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((pair.spike - vec({0.0, -3.0, 2.0, 0.0})).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((pair.flat - vec({1.0, 0.0, 0.0, 0.5})).lpNorm<Eigen::Infinity>() <= 1e-12);

  MarginalDist uniform3 = MarginalDist::uniform(3);
  Vector w = vec({2.0, 1.0, 4.0});
  Decomposition part = decompose_vector(w, uniform3, 2.0);
  CHECK(part.support == 2);
  CHECK(part.partial == doctest::Approx(0.5).epsilon(1e-12));
  double root_half = std::sqrt(0.5);
  CHECK((part.spike - vec({root_half * 2.0, 0.0, 4.0})).lpNorm<Eigen::Infinity>() <=
        1e-12);
  CHECK((part.flat - vec({(1.0 - root_half) * 2.0, 1.0, 0.0}))
            .lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("vector decomposition keeps the advertised norm bounds") {
  auto rng = make_rng(23);
  const Index n = 12;
  for (double ratio : {1.0, 4.0, 16.0}) {
    for (int trial = 0; trial < 40; ++trial) {
      MarginalDist p = random_marginals(rng, n);
      Vector u = random_vector(rng, n);
      WeightSet set = WeightSet::capped_multiplicative(p, 0.5, ratio);
      double scale = vec_norm(set, u);
      if (scale <= 0.0) continue;
      u /= scale;
      Decomposition d = decompose_vector(u, p, ratio);
      CHECK((d.flat + d.spike - u).lpNorm<Eigen::Infinity>() <= 1e-14);
      CHECK(d.flat.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
      Vector smoothed =
          0.5 * p.weights() + Vector::Constant(n, 0.5 / static_cast<double>(n));
      CHECK(smoothed.dot(d.spike.cwiseAbs2()) <= 1.0 / ratio + 1e-9);
    }
  }
}

TEST_CASE("vector decomposition validates its arguments") {
  MarginalDist p = MarginalDist::uniform(3);
  Vector u = vec({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(decompose_vector(u, p, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decompose_vector(vec({1.0, 2.0}), p, 2.0), std::invalid_argument);
  Vector bad = u;
  bad[1] = std::nan("");
  CHECK_THROWS_AS(decompose_vector(bad, p, 2.0), std::invalid_argument);
}
