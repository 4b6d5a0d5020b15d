#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "localmax/weights.hpp"

namespace localmax {

/// Trace norm of diag(r)^(1/2) * X * diag(c)^(1/2).  Weights must be
/// nonnegative; X must be finite.
double weighted_trace_norm(const Matrix& X, const Vector& r, const Vector& c);

struct Factorization {
  Matrix A;  // rows x rank
  Matrix B;  // cols x rank
};

/// Factorization X = A * B^T minimizing the weighted penalty
/// (1/2) * (sum_i r_i |A_i|^2 + sum_j c_j |B_j|^2), built from the SVD of the
/// reweighted matrix.  Weights are floored at `floor` so the identity
/// A * B^T == X holds even when some weights vanish.
Factorization optimal_factorization(const Matrix& X, Vector r, Vector c,
                                    double floor = 1e-10);

struct NormOptions {
  double tol = 1e-6;          // relative duality-gap target
  int max_iterations = 500;
  double weight_floor = 1e-10;  // factorization floor used for certificates
};

struct NormCertificate {
  double value = 0.0;  // norm of the returned iterate; a lower bound overall
  Vector row_weights;
  Vector col_weights;
  Matrix A;
  Matrix B;
  double gap = 0.0;  // certified slack: the true norm lies in [value, value + gap]
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Golden-section maximization of a concave function on [lo, hi].
/// Returns {argmax, max} among all evaluated points.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int steps) {
  constexpr double inv_phi = 0.6180339887498949;
  constexpr double inv_phi2 = 1.0 - inv_phi;
  double a = lo, b = hi;
  double x1 = a + inv_phi2 * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < steps; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + inv_phi2 * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace detail

/// Norm sup_{r in R, c in C} |diag(r)^(1/2) X diag(c)^(1/2)|_tr via
/// conditional-gradient ascent of the concave objective over the product set,
/// with away steps over the atoms visited so far to avoid the slow crawl of
/// plain ascent along a face.
///
/// The returned certificate satisfies value == weighted_trace_norm at the
/// returned weights and value <= norm <= value + gap; the gap comes from the
/// factorization bound (1/2) * (linmax(R, |A_i|^2) + linmax(C, |B_j|^2)),
/// which upper-bounds the norm for any exact factorization A * B^T == X,
/// plus a trace-norm bound on the factorization residual X - A * B^T so the
/// certificate stays valid under roundoff.  Every iterate yields such a
/// bound, so the certificate keeps the tightest one seen together with the
/// factorization that produced it.
template <typename RSet, typename CSet>
NormCertificate local_max_norm(const Matrix& X, const RSet& R, const CSet& C,
                               const NormOptions& opt = {}) {
  if (R.dim() != X.rows() || C.dim() != X.cols())
    throw std::invalid_argument("local_max_norm: weight set dimension mismatch");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("local_max_norm: tol must be positive");
  if (opt.max_iterations < 1)
    throw std::invalid_argument("local_max_norm: max_iterations must be positive");

  const double slack = 1e-12 * std::max(1.0, X.norm());
  const double resid_scale = std::sqrt(static_cast<double>(std::min(X.rows(), X.cols())));
  NormCertificate cert;

  auto upper_bound = [&](const Factorization& fac) {
    double pen = 0.5 * (linmax(R, squared_row_norms(fac.A)).value +
                        linmax(C, squared_row_norms(fac.B)).value);
    return pen + resid_scale * (X - fac.A * fac.B.transpose()).norm();
  };

  auto finish = [&](const Vector& r, const Vector& c, double f, int iters) {
    Factorization fac = optimal_factorization(X, r, c, opt.weight_floor);
    double pen = upper_bound(fac);
    cert.value = f;
    cert.row_weights = r;
    cert.col_weights = c;
    cert.A = std::move(fac.A);
    cert.B = std::move(fac.B);
    cert.gap = std::max(pen - f, 0.0);
    cert.iterations = iters;
  };

  if (is_point_set(R) && is_point_set(C)) {
    Vector r = R.interior_point(), c = C.interior_point();
    finish(r, c, weighted_trace_norm(X, r, c), 1);
    cert.converged = true;
    return cert;
  }

  Vector r = R.interior_point();
  Vector c = C.interior_point();
  double f = weighted_trace_norm(X, r, c);

  struct Atom {
    Vector r, c;
    double mass;
  };
  std::vector<Atom> atoms;
  atoms.push_back({r, c, 1.0});
  auto same_atom = [](const Atom& a, const Vector& vr, const Vector& vc) {
    return (a.r - vr).cwiseAbs().maxCoeff() <= 1e-12 &&
           (a.c - vc).cwiseAbs().maxCoeff() <= 1e-12;
  };

  double best_pen = std::numeric_limits<double>::infinity();
  Matrix best_A, best_B;

  int it = 1;
  for (;; ++it) {
    Factorization fac = optimal_factorization(X, r, c, opt.weight_floor);
    Vector grad_r = 0.5 * squared_row_norms(fac.A);
    Vector grad_c = 0.5 * squared_row_norms(fac.B);
    LinMax row_dir = linmax(R, grad_r);
    LinMax col_dir = linmax(C, grad_c);
    double pen = row_dir.value + col_dir.value +
                 resid_scale * (X - fac.A * fac.B.transpose()).norm();
    if (pen < best_pen) {
      best_pen = pen;
      best_A = fac.A;
      best_B = fac.B;
    }
    double gap = best_pen - f;

    if (gap <= opt.tol * f + slack) {
      cert.value = f;
      cert.row_weights = r.cwiseMax(0.0);
      cert.col_weights = c.cwiseMax(0.0);
      cert.A = std::move(best_A);
      cert.B = std::move(best_B);
      cert.gap = std::max(gap, 0.0);
      cert.iterations = it;
      cert.converged = true;
      return cert;
    }
    if (it >= opt.max_iterations) break;

    double grad_at_x = grad_r.dot(r) + grad_c.dot(c);
    double toward_gain = row_dir.value + col_dir.value - grad_at_x;
    std::size_t away = atoms.size();
    double away_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      double gain = grad_at_x - grad_r.dot(atoms[k].r) - grad_c.dot(atoms[k].c);
      if (gain > away_gain && atoms[k].mass < 1.0 - 1e-12) {
        away_gain = gain;
        away = k;
      }
    }
    bool use_away = away < atoms.size() && away_gain > toward_gain;

    Vector dr, dc;
    double theta_max;
    if (use_away) {
      dr = r - atoms[away].r;
      dc = c - atoms[away].c;
      theta_max = atoms[away].mass / (1.0 - atoms[away].mass);
    } else {
      dr = row_dir.argmax - r;
      dc = col_dir.argmax - c;
      theta_max = 1.0;
    }

    auto along = [&](double theta) {
      return weighted_trace_norm(X, (r + theta * dr).cwiseMax(0.0),
                                 (c + theta * dc).cwiseMax(0.0));
    };
    auto [theta, f_theta] = detail::golden_max(along, 0.0, theta_max, 22);
    double f_end = along(theta_max);
    if (f_end > f_theta) {
      theta = theta_max;
      f_theta = f_end;
    }
    if (f_theta <= f && use_away) {
      // The away direction made no progress; retry the toward direction.
      use_away = false;
      dr = row_dir.argmax - r;
      dc = col_dir.argmax - c;
      theta_max = 1.0;
      std::tie(theta, f_theta) = detail::golden_max(along, 0.0, 1.0, 22);
      f_end = along(1.0);
      if (f_end > f_theta) {
        theta = 1.0;
        f_theta = f_end;
      }
    }
    if (f_theta <= f) {
      // Fall back to the classic diminishing step before giving up.
      double step = 2.0 / (it + 2.0);
      double f_step = along(step);
      if (f_step <= f) break;  // no numerical progress possible
      theta = step;
      f_theta = f_step;
    }

    r = (r + theta * dr).cwiseMax(0.0);
    c = (c + theta * dc).cwiseMax(0.0);
    f = f_theta;

    if (use_away) {
      for (Atom& atom : atoms) atom.mass *= 1.0 + theta;
      atoms[away].mass -= theta;
    } else {
      for (Atom& atom : atoms) atom.mass *= 1.0 - theta;
      bool found = false;
      for (Atom& atom : atoms)
        if (same_atom(atom, row_dir.argmax, col_dir.argmax)) {
          atom.mass += theta;
          found = true;
          break;
        }
      if (!found) atoms.push_back({row_dir.argmax, col_dir.argmax, theta});
    }
    std::erase_if(atoms, [](const Atom& atom) { return atom.mass <= 1e-14; });
    double total = 0.0;
    for (const Atom& atom : atoms) total += atom.mass;
    if (total > 0.0)
      for (Atom& atom : atoms) atom.mass /= total;
  }

  if (std::isfinite(best_pen)) {
    cert.value = f;
    cert.row_weights = r.cwiseMax(0.0);
    cert.col_weights = c.cwiseMax(0.0);
    cert.A = std::move(best_A);
    cert.B = std::move(best_B);
    cert.gap = std::max(best_pen - f, 0.0);
    cert.iterations = it;
  } else {
    finish(r, c, f, it);
  }
  cert.converged = cert.gap <= opt.tol * cert.value + slack;
  return cert;
}

struct BalancedPenalty {
  double value = 0.0;
  double alpha = 1.0;  // minimizing trade-off between peak and average row norms
  bool converged = true;
};

/// Penalty balancing the largest against the average weighted row norms of a
/// factorization, evaluated by minimizing
///   (alpha + 1/alpha) * |X|_(R_t, C_t) / omega_t,   t = 1 / (1 + alpha^2),
/// over alpha in [1, sqrt(max(n, m))], where R_t, C_t are lower-bounded weight
/// sets and omega_t normalizes the uniform member.  A coarse scan brackets the
/// minimum and golden-section refines it.
BalancedPenalty balanced_penalty(const Matrix& X, double tol = 1e-6);

struct Decomposition {
  Vector flat;        // entrywise-bounded part; flat + spike == u exactly
  Vector spike;       // largest-magnitude entries, bounded in weighted 2-norm
  Index support = 0;  // number of coordinates (fully or partially) in `spike`
  double partial = 0.0;  // fraction of the boundary coordinate kept, in (0, 1]
};

/// Split u = flat + spike where `spike` keeps the largest-magnitude entries
/// up to cumulative smoothed-marginal mass 1/ratio (the boundary entry scaled
/// by sqrt(partial)) and `flat` carries the rest.  For u with capped-set
/// vector norm at most one, the spike has smoothed-weighted 2-norm at most
/// 1/sqrt(ratio) and the flat part has sup norm at most one.
Decomposition decompose_vector(const Vector& u, const MarginalDist& p, double ratio);

}  // namespace localmax
