#pragma once

#include <cstdint>

#include "localmax/types.hpp"

namespace localmax {

// Tolerance for "sums to one" checks on simplex data.
inline constexpr double kSimplexTol = 1e-12;
// Entries at or below this magnitude are treated as exact zeros.
inline constexpr double kZeroTol = 1e-15;

/// A probability vector on {0, ..., n-1}: nonnegative entries summing to one.
class MarginalDist {
 public:
  explicit MarginalDist(Vector weights);
  static MarginalDist uniform(Index n);

  Index dim() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double operator[](Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

/// Convex set of row (or column) weight vectors in canonical form
///
///   { base + scale * s : s in simplex, s_i <= caps_i }.
///
/// Invariants: sum(base) + scale == 1, caps in [0, 1], and when scale > 0
/// the capped simplex is nonempty (sum(caps) >= 1).  Every member is itself
/// a probability vector.
class WeightSet {
 public:
  WeightSet(Vector base, double scale, Vector caps);

  /// The one-point set {r}.
  static WeightSet singleton(const MarginalDist& r);
  /// Singleton at the mixture (1 - smoothing) * p + smoothing * uniform.
  static WeightSet smoothed(const MarginalDist& p, double smoothing);
  /// The whole probability simplex.
  static WeightSet full_simplex(Index n);
  /// Simplex members with every entry capped at the same value.
  static WeightSet uniform_cap(Index n, double cap);
  /// Caps proportional to smoothed marginals: caps_i = min(1, ratio * p~_i).
  static WeightSet capped_multiplicative(const MarginalDist& p, double smoothing,
                                         double ratio);
  /// Caps interpolating marginals and ones: caps_i = p~_i^(1 - exponent).
  static WeightSet capped_exponent(const MarginalDist& p, double smoothing,
                                   double exponent);
  /// Simplex members bounded below entrywise; level 0 gives the full simplex,
  /// level 1 the uniform singleton.
  static WeightSet lower_bounded(Index n, double level);

  Index dim() const { return base_.size(); }
  const Vector& base() const { return base_; }
  double scale() const { return scale_; }
  const Vector& caps() const { return caps_; }

  bool is_singleton() const { return scale_ <= 0.0; }
  /// True when every index can carry weight above the zero tolerance.
  bool nontrivial() const;
  /// A member in the relative interior (the analytic centre of the caps).
  Vector interior_point() const;

 private:
  Vector base_;
  double scale_;
  Vector caps_;
};

/// Segment of mixtures {(1 - z) * p + z * uniform : z in [0, 1]}.  Not
/// expressible in base/scale/caps form, so it gets its own type.
class SmoothingSegment {
 public:
  explicit SmoothingSegment(MarginalDist p);

  Index dim() const { return p_.dim(); }
  const MarginalDist& marginals() const { return p_; }

  bool nontrivial() const;
  Vector interior_point() const;  // midpoint z = 1/2
  Vector endpoint(double z) const;

 private:
  MarginalDist p_;
};

struct LinMax {
  double value;
  Vector argmax;  // a maximizing member; dot(argmax, v) == value exactly
};

/// Exact maximum of the linear form <r, v> over the weight set, by greedy
/// allocation of simplex mass in decreasing order of v (ties broken by index).
LinMax linmax(const WeightSet& set, const Vector& v);
LinMax linmax(const SmoothingSegment& segment, const Vector& v);

struct DualOffset {
  double offset;  // smallest v-entry minimizing the dual objective
  double value;   // offset + sum_i caps_i * max(v_i - offset, 0)
};

/// Closed-form minimizer of a + sum_i caps_i * (v_i - a)_+ over real a.  By
/// linear programming duality the value equals the capped-simplex part of
/// linmax exactly.  Requires sum(caps) >= 1.
DualOffset dual_offset(const Vector& caps, const Vector& v);

/// Weighted euclidean norm sup over the set: sqrt(max_r sum_i r_i u_i^2).
double vec_norm(const WeightSet& set, const Vector& u);
double vec_norm(const SmoothingSegment& segment, const Vector& u);

/// True when the set contains exactly one weight vector (no free mass, or
/// caps that already sum to one so the capped simplex is a point).
bool is_point_set(const WeightSet& set);
bool is_point_set(const SmoothingSegment& segment);

}  // namespace localmax
