#include "localmax/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace localmax {

namespace {

double compensated_sum(const Vector& v) {
  double sum = 0.0, carry = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    double y = v[i] - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

Vector clamp_nonnegative(Vector v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw std::invalid_argument(std::string(what) + ": non-finite entry");
    if (v[i] < -kZeroTol) throw std::invalid_argument(std::string(what) + ": negative entry");
    if (v[i] < 0.0) v[i] = 0.0;
  }
  return v;
}

// Indices sorted by decreasing v, ties by increasing index.
std::vector<Index> descending_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v[a] > v[b]; });
  return order;
}

}  // namespace

MarginalDist::MarginalDist(Vector weights)
    : weights_(clamp_nonnegative(std::move(weights), "MarginalDist")) {
  if (weights_.size() == 0) throw std::invalid_argument("MarginalDist: empty");
  double sum = compensated_sum(weights_);
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("MarginalDist: weights must sum to one");
}

MarginalDist MarginalDist::uniform(Index n) {
  if (n < 1) throw std::invalid_argument("MarginalDist: dimension must be positive");
  return MarginalDist(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

WeightSet::WeightSet(Vector base, double scale, Vector caps)
    : base_(clamp_nonnegative(std::move(base), "WeightSet base")),
      scale_(scale),
      caps_(std::move(caps)) {
  if (base_.size() == 0) throw std::invalid_argument("WeightSet: empty");
  if (caps_.size() != base_.size())
    throw std::invalid_argument("WeightSet: base/caps dimension mismatch");
  if (!std::isfinite(scale_) || scale_ < -kZeroTol)
    throw std::invalid_argument("WeightSet: negative scale");
  if (scale_ < 0.0) scale_ = 0.0;
  caps_ = clamp_nonnegative(std::move(caps_), "WeightSet caps");
  caps_ = caps_.cwiseMin(1.0);
  double total = compensated_sum(base_) + scale_;
  if (std::abs(total - 1.0) > kSimplexTol)
    throw std::invalid_argument("WeightSet: base mass plus scale must equal one");
  if (scale_ > 0.0 && compensated_sum(caps_) < 1.0 - kSimplexTol)
    throw std::invalid_argument("WeightSet: caps sum below one, capped simplex empty");
}

WeightSet WeightSet::singleton(const MarginalDist& r) {
  return WeightSet(r.weights(), 0.0, Vector::Zero(r.dim()));
}

WeightSet WeightSet::smoothed(const MarginalDist& p, double smoothing) {
  if (!(smoothing >= 0.0 && smoothing <= 1.0))
    throw std::invalid_argument("smoothed: smoothing must lie in [0, 1]");
  Index n = p.dim();
  Vector mixed = (1.0 - smoothing) * p.weights() +
                 Vector::Constant(n, smoothing / static_cast<double>(n));
  return singleton(MarginalDist(mixed));
}

WeightSet WeightSet::full_simplex(Index n) {
  if (n < 1) throw std::invalid_argument("full_simplex: dimension must be positive");
  return WeightSet(Vector::Zero(n), 1.0, Vector::Ones(n));
}

WeightSet WeightSet::uniform_cap(Index n, double cap) {
  if (n < 1) throw std::invalid_argument("uniform_cap: dimension must be positive");
  double lo = 1.0 / static_cast<double>(n);
  if (!(cap >= lo - kSimplexTol && cap <= 1.0 + kSimplexTol))
    throw std::invalid_argument("uniform_cap: cap must lie in [1/n, 1]");
  return WeightSet(Vector::Zero(n), 1.0, Vector::Constant(n, std::clamp(cap, lo, 1.0)));
}

WeightSet WeightSet::capped_multiplicative(const MarginalDist& p, double smoothing,
                                           double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw std::invalid_argument("capped_multiplicative: ratio must be positive");
  WeightSet mixed = smoothed(p, smoothing);
  Vector caps = (ratio * mixed.base()).cwiseMin(1.0);
  return WeightSet(Vector::Zero(p.dim()), 1.0, std::move(caps));
}

WeightSet WeightSet::capped_exponent(const MarginalDist& p, double smoothing,
                                     double exponent) {
  if (!(exponent >= 0.0 && exponent <= 1.0))
    throw std::invalid_argument("capped_exponent: exponent must lie in [0, 1]");
  WeightSet mixed = smoothed(p, smoothing);
  Vector caps(p.dim());
  for (Index i = 0; i < caps.size(); ++i)
    caps[i] = std::pow(mixed.base()[i], 1.0 - exponent);
  return WeightSet(Vector::Zero(p.dim()), 1.0, std::move(caps));
}

WeightSet WeightSet::lower_bounded(Index n, double level) {
  if (n < 1) throw std::invalid_argument("lower_bounded: dimension must be positive");
  if (!(level >= 0.0 && level <= 1.0))
    throw std::invalid_argument("lower_bounded: level must lie in [0, 1]");
  double denom = 1.0 + (static_cast<double>(n) - 1.0) * level;
  double floor = level / denom;
  double scale = (1.0 - level) / denom;
  // Rebalance so the simplex-sum invariant holds exactly in floating point.
  Vector base = Vector::Constant(n, floor);
  scale = 1.0 - compensated_sum(base);
  if (scale <= kZeroTol) return singleton(MarginalDist::uniform(n));
  return WeightSet(std::move(base), scale, Vector::Ones(n));
}

bool WeightSet::nontrivial() const {
  for (Index i = 0; i < dim(); ++i) {
    double reach = base_[i] + (scale_ > 0.0 ? scale_ * caps_[i] : 0.0);
    if (reach <= kZeroTol) return false;
  }
  return true;
}

Vector WeightSet::interior_point() const {
  if (is_singleton()) return base_;
  double total = caps_.sum();
  return base_ + (scale_ / total) * caps_;
}

SmoothingSegment::SmoothingSegment(MarginalDist p) : p_(std::move(p)) {}

bool SmoothingSegment::nontrivial() const { return true; }

Vector SmoothingSegment::endpoint(double z) const {
  Index n = dim();
  return (1.0 - z) * p_.weights() + Vector::Constant(n, z / static_cast<double>(n));
}

Vector SmoothingSegment::interior_point() const { return endpoint(0.5); }

LinMax linmax(const WeightSet& set, const Vector& v) {
  if (v.size() != set.dim()) throw std::invalid_argument("linmax: dimension mismatch");
  Vector r = set.base();
  if (!set.is_singleton()) {
    const Vector& caps = set.caps();
    double remaining = 1.0;
    for (Index idx : descending_order(v)) {
      if (remaining <= 0.0) break;
      double take = std::min(caps[idx], remaining);
      r[idx] += set.scale() * take;
      remaining -= take;
    }
    if (remaining > kSimplexTol)
      throw std::invalid_argument("linmax: caps sum below one");
  }
  return {r.dot(v), std::move(r)};
}

LinMax linmax(const SmoothingSegment& segment, const Vector& v) {
  if (v.size() != segment.dim())
    throw std::invalid_argument("linmax: dimension mismatch");
  // Linear in the mixing parameter, so an endpoint attains the maximum;
  // ties go to the marginal endpoint.
  Vector at_p = segment.endpoint(0.0);
  Vector at_u = segment.endpoint(1.0);
  double fp = at_p.dot(v), fu = at_u.dot(v);
  if (fp >= fu) return {fp, std::move(at_p)};
  return {fu, std::move(at_u)};
}

DualOffset dual_offset(const Vector& caps, const Vector& v) {
  if (caps.size() != v.size())
    throw std::invalid_argument("dual_offset: dimension mismatch");
  if (caps.size() == 0) throw std::invalid_argument("dual_offset: empty");
  if (compensated_sum(caps) < 1.0 - kSimplexTol)
    throw std::invalid_argument("dual_offset: caps must sum to at least one");
  std::vector<Index> order = descending_order(v);

  // The objective a + sum_i caps_i (v_i - a)_+ is piecewise linear with
  // slope 1 - sum_{v_i > a} caps_i, so the smallest v-entry whose
  // strictly-greater cap mass is still <= 1 minimizes it.  Walk groups of
  // equal value in decreasing order; candidates form a prefix.
  double offset = v[order.front()];
  double cum = 0.0;
  std::size_t pos = 0;
  while (pos < order.size()) {
    double value = v[order[pos]];
    if (cum <= 1.0) offset = value;
    while (pos < order.size() && v[order[pos]] == value) cum += caps[order[pos++]];
  }

  double total = offset;
  for (Index i = 0; i < v.size(); ++i)
    total += caps[i] * std::max(v[i] - offset, 0.0);
  return {offset, total};
}

double vec_norm(const WeightSet& set, const Vector& u) {
  return std::sqrt(linmax(set, u.array().square().matrix()).value);
}

double vec_norm(const SmoothingSegment& segment, const Vector& u) {
  return std::sqrt(linmax(segment, u.array().square().matrix()).value);
}

bool is_point_set(const WeightSet& set) {
  if (set.is_singleton()) return true;
  return set.caps().sum() <= 1.0 + kSimplexTol;
}

bool is_point_set(const SmoothingSegment& segment) {
  Index n = segment.dim();
  return (segment.marginals().weights() - Vector::Constant(n, 1.0 / n))
             .cwiseAbs()
             .maxCoeff() <= kZeroTol;
}

}  // namespace localmax
