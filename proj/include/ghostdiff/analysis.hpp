#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghostdiff/profile.hpp"

namespace ghostdiff {

/// A profile does not contain the extrema a fringe measurement needs.
class PatternNotResolved : public std::runtime_error {
 public:
  explicit PatternNotResolved(const std::string& detail)
      : std::runtime_error("pattern-not-resolved: " + detail) {}
};

template <typename Scalar>
DensityProfile<Scalar> normalize(const DensityProfile<Scalar>& p, Normalization<Scalar> mode) {
  if (p.size() == 0 || !(p.values().maxCoeff() > Scalar(0)))
    throw ValidationError("profile", "cannot normalize an all-zero profile");
  switch (mode.kind) {
    case NormalizationKind::raw:
      return {p.positions(), p.values(), mode};
    case NormalizationKind::unit_area: {
      const Scalar area = trapezoid(p);
      if (!(area > Scalar(0))) throw ValidationError("profile", "zero area");
      return {p.positions(), p.values() / area, mode};
    }
    case NormalizationKind::peak_scaled: {
      if (!(mode.scale > Scalar(0))) throw ValidationError("peak_scale", "must be positive");
      Vector<Scalar> v = p.values() * (mode.scale / p.values().maxCoeff());
      // Pin the maximum to exactly `scale`.
      Eigen::Index at;
      v.maxCoeff(&at);
      v[at] = mode.scale;
      return {p.positions(), std::move(v), mode};
    }
  }
  return p;
}

enum class ExtremumKind { minimum, maximum };

template <typename Scalar>
struct Extremum {
  ExtremumKind kind;
  Scalar position;  // parabola vertex, inside [x[index-1], x[index+1]]
  Scalar value;     // parabola value at the vertex
  Eigen::Index index;
};

namespace detail {
// Vertex of the parabola through three points, in coordinates relative to x1.
template <typename Scalar>
std::pair<Scalar, Scalar> parabola_vertex(Scalar x0, Scalar y0, Scalar x1, Scalar y1, Scalar x2, Scalar y2) {
  const Scalar a = x0 - x1, b = x2 - x1;
  const Scalar ya = y0 - y1, yb = y2 - y1;
  const Scalar c2 = (ya / a - yb / b) / (a - b);
  const Scalar c1 = ya / a - c2 * a;
  if (c2 == Scalar(0) || !std::isfinite(c2)) return {Scalar(0), y1};
  const Scalar t = std::clamp(-c1 / (Scalar(2) * c2), a, b);
  return {t, y1 + c1 * t + c2 * t * t};
}
}  // namespace detail

/// Interior local extrema by strict three-point comparison, ordered by
/// position and refined by parabolic interpolation.
template <typename Scalar>
std::vector<Extremum<Scalar>> find_extrema(const DensityProfile<Scalar>& p) {
  std::vector<Extremum<Scalar>> out;
  const auto& x = p.positions();
  const auto& y = p.values();
  for (Eigen::Index i = 1; i + 1 < p.size(); ++i) {
    const bool is_max = y[i] > y[i - 1] && y[i] > y[i + 1];
    const bool is_min = y[i] < y[i - 1] && y[i] < y[i + 1];
    if (!is_max && !is_min) continue;
    const auto [t, v] = detail::parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]);
    out.push_back({is_max ? ExtremumKind::maximum : ExtremumKind::minimum, x[i] + t, v, i});
  }
  return out;
}

template <typename Scalar>
std::size_t count_maxima(const std::vector<Extremum<Scalar>>& e) {
  return static_cast<std::size_t>(
      std::count_if(e.begin(), e.end(), [](const auto& x) { return x.kind == ExtremumKind::maximum; }));
}

template <typename Scalar>
struct FringeMetrics {
  Scalar central_max_position;
  std::pair<Scalar, Scalar> first_min_positions;  // left, right
  std::optional<std::pair<Scalar, Scalar>> first_secondary_max_positions;
  Scalar measured_width_min;                 // mean distance central max -> first minima
  std::optional<Scalar> measured_width_max;  // mean distance central max -> first secondary maxima
  Scalar peak_value;
  std::optional<Scalar> secondary_to_central_ratio;
};

/// Fringe geometry around the highest interior maximum. Throws
/// PatternNotResolved when there is no minimum on either side of it.
template <typename Scalar>
FringeMetrics<Scalar> measure_fringe(const DensityProfile<Scalar>& p) {
  using E = Extremum<Scalar>;
  const auto ext = find_extrema(p);
  const E* central = nullptr;
  for (const auto& e : ext)
    if (e.kind == ExtremumKind::maximum && (!central || e.value > central->value)) central = &e;
  if (!central) throw PatternNotResolved("no interior maximum");

  const E* min_left = nullptr;
  const E* min_right = nullptr;
  for (const auto& e : ext) {
    if (e.kind != ExtremumKind::minimum) continue;
    if (e.index < central->index) min_left = &e;
    if (e.index > central->index && !min_right) min_right = &e;
  }
  if (!min_left || !min_right) throw PatternNotResolved("no minimum on both sides of the central maximum");

  const E* max_left = nullptr;
  const E* max_right = nullptr;
  for (const auto& e : ext) {
    if (e.kind != ExtremumKind::maximum) continue;
    if (e.index < min_left->index) max_left = &e;
    if (e.index > min_right->index && !max_right) max_right = &e;
  }

  FringeMetrics<Scalar> m;
  m.central_max_position = central->position;
  m.first_min_positions = {min_left->position, min_right->position};
  m.measured_width_min =
      Scalar(0.5) * ((central->position - min_left->position) + (min_right->position - central->position));
  m.peak_value = central->value;
  if (max_left && max_right) {
    m.first_secondary_max_positions = std::pair{max_left->position, max_right->position};
    m.measured_width_max =
        Scalar(0.5) * ((central->position - max_left->position) + (max_right->position - central->position));
    m.secondary_to_central_ratio = Scalar(0.5) * (max_left->value + max_right->value) / central->value;
  }
  return m;
}

template <typename Scalar>
struct Comparison {
  Scalar l_inf_rel;
  Scalar l2_rel;
  bool resampled;  // b was linearly interpolated onto a's positions
};

namespace detail {
template <typename Scalar>
Scalar interpolate(const Vector<Scalar>& x, const Vector<Scalar>& y, Scalar at) {
  const auto* begin = x.data();
  const auto* end = x.data() + x.size();
  const auto* hi = std::lower_bound(begin, end, at);
  if (hi == begin) return y[0];
  if (hi == end) return y[x.size() - 1];
  const Eigen::Index j = hi - begin;
  const Scalar t = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + t * (y[j] - y[j - 1]);
}
}  // namespace detail

/// Relative L-inf and L2 distance of the unit-area-normalized profiles,
/// each divided by the larger of the two profiles' norms.
template <typename Scalar>
Comparison<Scalar> compare(const DensityProfile<Scalar>& a, const DensityProfile<Scalar>& b) {
  const bool same_axis = a.size() == b.size() && a.positions() == b.positions();
  Vector<Scalar> x, ya, yb;
  if (same_axis) {
    x = a.positions();
    ya = a.values();
    yb = b.values();
  } else {
    const Scalar lo = std::max(a.positions()[0], b.positions()[0]);
    const Scalar hi = std::min(a.positions()[a.size() - 1], b.positions()[b.size() - 1]);
    if (!(lo < hi)) throw ValidationError("compare", "profiles have disjoint supports");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a.positions()[i] >= lo && a.positions()[i] <= hi) keep.push_back(i);
    if (keep.size() < 2) throw ValidationError("compare", "overlap holds fewer than two samples");
    const auto n = static_cast<Eigen::Index>(keep.size());
    x.resize(n);
    ya.resize(n);
    yb.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      x[k] = a.positions()[keep[k]];
      ya[k] = a.values()[keep[k]];
      yb[k] = detail::interpolate(b.positions(), b.values(), x[k]);
    }
  }
  const auto na = normalize(DensityProfile<Scalar>(x, ya), Normalization<Scalar>::unit_area());
  const auto nb = normalize(DensityProfile<Scalar>(x, yb), Normalization<Scalar>::unit_area());
  const Vector<Scalar> diff = na.values() - nb.values();

  const Scalar linf_scale = std::max(na.values().maxCoeff(), nb.values().maxCoeff());
  const Scalar l2_a = std::sqrt(trapezoid<Scalar>(x, na.values().cwiseAbs2()));
  const Scalar l2_b = std::sqrt(trapezoid<Scalar>(x, nb.values().cwiseAbs2()));
  const Scalar l2_diff = std::sqrt(trapezoid<Scalar>(x, diff.cwiseAbs2()));
  return {diff.cwiseAbs().maxCoeff() / linf_scale, l2_diff / std::max(l2_a, l2_b), !same_axis};
}

/// Position of the largest sample, refined by parabolic interpolation.
template <typename Scalar>
Scalar refined_argmax(const DensityProfile<Scalar>& p) {
  Eigen::Index i;
  p.values().maxCoeff(&i);
  if (i == 0 || i + 1 == p.size()) return p.positions()[i];
  const auto& x = p.positions();
  const auto& y = p.values();
  return x[i] + detail::parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]).first;
}

}  // namespace ghostdiff
