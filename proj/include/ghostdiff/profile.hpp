#pragma once

#include <Eigen/Core>

#include "ghostdiff/core.hpp"

namespace ghostdiff {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class NormalizationKind { raw, unit_area, peak_scaled };

template <typename Scalar>
struct Normalization {
  NormalizationKind kind = NormalizationKind::raw;
  Scalar scale = Scalar(1);  // peak value for peak_scaled

  static Normalization raw() { return {}; }
  static Normalization unit_area() { return {NormalizationKind::unit_area, Scalar(1)}; }
  static Normalization peak_scaled(Scalar peak) { return {NormalizationKind::peak_scaled, peak}; }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Sampled density along one detector coordinate.
template <typename Scalar>
class DensityProfile {
 public:
  DensityProfile(Vector<Scalar> positions, Vector<Scalar> values,
                 Normalization<Scalar> normalization = Normalization<Scalar>::raw())
      : positions_(std::move(positions)), values_(std::move(values)), normalization_(normalization) {
    if (positions_.size() != values_.size())
      throw ValidationError("profile", "positions and values differ in length");
    for (Eigen::Index i = 1; i < positions_.size(); ++i)
      if (!(positions_[i] > positions_[i - 1]))
        throw ValidationError("profile", "positions must be strictly increasing");
    for (Eigen::Index i = 0; i < values_.size(); ++i)
      if (!(values_[i] >= Scalar(0)) || !std::isfinite(values_[i]))
        throw ValidationError("profile", "values must be finite and non-negative");
  }

  const Vector<Scalar>& positions() const { return positions_; }
  const Vector<Scalar>& values() const { return values_; }
  const Normalization<Scalar>& normalization() const { return normalization_; }
  Eigen::Index size() const { return positions_.size(); }

 private:
  Vector<Scalar> positions_;
  Vector<Scalar> values_;
  Normalization<Scalar> normalization_;
};

template <typename Scalar>
Vector<Scalar> sample_positions(const ScanSpec<Scalar>& scan) {
  Vector<Scalar> x(scan.count());
  for (int i = 0; i < scan.count(); ++i) x[i] = scan.at(i);
  return x;
}

/// Trapezoid rule over (possibly non-uniform) sample positions.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar trapezoid(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  const Eigen::Index n = x.size();
  if (n < 2) return Scalar(0);
  const auto dx = x.tail(n - 1) - x.head(n - 1);
  const auto mean = (y.tail(n - 1) + y.head(n - 1)) * Scalar(0.5);
  return dx.cwiseProduct(mean).sum();
}

template <typename Scalar>
Scalar trapezoid(const DensityProfile<Scalar>& p) {
  return trapezoid<Scalar>(p.positions(), p.values());
}

}  // namespace ghostdiff
