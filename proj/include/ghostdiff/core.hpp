#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ghostdiff {

/// Raised when a physical parameter or a numerical setup is out of its
/// admissible range. `field()` names the offending input.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Physical parameters of the two-photon single-slit experiment, SI units.
///
/// `l2` is the source-to-slit distance (photon 2 covers the same distance
/// during that time), `l1` the slit-to-D1 distance.
template <typename Scalar>
struct PhysicalConfig {
  Scalar wavelength;  // m
  Scalar slit_width;  // m
  Scalar sigma;       // 1/m, momentum spread
  Scalar omega;       // m, position spread
  Scalar l1;          // m
  Scalar l2;          // m

  template <typename Other>
  PhysicalConfig<Other> cast() const {
    return {Other(wavelength), Other(slit_width), Other(sigma),
            Other(omega),      Other(l1),         Other(l2)};
  }
};

using Config = PhysicalConfig<double>;

/// Default configuration: 702.2 nm, 0.4 mm slit, sigma = 5/mm,
/// Omega = 2 mm, L1 = L2 = 0.6 m (D = 1.8 m).
inline Config reference_config() { return {702.2e-9, 0.4e-3, 5.0e3, 2.0e-3, 0.6, 0.6}; }

template <typename Scalar>
void validate(const PhysicalConfig<Scalar>& c) {
  auto check = [](const char* name, Scalar v) {
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    if (!(v > Scalar(0))) throw ValidationError(name, "must be strictly positive");
  };
  check("wavelength", c.wavelength);
  check("slit_width", c.slit_width);
  check("sigma", c.sigma);
  check("omega", c.omega);
  check("L1", c.l1);
  check("L2", c.l2);
}

/// Qualitative regime indicators. None of them is an error.
struct RegimeFlags {
  bool entangled;      // Omega * sigma > 5
  bool fresnel;        // eps / L1 and eps / L2 below 1e-2
  bool approximation;  // 2 lambda L2 / pi > 100 / sigma^2
};

template <typename Scalar>
RegimeFlags regime(const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return {c.omega * c.sigma > Scalar(5),
          c.slit_width / c.l1 < Scalar(1e-2) && c.slit_width / c.l2 < Scalar(1e-2),
          Scalar(2) * c.wavelength * c.l2 / pi > Scalar(100) / (c.sigma * c.sigma)};
}

/// Complex propagation constants.
///
/// gamma_cap and gamma_low are the complex squared widths of the (z1 + z2)
/// and (z1 - z2) Gaussians after the source-to-slit leg; alpha and beta
/// parametrize the amplitude at the detectors after the slit.
template <typename Scalar>
struct DerivedParams {
  using Complex = std::complex<Scalar>;

  Scalar k0;          // 1/m
  Scalar distance;    // D = 2 L2 + L1, m
  Complex gamma_cap;  // Gamma, m^2
  Complex gamma_low;  // gamma, m^2
  Complex alpha;      // m^2
  Complex beta;       // 1/m^2
  bool is_entangled;
};

template <typename Scalar>
DerivedParams<Scalar> derive_params(const PhysicalConfig<Scalar>& c) {
  using Complex = std::complex<Scalar>;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  validate(c);

  const Scalar spread = Scalar(2) * c.wavelength * c.l2 / pi;
  const Complex big{Scalar(4) * c.omega * c.omega, spread};
  const Complex small{Scalar(1) / (c.sigma * c.sigma), spread};

  // Factored so the difference is exactly zero when 2 Omega sigma == 1.
  const Scalar product = Scalar(2) * c.omega * c.sigma;
  const Scalar difference = (product - Scalar(1)) * (product + Scalar(1)) / (c.sigma * c.sigma);

  const Complex sum = big + small;
  const Complex alpha = big * small / sum + Complex{0, c.wavelength * c.l1 / pi};
  const Complex beta = Complex(difference) / (sum * alpha);

  DerivedParams<Scalar> p;
  p.k0 = Scalar(2) * pi / c.wavelength;
  p.distance = Scalar(2) * c.l2 + c.l1;
  p.gamma_cap = big;
  p.gamma_low = small;
  p.alpha = alpha;
  p.beta = beta;
  p.is_entangled = std::abs(difference) / std::abs(sum) > Scalar(1e-12);
  return p;
}

template <typename Scalar>
struct Uncertainties {
  Scalar position;        // Delta z, m
  Scalar wavevector;      // Delta k, 1/m
};

/// Position and wave-vector spread of either photon along z.
template <typename Scalar>
Uncertainties<Scalar> uncertainties(const PhysicalConfig<Scalar>& c) {
  validate(c);
  const Scalar s2 = c.sigma * c.sigma;
  const Scalar o2 = c.omega * c.omega;
  return {std::sqrt(o2 + Scalar(1) / (Scalar(4) * s2)),
          Scalar(0.5) * std::sqrt(s2 + Scalar(1) / (Scalar(4) * o2))};
}

/// A uniform 1D detector scan, endpoints included.
template <typename Scalar>
class ScanSpec {
 public:
  ScanSpec(Scalar start, Scalar stop, int count) : start_(start), stop_(stop), count_(count) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
      throw ValidationError("scan", "start must be finite and below stop");
    if (count < 2) throw ValidationError("scan", "count must be at least 2");
  }

  static ScanSpec symmetric(Scalar half_width, int count) { return {-half_width, half_width, count}; }

  Scalar start() const { return start_; }
  Scalar stop() const { return stop_; }
  int count() const { return count_; }
  Scalar step() const { return (stop_ - start_) / Scalar(count_ - 1); }

  Scalar at(int i) const {
    // Endpoints are exact.
    if (i == count_ - 1) return stop_;
    return start_ + step() * Scalar(i);
  }

 private:
  Scalar start_;
  Scalar stop_;
  int count_;
};

using Scan = ScanSpec<double>;

}  // namespace ghostdiff
