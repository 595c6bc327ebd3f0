#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "ghostdiff/core.hpp"
#include "ghostdiff/diagnostics.hpp"
#include "ghostdiff/profile.hpp"

// Closed-form amplitudes and densities of the entangled pair: at the source,
// just before the slit, and at the two detectors after slit truncation.

namespace ghostdiff {

/// Which sinc argument the detector amplitude uses.
///
/// `published`: sin(eps (pi z1 / 2 lambda L1 - i z2 beta)) / (pi z1 / 2 lambda L1 - i z2 beta),
/// the form evaluated throughout this library by default.
/// `rederived`: sin(eps (pi z1 / lambda L1 + i z2 beta)) / (pi z1 / lambda L1 + i z2 beta),
/// what the linearized slit integral actually evaluates to. Both coincide at z1 = 0.
enum class SincConvention { published, rederived };

/// Branch of the complex square root in the post-slit prefactor.
enum class SqrtBranch { principal, flipped };

struct AmplitudeOptions {
  SincConvention sinc = SincConvention::published;
  SqrtBranch branch = SqrtBranch::principal;
};

namespace detail {
// Below this |eps * s| / 2 the sinc factor is evaluated by its Taylor series.
inline constexpr double kSincSeriesThreshold = 1e-8;
// Below this |z2| (m) the ghost profile is evaluated by its limit.
inline constexpr double kGhostSeriesThreshold = 1e-9;
}  // namespace detail

/// Source state Psi(z1, z2), real and positive.
template <typename Scalar>
Scalar initial_state(Scalar z1, Scalar z2, const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar prefactor = std::sqrt(Scalar(2) * c.sigma / (pi * c.omega));
  const Scalar d = z1 - z2;
  const Scalar s = z1 + z2;
  return prefactor * std::exp(-d * d * c.sigma * c.sigma) *
         std::exp(-s * s / (Scalar(4) * c.omega * c.omega));
}

/// Modulus C of the state prefactor after the source-to-slit leg.
template <typename Scalar>
Scalar slit_prefactor(const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar a = c.wavelength * c.l2 / (Scalar(2) * pi * c.omega);
  const Scalar b = Scalar(2) * c.sigma * c.wavelength * c.l2 / pi;
  const Scalar product = (c.omega * c.omega + a * a) * (Scalar(1) / (c.sigma * c.sigma) + b * b);
  return std::sqrt(Scalar(2) / pi) * std::pow(product, Scalar(-0.25));
}

/// Two-photon state just before photon 1 reaches the slit.
template <typename Scalar>
class SlitState {
 public:
  using Complex = std::complex<Scalar>;

  explicit SlitState(const PhysicalConfig<Scalar>& c)
      : params_(derive_params(c)), prefactor_(slit_prefactor(c)) {}

  Complex operator()(Scalar z1, Scalar z2) const {
    const Scalar s = z1 + z2;
    const Scalar d = z1 - z2;
    return prefactor_ * std::exp(-s * s / params_.gamma_cap - d * d / params_.gamma_low);
  }

  Scalar prefactor() const { return prefactor_; }
  const DerivedParams<Scalar>& params() const { return params_; }

 private:
  DerivedParams<Scalar> params_;
  Scalar prefactor_;
};

template <typename Scalar>
std::complex<Scalar> state_at_slit(Scalar z1, Scalar z2, const PhysicalConfig<Scalar>& c) {
  return SlitState<Scalar>(c)(z1, z2);
}

/// Prefactor C_r of the amplitude at the detectors.
template <typename Scalar>
std::complex<Scalar> final_prefactor(const PhysicalConfig<Scalar>& c,
                                     SqrtBranch branch = SqrtBranch::principal) {
  using Complex = std::complex<Scalar>;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const auto p = derive_params(c);
  const Complex i_lambda_l{Scalar(0), c.wavelength * c.l1};
  const Complex sum = p.gamma_cap + p.gamma_low;
  const Complex inner = sum / (pi * p.gamma_cap * p.gamma_low) + Scalar(1) / i_lambda_l;
  Complex root = std::sqrt(inner);
  if (branch == SqrtBranch::flipped) root = -root;
  return slit_prefactor(c) / (i_lambda_l * root);
}

/// Joint amplitude and density at detectors D1 (z1) and D2 (z2) after the
/// narrow-slit linearization. Construct once, evaluate many points.
template <typename Scalar>
class DetectorAmplitude {
 public:
  using Complex = std::complex<Scalar>;

  explicit DetectorAmplitude(const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {})
      : config_(c),
        params_(derive_params(c)),
        prefactor_(final_prefactor(c, options.branch)),
        options_(options) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar denom = c.wavelength * c.l1;
    z1_phase_ = pi / denom;
    z1_sinc_ = options.sinc == SincConvention::published ? pi / (Scalar(2) * denom) : pi / denom;
    inv_alpha_ = Scalar(1) / params_.alpha;
  }

  Complex amplitude(Scalar z1, Scalar z2) const {
    const Complex s = sinc_argument(z1, z2);
    const Scalar eps = config_.slit_width;
    const Complex es = eps * s;
    Complex sinc;
    if (std::abs(es) * Scalar(0.5) < Scalar(detail::kSincSeriesThreshold))
      sinc = eps * (Scalar(1) - es * es / Scalar(6));
    else
      sinc = std::sin(es) / s;
    const Complex exponent = Complex{Scalar(0), z1_phase_ * z1 * z1} - z2 * z2 * inv_alpha_;
    return prefactor_ * std::exp(exponent) * sinc;
  }

  /// |amplitude|^2 in expanded form:
  /// |C_r|^2 exp(-2 z2^2 Re(1/alpha)) (sin^2 Re(eps s) + sinh^2 Im(eps s)) / |s|^2.
  Scalar density(Scalar z1, Scalar z2) const {
    const Complex s = sinc_argument(z1, z2);
    const Scalar eps = config_.slit_width;
    const Complex es = eps * s;
    Scalar sinc2;
    if (std::abs(es) * Scalar(0.5) < Scalar(detail::kSincSeriesThreshold)) {
      sinc2 = std::norm(eps * (Scalar(1) - es * es / Scalar(6)));
    } else {
      const Scalar sr = std::sin(es.real());
      const Scalar sh = std::sinh(es.imag());
      sinc2 = (sr * sr + sh * sh) / std::norm(s);
    }
    return std::norm(prefactor_) * std::exp(Scalar(-2) * z2 * z2 * inv_alpha_.real()) * sinc2;
  }

  const PhysicalConfig<Scalar>& config() const { return config_; }
  const DerivedParams<Scalar>& params() const { return params_; }
  Complex prefactor() const { return prefactor_; }
  AmplitudeOptions options() const { return options_; }

 private:
  Complex sinc_argument(Scalar z1, Scalar z2) const {
    const Complex b = params_.beta;
    const Scalar x = z1_sinc_ * z1;
    // published: x - i z2 beta; rederived: x + i z2 beta.
    if (options_.sinc == SincConvention::published) return {x + z2 * b.imag(), -(z2 * b.real())};
    return {x - z2 * b.imag(), z2 * b.real()};
  }

  PhysicalConfig<Scalar> config_;
  DerivedParams<Scalar> params_;
  Complex prefactor_;
  AmplitudeOptions options_;
  Scalar z1_phase_{};
  Scalar z1_sinc_{};
  Complex inv_alpha_;
};

template <typename Scalar>
std::complex<Scalar> final_amplitude(Scalar z1, Scalar z2, const PhysicalConfig<Scalar>& c,
                                     AmplitudeOptions options = {}) {
  return DetectorAmplitude<Scalar>(c, options).amplitude(z1, z2);
}

template <typename Scalar>
Scalar joint_density(Scalar z1, Scalar z2, const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {}) {
  return DetectorAmplitude<Scalar>(c, options).density(z1, z2);
}

/// Envelope A(z2) of the approximate ghost profile, Gaussian factor included.
template <typename Scalar>
Scalar ghost_envelope(Scalar z2, const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar d = Scalar(2) * c.l2 + c.l1;
  const Scalar a = c.wavelength * c.l2 / (Scalar(2) * pi * c.omega);
  const Scalar g = pi * z2 / (c.sigma * c.wavelength * d);
  return Scalar(1) / std::sqrt(c.omega * c.omega + a * a) * (d / (Scalar(2) * pi * pi * c.sigma * c.l1)) *
         std::exp(Scalar(-2) * g * g);
}

/// Coincidence density at D2 with D1 fixed at z1 = 0, in the approximation
/// Omega >> 1/sigma, 2 lambda L2 / pi >> 1/sigma^2. Does not warn; see the
/// scan overload.
template <typename Scalar>
Scalar ghost_profile(Scalar z2, const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  validate(c);
  const Scalar d = Scalar(2) * c.l2 + c.l1;
  const Scalar eps = c.slit_width;
  const Scalar osc = pi * eps / (c.wavelength * d);
  const Scalar k = pi / (c.sigma * c.wavelength * d);
  const Scalar hyp = eps * k * k;
  const Scalar envelope = ghost_envelope(z2, c);
  if (std::abs(z2) < Scalar(detail::kGhostSeriesThreshold)) return envelope * (osc * osc + hyp * hyp);

  const Scalar x = osc * z2;
  const Scalar y = hyp * z2;
  const Scalar s = std::sin(x), co = std::cos(x);
  const Scalar ch = std::cosh(y), sh = std::sinh(y);
  return envelope / (z2 * z2) * (s * s * ch * ch + co * co * sh * sh);
}

template <typename Scalar>
DensityProfile<Scalar> ghost_profile(const ScanSpec<Scalar>& scan, const PhysicalConfig<Scalar>& c) {
  if (!regime(c).approximation || !(c.omega * c.sigma > Scalar(5)))
    warn("ghost_profile: configuration is outside the approximation regime "
         "(needs Omega >> 1/sigma and 2 lambda L2 / pi >> 1/sigma^2)");
  Vector<Scalar> x = sample_positions(scan);
  Vector<Scalar> v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = ghost_profile(x[i], c);
  return {std::move(x), std::move(v)};
}

/// Coincidence density at D2 over `scan` with D1 fixed at z0.
template <typename Scalar>
DensityProfile<Scalar> conditional_profile(Scalar z0, const ScanSpec<Scalar>& scan,
                                           const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {}) {
  const DetectorAmplitude<Scalar> amp(c, options);
  Vector<Scalar> x = sample_positions(scan);
  Vector<Scalar> v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = amp.density(z0, x[i]);
  return {std::move(x), std::move(v)};
}

/// Characteristic fringe spacing lambda D / eps.
template <typename Scalar>
Scalar fringe_width(const PhysicalConfig<Scalar>& c) {
  validate(c);
  return c.wavelength * (Scalar(2) * c.l2 + c.l1) / c.slit_width;
}

// --- marginals -------------------------------------------------------------

template <typename Scalar>
struct MarginalValue {
  Scalar value;
  bool span_ok;  // integrand at both scan ends below 1e-6 of its maximum
};

namespace detail {
template <typename Scalar, typename F>
MarginalValue<Scalar> integrate_scan(const ScanSpec<Scalar>& scan, F&& integrand) {
  const int n = scan.count();
  const Scalar h = scan.step();
  Scalar sum = Scalar(0), peak = Scalar(0);
  Scalar first = Scalar(0), last = Scalar(0);
  for (int i = 0; i < n; ++i) {
    const Scalar f = integrand(scan.at(i));
    peak = std::max(peak, f);
    if (i == 0) first = f;
    if (i == n - 1) last = f;
    sum += (i == 0 || i == n - 1) ? Scalar(0.5) * f : f;
  }
  const bool ok = peak == Scalar(0) || std::max(first, last) <= Scalar(1e-6) * peak;
  return {sum * h, ok};
}

inline void warn_span(const char* what) {
  warn(std::string(what) + ": integrand at the scan ends exceeds 1e-6 of its maximum; widen the span");
}
}  // namespace detail

/// Singles density of photon 1 at z1: joint density integrated over z2.
template <typename Scalar>
MarginalValue<Scalar> integrate_over_z2(const DetectorAmplitude<Scalar>& amp, Scalar z1,
                                        const ScanSpec<Scalar>& scan_z2) {
  return detail::integrate_scan(scan_z2, [&](Scalar z2) { return amp.density(z1, z2); });
}

/// Singles density of photon 2 at z2: joint density integrated over z1.
template <typename Scalar>
MarginalValue<Scalar> integrate_over_z1(const DetectorAmplitude<Scalar>& amp, Scalar z2,
                                        const ScanSpec<Scalar>& scan_z1) {
  return detail::integrate_scan(scan_z1, [&](Scalar z1) { return amp.density(z1, z2); });
}

template <typename Scalar>
Scalar marginal_z2(Scalar z1, const ScanSpec<Scalar>& scan_z2, const PhysicalConfig<Scalar>& c,
                   AmplitudeOptions options = {}) {
  const auto r = integrate_over_z2(DetectorAmplitude<Scalar>(c, options), z1, scan_z2);
  if (!r.span_ok) detail::warn_span("marginal_z2");
  return r.value;
}

template <typename Scalar>
Scalar marginal_z1(Scalar z2, const ScanSpec<Scalar>& scan_z1, const PhysicalConfig<Scalar>& c,
                   AmplitudeOptions options = {}) {
  const auto r = integrate_over_z1(DetectorAmplitude<Scalar>(c, options), z2, scan_z1);
  if (!r.span_ok) detail::warn_span("marginal_z1");
  return r.value;
}

/// z2 integration window covering 8 standard deviations of the
/// exp(-2 z2^2 Re(1/alpha)) envelope, 641 points.
template <typename Scalar>
ScanSpec<Scalar> default_z2_integration(const PhysicalConfig<Scalar>& c) {
  const auto p = derive_params(c);
  const Scalar std_dev = Scalar(0.5) / std::sqrt((Scalar(1) / p.alpha).real());
  return ScanSpec<Scalar>::symmetric(Scalar(8) * std_dev, 641);
}

/// z1 integration window for the 1/z1^2 sinc tails: out to where the tail
/// bound drops to 2.5e-7 of the peak, sampled at an eighth of the first zero.
template <typename Scalar>
ScanSpec<Scalar> default_z1_integration(const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {}) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  validate(c);
  const Scalar per_length = (options.sinc == SincConvention::published ? Scalar(0.5) : Scalar(1)) * pi /
                            (c.wavelength * c.l1);
  const Scalar first_zero = pi / (c.slit_width * per_length);
  const Scalar half = Scalar(2000) / (c.slit_width * per_length);
  const int count = 2 * static_cast<int>(std::ceil(half / (first_zero / Scalar(8)))) + 1;
  return ScanSpec<Scalar>::symmetric(half, count);
}

/// Photon-1 singles distribution over `scan_z1`.
template <typename Scalar>
DensityProfile<Scalar> marginal_z2_profile(const ScanSpec<Scalar>& scan_z1, const ScanSpec<Scalar>& scan_z2,
                                           const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {}) {
  const DetectorAmplitude<Scalar> amp(c, options);
  Vector<Scalar> x = sample_positions(scan_z1);
  Vector<Scalar> v(x.size());
  bool ok = true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto r = integrate_over_z2(amp, x[i], scan_z2);
    v[i] = r.value;
    ok = ok && r.span_ok;
  }
  if (!ok) detail::warn_span("marginal_z2");
  return {std::move(x), std::move(v)};
}

/// Photon-2 singles distribution over `scan_z2`.
template <typename Scalar>
DensityProfile<Scalar> marginal_z1_profile(const ScanSpec<Scalar>& scan_z2, const ScanSpec<Scalar>& scan_z1,
                                           const PhysicalConfig<Scalar>& c, AmplitudeOptions options = {}) {
  const DetectorAmplitude<Scalar> amp(c, options);
  Vector<Scalar> x = sample_positions(scan_z2);
  Vector<Scalar> v(x.size());
  bool ok = true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto r = integrate_over_z1(amp, x[i], scan_z1);
    v[i] = r.value;
    ok = ok && r.span_ok;
  }
  if (!ok) detail::warn_span("marginal_z1");
  return {std::move(x), std::move(v)};
}

}  // namespace ghostdiff
