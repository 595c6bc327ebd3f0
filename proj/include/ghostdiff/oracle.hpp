#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ghostdiff/analytic.hpp"
#include "ghostdiff/core.hpp"
#include "ghostdiff/diagnostics.hpp"
#include "ghostdiff/parallel.hpp"
#include "ghostdiff/profile.hpp"

// Brute-force references that bypass the narrow-slit linearization: direct
// quadrature of the post-slit integral, and spectral propagation of the
// sampled two-coordinate wavefunction.

namespace ghostdiff {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Paraxial dispersion c k0 + c kz^2 / (2 k0).
template <typename Scalar>
Scalar dispersion(Scalar kz, const PhysicalConfig<Scalar>& c) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar k0 = Scalar(2) * pi / c.wavelength;
  if (std::abs(kz) > k0 / Scalar(10)) warn("dispersion: |kz| exceeds k0/10, paraxial expansion is poor");
  const Scalar light = Scalar(kSpeedOfLight);
  return light * k0 + light * kz * kz / (Scalar(2) * k0);
}

/// The grid violates a sampling or resolution requirement.
class SamplingError : public ValidationError {
 public:
  explicit SamplingError(const std::string& what) : ValidationError("grid", what) {}
};

/// Quadrature failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- grid --------------------------------------------------------------------

/// Uniform axis with samples at (i - n/2) * spacing, so z = 0 is a sample.
template <typename Scalar>
struct Axis {
  Eigen::Index n;
  Scalar spacing;

  Scalar position(Eigen::Index i) const { return Scalar(i - n / 2) * spacing; }
  Scalar extent() const { return Scalar(n) * spacing; }
  Eigen::Index center() const { return n / 2; }

  Vector<Scalar> positions() const {
    Vector<Scalar> x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = position(i);
    return x;
  }

  /// Spatial frequency of DFT bin k, in cycles per meter.
  Scalar frequency(Eigen::Index k) const {
    const Eigen::Index signed_k = k < (n + 1) / 2 ? k : k - n;
    return Scalar(signed_k) / extent();
  }
};

template <typename Scalar>
struct GridSpec {
  Axis<Scalar> z1;
  Axis<Scalar> z2;

  /// Square grid of n x n points whose spacing divides the slit width into
  /// an odd number of cells, so both slit edges fall on cell boundaries.
  /// The spacing is chosen nearest to 2 * half_extent / n.
  static GridSpec for_slit(Eigen::Index n, Scalar half_extent, Scalar slit_width) {
    const Scalar target = Scalar(2) * half_extent / Scalar(n);
    auto cells = static_cast<long>(std::llround(slit_width / target));
    if (cells % 2 == 0) cells += (slit_width / target > Scalar(cells)) ? 1 : -1;
    cells = std::max(cells, 1L);
    const Axis<Scalar> axis{n, slit_width / Scalar(cells)};
    return {axis, axis};
  }

  /// Twice the resolution: 2n points, the next odd cell count (2m + 1).
  GridSpec refined(Scalar slit_width) const {
    const auto cells = std::lround(slit_width / z1.spacing);
    const Axis<Scalar> axis{2 * z1.n, slit_width / Scalar(2 * cells + 1)};
    return {axis, axis};
  }
};

/// Complex two-photon amplitudes on a z1 x z2 lattice (rows z1, columns z2).
template <typename Scalar>
struct WaveGrid {
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  Axis<Scalar> z1;
  Axis<Scalar> z2;
  Matrix amplitudes;

  /// Discrete L2 norm, sqrt(sum |psi|^2 dz1 dz2).
  Scalar norm() const { return std::sqrt(amplitudes.squaredNorm() * z1.spacing * z2.spacing); }
};

template <typename Scalar>
struct DensityGrid {
  Axis<Scalar> z1;
  Axis<Scalar> z2;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> density;
};

/// Rejects an axis on which the Fresnel transfer phase exp(-i pi lambda d f^2)
/// advances by more than pi per frequency bin at the highest frequency,
/// i.e. spacing < lambda d / extent. Such grids wrap the propagated field.
template <typename Scalar>
void check_sampling(const Axis<Scalar>& axis, Scalar distance, Scalar wavelength, const char* name) {
  if (axis.n < 2 || !(axis.spacing > Scalar(0))) throw SamplingError(std::string(name) + " axis is empty");
  const Scalar required = wavelength * distance / axis.extent();
  if (axis.spacing < required) {
    std::ostringstream os;
    os << name << " spacing " << axis.spacing << " m is below lambda*d/extent = " << required
       << " m for d = " << distance << " m";
    throw SamplingError(os.str());
  }
}

namespace detail {
template <typename Scalar>
Vector<std::complex<Scalar>> transfer_function(const Axis<Scalar>& axis, Scalar distance, Scalar wavelength) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Vector<std::complex<Scalar>> h(axis.n);
  for (Eigen::Index k = 0; k < axis.n; ++k) {
    const Scalar f = axis.frequency(k);
    h[k] = std::polar(Scalar(1), -pi * wavelength * distance * f * f);
  }
  return h;
}

// The grid's sample 0 sits at -n/2 * spacing; the DFT treats it as index 0.
// That is a pure translation, and the transfer function is translation
// invariant, so no shift is needed.
template <typename Scalar>
void propagate_lines(std::complex<Scalar>* data, Eigen::Index n, Eigen::Index lines, Eigen::Index line_stride,
                     Eigen::Index elem_stride, const Vector<std::complex<Scalar>>& h, int threads) {
  using Complex = std::complex<Scalar>;
  parallel_for(lines, threads, [&](Eigen::Index begin, Eigen::Index end, int) {
    Eigen::FFT<Scalar> fft;
    std::vector<Complex> in(static_cast<std::size_t>(n)), spec(static_cast<std::size_t>(n));
    for (Eigen::Index l = begin; l < end; ++l) {
      Complex* line = data + l * line_stride;
      for (Eigen::Index i = 0; i < n; ++i) in[i] = line[i * elem_stride];
      fft.fwd(spec.data(), in.data(), n);
      for (Eigen::Index i = 0; i < n; ++i) spec[i] *= h[i];
      fft.inv(in.data(), spec.data(), n);
      for (Eigen::Index i = 0; i < n; ++i) line[i * elem_stride] = in[i];
    }
  });
}
}  // namespace detail

/// Free paraxial propagation of a single coordinate's samples by `distance`.
template <typename Scalar>
Vector<std::complex<Scalar>> propagate_line(const Vector<std::complex<Scalar>>& field, const Axis<Scalar>& axis,
                                            Scalar distance, Scalar wavelength) {
  check_sampling(axis, distance, wavelength, "line");
  if (distance == Scalar(0)) return field;
  Vector<std::complex<Scalar>> out = field;
  detail::propagate_lines(out.data(), axis.n, Eigen::Index(1), axis.n, Eigen::Index(1),
                          detail::transfer_function(axis, distance, wavelength), 1);
  return out;
}

/// Propagates both photons by `distance`: transfer factor
/// exp(-i pi lambda d f^2) on each coordinate's spectrum, global phase dropped.
template <typename Scalar>
WaveGrid<Scalar> propagate(WaveGrid<Scalar> grid, Scalar distance, const PhysicalConfig<Scalar>& c,
                           int threads = thread_budget()) {
  if (!(distance >= Scalar(0)) || !std::isfinite(distance)) throw ValidationError("distance", "must be >= 0");
  check_sampling(grid.z1, distance, c.wavelength, "z1");
  check_sampling(grid.z2, distance, c.wavelength, "z2");
  if (distance == Scalar(0)) return grid;

  const Eigen::Index rows = grid.z1.n, cols = grid.z2.n;
  auto* data = grid.amplitudes.data();  // column-major: z1 contiguous
  detail::propagate_lines(data, rows, cols, rows, Eigen::Index(1),
                          detail::transfer_function(grid.z1, distance, c.wavelength), threads);
  detail::propagate_lines(data, cols, rows, Eigen::Index(1), rows,
                          detail::transfer_function(grid.z2, distance, c.wavelength), threads);
  return grid;
}

/// Zeroes every row with |z1| > eps/2. Requires the slit to span at least
/// 8 cells along z1.
template <typename Scalar>
WaveGrid<Scalar> truncate_slit(WaveGrid<Scalar> grid, Scalar slit_width) {
  if (slit_width / grid.z1.spacing < Scalar(8)) {
    std::ostringstream os;
    os << "slit of " << slit_width << " m spans fewer than 8 cells of " << grid.z1.spacing << " m";
    throw SamplingError(os.str());
  }
  const Scalar half = slit_width / Scalar(2);
  for (Eigen::Index i = 0; i < grid.z1.n; ++i)
    if (std::abs(grid.z1.position(i)) > half) grid.amplitudes.row(i).setZero();
  return grid;
}

/// Samples the source state on `spec`.
template <typename Scalar>
WaveGrid<Scalar> sample_initial_state(const GridSpec<Scalar>& spec, const PhysicalConfig<Scalar>& c) {
  validate(c);
  WaveGrid<Scalar> g{spec.z1, spec.z2, typename WaveGrid<Scalar>::Matrix(spec.z1.n, spec.z2.n)};
  for (Eigen::Index j = 0; j < spec.z2.n; ++j)
    for (Eigen::Index i = 0; i < spec.z1.n; ++i)
      g.amplitudes(i, j) = initial_state(spec.z1.position(i), spec.z2.position(j), c);
  return g;
}

struct EndToEndOptions {
  bool apply_slit = true;
  int threads = thread_budget();
};

/// 1/e^2 half-width of photon 2's Gaussian envelope at the detector.
template <typename Scalar>
Scalar detector_envelope_halfwidth(const PhysicalConfig<Scalar>& c) {
  const auto p = derive_params(c);
  return Scalar(1) / std::sqrt((Scalar(1) / p.alpha).real());
}

/// Source state -> both legs over L2 -> slit on z1 -> both legs over L1.
template <typename Scalar>
WaveGrid<Scalar> end_to_end_field(const GridSpec<Scalar>& spec, const PhysicalConfig<Scalar>& c,
                                  EndToEndOptions options = {}) {
  validate(c);
  for (const auto& axis : {spec.z1, spec.z2}) {
    check_sampling(axis, c.l2, c.wavelength, "grid");
    check_sampling(axis, c.l1, c.wavelength, "grid");
    const Scalar pattern = detector_envelope_halfwidth(c);
    if (axis.extent() < Scalar(8) * pattern) {
      std::ostringstream os;
      os << "extent " << axis.extent() << " m is below 8x the expected pattern half-width " << pattern << " m";
      throw SamplingError(os.str());
    }
  }
  auto grid = sample_initial_state(spec, c);
  grid = propagate(std::move(grid), c.l2, c, options.threads);
  if (options.apply_slit) grid = truncate_slit(std::move(grid), c.slit_width);
  return propagate(std::move(grid), c.l1, c, options.threads);
}

template <typename Scalar>
DensityGrid<Scalar> end_to_end_density(const GridSpec<Scalar>& spec, const PhysicalConfig<Scalar>& c,
                                       EndToEndOptions options = {}) {
  const auto field = end_to_end_field(spec, c, options);
  return {field.z1, field.z2, field.amplitudes.cwiseAbs2()};
}

/// |amplitude|^2 along z2 at the z1 = 0 row.
template <typename Scalar>
DensityProfile<Scalar> center_slice(const WaveGrid<Scalar>& g) {
  return {g.z2.positions(), g.amplitudes.row(g.z1.center()).cwiseAbs2().transpose()};
}

// --- quadrature --------------------------------------------------------------

struct QuadratureSpec {
  int start_order = 16;
  double tolerance = 1e-10;  // relative change between successive orders
  int max_order = 1024;
};

template <typename Scalar>
struct GaussLegendreRule {
  std::vector<Scalar> nodes;    // on [-1, 1]
  std::vector<Scalar> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n. Cached per order.
template <typename Scalar>
const GaussLegendreRule<Scalar>& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule<Scalar>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (slot) return *slot;

  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  auto rule = std::make_unique<GaussLegendreRule<Scalar>>();
  rule->nodes.resize(static_cast<std::size_t>(n));
  rule->weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule->nodes[i] = -x;
    rule->nodes[n - 1 - i] = x;
    rule->weights[i] = w;
    rule->weights[n - 1 - i] = w;
  }
  slot = std::move(rule);
  return *slot;
}

/// Integrand of the post-slit amplitude over the slit coordinate, after the
/// exact Gaussian integral over photon 2's coordinate; nothing linearized.
template <typename Scalar>
class SlitIntegrand {
 public:
  using Complex = std::complex<Scalar>;

  explicit SlitIntegrand(const PhysicalConfig<Scalar>& c)
      : config_(c), params_(derive_params(c)), prefactor_(final_prefactor(c)) {
    const Complex sum = params_.gamma_cap + params_.gamma_low;
    ratio_ = (params_.gamma_cap - params_.gamma_low) / sum;
    inv_alpha_ = Scalar(1) / params_.alpha;
    inv_sum_ = Scalar(1) / sum;
    phase_ = std::numbers::pi_v<Scalar> / (c.wavelength * c.l1);
  }

  Complex operator()(Scalar z1, Scalar z2, Scalar slit_z) const {
    const Scalar d1 = z1 - slit_z;
    const Complex d2 = z2 - slit_z * ratio_;
    const Complex exponent =
        Complex{Scalar(0), phase_ * d1 * d1} - d2 * d2 * inv_alpha_ - Scalar(4) * slit_z * slit_z * inv_sum_;
    return std::exp(exponent);
  }

  Complex prefactor() const { return prefactor_; }
  const PhysicalConfig<Scalar>& config() const { return config_; }

 private:
  PhysicalConfig<Scalar> config_;
  DerivedParams<Scalar> params_;
  Complex prefactor_;
  Complex ratio_;
  Complex inv_alpha_;
  Complex inv_sum_;
  Scalar phase_{};
};

/// C_r times the integral of SlitIntegrand over |z1'| <= eps/2, with the
/// Gauss-Legendre order doubled until successive results change by less
/// than tolerance * sum(w |f|).
template <typename Scalar>
std::complex<Scalar> slit_integral(const SlitIntegrand<Scalar>& f, Scalar z1, Scalar z2,
                                   const QuadratureSpec& spec = {}) {
  using Complex = std::complex<Scalar>;
  if (spec.start_order < 1 || spec.max_order < spec.start_order || !(spec.tolerance > 0))
    throw ValidationError("quadrature", "need 1 <= start_order <= max_order and tolerance > 0");
  const Scalar half = f.config().slit_width / Scalar(2);

  auto apply = [&](int order, Scalar& magnitude) {
    const auto& rule = gauss_legendre<Scalar>(order);
    Complex sum{0, 0};
    magnitude = 0;
    for (int i = 0; i < order; ++i) {
      const Complex v = f(z1, z2, half * rule.nodes[i]) * rule.weights[i];
      sum += v;
      magnitude += std::abs(v);
    }
    magnitude *= half;
    return sum * half;
  };

  Scalar magnitude = 0;
  Complex previous = apply(spec.start_order, magnitude);
  for (int order = 2 * spec.start_order; order <= spec.max_order; order *= 2) {
    const Complex current = apply(order, magnitude);
    if (std::abs(current - previous) <= Scalar(spec.tolerance) * magnitude) return f.prefactor() * current;
    if (order * 2 > spec.max_order) {
      std::ostringstream os;
      os.precision(17);
      os << "slit_integral did not converge at order " << order << " (z1=" << z1 << ", z2=" << z2
         << "): last iterates " << f.prefactor() * previous << " and " << f.prefactor() * current;
      throw ConvergenceError(os.str());
    }
    previous = current;
  }
  std::ostringstream os;
  os << "slit_integral: max_order " << spec.max_order << " leaves no room to refine start_order "
     << spec.start_order;
  throw ConvergenceError(os.str());
}

template <typename Scalar>
std::complex<Scalar> slit_integral(Scalar z1, Scalar z2, const PhysicalConfig<Scalar>& c,
                                   const QuadratureSpec& spec = {}) {
  return slit_integral(SlitIntegrand<Scalar>(c), z1, z2, spec);
}

}  // namespace ghostdiff
