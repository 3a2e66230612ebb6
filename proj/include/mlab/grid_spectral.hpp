#pragma once

// Periodic grids, sampled fields and their discrete Fourier spectra.
//
// Conventions (fixed for the whole library):
//   x_p        = period * p / n,                      p in {0..n-1}^d, row-major
//   coeffs(xi) = n^{-d} sum_p f(x_p) exp(-i k xi.x_p),  k = 2 pi / period
//   f(x_p)     = sum_xi coeffs(xi) exp(+i k xi.x_p)
// Frequencies xi have integer components in [-n/2, n/2). Coefficients are
// stored in FFT order along every axis (slot q holds xi = q or q - n).
//
// With this normalization the multiplier with symbol 1 is the pointwise
// product, which is the anchor every other operator in the library is
// checked against.

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlab {

struct GridSpec {
  int d = 1;
  int n = 8;
  double period = 2.0 * std::numbers::pi;

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }
  /// Physical units per lattice frequency.
  double wavenumber() const { return 2.0 * std::numbers::pi / period; }
  /// Lattice spacing of the sample points.
  double spacing() const { return period / n; }
  /// Quadrature weight of one sample, (period/n)^d.
  double cell_volume() const { return std::pow(spacing(), d); }

  void validate() const {
    if (d < 1) throw std::invalid_argument("GridSpec: d must be >= 1");
    if (n < 4 || !std::has_single_bit(static_cast<unsigned>(n)))
      throw std::invalid_argument("GridSpec: n must be a power of two >= 4, got " +
                                  std::to_string(n));
    if (!(period > 0.0)) throw std::invalid_argument("GridSpec: period must be positive");
  }

  GridSpec with_n(int n_new) const { return GridSpec{d, n_new, period}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline std::string to_string(const GridSpec& g) {
  return std::to_string(g.d) + "x" + std::to_string(g.n);
}

/// Signed frequency held by FFT slot q on an n-point axis.
constexpr int frequency_of_slot(int q, int n) { return q < n / 2 ? q : q - n; }
/// FFT slot of a frequency in [-n/2, n/2).
constexpr int slot_of_frequency(int xi, int n) { return xi >= 0 ? xi : xi + n; }
constexpr bool frequency_fits(int xi, int n) { return xi >= -n / 2 && xi < n / 2; }

/// Smallest power of two >= factor * n.
inline int padded_size(int n, int factor) {
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(n * std::max(factor, 1))));
}

/// Row-major multi-index <-> linear index helpers.
inline void unravel(std::size_t linear, const GridSpec& g, std::span<int> out) {
  for (int a = g.d - 1; a >= 0; --a) {
    out[a] = static_cast<int>(linear % static_cast<std::size_t>(g.n));
    linear /= static_cast<std::size_t>(g.n);
  }
}

inline std::size_t ravel(std::span<const int> idx, const GridSpec& g) {
  std::size_t linear = 0;
  for (int a = 0; a < g.d; ++a) linear = linear * static_cast<std::size_t>(g.n) + idx[a];
  return linear;
}

/// Frequency vector of linear spectrum slot `linear`.
inline void frequency_at(std::size_t linear, const GridSpec& g, std::span<int> xi) {
  unravel(linear, g, xi);
  for (int a = 0; a < g.d; ++a) xi[a] = frequency_of_slot(xi[a], g.n);
}

/// Linear spectrum slot of frequency `xi`; caller guarantees it fits.
inline std::size_t slot_at(std::span<const int> xi, const GridSpec& g) {
  std::size_t linear = 0;
  for (int a = 0; a < g.d; ++a)
    linear = linear * static_cast<std::size_t>(g.n) + slot_of_frequency(xi[a], g.n);
  return linear;
}

inline bool fits(std::span<const int> xi, const GridSpec& g) {
  for (int a = 0; a < g.d; ++a)
    if (!frequency_fits(xi[a], g.n)) return false;
  return true;
}

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
struct BasicField {
  GridSpec grid;
  ComplexVector<Real> samples;
  bool real = false;

  BasicField() = default;
  BasicField(GridSpec g, ComplexVector<Real> s, bool is_real = false)
      : grid(g), samples(std::move(s)), real(is_real) {
    grid.validate();
    if (static_cast<std::size_t>(samples.size()) != grid.size())
      throw std::invalid_argument("Field: sample count does not match grid");
    if (real) check_real();
  }

  static BasicField zeros(GridSpec g) {
    g.validate();
    return BasicField(g, ComplexVector<Real>::Zero(static_cast<Eigen::Index>(g.size())));
  }

  /// Samples a callable f(x) with x a d-vector of coordinates.
  template <typename F>
  static BasicField sample(GridSpec g, F&& f) {
    g.validate();
    ComplexVector<Real> s(static_cast<Eigen::Index>(g.size()));
    std::vector<int> p(static_cast<std::size_t>(g.d));
    Eigen::Matrix<Real, Eigen::Dynamic, 1> x(g.d);
    for (std::size_t i = 0; i < g.size(); ++i) {
      unravel(i, g, p);
      for (int a = 0; a < g.d; ++a) x[a] = static_cast<Real>(g.spacing() * p[a]);
      s[static_cast<Eigen::Index>(i)] = std::complex<Real>(f(x));
    }
    return BasicField(g, std::move(s));
  }

  Real max_abs() const { return samples.size() ? samples.cwiseAbs().maxCoeff() : Real(0); }

  /// Largest |Im| relative to max |sample|.
  Real imag_ratio() const {
    const Real m = max_abs();
    return m > 0 ? samples.imag().cwiseAbs().maxCoeff() / m : Real(0);
  }

  void check_real(Real tol = Real(1e-12)) const {
    if (imag_ratio() > tol)
      throw std::invalid_argument("Field flagged real has significant imaginary part");
  }

  BasicField& operator+=(const BasicField& o) {
    require_same_grid(o);
    samples += o.samples;
    real = real && o.real;
    return *this;
  }
  BasicField& operator-=(const BasicField& o) {
    require_same_grid(o);
    samples -= o.samples;
    real = real && o.real;
    return *this;
  }
  BasicField& operator*=(std::complex<Real> c) {
    samples *= c;
    real = real && c.imag() == Real(0);
    return *this;
  }
  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(std::complex<Real> c, BasicField a) { return a *= c; }

  void require_same_grid(const BasicField& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("grid mismatch");
  }
};

template <typename Real>
struct BasicSpectrum {
  GridSpec grid;
  ComplexVector<Real> coeffs;

  static BasicSpectrum zeros(GridSpec g) {
    g.validate();
    return {g, ComplexVector<Real>::Zero(static_cast<Eigen::Index>(g.size()))};
  }

  std::complex<Real>& at(std::span<const int> xi) {
    return coeffs[static_cast<Eigen::Index>(slot_at(xi, grid))];
  }
  std::complex<Real> at(std::span<const int> xi) const {
    return coeffs[static_cast<Eigen::Index>(slot_at(xi, grid))];
  }
  /// Coefficient at xi, zero when xi lies outside the band.
  std::complex<Real> value_or_zero(std::span<const int> xi) const {
    return fits(xi, grid) ? at(xi) : std::complex<Real>(0);
  }
};

using Field = BasicField<double>;
using Spectrum = BasicSpectrum<double>;
using cd = std::complex<double>;

namespace detail {

// In-place unnormalized transform along every axis; sign < 0 is forward.
template <typename Real>
void transform_axes(const GridSpec& g, ComplexVector<Real>& data, int sign) {
  Eigen::FFT<Real> fft;
  fft.SetFlag(Eigen::FFT<Real>::Unscaled);
  const std::size_t n = static_cast<std::size_t>(g.n);
  const std::size_t total = g.size();
  std::vector<std::complex<Real>> line(n), out(n);
  std::size_t stride = total;
  for (int a = 0; a < g.d; ++a) {
    stride /= n;
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (std::size_t q = 0; q < n; ++q)
          line[q] = data[static_cast<Eigen::Index>(start + q * stride)];
        if (sign < 0)
          fft.fwd(out, line);
        else
          fft.inv(out, line);
        for (std::size_t q = 0; q < n; ++q)
          data[static_cast<Eigen::Index>(start + q * stride)] = out[q];
      }
    }
  }
}

}  // namespace detail

template <typename Real>
BasicSpectrum<Real> dft_forward(const BasicField<Real>& f) {
  BasicSpectrum<Real> s{f.grid, f.samples};
  detail::transform_axes(f.grid, s.coeffs, -1);
  s.coeffs /= static_cast<Real>(f.grid.size());
  return s;
}

template <typename Real>
BasicField<Real> dft_inverse(const BasicSpectrum<Real>& s) {
  BasicField<Real> f;
  f.grid = s.grid;
  f.samples = s.coeffs;
  detail::transform_axes(s.grid, f.samples, +1);
  return f;
}

/// Re-expresses a spectrum on a grid with n_new points per axis. Frequencies
/// outside the new band are dropped; the old Nyquist stays at -n/2.
template <typename Real>
BasicSpectrum<Real> resample(const BasicSpectrum<Real>& s, int n_new) {
  const GridSpec g_new = s.grid.with_n(n_new);
  if (n_new == s.grid.n) return s;
  auto out = BasicSpectrum<Real>::zeros(g_new);
  std::vector<int> xi(static_cast<std::size_t>(s.grid.d));
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    frequency_at(i, s.grid, xi);
    if (fits(xi, g_new)) out.at(xi) = s.coeffs[static_cast<Eigen::Index>(i)];
  }
  return out;
}

template <typename Real>
BasicField<Real> resample(const BasicField<Real>& f, int n_new) {
  if (n_new == f.grid.n) return f;
  auto out = dft_inverse(resample(dft_forward(f), n_new));
  out.real = f.real;
  return out;
}

/// Multiplies coefficients by i k xi_axis; Nyquist slots along `axis` become 0.
template <typename Real>
BasicSpectrum<Real> spectral_derivative(BasicSpectrum<Real> s, int axis) {
  const GridSpec& g = s.grid;
  if (axis < 0 || axis >= g.d) throw std::invalid_argument("spectral_derivative: bad axis");
  std::vector<int> xi(static_cast<std::size_t>(g.d));
  const Real k = static_cast<Real>(g.wavenumber());
  for (std::size_t i = 0; i < g.size(); ++i) {
    frequency_at(i, g, xi);
    const int c = xi[static_cast<std::size_t>(axis)];
    auto& v = s.coeffs[static_cast<Eigen::Index>(i)];
    v = (c == -g.n / 2) ? std::complex<Real>(0)
                        : v * std::complex<Real>(0, k * static_cast<Real>(c));
  }
  return s;
}

template <typename Real>
BasicField<Real> spectral_derivative(const BasicField<Real>& f, int axis) {
  auto out = dft_inverse(spectral_derivative(dft_forward(f), axis));
  out.real = f.real;
  return out;
}

/// Pointwise product of band-limited fields evaluated on the grid with
/// n_out points per axis (inputs are spectrally interpolated there first).
template <typename Real>
BasicField<Real> product_on_grid(std::span<const BasicField<Real>> fs, int n_out) {
  if (fs.empty()) throw std::invalid_argument("product: no factors");
  for (const auto& f : fs) fs[0].require_same_grid(f);
  auto out = resample(fs[0], n_out);
  for (std::size_t j = 1; j < fs.size(); ++j) out.samples.array() *= resample(fs[j], n_out).samples.array();
  bool all_real = true;
  for (const auto& f : fs) all_real = all_real && f.real;
  out.real = all_real;
  return out;
}

/// Product computed on a grid enlarged by pad_factor (rounded up to a power of
/// two), then truncated back to the original band.
template <typename Real>
BasicField<Real> dealiased_product(std::span<const BasicField<Real>> fs, int pad_factor) {
  if (fs.empty()) throw std::invalid_argument("dealiased_product: no factors");
  if (pad_factor < static_cast<int>(fs.size()))
    throw std::invalid_argument("dealiased_product: pad_factor smaller than number of factors");
  const int n = fs[0].grid.n;
  return resample(product_on_grid(fs, padded_size(n, pad_factor)), n);
}

/// Quadrature pairing (period/n)^d sum_p f(x_p) g(x_p), no conjugation.
template <typename Real>
std::complex<Real> pair(const BasicField<Real>& f, const BasicField<Real>& g) {
  f.require_same_grid(g);
  return static_cast<Real>(f.grid.cell_volume()) * (f.samples.array() * g.samples.array()).sum();
}

/// What dilate_dyadic does when 2^t xi leaves the band.
enum class DilationGrid {
  Fit,    ///< smallest power-of-two grid >= n holding every remapped mode
  Scale,  ///< always n * 2^t: samples repeat exactly, every L^p quadrature is preserved
  Fixed,  ///< keep n, throw on overflow
};

/// Coefficients with |c| <= rel_tol * max|c| count as inactive.
template <typename Real>
int max_active_frequency(const BasicSpectrum<Real>& s, Real rel_tol = Real(1e-13)) {
  const Real cmax = s.coeffs.size() ? s.coeffs.cwiseAbs().maxCoeff() : Real(0);
  int kmax = 0;
  std::vector<int> xi(static_cast<std::size_t>(s.grid.d));
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (std::abs(s.coeffs[static_cast<Eigen::Index>(i)]) <= rel_tol * cmax) continue;
    frequency_at(i, s.grid, xi);
    for (int c : xi) kmax = std::max(kmax, std::abs(c));
  }
  return kmax;
}

/// f(2^t x) via coeffs'(2^t xi) = coeffs(xi).
template <typename Real>
BasicField<Real> dilate_dyadic(const BasicField<Real>& f, int t,
                               DilationGrid policy = DilationGrid::Fit) {
  if (t < 0) throw std::invalid_argument("dilate_dyadic: t must be >= 0");
  if (t == 0) return f;
  const auto s = dft_forward(f);
  const GridSpec& g = s.grid;
  const Real cmax = s.coeffs.size() ? s.coeffs.cwiseAbs().maxCoeff() : Real(0);
  const Real tol = Real(1e-13) * cmax;
  const long scale = 1L << t;

  // Remapped frequency range [lo, hi] over active modes.
  long lo = 0, hi = 0;
  std::vector<int> xi(static_cast<std::size_t>(g.d));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(s.coeffs[static_cast<Eigen::Index>(i)]) <= tol) continue;
    frequency_at(i, g, xi);
    for (int c : xi) {
      lo = std::min(lo, scale * c);
      hi = std::max(hi, scale * c);
    }
  }
  auto holds = [&](long n) { return lo >= -n / 2 && hi < n / 2; };

  long n_out = g.n;
  switch (policy) {
    case DilationGrid::Fixed:
      if (!holds(n_out))
        throw std::range_error("dilate_dyadic: dilated frequencies overflow the grid");
      break;
    case DilationGrid::Scale:
      n_out = static_cast<long>(g.n) * scale;
      break;
    case DilationGrid::Fit:
      while (!holds(n_out)) n_out *= 2;
      break;
  }
  const GridSpec g_out = g.with_n(static_cast<int>(n_out));
  auto out = BasicSpectrum<Real>::zeros(g_out);
  std::vector<int> eta(static_cast<std::size_t>(g.d));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = s.coeffs[static_cast<Eigen::Index>(i)];
    if (std::abs(c) <= tol) continue;
    frequency_at(i, g, xi);
    for (int a = 0; a < g.d; ++a) eta[a] = static_cast<int>(scale * xi[a]);
    out.at(eta) = c;
  }
  auto field = dft_inverse(out);
  field.real = f.real;
  return field;
}

}  // namespace mlab
