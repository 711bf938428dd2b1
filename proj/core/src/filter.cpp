#include "mollify/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace mollify {

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "gaussian") return FilterKind::Gaussian;
  if (name == "ideal-lowpass") return FilterKind::IdealLowPass;
  if (name == "exp-decay") return FilterKind::ExpDecay;
  throw std::invalid_argument("unknown filter kind '" + std::string(name) + "'");
}

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Gaussian: return "gaussian";
    case FilterKind::IdealLowPass: return "ideal-lowpass";
    case FilterKind::ExpDecay: return "exp-decay";
  }
  return "?";
}

FilterSpec FilterSpec::with_width(FilterKind kind, double width) {
  switch (kind) {
    case FilterKind::Gaussian: return gaussian(width);
    case FilterKind::IdealLowPass: return ideal_low_pass(1.0 / width);
    case FilterKind::ExpDecay: return exp_decay(width);
  }
  return gaussian(width);
}

void FilterSpec::validate() const {
  if (!(truncation_radius > 0.0)) throw std::invalid_argument("filter.truncation_radius must be positive");
  switch (kind) {
    case FilterKind::Gaussian:
      if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("filter.epsilon must be positive");
      break;
    case FilterKind::IdealLowPass:
      if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("filter.cutoff must be positive");
      break;
    case FilterKind::ExpDecay:
      if (!(decay > 0.0) || !std::isfinite(decay)) throw std::invalid_argument("filter.decay must be positive");
      break;
  }
}

Kernel build_kernel(const FilterSpec& f, double h) {
  f.validate();
  if (!(h > 0.0)) throw std::invalid_argument("build_kernel: h must be positive");

  double reach = 0.0;
  switch (f.kind) {
    case FilterKind::Gaussian:
      if (f.epsilon < 2.0 * h * (1.0 - 1e-12)) {
        throw std::invalid_argument("build_kernel: epsilon below the resolvability floor 2h");
      }
      reach = f.truncation_radius * f.epsilon;
      break;
    case FilterKind::IdealLowPass:
      reach = f.truncation_radius * 2.0 * std::numbers::pi / f.cutoff;
      break;
    case FilterKind::ExpDecay:
      reach = f.truncation_radius * f.decay;
      break;
  }
  const auto half = static_cast<std::size_t>(std::floor(reach / h + 1e-9));
  Kernel k{h, half, std::vector<double>(2 * half + 1)};

  for (std::size_t i = 0; i < k.weights.size(); ++i) {
    const double t = h * (static_cast<double>(i) - static_cast<double>(half));
    double w = 0.0;
    switch (f.kind) {
      case FilterKind::Gaussian: {
        const double u = t / f.epsilon;
        w = std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * f.epsilon);
        break;
      }
      case FilterKind::IdealLowPass:
        w = t == 0.0 ? f.cutoff / std::numbers::pi : std::sin(f.cutoff * t) / (std::numbers::pi * t);
        break;
      case FilterKind::ExpDecay:
        // Poisson kernel, the inverse transform of exp(-decay |nu|).
        w = f.decay / (std::numbers::pi * (f.decay * f.decay + t * t));
        break;
    }
    k.weights[i] = w * h;
  }
  // Symmetrize the pair sums before normalizing so weight[-j] == weight[j]
  // holds bit for bit.
  double mass = k.weights[half];
  for (std::size_t j = 1; j <= half; ++j) {
    const double w = 0.5 * (k.weights[half + j] + k.weights[half - j]);
    k.weights[half + j] = k.weights[half - j] = w;
    mass += 2.0 * w;
  }
  for (double& w : k.weights) w /= mass;
  return k;
}

std::complex<double> kernel_frequency_response(const FilterSpec& f, double nu) {
  switch (f.kind) {
    case FilterKind::Gaussian:
      return std::exp(-0.5 * f.epsilon * f.epsilon * nu * nu);
    case FilterKind::IdealLowPass:
      return std::abs(nu) <= f.cutoff ? 1.0 : 0.0;
    case FilterKind::ExpDecay:
      return std::exp(-f.decay * std::abs(nu));
  }
  return 0.0;
}

std::vector<double> convolve_direct(std::span<const double> x, const Kernel& k) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto half = static_cast<std::ptrdiff_t>(k.half_width);
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-half, i - (n - 1));
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(half, i);
    double acc = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += k.at(j) * x[static_cast<std::size_t>(i - j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

namespace {

/// Spectrum of the kernel wrapped onto a circle of length len.  The last
/// result is kept per thread; path loops convolve with one kernel over and
/// over.
const std::vector<std::complex<double>>& kernel_spectrum(const Kernel& k, std::size_t len) {
  thread_local std::size_t cached_len = 0;
  thread_local std::vector<double> cached_weights;
  thread_local std::vector<std::complex<double>> cached;
  if (cached_len == len && cached_weights == k.weights) return cached;
  detail::RealFft& fft = detail::RealFft::cached(len);
  std::vector<double> wrapped(len, 0.0);
  for (std::size_t i = 0; i < k.taps(); ++i) {
    const auto lag = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(k.half_width);
    wrapped[static_cast<std::size_t>((lag + static_cast<std::ptrdiff_t>(len)) %
                                     static_cast<std::ptrdiff_t>(len))] = k.weights[i];
  }
  cached.assign(fft.bins(), {});
  fft.forward(wrapped, cached);
  cached_len = len;
  cached_weights = k.weights;
  return cached;
}

}  // namespace

std::vector<double> convolve_fft(std::span<const double> x, const Kernel& k) {
  const std::size_t n = x.size();
  const std::size_t len = detail::next_pow2(std::max<std::size_t>(n + 2 * k.half_width, 2));
  detail::RealFft& fft = detail::RealFft::cached(len);
  const auto& kernel_hat = kernel_spectrum(k, len);
  std::vector<std::complex<double>> x_hat(fft.bins());
  fft.forward(x, x_hat);
  for (std::size_t b = 0; b < x_hat.size(); ++b) {
    // Plain product; the kernel spectrum is finite, so no C99 Annex G care.
    const double re = x_hat[b].real() * kernel_hat[b].real() - x_hat[b].imag() * kernel_hat[b].imag();
    const double im = x_hat[b].real() * kernel_hat[b].imag() + x_hat[b].imag() * kernel_hat[b].real();
    x_hat[b] = {re, im};
  }
  std::vector<double> y(n);
  fft.inverse(x_hat, y);
  return y;
}

std::vector<double> convolve(std::span<const double> x, const Kernel& k) {
  return k.taps() <= kDirectConvolutionMaxTaps ? convolve_direct(x, k) : convolve_fft(x, k);
}

namespace {

double bin_frequency(std::size_t bin, std::size_t len, double h) {
  return 2.0 * std::numbers::pi * static_cast<double>(bin) / (static_cast<double>(len) * h);
}

std::vector<double> filter_in_frequency(std::span<const double> x, const FilterSpec& f, double h) {
  const std::size_t len = detail::next_pow2(std::max<std::size_t>(2 * x.size(), 2));
  detail::RealFft& fft = detail::RealFft::cached(len);
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.forward(x, spectrum);
  for (std::size_t b = 0; b < spectrum.size(); ++b) {
    spectrum[b] *= kernel_frequency_response(f, bin_frequency(b, len, h)).real();
  }
  std::vector<double> y(x.size());
  fft.inverse(spectrum, y);
  return y;
}

}  // namespace

std::vector<double> mollify_signal(std::span<const double> x, const FilterSpec& f, double h) {
  f.validate();
  if (f.kind == FilterKind::Gaussian) return convolve(x, build_kernel(f, h));
  return filter_in_frequency(x, f, h);
}

ParamPath mollify_path(const ParamPath& extended, const FilterSpec& f) {
  if (extended.domain != PathDomain::Extended || extended.size() != extended.grid.node_count()) {
    throw std::invalid_argument("mollify_path: input must be an extended path");
  }
  f.validate();
  const GridSpec& grid = extended.grid;
  const std::size_t lo = grid.lookback_begin();
  const std::size_t count = grid.model_count();
  ParamPath out{grid, PathDomain::Model, {}, {}, {}};

  auto slice = [&](const std::vector<double>& full) {
    return std::vector<double>(full.begin() + static_cast<std::ptrdiff_t>(lo),
                               full.begin() + static_cast<std::ptrdiff_t>(lo + count));
  };

  if (f.kind == FilterKind::Gaussian) {
    // Reused across calls with the same (epsilon, radius, h) on this thread.
    thread_local FilterSpec last_filter{};
    thread_local double last_h = 0.0;
    thread_local Kernel last_kernel{};
    if (last_h != grid.h() || last_filter.epsilon != f.epsilon ||
        last_filter.truncation_radius != f.truncation_radius || last_kernel.weights.empty()) {
      last_kernel = build_kernel(f, grid.h());
      last_filter = f;
      last_h = grid.h();
    }
    const Kernel& k = last_kernel;
    if (k.half_width > grid.flank_steps()) {
      throw std::invalid_argument(
          "mollify_path: kernel support exceeds the extended domain (need delta0 >= " +
          std::to_string(f.truncation_radius) + " * epsilon)");
    }
    auto apply = [&](const std::vector<double>& full) {
      if (k.taps() > kDirectConvolutionMaxTaps) {
        // Model nodes only see lo - half_width .. lo + count + half_width.
        const std::size_t begin = lo - k.half_width;
        const std::span<const double> window(full.data() + begin, count + 2 * k.half_width);
        const std::vector<double> y = convolve_fft(window, k);
        return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(k.half_width),
                                   y.begin() + static_cast<std::ptrdiff_t>(k.half_width + count));
      }
      // Only the model nodes are needed and the whole window is in range.
      std::vector<double> y(count);
      const auto half = static_cast<std::ptrdiff_t>(k.half_width);
      for (std::size_t i = 0; i < count; ++i) {
        const auto c = static_cast<std::ptrdiff_t>(lo + i);
        double acc = 0.0;
        for (std::ptrdiff_t j = -half; j <= half; ++j) acc += k.at(j) * full[static_cast<std::size_t>(c - j)];
        y[i] = acc;
      }
      return y;
    };
    out.a = apply(extended.a);
    out.sigma = apply(extended.sigma);
    if (!extended.y.empty()) out.y = apply(extended.y);
    return out;
  }

  const double h = grid.h();
  out.a = slice(filter_in_frequency(extended.a, f, h));
  out.sigma = slice(filter_in_frequency(extended.sigma, f, h));
  if (!extended.y.empty()) out.y = slice(filter_in_frequency(extended.y, f, h));
  return out;
}

std::vector<double> zero_pad(std::span<const double> x, std::size_t factor) {
  if (factor < 1) throw std::invalid_argument("zero_pad: factor must be >= 1");
  std::vector<double> out(x.size() * factor, 0.0);
  const std::size_t offset = (out.size() - x.size()) / 2;
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
  return out;
}

double spectral_identity_check(std::span<const double> input, std::span<const double> output,
                               const FilterSpec& f, double h) {
  if (input.size() != output.size()) {
    throw std::invalid_argument("spectral_identity_check: length mismatch");
  }
  if (!(h > 0.0)) throw std::invalid_argument("spectral_identity_check: non-uniform or empty grid");
  const std::size_t len = detail::next_pow2(std::max<std::size_t>(input.size(), 2));
  detail::RealFft fft(len);
  std::vector<std::complex<double>> x_hat(fft.bins()), y_hat(fft.bins());
  fft.forward(input, x_hat);
  fft.forward(output, y_hat);
  double worst = 0.0;
  double norm = 0.0;
  for (std::size_t b = 0; b < x_hat.size(); ++b) {
    const auto gain = kernel_frequency_response(f, bin_frequency(b, len, h));
    worst = std::max(worst, std::abs(y_hat[b] - gain * x_hat[b]));
    norm = std::max(norm, std::abs(x_hat[b]));
  }
  return norm > 0.0 ? worst / norm : worst;
}

}  // namespace mollify
