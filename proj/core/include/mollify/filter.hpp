#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mollify/params.hpp"

namespace mollify {

enum class FilterKind { Gaussian, IdealLowPass, ExpDecay };

FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

/// Non-causal smoothing filter.  Only the field matching `kind` is used:
/// epsilon (time units) for Gaussian, cutoff (angular frequency) for
/// IdealLowPass, decay (time units) for ExpDecay with gain exp(-decay |nu|).
struct FilterSpec {
  FilterKind kind = FilterKind::Gaussian;
  double epsilon = 0.05;
  double cutoff = 20.0;
  double decay = 0.05;
  /// Time-domain truncation: multiples of epsilon (Gaussian), of the
  /// carrier period 2 pi / cutoff (IdealLowPass), of decay (ExpDecay).
  double truncation_radius = 8.0;

  static FilterSpec gaussian(double epsilon, double truncation_radius = 8.0) {
    return {FilterKind::Gaussian, epsilon, 20.0, 0.05, truncation_radius};
  }
  static FilterSpec ideal_low_pass(double cutoff) {
    return {FilterKind::IdealLowPass, 0.05, cutoff, 0.05, 8.0};
  }
  static FilterSpec exp_decay(double decay) {
    return {FilterKind::ExpDecay, 0.05, 20.0, decay, 8.0};
  }

  /// One-parameter family used by sweeps: Gaussian epsilon = width,
  /// ExpDecay decay = width, IdealLowPass cutoff = 1 / width.
  static FilterSpec with_width(FilterKind kind, double width);

  void validate() const;
};

/// Discretized, truncated, unit-mass symmetric kernel; weights[W + j] is the
/// weight of lag j (in steps), j in [-W, W].
struct Kernel {
  double h = 0.0;
  std::size_t half_width = 0;
  std::vector<double> weights;

  std::size_t taps() const { return weights.size(); }
  double at(std::ptrdiff_t lag) const {
    return weights[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(half_width) + lag)];
  }
};

/// Kernels with at most this many taps convolve directly, larger ones by FFT.
inline constexpr std::size_t kDirectConvolutionMaxTaps = 257;

/// Gaussian: kappa_eps(t) = phi(t / eps) / eps sampled at t = j h for
/// |j h| <= truncation_radius * eps, then renormalized.  Rejects eps < 2h.
Kernel build_kernel(const FilterSpec& f, double h);

/// Continuous-time gain: Gaussian exp(-eps^2 nu^2 / 2); IdealLowPass
/// 1{|nu| <= cutoff}; ExpDecay exp(-decay |nu|).
std::complex<double> kernel_frequency_response(const FilterSpec& f, double nu);

/// y[i] = sum_j w_j x[i - j], x taken to be zero outside its range; output
/// has the input's length.
std::vector<double> convolve_direct(std::span<const double> x, const Kernel& k);
std::vector<double> convolve_fft(std::span<const double> x, const Kernel& k);
std::vector<double> convolve(std::span<const double> x, const Kernel& k);

/// Filters a signal sampled with step h (zero outside its range).  Gaussian
/// uses the time-domain kernel; IdealLowPass and ExpDecay multiply the
/// spectrum on a grid zero-padded to at least twice the input length.
std::vector<double> mollify_signal(std::span<const double> x, const FilterSpec& f, double h);

/// Mollifies an extended path (see extend_boundary) and returns the filtered
/// a, sigma (and y) on [-delta, T].  The output at t depends on inputs
/// after t.  For Gaussian filters the kernel support around every model node
/// must stay inside the extended domain.
ParamPath mollify_path(const ParamPath& extended, const FilterSpec& f);

/// Copies x into the middle of a zero vector of length factor * x.size().
std::vector<double> zero_pad(std::span<const double> x, std::size_t factor = 2);

/// Max over DFT bins of |Y_k - G(nu_k) X_k|, divided by max_k |X_k|, where
/// X, Y are the DFTs of input and output on a common grid of step h and G is
/// kernel_frequency_response.  Both signals must already be zero-padded so
/// the filter output lies inside the window.
double spectral_identity_check(std::span<const double> input, std::span<const double> output,
                               const FilterSpec& f, double h);

}  // namespace mollify
