#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mollify::detail {

/// Real-to-complex FFT of fixed length backed by FFTW.  Planning is
/// serialized internally; execution on distinct objects is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  /// Per-thread instance for length n; plans are built once per thread.
  static RealFft& cached(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  /// out[k] = sum_j in[j] exp(-2 pi i j k / n), k <= n/2.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Normalized inverse: forward followed by inverse is the identity.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

std::size_t next_pow2(std::size_t n);

}  // namespace mollify::detail
