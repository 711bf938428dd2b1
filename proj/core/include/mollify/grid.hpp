#pragma once

#include <cstddef>

namespace mollify {

/// Uniform time grid on [-delta - delta0, T + delta0].
///
/// Layout, by node index:
///   0                       t = -delta - delta0   (left flank start)
///   lookback_begin()        t = -delta            (observation window start)
///   zero_index()            t = 0                 (trading window start)
///   horizon_end()           t = T
///   node_count() - 1        t = T + delta0
///
/// All four lengths are stored as integer step counts so the special nodes
/// are hit exactly.
class GridSpec {
 public:
  /// Throws std::invalid_argument unless every length is positive and an
  /// integer multiple of h (relative tolerance 1e-9).
  static GridSpec make(double delta, double horizon, double delta0, double h);

  double h() const { return h_; }
  double delta() const { return h_ * static_cast<double>(n_lookback_); }
  double horizon() const { return h_ * static_cast<double>(n_horizon_); }
  double delta0() const { return h_ * static_cast<double>(n_flank_); }
  double t_min() const { return time(0); }
  double t_max() const { return time(node_count() - 1); }

  std::size_t lookback_steps() const { return n_lookback_; }
  std::size_t horizon_steps() const { return n_horizon_; }
  std::size_t flank_steps() const { return n_flank_; }

  std::size_t node_count() const { return 2 * n_flank_ + n_lookback_ + n_horizon_ + 1; }
  std::size_t lookback_begin() const { return n_flank_; }
  std::size_t zero_index() const { return n_flank_ + n_lookback_; }
  std::size_t horizon_end() const { return zero_index() + n_horizon_; }

  /// Nodes of the model interval [-delta, T].
  std::size_t model_count() const { return n_lookback_ + n_horizon_ + 1; }

  double time(std::size_t node) const {
    return h_ * (static_cast<double>(node) - static_cast<double>(zero_index()));
  }

  bool operator==(const GridSpec&) const = default;

 private:
  GridSpec(double h, std::size_t lookback, std::size_t horizon, std::size_t flank)
      : h_(h), n_lookback_(lookback), n_horizon_(horizon), n_flank_(flank) {}

  double h_;
  std::size_t n_lookback_;
  std::size_t n_horizon_;
  std::size_t n_flank_;
};

/// True when `length / h` is a non-negative integer within relative
/// tolerance 1e-9; the rounded count is written to `steps` if given.
bool is_multiple_of(double length, double h, std::size_t* steps = nullptr);

}  // namespace mollify
