#include "mollify/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mollify {

bool is_multiple_of(double length, double h, std::size_t* steps) {
  if (!(h > 0.0) || !std::isfinite(length) || length < 0.0) return false;
  const double ratio = length / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) return false;
  if (steps != nullptr) *steps = static_cast<std::size_t>(rounded);
  return true;
}

GridSpec GridSpec::make(double delta, double horizon, double delta0, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("grid step h must be positive");
  }
  auto steps_of = [h](double length, const char* name) {
    if (!(length > 0.0)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
    std::size_t n = 0;
    if (!is_multiple_of(length, h, &n) || n == 0) {
      throw std::invalid_argument(std::string(name) +
                                  " is not an integer multiple of h");
    }
    return n;
  };
  const std::size_t lookback = steps_of(delta, "delta");
  const std::size_t hor = steps_of(horizon, "T");
  const std::size_t flank = steps_of(delta0, "delta0");
  return GridSpec(h, lookback, hor, flank);
}

}  // namespace mollify
