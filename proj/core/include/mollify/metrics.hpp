#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mollify/filter.hpp"
#include "mollify/params.hpp"
#include "mollify/sde.hpp"

namespace mollify {

/// Running sum / sum of squares; mean and standard error of the mean.
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    sum_ += x;
    sum_sq_ += x * x;
  }
  std::size_t count() const { return n_; }
  double mean() const;
  /// Sample standard deviation / sqrt(n); 0 for fewer than two samples.
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct ClosenessReport {
  double q = 2.0;
  double epsilon = 0.0;
  std::size_t n_paths = 0;
  Estimate coeff_term;    // E int_{-delta}^T |mu_eps - mu|^q dt
  Estimate sup_term;      // E sup |S_eps - S|^q
  Estimate log_sup_term;  // E sup |log S_eps - log S|^q
};

/// Trapezoidal integral over [-delta, T] of |mu_eps - mu|^q (Euclidean norm
/// of the (a, sigma) difference).  Throws for q < 1.
double coeff_distance(const ParamPath& mu, const ParamPath& mu_eps, double q);

/// Same integrand restricted to [t_begin, t_end] (rounded inward to nodes).
double coeff_distance(const ParamPath& mu, const ParamPath& mu_eps, double q, double t_begin,
                      double t_end);

/// (max over nodes |S_eps - S|)^q.
double sup_distance(const PricePath& S, const PricePath& S_eps, double q);

/// (max over nodes |R_eps - R|)^q.
double log_sup_distance(const PricePath& S, const PricePath& S_eps, double q);

/// Per-path draw shared by the closeness and hedging studies: the original
/// coefficients and price, the mollified coefficients and price, both on
/// common Brownian increments.
struct PairedSample {
  ParamPath mu;
  ParamPath mu_eps;
  PricePath price;
  PricePath price_eps;
  BrownianIncrements bw;
};

/// For ClosedLoop specs the driver y is mollified and both worlds are
/// integrated through the closed-loop map; mu / mu_eps are then the realized
/// coefficient paths.
PairedSample paired_sample(const ModelSpec& spec, const GridSpec& grid, const FilterSpec& f,
                           std::uint64_t seed, std::uint64_t path_index);

/// One report per entry of eps_list (strictly decreasing, each >= 2h).  The
/// coefficient and Brownian streams of path i are identical across entries.
std::vector<ClosenessReport> convergence_study(const ModelSpec& spec, const GridSpec& grid,
                                               FilterKind kind, std::span<const double> eps_list,
                                               double q, std::size_t n_paths, std::uint64_t seed);

}  // namespace mollify
