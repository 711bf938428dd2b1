#pragma once

#include <span>
#include <vector>

#include "mollify/grid.hpp"
#include "mollify/params.hpp"

namespace mollify {

/// Ridge-regularized Chebyshev least-squares fit of a sampled coefficient
/// on its fit window, evaluated (and extrapolated) by Clenshaw recurrence.
///
/// The fitted coefficients c minimize
///   (1/N) sum_i (sum_k c_k T_k(x_i) - v_i)^2 + lambda |c|^2,
/// with x the fit window mapped affinely onto [-1, 1].
struct Extrapolator {
  int degree = 0;
  double lambda = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  std::vector<double> coefficients;
  /// Root-mean-square in-window residual.
  double residual_rms = 0.0;

  double evaluate(double t) const;
};

/// Throws for degree < 0, lambda < 0, fewer than degree + 1 samples, a
/// degenerate window, or a rank-deficient design when lambda == 0.
Extrapolator fit(std::span<const double> times, std::span<const double> values, int degree,
                 double lambda);

/// Fits the sigma (or a) component of a model-domain path on [-delta, 0].
Extrapolator fit_observation_window(const ParamPath& path, int degree, double lambda,
                                    bool use_sigma = true);

std::vector<double> predict(const Extrapolator& e, std::span<const double> times);

/// Prediction at the grid nodes of [0, T].
std::vector<double> predict_horizon(const Extrapolator& e, const GridSpec& grid);

/// Trapezoidal L^q norm of (predicted - truth) over a grid of step h,
/// divided by the same norm of truth.  Throws if truth has zero norm.
double prediction_error(std::span<const double> predicted, std::span<const double> truth,
                        double q, double h);

}  // namespace mollify
