#include "mollify/forecast.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mollify {

namespace {

double to_reference(double t, double begin, double end) {
  return 2.0 * (t - begin) / (end - begin) - 1.0;
}

double trapezoid_norm_q(std::span<const double> x, double q, double h) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
    acc += w * std::pow(std::abs(x[i]), q);
  }
  return std::pow(acc * h, 1.0 / q);
}

}  // namespace

double Extrapolator::evaluate(double t) const {
  const double x = to_reference(t, window_begin, window_end);
  // Clenshaw recurrence for sum_k c_k T_k(x).
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree; k >= 1; --k) {
    const double b0 = coefficients[static_cast<std::size_t>(k)] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coefficients[0] + x * b1 - b2;
}

Extrapolator fit(std::span<const double> times, std::span<const double> values, int degree,
                 double lambda) {
  if (degree < 0) throw std::invalid_argument("fit: degree must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("fit: lambda must be >= 0");
  if (times.size() != values.size()) throw std::invalid_argument("fit: length mismatch");
  const auto cols = static_cast<Eigen::Index>(degree) + 1;
  const auto rows = static_cast<Eigen::Index>(times.size());
  if (rows < cols) throw std::invalid_argument("fit: need at least degree + 1 samples");

  Extrapolator e;
  e.degree = degree;
  e.lambda = lambda;
  e.window_begin = *std::min_element(times.begin(), times.end());
  e.window_end = *std::max_element(times.begin(), times.end());
  if (!(e.window_end > e.window_begin)) {
    if (degree == 0 || lambda > 0.0) {
      e.window_end = e.window_begin + 1.0;
    } else {
      throw std::invalid_argument("fit: rank-deficient design (repeated nodes)");
    }
  }

  const double row_scale = 1.0 / std::sqrt(static_cast<double>(rows));
  Eigen::MatrixXd design(rows + (lambda > 0.0 ? cols : 0), cols);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(design.rows());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = to_reference(times[static_cast<std::size_t>(i)], e.window_begin, e.window_end);
    double prev = 1.0, cur = x;
    design(i, 0) = row_scale;
    if (cols > 1) design(i, 1) = row_scale * x;
    for (Eigen::Index k = 2; k < cols; ++k) {
      const double next = 2.0 * x * cur - prev;
      prev = cur;
      cur = next;
      design(i, k) = row_scale * cur;
    }
    rhs(i) = row_scale * values[static_cast<std::size_t>(i)];
  }
  if (lambda > 0.0) {
    design.bottomRows(cols) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(cols, cols);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) throw std::invalid_argument("fit: rank-deficient design (repeated nodes)");
  const Eigen::VectorXd c = qr.solve(rhs);
  e.coefficients.assign(c.data(), c.data() + c.size());

  double sq = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double r = e.evaluate(times[i]) - values[i];
    sq += r * r;
  }
  e.residual_rms = std::sqrt(sq / static_cast<double>(times.size()));
  return e;
}

Extrapolator fit_observation_window(const ParamPath& path, int degree, double lambda,
                                    bool use_sigma) {
  const auto values = use_sigma ? path.model_sigma() : path.model_a();
  const GridSpec& g = path.grid;
  const std::size_t count = g.lookback_steps() + 1;  // nodes of [-delta, 0]
  if (values.size() < count) throw std::invalid_argument("fit_observation_window: short path");
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = g.time(g.lookback_begin() + k);
  return fit(times, values.first(count), degree, lambda);
}

std::vector<double> predict(const Extrapolator& e, std::span<const double> times) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = e.evaluate(times[i]);
  return out;
}

std::vector<double> predict_horizon(const Extrapolator& e, const GridSpec& grid) {
  std::vector<double> times(grid.horizon_steps() + 1);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = grid.time(grid.zero_index() + k);
  return predict(e, times);
}

double prediction_error(std::span<const double> predicted, std::span<const double> truth,
                        double q, double h) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction_error: length mismatch");
  if (!(q >= 1.0)) throw std::invalid_argument("prediction_error: q must be >= 1");
  std::vector<double> diff(truth.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = predicted[i] - truth[i];
  const double norm = trapezoid_norm_q(truth, q, h);
  if (!(norm > 0.0)) throw std::invalid_argument("prediction_error: truth has zero norm");
  return trapezoid_norm_q(diff, q, h) / norm;
}

}  // namespace mollify
