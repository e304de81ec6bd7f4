#include "cheapsvrg/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cheapsvrg {

Dataset::Dataset(Matrix x, Vector y) : features(std::move(x)), targets(std::move(y)) {
  if (features.rows() != targets.size()) {
    throw std::invalid_argument("Dataset: " + std::to_string(features.rows()) +
                                " feature rows but " + std::to_string(targets.size()) +
                                " targets");
  }
}

Objective Objective::logistic(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("Objective: lambda must be >= 0");
  return {ObjectiveType::LogisticL2, lambda};
}

namespace {

void check_index(const Dataset& data, std::size_t i) {
  if (i >= data.samples()) {
    throw std::invalid_argument("component index " + std::to_string(i) + " out of range [0, " +
                                std::to_string(data.samples()) + ")");
  }
}

void check_dimension(const Dataset& data, const Vector& w) {
  if (static_cast<std::size_t>(w.size()) != data.dimension()) {
    throw std::invalid_argument("iterate has dimension " + std::to_string(w.size()) +
                                ", dataset has " + std::to_string(data.dimension()));
  }
}

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// sigma(-t) = 1 / (1 + exp(t)).
double logistic_neg(double t) {
  if (t >= 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

// Scalar c such that grad f_i(w) = c * x_i (+ 2 lambda w for logistic).
double gradient_scale(const Objective& obj, const Dataset& data, std::size_t i, const Vector& w) {
  const double yi = data.targets(static_cast<Eigen::Index>(i));
  const double m = data.margin(i, w);
  if (obj.type == ObjectiveType::LeastSquares) {
    return -static_cast<double>(data.samples()) * (yi - m);
  }
  return -yi * logistic_neg(yi * m);
}

}  // namespace

void validate(const Objective& obj, const Dataset& data) {
  if (data.samples() == 0 || data.dimension() == 0) {
    throw std::invalid_argument("dataset is empty");
  }
  if (obj.type == ObjectiveType::LogisticL2) {
    if (!(obj.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    for (Eigen::Index i = 0; i < data.targets.size(); ++i) {
      const double y = data.targets(i);
      if (y != 1.0 && y != -1.0) {
        throw std::invalid_argument("logistic target at row " + std::to_string(i) +
                                    " is not -1 or +1");
      }
    }
  }
}

double component_value(const Objective& obj, const Dataset& data, std::size_t i, const Vector& w) {
  check_index(data, i);
  check_dimension(data, w);
  const double yi = data.targets(static_cast<Eigen::Index>(i));
  const double m = data.margin(i, w);
  if (obj.type == ObjectiveType::LeastSquares) {
    const double r = yi - m;
    return 0.5 * static_cast<double>(data.samples()) * r * r;
  }
  return softplus_neg(yi * m) + obj.lambda * w.squaredNorm();
}

Vector component_gradient(const Objective& obj, const Dataset& data, std::size_t i, const Vector& w) {
  check_index(data, i);
  check_dimension(data, w);
  Vector g = gradient_scale(obj, data, i, w) * data.features.row(i).transpose();
  if (obj.type == ObjectiveType::LogisticL2) g += (2.0 * obj.lambda) * w;
  return g;
}

Vector component_gradient_coords(const Objective& obj, const Dataset& data, std::size_t i,
                                 const Vector& w, const IndexSet& coords) {
  check_index(data, i);
  check_dimension(data, w);
  if (!coords.empty() && coords.indices().back() >= data.dimension()) {
    throw std::invalid_argument("coordinate block exceeds dimension " +
                                std::to_string(data.dimension()));
  }
  Vector g = Vector::Zero(w.size());
  if (coords.empty()) return g;
  const double c = gradient_scale(obj, data, i, w);
  const auto row = data.features.row(i);
  for (std::size_t j : coords) {
    const auto jj = static_cast<Eigen::Index>(j);
    // Same arithmetic as component_gradient, entry by entry.
    g(jj) = c * row(jj);
    if (obj.type == ObjectiveType::LogisticL2) g(jj) += (2.0 * obj.lambda) * w(jj);
  }
  return g;
}

Vector full_gradient(const Objective& obj, const Dataset& data, const Vector& w) {
  check_dimension(data, w);
  Vector sum = Vector::Zero(w.size());
  for (std::size_t i = 0; i < data.samples(); ++i) sum += component_gradient(obj, data, i, w);
  return sum / static_cast<double>(data.samples());
}

Vector batch_gradient(const Objective& obj, const Dataset& data, const IndexSet& batch,
                      const Vector& w) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  check_dimension(data, w);
  Vector sum = Vector::Zero(w.size());
  for (std::size_t i : batch) sum += component_gradient(obj, data, i, w);
  return sum / static_cast<double>(batch.size());
}

double objective_value(const Objective& obj, const Dataset& data, const Vector& w) {
  check_dimension(data, w);
  const auto n = data.samples();
  if (obj.type == ObjectiveType::LeastSquares) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = data.targets(static_cast<Eigen::Index>(i)) - data.margin(i, w);
      acc += r * r;
    }
    return 0.5 * acc;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += softplus_neg(data.targets(static_cast<Eigen::Index>(i)) * data.margin(i, w));
  }
  return acc / static_cast<double>(n) + obj.lambda * w.squaredNorm();
}

SmoothnessConstants estimate_constants(const Objective& obj, const Dataset& data) {
  validate(obj, data);
  const double max_row_sq = data.features.rowwise().squaredNorm().maxCoeff();
  const auto spectrum = spectral_extremes(data.features);
  const double smax_sq = spectrum.sigma_max * spectrum.sigma_max;
  const auto n = static_cast<double>(data.samples());
  if (obj.type == ObjectiveType::LeastSquares) {
    if (spectrum.rank < data.dimension()) {
      throw std::domain_error("least squares: feature matrix has rank " +
                              std::to_string(spectrum.rank) + " < " +
                              std::to_string(data.dimension()) + ", gamma undefined");
    }
    return {n * max_row_sq, spectrum.sigma_min * spectrum.sigma_min, smax_sq};
  }
  if (!(obj.lambda > 0.0)) {
    throw std::domain_error("logistic: lambda = 0 gives no strong convexity, gamma undefined");
  }
  const double reg = 2.0 * obj.lambda;
  return {0.25 * max_row_sq + reg, reg, 0.25 * smax_sq / n + reg};
}

Vector least_squares_solution(const Dataset& data) {
  return data.features.colPivHouseholderQr().solve(data.targets);
}

}  // namespace cheapsvrg
