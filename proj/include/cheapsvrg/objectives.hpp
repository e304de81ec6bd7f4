#ifndef CHEAPSVRG_OBJECTIVES_HPP
#define CHEAPSVRG_OBJECTIVES_HPP

#include <cstddef>

#include "cheapsvrg/numerics.hpp"

namespace cheapsvrg {

/// Finite-sum problem data: features row i is x_i^T, targets(i) is y_i.
struct Dataset {
  Matrix features;
  Vector targets;

  Dataset() = default;
  /// Throws std::invalid_argument when row count and target length differ.
  Dataset(Matrix x, Vector y);

  std::size_t samples() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(features.cols()); }
  double margin(std::size_t i, const Vector& w) const { return features.row(i).dot(w); }
};

enum class ObjectiveType { LeastSquares, LogisticL2 };

/// Component family.
///
///   LeastSquares: f_i(w) = (n/2) (y_i - x_i^T w)^2, so F(w) = 1/2 ||y - Xw||^2.
///   LogisticL2:   f_i(w) = log(1 + exp(-y_i x_i^T w)) + lambda ||w||^2,
///                 regularizer folded into every component.
struct Objective {
  ObjectiveType type = ObjectiveType::LeastSquares;
  double lambda = 0.0;

  static Objective least_squares() { return {ObjectiveType::LeastSquares, 0.0}; }
  /// Throws std::invalid_argument for negative lambda.
  static Objective logistic(double lambda);
};

struct SmoothnessConstants {
  double L;      ///< rigorous per-component gradient Lipschitz bound
  double gamma;  ///< strong convexity modulus of F
  /// Lipschitz constant of grad F. For least squares this is sigma_max^2(X),
  /// the value experiments use to set step sizes.
  double L_full;
};

/// Validates that every target is -1 or +1 (logistic) and that the dataset
/// is non-empty. Throws std::invalid_argument otherwise.
void validate(const Objective& obj, const Dataset& data);

double component_value(const Objective& obj, const Dataset& data, std::size_t i, const Vector& w);
Vector component_gradient(const Objective& obj, const Dataset& data, std::size_t i, const Vector& w);
/// grad f_i(w) on the coordinates in `coords`, exactly zero elsewhere.
Vector component_gradient_coords(const Objective& obj, const Dataset& data, std::size_t i,
                                 const Vector& w, const IndexSet& coords);
/// Mean of component gradients, summed in index order.
Vector full_gradient(const Objective& obj, const Dataset& data, const Vector& w);
/// Mean over `batch`; throws std::invalid_argument for an empty batch.
Vector batch_gradient(const Objective& obj, const Dataset& data, const IndexSet& batch,
                      const Vector& w);
double objective_value(const Objective& obj, const Dataset& data, const Vector& w);

/// Least squares: L = n max_i ||x_i||^2, L_full = sigma_max^2(X),
/// gamma = sigma_min^2(X) (throws std::domain_error when X lacks full column
/// rank). Logistic: L = max_i ||x_i||^2 / 4 + 2 lambda (= 1/4 + 2 lambda on
/// unit rows), L_full = sigma_max^2(X) / (4n) + 2 lambda, gamma = 2 lambda
/// (throws std::domain_error for lambda = 0).
SmoothnessConstants estimate_constants(const Objective& obj, const Dataset& data);

/// Minimizer of the least-squares objective (normal equations, QR).
Vector least_squares_solution(const Dataset& data);

}  // namespace cheapsvrg

#endif  // CHEAPSVRG_OBJECTIVES_HPP
