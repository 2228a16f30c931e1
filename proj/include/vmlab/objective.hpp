#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmlab/linalg.hpp"

namespace vmlab {

/// Strongly convex test objective: f, grad f and Hess f plus optional
/// knowledge of the minimizer and of the strong-convexity modulus.
/// Immutable after construction; all callables are pure.
struct Objective {
  std::string name;
  int dimension = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  std::function<Matrix(const Vector&)> hess;
  std::optional<Vector> minimizer;
  std::optional<double> mu_hint;
  bool is_quadratic = false;
  std::vector<std::string> warnings;

  /// f(x*) when the minimizer is known.
  std::optional<double> optimal_value() const;
};

/// Either a dense matrix A (f uses A^T A) or the spectrum of A^T A in the
/// identity basis.
class QuadraticSpec {
 public:
  static QuadraticSpec from_matrix(Matrix A);
  static QuadraticSpec from_spectrum(std::vector<double> eigenvalues);
  /// Spectrum of A^T A log-spaced over [lambda_max / kappa, lambda_max].
  static QuadraticSpec log_spaced(int n, double kappa, double lambda_max = 10.0);

  int dimension() const { return static_cast<int>(gram_.rows()); }
  /// A^T A.
  const Matrix& gram() const { return gram_; }
  bool has_matrix() const { return matrix_.has_value(); }
  const std::optional<Matrix>& matrix() const { return matrix_; }
  const std::optional<std::vector<double>>& spectrum() const { return spectrum_; }
  double lambda_min() const { return lambda_min_; }

 private:
  QuadraticSpec() = default;
  void finalize();

  std::optional<Matrix> matrix_;
  std::optional<std::vector<double>> spectrum_;
  Matrix gram_;
  double lambda_min_ = 0.0;
};

Objective make_quadratic(const QuadraticSpec& spec);
Objective make_gauss_plus_quad(const QuadraticSpec& spec);
Objective make_logsumexp_plus_quad(const QuadraticSpec& spec);
Objective make_poly50_plus_quad(const QuadraticSpec& spec);

inline constexpr double kMuFloor = 1e-8;

/// Minimum over samples of lambda_min(hess(x)), floored at `floor`.
/// Quadratics return the exact lambda_min(A^T A).
double estimate_mu(const Objective& obj, std::span<const Vector> samples, double floor = kMuFloor);

}  // namespace vmlab
