#include "vmlab/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmlab/error.hpp"

namespace vmlab {

std::optional<double> Objective::optimal_value() const {
  if (!minimizer) return std::nullopt;
  return eval(*minimizer);
}

QuadraticSpec QuadraticSpec::from_matrix(Matrix A) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw Error(Errc::invalid_spec, "quadratic spec: A must be a non-empty square matrix");
  }
  if (!A.allFinite()) throw Error(Errc::invalid_spec, "quadratic spec: non-finite entries in A");
  QuadraticSpec s;
  s.matrix_ = std::move(A);
  s.gram_ = s.matrix_->transpose() * *s.matrix_;
  s.finalize();
  return s;
}

QuadraticSpec QuadraticSpec::from_spectrum(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw Error(Errc::invalid_spec, "quadratic spec: empty spectrum");
  for (double l : eigenvalues) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(Errc::invalid_spec, "quadratic spec: eigenvalues of A^T A must be positive");
    }
  }
  QuadraticSpec s;
  const auto n = static_cast<Eigen::Index>(eigenvalues.size());
  s.gram_ = Eigen::Map<const Vector>(eigenvalues.data(), n).asDiagonal();
  s.spectrum_ = std::move(eigenvalues);
  s.finalize();
  return s;
}

QuadraticSpec QuadraticSpec::log_spaced(int n, double kappa, double lambda_max) {
  if (n < 1 || !(kappa >= 1.0) || !(lambda_max > 0.0)) {
    throw Error(Errc::invalid_spec, "log-spaced spectrum needs n >= 1, kappa >= 1, lambda_max > 0");
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  const double lo = std::log(lambda_max / kappa);
  const double hi = std::log(lambda_max);
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
    ev[static_cast<std::size_t>(i)] = std::exp(lo + u * (hi - lo));
  }
  return from_spectrum(std::move(ev));
}

void QuadraticSpec::finalize() {
  if (spectrum_) {
    lambda_min_ = *std::min_element(spectrum_->begin(), spectrum_->end());
  } else {
    lambda_min_ = min_eigenvalue(gram_);
  }
  if (!(lambda_min_ > 0.0)) {
    throw Error(Errc::invalid_spec, "quadratic spec: A^T A is not positive definite");
  }
}

namespace {

Objective quadratic_part(const QuadraticSpec& spec, std::string name) {
  Objective obj;
  obj.name = std::move(name);
  obj.dimension = spec.dimension();
  obj.minimizer = Vector::Zero(obj.dimension);
  return obj;
}

}  // namespace

Objective make_quadratic(const QuadraticSpec& spec) {
  Objective obj = quadratic_part(spec, "quadratic");
  const Matrix G = spec.gram();
  obj.eval = [G](const Vector& y) { return 0.5 * y.dot(G * y); };
  obj.grad = [G](const Vector& y) -> Vector { return G * y; };
  obj.hess = [G](const Vector&) -> Matrix { return G; };
  obj.mu_hint = spec.lambda_min();
  obj.is_quadratic = true;
  return obj;
}

Objective make_gauss_plus_quad(const QuadraticSpec& spec) {
  Objective obj = quadratic_part(spec, "gauss_quad");
  const Matrix G = spec.gram();
  obj.eval = [G](const Vector& x) { return std::exp(-x.squaredNorm()) + 0.5 * x.dot(G * x); };
  obj.grad = [G](const Vector& x) -> Vector {
    return -2.0 * std::exp(-x.squaredNorm()) * x + G * x;
  };
  obj.hess = [G](const Vector& x) -> Matrix {
    const double e = std::exp(-x.squaredNorm());
    Matrix H = G;
    H.noalias() += e * (4.0 * x * x.transpose());
    H.diagonal().array() -= 2.0 * e;
    return H;
  };
  // The bump's Hessian is bounded below by -2 I.
  if (spec.lambda_min() > 2.0) {
    obj.mu_hint = spec.lambda_min() - 2.0;
  } else {
    obj.warnings.push_back(
        "gauss_quad: lambda_min(A^T A) <= 2, strong convexity only holds on sublevel sets");
  }
  return obj;
}

Objective make_logsumexp_plus_quad(const QuadraticSpec& spec) {
  Objective obj = quadratic_part(spec, "logsumexp_quad");
  const Matrix G = spec.gram();
  // Terms e^{x_i} and e^{-x_i} form a 2n-vector z = (x, -x); shift by max z.
  obj.eval = [G](const Vector& x) {
    const double m = x.cwiseAbs().maxCoeff();
    const double s = ((x.array() - m).exp() + (-x.array() - m).exp()).sum();
    return m + std::log(s) + 0.5 * x.dot(G * x);
  };
  obj.grad = [G](const Vector& x) -> Vector {
    const double m = x.cwiseAbs().maxCoeff();
    const Eigen::ArrayXd ep = (x.array() - m).exp();
    const Eigen::ArrayXd em = (-x.array() - m).exp();
    const double s = (ep + em).sum();
    return ((ep - em) / s).matrix() + G * x;
  };
  obj.hess = [G](const Vector& x) -> Matrix {
    const double m = x.cwiseAbs().maxCoeff();
    const Eigen::ArrayXd ep = (x.array() - m).exp();
    const Eigen::ArrayXd em = (-x.array() - m).exp();
    const double s = (ep + em).sum();
    const Vector g = ((ep - em) / s).matrix();
    Matrix H = G;
    H.diagonal() += ((ep + em) / s).matrix();
    H.noalias() -= g * g.transpose();
    return H;
  };
  // log-sum-exp is convex, so the quadratic part alone certifies the modulus.
  obj.mu_hint = spec.lambda_min();
  return obj;
}

Objective make_poly50_plus_quad(const QuadraticSpec& spec) {
  Objective obj = quadratic_part(spec, "poly50_quad");
  const Matrix G = spec.gram();
  obj.eval = [G](const Vector& x) { return x.array().pow(50).sum() + 0.5 * x.dot(G * x); };
  obj.grad = [G](const Vector& x) -> Vector {
    return (50.0 * x.array().pow(49)).matrix() + G * x;
  };
  obj.hess = [G](const Vector& x) -> Matrix {
    Matrix H = G;
    H.diagonal() += (2450.0 * x.array().pow(48)).matrix();
    return H;
  };
  obj.mu_hint = spec.lambda_min();
  return obj;
}

double estimate_mu(const Objective& obj, std::span<const Vector> samples, double floor) {
  if (samples.empty()) throw Error(Errc::invalid_argument, "estimate_mu: no samples");
  if (obj.is_quadratic && obj.mu_hint) return std::max(*obj.mu_hint, floor);
  double mu = std::numeric_limits<double>::infinity();
  bool any_positive = false;
  for (const Vector& x : samples) {
    const double l = min_eigenvalue(obj.hess(x));
    any_positive = any_positive || l > 0.0;
    mu = std::min(mu, l);
  }
  if (!any_positive) {
    throw Error(Errc::non_convex_region, "estimate_mu: every sampled Hessian is indefinite");
  }
  return std::max(mu, floor);
}

}  // namespace vmlab
