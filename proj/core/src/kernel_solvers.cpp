#include "xferscope/kernel_solvers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <fmt/format.h>

#include "xferscope/error.hpp"

namespace xferscope {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_inputs(const Matrix& gram, std::span<const int> y, double C) {
  if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != y.size()) {
    throw DimError(fmt::format("Gram matrix is {}x{} for {} labels", gram.rows(), gram.cols(),
                               y.size()));
  }
  if (!(C > 0.0) || !std::isfinite(C)) throw FitError(fmt::format("penalty C must be > 0, got {}", C));
  require_both_classes(y);
}

Eigen::ArrayXd label_array(std::span<const int> y) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[i];
  return out;
}

}  // namespace

void require_both_classes(std::span<const int> y) {
  const bool pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!pos || !neg) throw FitError("training labels contain a single class");
}

// Damped Newton on the primal, carried out in the span of the training rows.
// With w = X^T beta the Newton system
//   (I + C X^T D X) dw + C X^T D 1 db = -g_w,   C 1^T D X dw + C 1^T D 1 db = -g_b
// is satisfied by the (n+1)-dimensional system
//   (I + C D K) dbeta + C D 1 db = -(beta - C c),   (K d)^T dbeta + (sum d) db = sum c
// where c_i = y_i sigma(-y_i f_i) and d_i = sigma(1 - sigma). The top-left
// block has eigenvalues >= 1, so the system is nonsingular even when K is.
KernelModel solve_logreg_gram(const Matrix& gram, std::span<const int> y, double C,
                              const SolverOptions& options, FitDiagnostics* diagnostics) {
  check_inputs(gram, y, C);
  const Eigen::Index n = gram.rows();
  const Eigen::ArrayXd labels = label_array(y);

  Vector beta = Vector::Zero(n);
  double b = 0.0;
  Vector k_beta = Vector::Zero(n);  // K beta
  double quad = 0.0;                // beta^T K beta

  auto objective = [&](const Vector& kb, double q, double intercept) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += softplus(-labels[i] * (kb[i] + intercept));
    return 0.5 * q + C * loss;
  };

  KernelModel model;
  double current = objective(k_beta, quad, b);
  if (diagnostics) diagnostics->objective_trace.assign(1, current);

  Eigen::ArrayXd c(n), d(n);
  Matrix system(n + 1, n + 1);
  Vector rhs(n + 1);

  for (std::size_t iter = 0;; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = sigmoid(-labels[i] * (k_beta[i] + b));
      c[i] = labels[i] * s;
      d[i] = s * (1.0 - s);
    }
    const Vector r = beta - C * c.matrix();
    const double grad_b = -C * c.sum();
    const double grad_w = std::sqrt(std::max(0.0, r.dot(gram * r)));
    model.residual = std::max(grad_w, std::abs(grad_b));
    model.iterations = iter;
    if (model.residual <= options.logreg_tolerance) {
      model.converged = true;
      break;
    }
    if (iter >= options.logreg_max_iterations) break;

    system.topLeftCorner(n, n) = (C * d).matrix().asDiagonal() * gram;
    system.topLeftCorner(n, n).diagonal().array() += 1.0;
    system.topRightCorner(n, 1) = (C * d).matrix();
    system.bottomLeftCorner(1, n) = (gram * d.matrix()).transpose();
    system(n, n) = d.sum();
    rhs.head(n) = -r;
    rhs[n] = c.sum();

    Vector step = system.partialPivLu().solve(rhs);
    Vector k_step = gram * step.head(n);
    double slope = r.dot(k_step) + grad_b * step[n];
    if (!step.allFinite() || !(slope < 0.0)) {
      // Newton direction unusable: steepest descent in the primal.
      step.head(n) = -r;
      step[n] = -grad_b;
      k_step = gram * step.head(n);
      slope = -(grad_w * grad_w) - grad_b * grad_b;
    }

    const double cross = k_beta.dot(step.head(n));
    const double curvature = step.head(n).dot(k_step);
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      const Vector trial_kb = k_beta + t * k_step;
      const double trial_quad = quad + 2.0 * t * cross + t * t * curvature;
      const double value = objective(trial_kb, trial_quad, b + t * step[n]);
      if (value <= current + 1e-4 * t * slope) {
        beta += t * step.head(n);
        b += t * step[n];
        k_beta = gram * beta;
        quad = beta.dot(k_beta);
        current = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no further decrease is representable
    if (diagnostics) diagnostics->objective_trace.push_back(current);
  }

  if (diagnostics) diagnostics->primal_objective = current;
  model.coef = std::move(beta);
  model.intercept = b;
  return model;
}

// Dual coordinate descent for the hinge-loss SVC with the intercept folded
// in as a constant feature: Q_ij = y_i y_j (K_ij + 1), 0 <= alpha_i <= C.
// Coordinates are visited in fixed cyclic order.
KernelModel solve_svc_gram(const Matrix& gram, std::span<const int> y, double C,
                           const SolverOptions& options, FitDiagnostics* diagnostics) {
  check_inputs(gram, y, C);
  const Eigen::Index n = gram.rows();
  const Eigen::ArrayXd labels = label_array(y);

  Matrix q = gram.array() + 1.0;
  q = labels.matrix().asDiagonal() * q * labels.matrix().asDiagonal();

  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // Q alpha - 1

  auto violation = [&](Eigen::Index i) {
    if (alpha[i] <= 0.0) return std::min(grad[i], 0.0);
    if (alpha[i] >= C) return std::max(grad[i], 0.0);
    return grad[i];
  };

  KernelModel model;
  double primal = 0.0, dual = 0.0;
  for (std::size_t epoch = 0;; ++epoch) {
    // Refresh the gradient exactly before testing for convergence.
    grad = q * alpha;
    grad.array() -= 1.0;
    double worst = 0.0;
    double hinge = 0.0, norm2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(violation(i)));
      hinge += std::max(0.0, -grad[i]);
      norm2 += alpha[i] * (grad[i] + 1.0);
    }
    primal = 0.5 * norm2 + C * hinge;
    dual = alpha.sum() - 0.5 * norm2;
    model.residual = worst;
    model.iterations = epoch;
    if (worst <= options.svc_tolerance &&
        primal - dual <= options.svc_gap_tolerance * (1.0 + std::abs(primal))) {
      model.converged = true;
      break;
    }
    if (epoch >= options.svc_max_epochs) break;

    for (Eigen::Index i = 0; i < n; ++i) {
      if (violation(i) == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - grad[i] / q(i, i), 0.0, C);
      const double delta = alpha[i] - old;
      if (delta != 0.0) grad += delta * q.col(i);
    }
  }

  if (diagnostics) {
    diagnostics->dual = alpha;
    diagnostics->primal_objective = primal;
    diagnostics->dual_objective = dual;
  }
  model.coef = (alpha.array() * labels).matrix();
  model.intercept = model.coef.sum();
  return model;
}

KernelModel solve_gram(ClassifierKind kind, const Matrix& gram, std::span<const int> y, double C,
                       const SolverOptions& options) {
  return kind == ClassifierKind::LogisticL2 ? solve_logreg_gram(gram, y, C, options)
                                            : solve_svc_gram(gram, y, C, options);
}

Labels predict_gram(const KernelModel& model, const Matrix& cross) {
  if (cross.cols() != model.coef.size()) {
    throw DimError(fmt::format("cross Gram has {} columns, model has {} training rows",
                               cross.cols(), model.coef.size()));
  }
  const Vector decision = cross * model.coef;
  Labels out(static_cast<std::size_t>(cross.rows()));
  for (Eigen::Index i = 0; i < cross.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = decision[i] + model.intercept >= 0.0 ? 1 : -1;
  }
  return out;
}

}  // namespace xferscope
