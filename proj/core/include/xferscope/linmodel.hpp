#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "xferscope/dataset.hpp"

namespace xferscope {

enum class ClassifierKind { LogisticL2, LinearSVC };

std::string_view to_string(ClassifierKind kind) noexcept;
/// Accepts "svc" / "logreg". Throws ConfigError otherwise.
ClassifierKind parse_classifier_kind(std::string_view text);

struct SolverOptions {
  // Damped Newton for L2 logistic regression.
  double logreg_tolerance = 1e-8;  // on the gradient 2-norm (kernel-space for the Gram solver)
  std::size_t logreg_max_iterations = 1000;
  // Dual coordinate descent for the hinge-loss SVC.
  double svc_tolerance = 1e-4;     // on the largest projected-gradient violation
  double svc_gap_tolerance = 1e-3; // duality gap <= tol * (1 + |primal|)
  std::size_t svc_max_epochs = 10000;
};

/// A trained linear binary classifier, decision value w.x + b.
struct LinearModel {
  ClassifierKind kind = ClassifierKind::LinearSVC;
  Vector weights;
  double intercept = 0.0;
  double penalty_C = 1.0;
  bool converged = false;
  double final_residual = 0.0;
  std::size_t iterations = 0;
};

/// Solver trace, filled on request.
struct FitDiagnostics {
  std::vector<double> objective_trace;  // logreg: objective after each iteration
  Vector dual;                          // svc: alpha_i in [0, C]
  double primal_objective = 0.0;
  double dual_objective = 0.0;          // svc only
};

/// Minimises 0.5*|w|^2 + C * sum_i log(1 + exp(-y_i (w.x_i + b))); the
/// intercept is not penalised.
LinearModel fit_logreg_l2(const Matrix& x, std::span<const int> y, double C,
                          const SolverOptions& options = {}, FitDiagnostics* diagnostics = nullptr);

/// Minimises 0.5*(|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b)): the
/// intercept is an augmented constant feature and so carries a weak penalty.
LinearModel fit_linear_svc(const Matrix& x, std::span<const int> y, double C,
                           const SolverOptions& options = {}, FitDiagnostics* diagnostics = nullptr);

LinearModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> y, double C,
                const SolverOptions& options = {});

/// sign(w.x + b) per row; an exact zero maps to +1.
Labels predict(const LinearModel& model, const Matrix& x);

/// Fraction of positions where `predicted` and `truth` agree.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

double logreg_objective(const Matrix& x, std::span<const int> y, double C, const Vector& w, double b);

struct PrimalGradient {
  Vector weights;
  double intercept = 0.0;
};
PrimalGradient logreg_gradient(const Matrix& x, std::span<const int> y, double C, const Vector& w,
                               double b);

/// The SVC primal objective, intercept penalised as an augmented feature.
double svc_primal_objective(const Matrix& x, std::span<const int> y, double C, const Vector& w,
                            double b);

}  // namespace xferscope
