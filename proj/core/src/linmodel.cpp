#include "xferscope/linmodel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "xferscope/error.hpp"
#include "xferscope/kernel_solvers.hpp"

namespace xferscope {

namespace {

void check_shape(const Matrix& x, std::span<const int> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DimError(fmt::format("{} rows but {} labels", x.rows(), y.size()));
  }
}

Vector margins(const Matrix& x, std::span<const int> y, const Vector& w, double b) {
  if (x.cols() != w.size()) {
    throw DimError(fmt::format("{} features but {} weights", x.cols(), w.size()));
  }
  Vector m = (x * w).array() + b;
  for (Eigen::Index i = 0; i < m.size(); ++i) m[i] *= y[static_cast<std::size_t>(i)];
  return m;
}

LinearModel to_linear(ClassifierKind kind, const Matrix& x, const KernelModel& km, double C) {
  LinearModel model;
  model.kind = kind;
  model.weights = x.transpose() * km.coef;
  model.intercept = km.intercept;
  model.penalty_C = C;
  model.converged = km.converged;
  model.final_residual = km.residual;
  model.iterations = km.iterations;
  return model;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) noexcept {
  return kind == ClassifierKind::LogisticL2 ? "logreg" : "svc";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "svc") return ClassifierKind::LinearSVC;
  if (text == "logreg") return ClassifierKind::LogisticL2;
  throw ConfigError(fmt::format("unknown classifier '{}' (expected svc or logreg)", text));
}

LinearModel fit_logreg_l2(const Matrix& x, std::span<const int> y, double C,
                          const SolverOptions& options, FitDiagnostics* diagnostics) {
  check_shape(x, y);
  const Matrix gram = x * x.transpose();
  return to_linear(ClassifierKind::LogisticL2, x,
                   solve_logreg_gram(gram, y, C, options, diagnostics), C);
}

LinearModel fit_linear_svc(const Matrix& x, std::span<const int> y, double C,
                           const SolverOptions& options, FitDiagnostics* diagnostics) {
  check_shape(x, y);
  const Matrix gram = x * x.transpose();
  return to_linear(ClassifierKind::LinearSVC, x, solve_svc_gram(gram, y, C, options, diagnostics),
                   C);
}

LinearModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> y, double C,
                const SolverOptions& options) {
  return kind == ClassifierKind::LogisticL2 ? fit_logreg_l2(x, y, C, options)
                                            : fit_linear_svc(x, y, C, options);
}

Labels predict(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.weights.size()) {
    throw DimError(fmt::format("model expects {} features, input has {}", model.weights.size(),
                               x.cols()));
  }
  const Vector decision = x * model.weights;
  Labels out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = decision[i] + model.intercept >= 0.0 ? 1 : -1;
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw DimError(fmt::format("{} predictions for {} labels", predicted.size(), truth.size()));
  }
  if (truth.empty()) throw DimError("accuracy of an empty label vector");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double logreg_objective(const Matrix& x, std::span<const int> y, double C, const Vector& w,
                        double b) {
  check_shape(x, y);
  const Vector m = margins(x, y, w, b);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double z = -m[i];
    loss += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return 0.5 * w.squaredNorm() + C * loss;
}

PrimalGradient logreg_gradient(const Matrix& x, std::span<const int> y, double C, const Vector& w,
                               double b) {
  check_shape(x, y);
  const Vector m = margins(x, y, w, b);
  Vector coeff(m.size());  // -C y_i sigma(-m_i)
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double s = m[i] >= 0 ? std::exp(-m[i]) / (1.0 + std::exp(-m[i])) : 1.0 / (1.0 + std::exp(m[i]));
    coeff[i] = -C * y[static_cast<std::size_t>(i)] * s;
  }
  return {w + x.transpose() * coeff, coeff.sum()};
}

double svc_primal_objective(const Matrix& x, std::span<const int> y, double C, const Vector& w,
                            double b) {
  check_shape(x, y);
  const Vector m = margins(x, y, w, b);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) hinge += std::max(0.0, 1.0 - m[i]);
  return 0.5 * (w.squaredNorm() + b * b) + C * hinge;
}

}  // namespace xferscope
