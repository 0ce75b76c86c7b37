#pragma once

#include <cstddef>
#include <span>

#include "xferscope/dataset.hpp"
#include "xferscope/linmodel.hpp"

namespace xferscope {

/// A linear model expressed through its training rows: w = sum_i coef_i x_i.
/// With n samples and k >> n features every fit and prediction only needs
/// inner products, so the solvers work on the n x n Gram matrix.
struct KernelModel {
  Vector coef;
  double intercept = 0.0;
  bool converged = false;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// `gram` is X X^T over the training rows. Throws FitError when `y` has a
/// single class or C <= 0.
KernelModel solve_logreg_gram(const Matrix& gram, std::span<const int> y, double C,
                              const SolverOptions& options = {},
                              FitDiagnostics* diagnostics = nullptr);

KernelModel solve_svc_gram(const Matrix& gram, std::span<const int> y, double C,
                           const SolverOptions& options = {},
                           FitDiagnostics* diagnostics = nullptr);

KernelModel solve_gram(ClassifierKind kind, const Matrix& gram, std::span<const int> y, double C,
                       const SolverOptions& options = {});

/// Labels for test rows given `cross` = X_test X_train^T.
Labels predict_gram(const KernelModel& model, const Matrix& cross);

void require_both_classes(std::span<const int> y);

}  // namespace xferscope
