#pragma once

#include <span>
#include <vector>

#include "xferscope/dataset.hpp"

namespace xferscope {

/// Per-feature one-way ANOVA F statistics. Entries are >= 0; +inf marks a
/// feature that is constant within each class but differs between classes.
using FeatureScores = std::vector<double>;

struct TestResult {
  double t_stat = 0.0;
  double dof = 0.0;
  double p_value = 1.0;  // two-sided
  /// Both samples have zero variance and different means: t = +-inf, p = 0.
  bool degenerate = false;
};

enum class TTestKind { Welch, Student };

/// One-way ANOVA F score of every column of `samples` for the two classes in
/// `labels`. Throws StatError when a class has fewer than two samples.
FeatureScores anova_f(const Matrix& samples, std::span<const int> labels);

/// Same, restricted to the given rows of `samples` (labels are per full row).
FeatureScores anova_f(const Matrix& samples, std::span<const int> labels,
                      std::span<const std::size_t> rows);

/// Two-sided Welch (unequal variance) two-sample t-test.
TestResult welch_t(std::span<const double> a, std::span<const double> b);

/// Two-sided pooled-variance Student two-sample t-test.
TestResult student_t(std::span<const double> a, std::span<const double> b);

TestResult two_sample_t(std::span<const double> a, std::span<const double> b, TTestKind kind);

/// Upper tail P(T > t) of Student's t distribution with `dof` degrees of
/// freedom. Throws StatError for dof <= 0 or NaN t.
double t_sf(double t, double dof);

}  // namespace xferscope
