#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xferscope/error.hpp"
#include "xferscope/kernel_solvers.hpp"
#include "xferscope/linmodel.hpp"

namespace xs = xferscope;
namespace xt = xferscope::testing;

namespace {

xs::SolverOptions tight() {
  xs::SolverOptions o;
  o.svc_tolerance = 1e-10;
  o.svc_gap_tolerance = 1e-12;
  o.svc_max_epochs = 200000;
  o.logreg_tolerance = 1e-11;
  return o;
}

std::pair<xs::Matrix, xs::Labels> two_points() {
  xs::Matrix x(2, 1);
  x << -1, 1;
  return {x, {-1, 1}};
}

std::pair<xs::Matrix, xs::Labels> noisy_data(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  xs::Matrix x = xt::random_matrix(n, k, rng);
  xs::Labels y = xt::balanced_labels(n);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) += 0.8 * y[i];
  return {x, y};
}

}  // namespace

TEST(Logreg, OneDimensionalSymmetricData) {
  const auto [x, y] = two_points();
  const auto m = xs::fit_logreg_l2(x, y, 1.0);
  EXPECT_TRUE(m.converged);
  EXPECT_GT(m.weights[0], 0.0);
  EXPECT_NEAR(m.intercept, 0.0, 1e-6);
  const double boundary = -m.intercept / m.weights[0];
  EXPECT_GT(boundary, -1.0);
  EXPECT_LT(boundary, 1.0);
}

TEST(Logreg, GradientMatchesFiniteDifferences) {
  const auto [x, y] = noisy_data(30, 6, 31);
  std::mt19937_64 rng(32);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 20; ++rep) {
    const double C = std::exp(normal(rng));
    std::vector<double> point(7);
    for (double& v : point) v = normal(rng);
    auto objective = [&](const std::vector<double>& p) {
      xs::Vector w = Eigen::Map<const xs::Vector>(p.data(), 6);
      return xs::logreg_objective(x, y, C, w, p[6]);
    };
    const auto fd = xt::central_gradient(objective, point, 1e-5);
    const xs::Vector w = Eigen::Map<const xs::Vector>(point.data(), 6);
    const auto g = xs::logreg_gradient(x, y, C, w, point[6]);
    double num = 0, den = 0;
    for (int j = 0; j < 6; ++j) {
      num += (g.weights[j] - fd[j]) * (g.weights[j] - fd[j]);
      den += fd[j] * fd[j];
    }
    num += (g.intercept - fd[6]) * (g.intercept - fd[6]);
    den += fd[6] * fd[6];
    EXPECT_LE(std::sqrt(num / den), 1e-5);
  }
}

TEST(Logreg, StationaryAtSolution) {
  const auto [x, y] = noisy_data(40, 5, 33);
  const auto m = xs::fit_logreg_l2(x, y, 2.0);
  ASSERT_TRUE(m.converged);
  EXPECT_LE(m.final_residual, 1e-8);
  const auto g = xs::logreg_gradient(x, y, 2.0, m.weights, m.intercept);
  EXPECT_LE(g.weights.lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_LE(std::abs(g.intercept), 1e-8);
}

TEST(Logreg, HighDimensionalSolutionIsStationary) {
  // k >> n exercises the sample-space solver the protocols rely on.
  const auto [x, y] = noisy_data(30, 400, 34);
  const auto m = xs::fit_logreg_l2(x, y, 0.3);
  ASSERT_TRUE(m.converged);
  const auto g = xs::logreg_gradient(x, y, 0.3, m.weights, m.intercept);
  EXPECT_LE(g.weights.lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_LE(std::abs(g.intercept), 1e-8);
}

TEST(Logreg, NegatingLabelsNegatesModel) {
  const auto [x, y] = noisy_data(40, 5, 35);
  xs::Labels neg(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];
  const auto a = xs::fit_logreg_l2(x, y, 1.5);
  const auto b = xs::fit_logreg_l2(x, neg, 1.5);
  EXPECT_LE((a.weights + b.weights).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_NEAR(a.intercept, -b.intercept, 1e-8);
}

TEST(Logreg, ObjectiveDecreasesMonotonically) {
  const auto [x, y] = noisy_data(50, 80, 36);
  xs::FitDiagnostics diag;
  xs::fit_logreg_l2(x, y, 10.0, {}, &diag);
  ASSERT_GE(diag.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < diag.objective_trace.size(); ++i) {
    EXPECT_LE(diag.objective_trace[i], diag.objective_trace[i - 1] + 1e-12);
  }
}

TEST(Logreg, SingleClassRejected) {
  xs::Matrix x = xs::Matrix::Ones(4, 2);
  EXPECT_THROW(xs::fit_logreg_l2(x, xs::Labels(4, 1), 1.0), xs::FitError);
}

TEST(Svc, TwoPointMaxMargin) {
  const auto [x, y] = two_points();
  const auto m = xs::fit_linear_svc(x, y, 1e6);
  EXPECT_NEAR(m.weights[0], 1.0, 1e-3);
  EXPECT_NEAR(m.intercept, 0.0, 1e-3);
}

TEST(Svc, DuplicatedDataWithHalfC) {
  const auto [x, y] = noisy_data(30, 4, 37);
  xs::Matrix x2(60, 4);
  x2 << x, x;
  xs::Labels y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const auto a = xs::fit_linear_svc(x, y, 2.0, tight());
  const auto b = xs::fit_linear_svc(x2, y2, 1.0, tight());
  EXPECT_LE((a.weights - b.weights).lpNorm<Eigen::Infinity>(), 1e-6);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-6);
}

TEST(Svc, DualityGapAtTermination) {
  for (std::uint64_t seed : {41u, 42u, 43u}) {
    const auto [x, y] = noisy_data(60, 300, seed);
    for (double C : {0.01, 1.0, 100.0}) {
      xs::FitDiagnostics diag;
      const auto m = xs::fit_linear_svc(x, y, C, {}, &diag);
      ASSERT_TRUE(m.converged);
      EXPECT_LE(m.final_residual, 1e-4);
      const double primal = xs::svc_primal_objective(x, y, C, m.weights, m.intercept);
      EXPECT_NEAR(primal, diag.primal_objective, 1e-9 * (1 + std::abs(primal)));
      EXPECT_LE(primal - diag.dual_objective, 1e-3 * (1.0 + std::abs(primal)));
      for (Eigen::Index i = 0; i < diag.dual.size(); ++i) {
        EXPECT_GE(diag.dual[i], 0.0);
        EXPECT_LE(diag.dual[i], C);
      }
    }
  }
}

TEST(Svc, PrimalNotWorseThanLogregSolution) {
  const auto [x, y] = noisy_data(50, 20, 44);
  const double C = 0.7;
  xs::FitDiagnostics diag;
  const auto svc = xs::fit_linear_svc(x, y, C, {}, &diag);
  const auto lr = xs::fit_logreg_l2(x, y, C);
  const double at_svc = xs::svc_primal_objective(x, y, C, svc.weights, svc.intercept);
  const double at_lr = xs::svc_primal_objective(x, y, C, lr.weights, lr.intercept);
  EXPECT_LE(at_svc, at_lr + 1e-3 * (1.0 + std::abs(at_svc)));
}

TEST(Svc, SingleClassRejected) {
  xs::Matrix x = xs::Matrix::Ones(4, 2);
  EXPECT_THROW(xs::fit_linear_svc(x, xs::Labels(4, -1), 1.0), xs::FitError);
}

TEST(Classifiers, SeparableDataTrainingAccuracy) {
  std::mt19937_64 rng(45);
  const auto [x, y] = xt::separable_data(100, 10, 1.0, rng);
  for (auto kind : {xs::ClassifierKind::LinearSVC, xs::ClassifierKind::LogisticL2}) {
    const auto m = xs::fit(kind, x, y, 10.0);
    EXPECT_GE(xs::accuracy(xs::predict(m, x), y), 0.99) << xs::to_string(kind);
  }
}

TEST(Classifiers, ConvergedImpliesResidualWithinTolerance) {
  const auto [x, y] = noisy_data(40, 100, 46);
  const xs::SolverOptions o;
  const auto a = xs::fit_logreg_l2(x, y, 1.0, o);
  const auto b = xs::fit_linear_svc(x, y, 1.0, o);
  if (a.converged) EXPECT_LE(a.final_residual, o.logreg_tolerance);
  if (b.converged) EXPECT_LE(b.final_residual, o.svc_tolerance);
}

TEST(Classifiers, GramSolverMatchesPrimalPrediction) {
  const auto [x, y] = noisy_data(40, 60, 47);
  const xs::Matrix gram = x * x.transpose();
  for (auto kind : {xs::ClassifierKind::LinearSVC, xs::ClassifierKind::LogisticL2}) {
    const auto km = xs::solve_gram(kind, gram, y, 0.5);
    const auto lm = xs::fit(kind, x, y, 0.5);
    EXPECT_EQ(xs::predict_gram(km, gram), xs::predict(lm, x));
  }
}

TEST(Predict, SignRuleAndDimensionCheck) {
  xs::LinearModel m;
  m.weights = xs::Vector::Ones(1);
  xs::Matrix x(3, 1);
  x << 2, 0, -1;
  EXPECT_EQ(xs::predict(m, x), (xs::Labels{1, 1, -1}));
  m.weights *= 3.7;
  m.intercept = 0.0;
  EXPECT_EQ(xs::predict(m, x), (xs::Labels{1, 1, -1}));
  EXPECT_THROW(xs::predict(m, xs::Matrix::Zero(2, 2)), xs::DimError);
}

TEST(PredictProperty, PositiveRescalingInvariant) {
  const auto [x, y] = noisy_data(40, 8, 48);
  auto m = xs::fit_logreg_l2(x, y, 1.0);
  const auto base = xs::predict(m, x);
  for (double s : {1e-3, 0.5, 7.0, 1e4}) {
    auto scaled = m;
    scaled.weights *= s;
    scaled.intercept *= s;
    EXPECT_EQ(xs::predict(scaled, x), base);
  }
}

TEST(Accuracy, Examples) {
  const xs::Labels a = {1, -1, 1, 1};
  EXPECT_EQ(xs::accuracy(a, a), 1.0);
  EXPECT_EQ(xs::accuracy(a, xs::Labels{-1, 1, -1, -1}), 0.0);
  EXPECT_EQ(xs::accuracy(a, xs::Labels{1, -1, 1, -1}), 0.75);
  EXPECT_THROW(xs::accuracy(a, xs::Labels{1}), xs::DimError);
}

TEST(ClassifierKind, ParseRoundTrip) {
  EXPECT_EQ(xs::parse_classifier_kind("svc"), xs::ClassifierKind::LinearSVC);
  EXPECT_EQ(xs::parse_classifier_kind("logreg"), xs::ClassifierKind::LogisticL2);
  EXPECT_EQ(xs::to_string(xs::ClassifierKind::LinearSVC), "svc");
  EXPECT_THROW(xs::parse_classifier_kind("tree"), xs::ConfigError);
}
