#include "xferscope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include "xferscope/error.hpp"

namespace xferscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ClassMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

ClassMoments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, ss / (n - 1.0)};
}

void require_two(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw StatError(fmt::format("t-test needs at least 2 values per sample, got {} and {}",
                                a.size(), b.size()));
  }
}

TestResult finish(double diff, double se, double dof) {
  TestResult r;
  r.dof = dof;
  if (se == 0.0) {
    if (diff == 0.0) return r;  // t = 0, p = 1
    r.t_stat = diff > 0 ? kInf : -kInf;
    r.p_value = 0.0;
    r.degenerate = true;
    return r;
  }
  r.t_stat = diff / se;
  r.p_value = std::min(1.0, 2.0 * t_sf(std::abs(r.t_stat), dof));
  return r;
}

}  // namespace

FeatureScores anova_f(const Matrix& samples, std::span<const int> labels,
                      std::span<const std::size_t> rows) {
  const Eigen::Index k = samples.cols();
  std::size_t count[2] = {0, 0};
  for (std::size_t r : rows) ++count[labels[r] > 0 ? 1 : 0];
  if (count[0] < 2 || count[1] < 2) {
    throw StatError(fmt::format("ANOVA needs at least 2 samples per class, got {} and {}",
                                count[0], count[1]));
  }

  // Two passes: class means, then within-class sums of squared deviations.
  Eigen::ArrayXd sum[2] = {Eigen::ArrayXd::Zero(k), Eigen::ArrayXd::Zero(k)};
  Eigen::ArrayXd lo[2] = {Eigen::ArrayXd::Constant(k, kInf), Eigen::ArrayXd::Constant(k, kInf)};
  Eigen::ArrayXd hi[2] = {Eigen::ArrayXd::Constant(k, -kInf), Eigen::ArrayXd::Constant(k, -kInf)};
  for (std::size_t r : rows) {
    const int g = labels[r] > 0 ? 1 : 0;
    const auto row = samples.row(static_cast<Eigen::Index>(r)).transpose().array();
    sum[g] += row;
    lo[g] = lo[g].min(row);
    hi[g] = hi[g].max(row);
  }
  const Eigen::ArrayXd mean[2] = {sum[0] / static_cast<double>(count[0]),
                                  sum[1] / static_cast<double>(count[1])};
  Eigen::ArrayXd within = Eigen::ArrayXd::Zero(k);
  for (std::size_t r : rows) {
    const int g = labels[r] > 0 ? 1 : 0;
    within += (samples.row(static_cast<Eigen::Index>(r)).transpose().array() - mean[g]).square();
  }

  const double n = static_cast<double>(count[0] + count[1]);
  const double groups = 2.0;
  FeatureScores f(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    // Constant within both classes: compare the (exact) class values directly
    // so rounding in the means cannot produce a spurious ratio.
    if (lo[0][j] == hi[0][j] && lo[1][j] == hi[1][j]) {
      f[static_cast<std::size_t>(j)] = lo[0][j] == lo[1][j] ? 0.0 : kInf;
      continue;
    }
    const double grand = (sum[0][j] + sum[1][j]) / n;
    const double between = (static_cast<double>(count[0]) * (mean[0][j] - grand) * (mean[0][j] - grand) +
                            static_cast<double>(count[1]) * (mean[1][j] - grand) * (mean[1][j] - grand)) /
                           (groups - 1.0);
    const double within_ms = within[j] / (n - groups);
    f[static_cast<std::size_t>(j)] = between / within_ms;
  }
  return f;
}

FeatureScores anova_f(const Matrix& samples, std::span<const int> labels) {
  if (static_cast<std::size_t>(samples.rows()) != labels.size()) {
    throw DimError(fmt::format("{} rows but {} labels", samples.rows(), labels.size()));
  }
  std::vector<std::size_t> rows(labels.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return anova_f(samples, labels, rows);
}

double t_sf(double t, double dof) {
  if (!(dof > 0.0)) throw StatError(fmt::format("t distribution needs dof > 0, got {}", dof));
  if (std::isnan(t)) throw StatError("t statistic is NaN");
  if (t == kInf) return 0.0;
  if (t == -kInf) return 1.0;
  if (t == 0.0) return 0.5;
  // P(|T| > |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2)
  const double x = dof / (dof + t * t);
  const double two_tail = boost::math::ibeta(dof / 2.0, 0.5, x);
  return t > 0 ? 0.5 * two_tail : 1.0 - 0.5 * two_tail;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  require_two(a, b);
  const ClassMoments ma = moments(a);
  const ClassMoments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.variance / na;
  const double vb = mb.variance / nb;
  const double se2 = va + vb;
  const double dof = se2 > 0.0
                         ? se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0))
                         : na + nb - 2.0;
  return finish(ma.mean - mb.mean, std::sqrt(se2), dof);
}

TestResult student_t(std::span<const double> a, std::span<const double> b) {
  require_two(a, b);
  const ClassMoments ma = moments(a);
  const ClassMoments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double dof = na + nb - 2.0;
  const double pooled = ((na - 1.0) * ma.variance + (nb - 1.0) * mb.variance) / dof;
  return finish(ma.mean - mb.mean, std::sqrt(pooled * (1.0 / na + 1.0 / nb)), dof);
}

TestResult two_sample_t(std::span<const double> a, std::span<const double> b, TTestKind kind) {
  return kind == TTestKind::Welch ? welch_t(a, b) : student_t(a, b);
}

}  // namespace xferscope
