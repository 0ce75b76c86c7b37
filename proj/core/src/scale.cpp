#include "xferscope/scale.hpp"

#include <fmt/format.h>

#include "xferscope/error.hpp"

namespace xferscope {

namespace {

void check(const CurveComparison& cmp) {
  const std::size_t n = cmp.fractions.size();
  if (n == 0) throw GridError("empty curve comparison");
  if (cmp.p_values.size() != n || cmp.mean_diff.size() != n) {
    throw GridError(fmt::format("comparison vectors disagree in length ({} fractions, {} p-values, "
                                "{} differences)",
                                n, cmp.p_values.size(), cmp.mean_diff.size()));
  }
}

ScaleDecision decide(ScaleMethod method, const CurveComparison& cmp, std::size_t index,
                     bool exhausted) {
  ScaleDecision d;
  d.method = method;
  d.grid_index = index;
  d.selected_fraction = cmp.fractions[index];
  d.selected_percent = 100.0 * d.selected_fraction;
  d.exhausted = exhausted;
  return d;
}

std::vector<double> row(const Matrix& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

}  // namespace

std::string_view to_string(ScaleMethod method) noexcept {
  return method == ScaleMethod::TransferMinDiff ? "transfer_min_diff" : "selection_first_nonsig";
}

CurveComparison compare_curves(const AccuracyCurve& reference, const AccuracyCurve& candidate,
                               TTestKind kind) {
  if (reference.grid.fractions != candidate.grid.fractions) {
    throw GridError(fmt::format("cannot compare curves on different grids ({} vs {} points)",
                                reference.grid.size(), candidate.grid.size()));
  }
  if (reference.replicates.rows() != static_cast<Eigen::Index>(reference.grid.size()) ||
      candidate.replicates.rows() != static_cast<Eigen::Index>(candidate.grid.size())) {
    throw GridError("replicate matrix rows do not match the grid");
  }
  CurveComparison cmp;
  cmp.fractions = reference.grid.fractions;
  for (std::size_t p = 0; p < cmp.fractions.size(); ++p) {
    const auto a = row(reference.replicates, static_cast<Eigen::Index>(p));
    const auto b = row(candidate.replicates, static_cast<Eigen::Index>(p));
    const TestResult r = two_sample_t(a, b, kind);
    cmp.t_stats.push_back(r.t_stat);
    cmp.dof.push_back(r.dof);
    cmp.p_values.push_back(r.p_value);
    cmp.degenerate.push_back(r.degenerate);
    cmp.mean_diff.push_back(reference.mean[static_cast<Eigen::Index>(p)] -
                            candidate.mean[static_cast<Eigen::Index>(p)]);
  }
  return cmp;
}

ScaleDecision select_scale_transfer(const CurveComparison& cmp) {
  check(cmp);
  std::size_t best = 0;
  for (std::size_t i = 1; i < cmp.size(); ++i) {
    if (cmp.mean_diff[i] < cmp.mean_diff[best]) best = i;
  }
  return decide(ScaleMethod::TransferMinDiff, cmp, best, false);
}

ScaleDecision select_scale_selection(const CurveComparison& cmp, double alpha) {
  check(cmp);
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must lie in (0, 1], got {}", alpha));
  }
  for (std::size_t i = 0; i < cmp.size(); ++i) {
    if (cmp.p_values[i] >= alpha) return decide(ScaleMethod::SelectionFirstNonSig, cmp, i, false);
  }
  return decide(ScaleMethod::SelectionFirstNonSig, cmp, cmp.size() - 1, true);
}

double p_curve_area(const CurveComparison& cmp) {
  check(cmp);
  double area = 0.0;
  for (std::size_t i = 1; i < cmp.size(); ++i) {
    const double width = 100.0 * (cmp.fractions[i] - cmp.fractions[i - 1]);
    area += 0.5 * width * (cmp.p_values[i] + cmp.p_values[i - 1]);
  }
  return area;
}

}  // namespace xferscope
