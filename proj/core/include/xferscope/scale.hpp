#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "xferscope/protocols.hpp"
#include "xferscope/stats.hpp"

namespace xferscope {

inline constexpr double kDefaultAlpha = 0.05;

/// Pointwise test of reference replicates against candidate replicates.
struct CurveComparison {
  std::vector<double> fractions;
  std::vector<double> t_stats;
  std::vector<double> dof;
  std::vector<double> p_values;
  std::vector<double> mean_diff;  // reference mean - candidate mean
  std::vector<bool> degenerate;   // zero variance on both sides, unequal means

  std::size_t size() const noexcept { return fractions.size(); }
};

enum class ScaleMethod { TransferMinDiff, SelectionFirstNonSig };

std::string_view to_string(ScaleMethod method) noexcept;

struct ScaleDecision {
  ScaleMethod method = ScaleMethod::SelectionFirstNonSig;
  std::size_t grid_index = 0;
  double selected_fraction = 1.0;
  double selected_percent = 100.0;
  bool exhausted = false;  // no grid point satisfied the rule
};

/// Throws GridError unless both curves share the same fractions.
CurveComparison compare_curves(const AccuracyCurve& reference, const AccuracyCurve& candidate,
                               TTestKind kind = TTestKind::Welch);

/// Grid point with the smallest mean difference; ties go to the smaller fraction.
ScaleDecision select_scale_transfer(const CurveComparison& cmp);

/// Smallest fraction whose p-value is >= alpha; the full grid (exhausted)
/// when there is none. alpha must lie in (0, 1].
ScaleDecision select_scale_selection(const CurveComparison& cmp, double alpha = kDefaultAlpha);

/// Trapezoidal area under the p-value curve with the x axis in percent of
/// voxels (100 * fraction).
double p_curve_area(const CurveComparison& cmp);

}  // namespace xferscope
