#pragma once

#include <string>

#include "xferscope/protocols.hpp"
#include "xferscope/scale.hpp"
#include "xferscope/selection.hpp"

namespace xferscope {

struct AnalysisOptions {
  ProtocolConfig protocol;
  double alpha = kDefaultAlpha;
  TTestKind ttest = TTestKind::Welch;
};

/// Everything computed for one directed task pair (one report row).
struct DirectionResult {
  std::string direction;  // e.g. "A→B"
  std::string pair;       // "<source name>→<target name>"
  AccuracyCurve inline_curve;
  AccuracyCurve transfer_curve;
  AccuracyCurve selection_curve;
  CurveComparison transfer_comparison;   // inline vs transfer
  CurveComparison selection_comparison;  // inline vs selection transfer
  ScaleDecision transfer_scale;
  ScaleDecision selection_scale;
  double transfer_area = 0.0;
  double selection_area = 0.0;
  /// Whole-source ANOVA selection at the selection-transfer scale.
  VoxelSelection selected_voxels;
};

/// Runs the three protocols on `pair` and derives both scale decisions and
/// p-curve areas.
DirectionResult analyze_direction(const TaskPair& pair, const AnalysisOptions& options,
                                  std::string direction_label);

}  // namespace xferscope
