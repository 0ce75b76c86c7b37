#include "xferscope/experiment.hpp"

#include "xferscope/stats.hpp"

namespace xferscope {

DirectionResult analyze_direction(const TaskPair& pair, const AnalysisOptions& options,
                                  std::string direction_label) {
  const ProtocolConfig& cfg = options.protocol;
  DirectionResult r;
  r.direction = std::move(direction_label);
  r.pair = pair.source.name() + "→" + pair.target.name();
  r.inline_curve = inline_curve(pair.target, cfg);
  r.transfer_curve = transfer_curve(pair, cfg);
  r.selection_curve = selection_transfer_curve(pair, cfg);

  r.transfer_comparison = compare_curves(r.inline_curve, r.transfer_curve, options.ttest);
  r.selection_comparison = compare_curves(r.inline_curve, r.selection_curve, options.ttest);
  r.transfer_scale = select_scale_transfer(r.transfer_comparison);
  r.selection_scale = select_scale_selection(r.selection_comparison, options.alpha);
  r.transfer_area = p_curve_area(r.transfer_comparison);
  r.selection_area = p_curve_area(r.selection_comparison);

  const ContrastDataset source =
      cfg.standardize_samples ? standardize_rows(pair.source) : pair.source;
  r.selected_voxels = select_top(anova_f(source.samples(), source.labels()),
                                 r.selection_scale.selected_fraction, cfg.min_voxels);
  return r;
}

}  // namespace xferscope
