#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "xferscope/dataset.hpp"
#include "xferscope/eval.hpp"
#include "xferscope/linmodel.hpp"
#include "xferscope/selection.hpp"

namespace xferscope {

enum class InlineSelectionMode {
  FoldWise,   // ANOVA on each training block
  WholeTask,  // ANOVA once on the whole target task
};

enum class CurveRole { Inline, Transfer, SelectionTransfer };

std::string_view to_string(InlineSelectionMode mode) noexcept;
std::string_view to_string(CurveRole role) noexcept;
InlineSelectionMode parse_inline_selection_mode(std::string_view text);

struct ProtocolConfig {
  ClassifierKind classifier = ClassifierKind::LinearSVC;
  std::vector<double> C_grid = default_C_grid();
  std::size_t n_folds = kDefaultFolds;
  std::size_t n_subsamples = kDefaultSubsamples;
  double subsample_fraction = kDefaultKeepFraction;
  std::size_t n_points = kDefaultGridPoints;
  std::size_t min_voxels = kDefaultMinVoxels;
  std::uint64_t seed = 0;
  InlineSelectionMode inline_selection = InlineSelectionMode::FoldWise;
  bool standardize_samples = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  SolverOptions solver;

  /// Throws ConfigError on non-positive counts or out-of-range fractions.
  void validate() const;
};

/// Accuracies per (grid fraction, replicate). Replicates are CV folds for the
/// inline and selection-transfer protocols and source subsamples for transfer.
struct AccuracyCurve {
  CurveRole role = CurveRole::Inline;
  PercentileGrid grid;
  Matrix replicates;  // n_points x n_replicates, entries in [0, 1]
  Vector mean;        // row means of `replicates`
  Matrix chosen_C;    // C picked by the nested search, same shape
};

/// Train and test on the target by stratified CV at every grid fraction.
AccuracyCurve inline_curve(const ContrastDataset& target, const ProtocolConfig& cfg);

/// Train on source subsamples (ANOVA, C search and fit per subsample), then
/// predict every target sample with no target training.
AccuracyCurve transfer_curve(const TaskPair& pair, const ProtocolConfig& cfg);

/// Select voxels by ANOVA on the whole source, then cross-validate on the
/// target restricted to them.
AccuracyCurve selection_transfer_curve(const TaskPair& pair, const ProtocolConfig& cfg);

/// Stratified CV on `target` with one fixed voxel selection per grid point
/// (selections.size() == grid.size()). The fold plan and inner C-search seeds
/// depend only on cfg.seed, so equal selections give equal replicates.
AccuracyCurve cv_curve_on_selections(const ContrastDataset& target, const PercentileGrid& grid,
                                     const std::vector<VoxelSelection>& selections,
                                     const ProtocolConfig& cfg, CurveRole role);

/// A source-trained classifier for one (fraction, subsample) cell.
struct TransferModel {
  VoxelSelection selection;
  LinearModel model;  // weights over selection.indices
};

/// Models for every grid fraction (outer) and subsample (inner). Only the
/// source is consulted.
std::vector<std::vector<TransferModel>> train_transfer_models(const ContrastDataset& source,
                                                              const PercentileGrid& grid,
                                                              const ProtocolConfig& cfg);

AccuracyCurve evaluate_transfer_models(const std::vector<std::vector<TransferModel>>& models,
                                       const PercentileGrid& grid, const ContrastDataset& target);

/// The grid used for a dataset with k features under cfg.
PercentileGrid protocol_grid(std::size_t k, const ProtocolConfig& cfg);

/// Fold plan shared by the inline and selection-transfer protocols.
FoldPlan target_folds(const ContrastDataset& target, const ProtocolConfig& cfg);

}  // namespace xferscope
