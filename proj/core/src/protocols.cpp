#include "xferscope/protocols.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "xferscope/error.hpp"
#include "xferscope/kernel_solvers.hpp"
#include "xferscope/parallel.hpp"
#include "xferscope/stats.hpp"

namespace xferscope {

namespace {

// Seed streams derived from ProtocolConfig::seed.
constexpr std::uint64_t kOuterFoldStream = 1;
constexpr std::uint64_t kSubsampleStream = 2;
constexpr std::uint64_t kFoldInnerStream = 1000;
constexpr std::uint64_t kSubsampleInnerStream = 2000;

// Standardised copy when requested; otherwise the original is used in place.
class Prepared {
 public:
  Prepared(const ContrastDataset& d, const ProtocolConfig& cfg) : original_(d) {
    if (cfg.standardize_samples) copy_.emplace(standardize_rows(d));
  }
  const ContrastDataset& get() const { return copy_ ? *copy_ : original_; }

 private:
  const ContrastDataset& original_;
  std::optional<ContrastDataset> copy_;
};

IndexList all_rows(std::size_t n) {
  IndexList rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

Matrix gather_block(const Matrix& x, std::span<const std::size_t> rows,
                    std::span<const std::size_t> cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(static_cast<Eigen::Index>(rows[i]));
    auto dst = out.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      dst[static_cast<Eigen::Index>(j)] = src[static_cast<Eigen::Index>(cols[j])];
    }
  }
  return out;
}

Matrix gram_of(const Matrix& block) { return block * block.transpose(); }

Labels pick(std::span<const int> labels, std::span<const std::size_t> rows) {
  Labels out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

AccuracyCurve empty_curve(CurveRole role, const PercentileGrid& grid, std::size_t replicates) {
  AccuracyCurve curve;
  curve.role = role;
  curve.grid = grid;
  curve.replicates = Matrix::Zero(static_cast<Eigen::Index>(grid.size()),
                                  static_cast<Eigen::Index>(replicates));
  curve.chosen_C = curve.replicates;
  return curve;
}

void finish_means(AccuracyCurve& curve) { curve.mean = curve.replicates.rowwise().mean(); }

struct CellResult {
  double accuracy = 0.0;
  double C = 0.0;
};

// One outer fold: nested C search on the training block, final fit, test.
CellResult cv_cell(const Matrix& gram_all, std::span<const int> labels, const FoldPlan& plan,
                   std::size_t fold, const ProtocolConfig& cfg) {
  const IndexList train = plan.train_indices(fold);
  const IndexList test = plan.test_indices(fold);
  const Matrix train_gram = gather(gram_all, train, train);
  const Labels train_y = pick(labels, train);
  const CSelection chosen =
      select_C_gram(train_gram, train_y, cfg.classifier, cfg.C_grid, cfg.n_folds,
                    derive_seed(cfg.seed, kFoldInnerStream + fold), cfg.solver);
  const KernelModel model = solve_gram(cfg.classifier, train_gram, train_y, chosen.C, cfg.solver);
  const Labels predicted = predict_gram(model, gather(gram_all, test, train));
  return {accuracy(predicted, pick(labels, test)), chosen.C};
}

void with_context(Error& e, CurveRole role, double fraction, std::size_t replicate) {
  e.add_context(fmt::format("{} curve at fraction {:.6g}, replicate {}", to_string(role), fraction,
                            replicate));
}

void check_pair(const TaskPair& pair) {
  if (!(pair.source.geometry() == pair.target.geometry())) {
    throw DimError(fmt::format("source '{}' and target '{}' have different geometries",
                               pair.source.name(), pair.target.name()));
  }
}

}  // namespace

std::string_view to_string(InlineSelectionMode mode) noexcept {
  return mode == InlineSelectionMode::FoldWise ? "foldwise" : "wholetask";
}

std::string_view to_string(CurveRole role) noexcept {
  switch (role) {
    case CurveRole::Inline: return "inline";
    case CurveRole::Transfer: return "transfer";
    case CurveRole::SelectionTransfer: return "selection";
  }
  return "unknown";
}

InlineSelectionMode parse_inline_selection_mode(std::string_view text) {
  if (text == "foldwise") return InlineSelectionMode::FoldWise;
  if (text == "wholetask") return InlineSelectionMode::WholeTask;
  throw ConfigError(fmt::format("unknown inline selection mode '{}' (expected foldwise or wholetask)",
                                text));
}

void ProtocolConfig::validate() const {
  if (C_grid.empty()) throw ConfigError("C grid is empty");
  for (double C : C_grid) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError(fmt::format("C grid entry {} is not positive", C));
  }
  if (n_folds < 2) throw ConfigError(fmt::format("n_folds must be >= 2, got {}", n_folds));
  if (n_subsamples < 1) throw ConfigError("n_subsamples must be positive");
  if (n_subsamples < 2) {
    throw ConfigError("n_subsamples must be >= 2 so transfer replicates can be compared");
  }
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    throw ConfigError(fmt::format("subsample_fraction must lie in (0, 1], got {}", subsample_fraction));
  }
  if (n_points < 2) throw ConfigError(fmt::format("n_points must be >= 2, got {}", n_points));
  if (min_voxels < 1) throw ConfigError("min_voxels must be positive");
}

PercentileGrid protocol_grid(std::size_t k, const ProtocolConfig& cfg) {
  return cubic_grid(k, cfg.n_points, cfg.min_voxels);
}

FoldPlan target_folds(const ContrastDataset& target, const ProtocolConfig& cfg) {
  return stratified_kfold(target.labels(), cfg.n_folds, derive_seed(cfg.seed, kOuterFoldStream));
}

AccuracyCurve cv_curve_on_selections(const ContrastDataset& target_in, const PercentileGrid& grid,
                                     const std::vector<VoxelSelection>& selections,
                                     const ProtocolConfig& cfg, CurveRole role) {
  cfg.validate();
  if (selections.size() != grid.size()) {
    throw GridError(fmt::format("{} selections for {} grid points", selections.size(), grid.size()));
  }
  const Prepared prepared(target_in, cfg);
  const ContrastDataset& target = prepared.get();
  const FoldPlan plan = target_folds(target, cfg);
  const IndexList rows = all_rows(target.n());

  std::vector<Matrix> grams(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t p) {
    grams[p] = gram_of(gather_block(target.samples(), rows, selections[p].indices));
  });

  AccuracyCurve curve = empty_curve(role, grid, cfg.n_folds);
  parallel_for(grid.size() * cfg.n_folds, cfg.threads, [&](std::size_t item) {
    const std::size_t p = item / cfg.n_folds;
    const std::size_t fold = item % cfg.n_folds;
    try {
      const CellResult cell = cv_cell(grams[p], target.labels(), plan, fold, cfg);
      curve.replicates(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(fold)) = cell.accuracy;
      curve.chosen_C(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(fold)) = cell.C;
    } catch (Error& e) {
      with_context(e, role, grid.fractions[p], fold);
      throw;
    }
  });
  finish_means(curve);
  return curve;
}

AccuracyCurve inline_curve(const ContrastDataset& target_in, const ProtocolConfig& cfg) {
  cfg.validate();
  const PercentileGrid grid = protocol_grid(target_in.k(), cfg);

  if (cfg.inline_selection == InlineSelectionMode::WholeTask) {
    const Prepared prepared(target_in, cfg);
    const FeatureRanking ranking(anova_f(prepared.get().samples(), prepared.get().labels()));
    std::vector<VoxelSelection> selections;
    for (double fraction : grid.fractions) selections.push_back(ranking.top(fraction, cfg.min_voxels));
    return cv_curve_on_selections(target_in, grid, selections, cfg, CurveRole::Inline);
  }

  const Prepared prepared(target_in, cfg);
  const ContrastDataset& target = prepared.get();
  const FoldPlan plan = target_folds(target, cfg);
  const IndexList rows = all_rows(target.n());

  std::vector<std::optional<FeatureRanking>> rankings(cfg.n_folds);
  parallel_for(cfg.n_folds, cfg.threads, [&](std::size_t fold) {
    try {
      rankings[fold].emplace(anova_f(target.samples(), target.labels(), plan.train_indices(fold)));
    } catch (Error& e) {
      e.add_context(fmt::format("inline ANOVA on training block of fold {}", fold));
      throw;
    }
  });

  AccuracyCurve curve = empty_curve(CurveRole::Inline, grid, cfg.n_folds);
  parallel_for(grid.size() * cfg.n_folds, cfg.threads, [&](std::size_t item) {
    const std::size_t p = item / cfg.n_folds;
    const std::size_t fold = item % cfg.n_folds;
    try {
      const VoxelSelection sel = rankings[fold]->top(grid.fractions[p], cfg.min_voxels);
      const Matrix gram = gram_of(gather_block(target.samples(), rows, sel.indices));
      const CellResult cell = cv_cell(gram, target.labels(), plan, fold, cfg);
      curve.replicates(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(fold)) = cell.accuracy;
      curve.chosen_C(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(fold)) = cell.C;
    } catch (Error& e) {
      with_context(e, CurveRole::Inline, grid.fractions[p], fold);
      throw;
    }
  });
  finish_means(curve);
  return curve;
}

std::vector<std::vector<TransferModel>> train_transfer_models(const ContrastDataset& source_in,
                                                              const PercentileGrid& grid,
                                                              const ProtocolConfig& cfg) {
  cfg.validate();
  const Prepared prepared(source_in, cfg);
  const ContrastDataset& source = prepared.get();
  const SubsamplePlan plan =
      make_subsample_plan(source.labels(), cfg.n_subsamples, cfg.subsample_fraction,
                          derive_seed(cfg.seed, kSubsampleStream));

  std::vector<std::optional<FeatureRanking>> rankings(cfg.n_subsamples);
  parallel_for(cfg.n_subsamples, cfg.threads, [&](std::size_t s) {
    try {
      rankings[s].emplace(anova_f(source.samples(), source.labels(), plan.index_sets[s]));
    } catch (Error& e) {
      e.add_context(fmt::format("transfer ANOVA on source subsample {}", s));
      throw;
    }
  });

  std::vector<std::vector<TransferModel>> models(grid.size(),
                                                 std::vector<TransferModel>(cfg.n_subsamples));
  parallel_for(grid.size() * cfg.n_subsamples, cfg.threads, [&](std::size_t item) {
    const std::size_t p = item / cfg.n_subsamples;
    const std::size_t s = item % cfg.n_subsamples;
    try {
      const IndexList& rows = plan.index_sets[s];
      TransferModel& cell = models[p][s];
      cell.selection = rankings[s]->top(grid.fractions[p], cfg.min_voxels);
      const Matrix block = gather_block(source.samples(), rows, cell.selection.indices);
      const Matrix gram = gram_of(block);
      const Labels y = pick(source.labels(), rows);
      const CSelection chosen =
          select_C_gram(gram, y, cfg.classifier, cfg.C_grid, cfg.n_folds,
                        derive_seed(cfg.seed, kSubsampleInnerStream + s), cfg.solver);
      const KernelModel km = solve_gram(cfg.classifier, gram, y, chosen.C, cfg.solver);
      cell.model.kind = cfg.classifier;
      cell.model.weights = block.transpose() * km.coef;
      cell.model.intercept = km.intercept;
      cell.model.penalty_C = chosen.C;
      cell.model.converged = km.converged;
      cell.model.final_residual = km.residual;
      cell.model.iterations = km.iterations;
    } catch (Error& e) {
      with_context(e, CurveRole::Transfer, grid.fractions[p], s);
      throw;
    }
  });
  return models;
}

AccuracyCurve evaluate_transfer_models(const std::vector<std::vector<TransferModel>>& models,
                                       const PercentileGrid& grid, const ContrastDataset& target) {
  if (models.size() != grid.size() || models.empty()) {
    throw GridError(fmt::format("{} model rows for {} grid points", models.size(), grid.size()));
  }
  const std::size_t replicates = models.front().size();
  AccuracyCurve curve = empty_curve(CurveRole::Transfer, grid, replicates);
  const IndexList rows = all_rows(target.n());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t s = 0; s < replicates; ++s) {
      const TransferModel& cell = models[p][s];
      for (std::size_t j : cell.selection.indices) {
        if (j >= target.k()) throw DimError(fmt::format("selected voxel {} outside target k={}", j, target.k()));
      }
      const Matrix block = gather_block(target.samples(), rows, cell.selection.indices);
      curve.replicates(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(s)) =
          accuracy(predict(cell.model, block), target.labels());
      curve.chosen_C(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(s)) = cell.model.penalty_C;
    }
  }
  finish_means(curve);
  return curve;
}

AccuracyCurve transfer_curve(const TaskPair& pair, const ProtocolConfig& cfg) {
  check_pair(pair);
  const PercentileGrid grid = protocol_grid(pair.source.k(), cfg);
  const auto models = train_transfer_models(pair.source, grid, cfg);
  const Prepared target(pair.target, cfg);
  return evaluate_transfer_models(models, grid, target.get());
}

AccuracyCurve selection_transfer_curve(const TaskPair& pair, const ProtocolConfig& cfg) {
  check_pair(pair);
  cfg.validate();
  const PercentileGrid grid = protocol_grid(pair.source.k(), cfg);
  const Prepared source(pair.source, cfg);
  const FeatureRanking ranking(anova_f(source.get().samples(), source.get().labels()));
  std::vector<VoxelSelection> selections;
  for (double fraction : grid.fractions) selections.push_back(ranking.top(fraction, cfg.min_voxels));
  return cv_curve_on_selections(pair.target, grid, selections, cfg, CurveRole::SelectionTransfer);
}

}  // namespace xferscope
