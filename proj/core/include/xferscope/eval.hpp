#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xferscope/dataset.hpp"
#include "xferscope/linmodel.hpp"

namespace xferscope {

inline constexpr std::size_t kDefaultFolds = 6;
inline constexpr std::size_t kDefaultSubsamples = 6;
inline constexpr double kDefaultKeepFraction = 0.8;

/// {1e-3, 1e-2, ..., 1e3}
std::vector<double> default_C_grid();

/// Independent, reproducible seed for sub-stream `stream` of `seed`
/// (splitmix64 finaliser over both words).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct FoldPlan {
  std::size_t n = 0;
  std::size_t n_folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // fold id per sample

  IndexList test_indices(std::size_t fold) const;
  IndexList train_indices(std::size_t fold) const;
};

/// Each class is shuffled and dealt round-robin over the folds, continuing
/// the deal across classes so fold sizes also stay balanced. Throws CvError
/// when n_folds < 2 or a class has fewer than n_folds samples.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t n_folds, std::uint64_t seed);

struct SubsamplePlan {
  std::size_t n_subsamples = kDefaultSubsamples;
  double keep_fraction = kDefaultKeepFraction;
  std::uint64_t seed = 0;
  std::vector<IndexList> index_sets;  // each sorted ascending
};

/// Stratified random subsets keeping round(keep_fraction * class count) of
/// each class. Throws CvError when a class would keep fewer than 2 samples.
SubsamplePlan make_subsample_plan(std::span<const int> labels, std::size_t n_subsamples,
                                  double keep_fraction, std::uint64_t seed);

std::vector<ContrastDataset> subsample_source(const ContrastDataset& d, const SubsamplePlan& plan);

struct CSelection {
  double C = 1.0;
  std::vector<double> mean_accuracy;  // per C_grid entry; empty for a singleton grid
  std::size_t inner_folds = 0;
};

/// Inner cross-validated choice of C on a training block given its Gram
/// matrix. The best mean accuracy wins; ties go to the smaller C. A singleton
/// grid is returned without running any fit. The fold count is reduced to the
/// smaller class size when the block is too small for n_folds.
CSelection select_C_gram(const Matrix& gram, std::span<const int> y, ClassifierKind kind,
                         std::span<const double> C_grid, std::size_t n_folds, std::uint64_t seed,
                         const SolverOptions& options = {});

/// Same selection from the raw training block.
CSelection nested_select_C(const Matrix& x, std::span<const int> y, ClassifierKind kind,
                           std::span<const double> C_grid, std::size_t n_folds,
                           std::uint64_t seed, const SolverOptions& options = {});

/// Submatrix gram(rows, cols).
Matrix gather(const Matrix& gram, std::span<const std::size_t> rows,
              std::span<const std::size_t> cols);

}  // namespace xferscope
