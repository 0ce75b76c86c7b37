#pragma once

#include <cstddef>
#include <vector>

#include "xferscope/dataset.hpp"
#include "xferscope/stats.hpp"

namespace xferscope {

inline constexpr std::size_t kDefaultGridPoints = 15;
inline constexpr std::size_t kDefaultMinVoxels = 150;

/// Selection fractions spaced uniformly in cube-root space, from
/// min_voxels/k up to exactly 1 (the whole grid).
struct PercentileGrid {
  std::vector<double> fractions;
  std::size_t k = 0;
  std::size_t min_voxels = 0;

  std::size_t size() const noexcept { return fractions.size(); }
};

struct VoxelSelection {
  double fraction = 1.0;
  IndexList indices;  // ascending, unique
};

/// fractions[i] = (r + i/(n_points-1) * (1 - r))^3 with r = (min_voxels/k)^(1/3).
/// Throws ConfigError unless n_points >= 2 and 1 <= min_voxels < k.
PercentileGrid cubic_grid(std::size_t k, std::size_t n_points, std::size_t min_voxels);

/// Number of voxels kept at `fraction`: round-half-up of fraction*k, raised
/// to min_voxels, clamped to [1, k].
std::size_t selection_size(std::size_t k, double fraction, std::size_t min_voxels);

/// Feature order by decreasing score (+inf first), ties by ascending index.
class FeatureRanking {
 public:
  explicit FeatureRanking(const FeatureScores& scores);

  std::size_t k() const noexcept { return order_.size(); }
  const IndexList& order() const noexcept { return order_; }

  /// The top selection_size(k, fraction, min_voxels) features, ascending.
  VoxelSelection top(double fraction, std::size_t min_voxels) const;

 private:
  IndexList order_;
};

VoxelSelection select_top(const FeatureScores& scores, double fraction, std::size_t min_voxels);

/// The dataset restricted to the selected voxels.
ContrastDataset restrict(const ContrastDataset& d, const VoxelSelection& sel);

}  // namespace xferscope
