#include "xferscope/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "xferscope/error.hpp"

namespace xferscope {

PercentileGrid cubic_grid(std::size_t k, std::size_t n_points, std::size_t min_voxels) {
  if (n_points < 2) throw ConfigError(fmt::format("grid needs at least 2 points, got {}", n_points));
  if (min_voxels == 0) throw ConfigError("min_voxels must be positive");
  if (min_voxels > k) {
    throw ConfigError(fmt::format("min_voxels={} exceeds the feature count k={}", min_voxels, k));
  }
  if (min_voxels == k) {
    throw ConfigError(fmt::format("min_voxels equals k={}, so the grid collapses to one point", k));
  }

  PercentileGrid grid;
  grid.k = k;
  grid.min_voxels = min_voxels;
  const double first = static_cast<double>(min_voxels) / static_cast<double>(k);
  const double root = std::cbrt(first);
  const double steps = static_cast<double>(n_points - 1);
  grid.fractions.reserve(n_points);
  grid.fractions.push_back(first);
  for (std::size_t i = 1; i + 1 < n_points; ++i) {
    const double r = root + (static_cast<double>(i) / steps) * (1.0 - root);
    grid.fractions.push_back(r * r * r);
  }
  grid.fractions.push_back(1.0);
  return grid;
}

std::size_t selection_size(std::size_t k, double fraction, std::size_t min_voxels) {
  const auto rounded = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(k) + 0.5));
  return std::clamp(std::max(rounded, min_voxels), std::size_t{1}, k);
}

FeatureRanking::FeatureRanking(const FeatureScores& scores) : order_(scores.size()) {
  if (scores.empty()) throw StatError("cannot rank an empty score vector");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
}

VoxelSelection FeatureRanking::top(double fraction, std::size_t min_voxels) const {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError(fmt::format("selection fraction must lie in (0, 1], got {}", fraction));
  }
  const std::size_t m = selection_size(order_.size(), fraction, min_voxels);
  VoxelSelection sel;
  sel.fraction = fraction;
  sel.indices.assign(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel;
}

VoxelSelection select_top(const FeatureScores& scores, double fraction, std::size_t min_voxels) {
  return FeatureRanking(scores).top(fraction, min_voxels);
}

ContrastDataset restrict(const ContrastDataset& d, const VoxelSelection& sel) {
  return restrict_columns(d, sel.indices);
}

}  // namespace xferscope
