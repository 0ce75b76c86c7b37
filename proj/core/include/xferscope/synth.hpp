#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xferscope/dataset.hpp"

namespace xferscope {

/// Gaussian activation focus. `radius` is the full width at half maximum, so
/// the half-maximum mask holds the voxels within radius/2 of the centre.
struct BlobSpec {
  std::array<double, 3> center{0.0, 0.0, 0.0};  // voxel units
  double radius = 3.0;
  double amplitude = 0.6;  // added with the class sign, so class means differ by 2x
};

struct SyntheticSpec {
  GridGeometry geometry{20, 25, 20};
  std::size_t n_per_class = 40;
  std::vector<BlobSpec> shared_blobs;       // active in both tasks
  std::vector<BlobSpec> source_only_blobs;
  std::vector<BlobSpec> target_only_blobs;
  double noise_sigma = 1.0;
  double smoothing_fwhm = 2.0;  // voxels; 0 disables smoothing
  std::uint64_t seed = 0;
  std::string source_name = "source";
  std::string target_name = "target";

  /// Throws ConfigError naming the offending blob list and index.
  void validate() const;
};

struct GroundTruth {
  IndexList shared_mask;
  IndexList source_mask;
  IndexList target_mask;
};

struct SyntheticPair {
  TaskPair pair;
  GroundTruth truth;
};

/// Each sample is class_sign * (sum of the task's blob fields) plus
/// N(0, noise_sigma^2) per voxel, then optionally smoothed with an isotropic
/// Gaussian. Rows 0..n_per_class-1 are class -1, the rest +1.
///
/// Each task's noise stream is keyed by the seed and its task-specific blob
/// list, so swapping source_only_blobs and target_only_blobs swaps the two
/// generated datasets exactly.
SyntheticPair generate_pair(const SyntheticSpec& spec);

/// Sum of the blobs' fields over the grid.
Vector blob_field(const GridGeometry& geometry, std::span<const BlobSpec> blobs);

/// Voxels where any single blob's field reaches half its amplitude.
IndexList blob_mask(const GridGeometry& geometry, std::span<const BlobSpec> blobs);

/// In-place separable Gaussian smoothing of one volume (truncated at 4 sigma,
/// weights renormalised at the grid boundary).
void smooth_volume(std::span<double> volume, const GridGeometry& geometry, double fwhm);

struct Selectivity {
  double precision = 0.0;
  double recall = 0.0;
  double dice = 0.0;
};

/// Overlap of a voxel selection with a ground-truth mask. All three scores are
/// 0 when the mask is empty.
Selectivity selectivity_scores(std::span<const std::size_t> selection,
                               std::span<const std::size_t> truth);

}  // namespace xferscope
