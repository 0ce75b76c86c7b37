#include "xferscope/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "xferscope/error.hpp"
#include "xferscope/eval.hpp"

namespace xferscope {

namespace {

constexpr double kFwhmPerSigma = 2.355;

double blob_profile(const BlobSpec& blob, const Coord3& c) {
  const double dx = static_cast<double>(c.x) - blob.center[0];
  const double dy = static_cast<double>(c.y) - blob.center[1];
  const double dz = static_cast<double>(c.z) - blob.center[2];
  const double s = blob.radius / kFwhmPerSigma;
  return std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * s * s));
}

void validate_blobs(const std::vector<BlobSpec>& blobs, const char* list,
                    const GridGeometry& geometry) {
  const auto& dims = geometry.dims();
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const BlobSpec& b = blobs[i];
    if (!(b.radius > 0.0) || !std::isfinite(b.radius)) {
      throw ConfigError(fmt::format("{}[{}]: radius must be positive, got {}", list, i, b.radius));
    }
    if (!std::isfinite(b.amplitude)) {
      throw ConfigError(fmt::format("{}[{}]: amplitude is not finite", list, i));
    }
    for (int axis = 0; axis < 3; ++axis) {
      if (!(b.center[axis] >= 0.0 && b.center[axis] <= static_cast<double>(dims[axis]) - 1.0)) {
        throw ConfigError(fmt::format("{}[{}]: center ({}, {}, {}) lies outside the {}x{}x{} grid",
                                      list, i, b.center[0], b.center[1], b.center[2], dims[0],
                                      dims[1], dims[2]));
      }
    }
  }
}

std::uint64_t blob_list_key(const std::vector<BlobSpec>& blobs) {
  std::uint64_t h = 0x5851f42d4c957f2dULL;
  for (const BlobSpec& b : blobs) {
    for (double v : {b.center[0], b.center[1], b.center[2], b.radius, b.amplitude}) {
      h = derive_seed(h, std::bit_cast<std::uint64_t>(v));
    }
  }
  return h;
}

ContrastDataset make_task(const SyntheticSpec& spec, const std::string& name,
                          const std::vector<BlobSpec>& own_blobs, std::uint64_t noise_seed) {
  std::vector<BlobSpec> blobs = spec.shared_blobs;
  blobs.insert(blobs.end(), own_blobs.begin(), own_blobs.end());
  const Vector field = blob_field(spec.geometry, blobs);

  const std::size_t n = 2 * spec.n_per_class;
  const auto k = static_cast<Eigen::Index>(spec.geometry.voxel_count());
  Matrix samples(static_cast<Eigen::Index>(n), k);
  Labels labels(n);
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  std::vector<double> volume(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < spec.n_per_class ? -1 : 1;
    for (Eigen::Index j = 0; j < k; ++j) {
      volume[static_cast<std::size_t>(j)] = labels[i] * field[j] + noise(rng);
    }
    smooth_volume(volume, spec.geometry, spec.smoothing_fwhm);
    samples.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(volume.data(), k);
  }
  return ContrastDataset(name, std::move(samples), std::move(labels), spec.geometry);
}

IndexList sorted_union(IndexList a, const IndexList& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_per_class < kMinSamplesPerClass) {
    throw ConfigError(fmt::format("n_per_class must be >= {}, got {}", kMinSamplesPerClass, n_per_class));
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError(fmt::format("noise_sigma must be positive, got {}", noise_sigma));
  }
  if (!(smoothing_fwhm >= 0.0) || !std::isfinite(smoothing_fwhm)) {
    throw ConfigError(fmt::format("smoothing_fwhm must be >= 0, got {}", smoothing_fwhm));
  }
  validate_blobs(shared_blobs, "shared_blobs", geometry);
  validate_blobs(source_only_blobs, "source_only_blobs", geometry);
  validate_blobs(target_only_blobs, "target_only_blobs", geometry);
}

Vector blob_field(const GridGeometry& geometry, std::span<const BlobSpec> blobs) {
  Vector field = Vector::Zero(static_cast<Eigen::Index>(geometry.voxel_count()));
  for (std::size_t v = 0; v < geometry.voxel_count(); ++v) {
    const Coord3 c = geometry.coord(v);
    double sum = 0.0;
    for (const BlobSpec& b : blobs) sum += b.amplitude * blob_profile(b, c);
    field[static_cast<Eigen::Index>(v)] = sum;
  }
  return field;
}

IndexList blob_mask(const GridGeometry& geometry, std::span<const BlobSpec> blobs) {
  IndexList mask;
  for (std::size_t v = 0; v < geometry.voxel_count(); ++v) {
    const Coord3 c = geometry.coord(v);
    const bool inside = std::any_of(blobs.begin(), blobs.end(), [&](const BlobSpec& b) {
      return b.amplitude != 0.0 && blob_profile(b, c) >= 0.5;
    });
    if (inside) mask.push_back(v);
  }
  return mask;
}

void smooth_volume(std::span<double> volume, const GridGeometry& geometry, double fwhm) {
  if (fwhm <= 0.0) return;
  const double sigma = fwhm / kFwhmPerSigma;
  const int half = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (int t = -half; t <= half; ++t) {
    kernel[static_cast<std::size_t>(t + half)] = std::exp(-0.5 * t * t / (sigma * sigma));
  }

  const auto& dims = geometry.dims();
  const std::size_t stride[3] = {1, dims[0], std::size_t{dims[0]} * dims[1]};
  std::vector<double> line;
  for (int axis = 0; axis < 3; ++axis) {
    const int len = static_cast<int>(dims[axis]);
    line.resize(static_cast<std::size_t>(len));
    for (std::size_t start = 0; start < volume.size(); ++start) {
      // Visit each line along `axis` once, from its first voxel.
      if ((start / stride[axis]) % dims[axis] != 0) continue;
      for (int i = 0; i < len; ++i) line[static_cast<std::size_t>(i)] = volume[start + i * stride[axis]];
      for (int i = 0; i < len; ++i) {
        double acc = 0.0, weight = 0.0;
        for (int t = std::max(-half, -i); t <= std::min(half, len - 1 - i); ++t) {
          const double w = kernel[static_cast<std::size_t>(t + half)];
          acc += w * line[static_cast<std::size_t>(i + t)];
          weight += w;
        }
        volume[start + i * stride[axis]] = acc / weight;
      }
    }
  }
}

SyntheticPair generate_pair(const SyntheticSpec& spec) {
  spec.validate();
  std::uint64_t source_key = blob_list_key(spec.source_only_blobs);
  std::uint64_t target_key = blob_list_key(spec.target_only_blobs);
  if (source_key == target_key) target_key = derive_seed(target_key, 1);
  ContrastDataset source = make_task(spec, spec.source_name, spec.source_only_blobs,
                                     derive_seed(spec.seed, source_key));
  ContrastDataset target = make_task(spec, spec.target_name, spec.target_only_blobs,
                                     derive_seed(spec.seed, target_key));

  GroundTruth truth;
  truth.shared_mask = blob_mask(spec.geometry, spec.shared_blobs);
  truth.source_mask = sorted_union(truth.shared_mask, blob_mask(spec.geometry, spec.source_only_blobs));
  truth.target_mask = sorted_union(truth.shared_mask, blob_mask(spec.geometry, spec.target_only_blobs));

  std::string direction = spec.source_name + "→" + spec.target_name;
  return {TaskPair(std::move(source), std::move(target), std::move(direction)), std::move(truth)};
}

Selectivity selectivity_scores(std::span<const std::size_t> selection,
                               std::span<const std::size_t> truth) {
  IndexList sel(selection.begin(), selection.end());
  IndexList mask(truth.begin(), truth.end());
  std::sort(sel.begin(), sel.end());
  sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
  std::sort(mask.begin(), mask.end());
  mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
  if (mask.empty()) return {};

  IndexList common;
  std::set_intersection(sel.begin(), sel.end(), mask.begin(), mask.end(), std::back_inserter(common));
  const double hits = static_cast<double>(common.size());
  Selectivity s;
  s.precision = sel.empty() ? 0.0 : hits / static_cast<double>(sel.size());
  s.recall = hits / static_cast<double>(mask.size());
  s.dice = 2.0 * hits / static_cast<double>(sel.size() + mask.size());
  return s;
}

}  // namespace xferscope
