#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace xferscope {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Class labels, canonically -1 / +1.
using Labels = std::vector<int>;
using IndexList = std::vector<std::size_t>;

struct Coord3 {
  std::size_t x = 0, y = 0, z = 0;
  friend bool operator==(const Coord3&, const Coord3&) = default;
};

/// Rectangular voxel grid. Linear index runs x fastest, z slowest.
class GridGeometry {
 public:
  GridGeometry() = default;
  GridGeometry(std::uint32_t nx, std::uint32_t ny, std::uint32_t nz);
  explicit GridGeometry(std::array<std::uint32_t, 3> dims)
      : GridGeometry(dims[0], dims[1], dims[2]) {}

  const std::array<std::uint32_t, 3>& dims() const noexcept { return dims_; }
  std::size_t voxel_count() const noexcept {
    return std::size_t{dims_[0]} * dims_[1] * dims_[2];
  }

  std::size_t index(const Coord3& c) const noexcept {
    return c.x + dims_[0] * (c.y + std::size_t{dims_[1]} * c.z);
  }
  Coord3 coord(std::size_t index) const noexcept {
    const std::size_t plane = std::size_t{dims_[0]} * dims_[1];
    return {index % dims_[0], (index % plane) / dims_[0], index / plane};
  }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

 private:
  std::array<std::uint32_t, 3> dims_{1, 1, 1};
};

/// n x k activation samples with binary condition labels.
///
/// Construction checks the structural invariants (shape agreement, finite
/// entries, labels in {-1,+1}). Sample-count requirements for cross-validation
/// are checked separately by check_cv_ready() because row subsets of a valid
/// dataset legitimately fall below them.
class ContrastDataset {
 public:
  ContrastDataset(std::string name, Matrix samples, Labels labels, GridGeometry geometry);

  const std::string& name() const noexcept { return name_; }
  const Matrix& samples() const noexcept { return samples_; }
  const Labels& labels() const noexcept { return labels_; }
  const GridGeometry& geometry() const noexcept { return geometry_; }

  std::size_t n() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(samples_.cols()); }

  /// Number of samples carrying the given label.
  std::size_t class_count(int label) const noexcept;

  ContrastDataset renamed(std::string name) const;

  friend bool operator==(const ContrastDataset& a, const ContrastDataset& b);

 private:
  std::string name_;
  Matrix samples_;
  Labels labels_;
  GridGeometry geometry_;
};

struct TaskPair {
  ContrastDataset source;
  ContrastDataset target;
  std::string direction_name;

  TaskPair(ContrastDataset source, ContrastDataset target, std::string direction_name);
};

inline constexpr std::size_t kMinSamplesPerClass = 6;
inline constexpr std::size_t kMinSamples = 12;

/// Throws DataError unless both classes hold at least `min_per_class`
/// samples and n >= kMinSamples.
void check_cv_ready(const ContrastDataset& d, std::size_t min_per_class = kMinSamplesPerClass);

/// Columns `indices` (ascending, unique) of `d`. The result keeps d's
/// geometry when every column is kept and is a flat k' x 1 x 1 grid otherwise.
ContrastDataset restrict_columns(const ContrastDataset& d, std::span<const std::size_t> indices);

/// Rows `rows` of `d`, in the given order.
ContrastDataset select_rows(const ContrastDataset& d, std::span<const std::size_t> rows);

/// Indices of `inner` interpreted as positions inside `outer`.
IndexList compose(std::span<const std::size_t> outer, std::span<const std::size_t> inner);

/// Each row shifted to zero mean and scaled to unit variance (rows with zero
/// variance are only centred).
ContrastDataset standardize_rows(const ContrastDataset& d);

/// Maps any two distinct raw label values onto {-1,+1}, smaller value -> -1.
Labels canonical_labels(std::span<const double> raw);

// XFD1 container: "XFD1", u32 n, u32 k, u32 dims[3], n label bytes,
// n*k float64, all little-endian, samples row-major.
inline constexpr std::size_t kXfdHeaderBytes = 4 + 4 + 4 + 3 * 4;

ContrastDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const ContrastDataset& d, const std::filesystem::path& path);

/// Headerless CSV: label, then k feature columns per row.
ContrastDataset load_csv_dataset(const std::filesystem::path& path, const GridGeometry& geometry);

}  // namespace xferscope
