#include "xferscope/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "xferscope/error.hpp"

namespace xferscope {

GridGeometry::GridGeometry(std::uint32_t nx, std::uint32_t ny, std::uint32_t nz)
    : dims_{nx, ny, nz} {
  if (nx == 0 || ny == 0 || nz == 0) {
    throw ConfigError(fmt::format("grid dims must be positive, got {}x{}x{}", nx, ny, nz));
  }
}

ContrastDataset::ContrastDataset(std::string name, Matrix samples, Labels labels,
                                 GridGeometry geometry)
    : name_(std::move(name)),
      samples_(std::move(samples)),
      labels_(std::move(labels)),
      geometry_(geometry) {
  if (samples_.cols() == 0) throw DataError("dataset has no features");
  if (static_cast<std::size_t>(samples_.rows()) != labels_.size()) {
    throw DataError(fmt::format("{} sample rows but {} labels", samples_.rows(), labels_.size()));
  }
  if (geometry_.voxel_count() != static_cast<std::size_t>(samples_.cols())) {
    throw DataError(fmt::format("geometry holds {} voxels but samples have {} columns",
                                geometry_.voxel_count(), samples_.cols()));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != -1 && labels_[i] != 1) {
      throw DataError(fmt::format("label {} at row {} is not -1/+1", labels_[i], i));
    }
  }
  for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples_.cols(); ++j) {
      if (!std::isfinite(samples_(i, j))) {
        throw DataError(fmt::format("non-finite sample value at ({}, {})", i, j));
      }
    }
  }
}

std::size_t ContrastDataset::class_count(int label) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

ContrastDataset ContrastDataset::renamed(std::string name) const {
  ContrastDataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

bool operator==(const ContrastDataset& a, const ContrastDataset& b) {
  return a.geometry_ == b.geometry_ && a.labels_ == b.labels_ &&
         a.samples_.rows() == b.samples_.rows() && a.samples_.cols() == b.samples_.cols() &&
         a.samples_ == b.samples_;
}

TaskPair::TaskPair(ContrastDataset source_, ContrastDataset target_, std::string direction)
    : source(std::move(source_)), target(std::move(target_)), direction_name(std::move(direction)) {
  if (!(source.geometry() == target.geometry())) {
    throw DimError(fmt::format("source '{}' and target '{}' have different geometries",
                               source.name(), target.name()));
  }
}

void check_cv_ready(const ContrastDataset& d, std::size_t min_per_class) {
  if (d.n() < kMinSamples) {
    throw DataError(fmt::format("dataset '{}' has {} samples, need at least {}", d.name(), d.n(),
                                kMinSamples));
  }
  for (int label : {-1, 1}) {
    const std::size_t count = d.class_count(label);
    if (count < min_per_class) {
      throw DataError(fmt::format("dataset '{}' has {} samples of class {:+d}, need at least {}",
                                  d.name(), count, label, min_per_class));
    }
  }
}

ContrastDataset restrict_columns(const ContrastDataset& d, std::span<const std::size_t> indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= d.k()) {
      throw IndexError(fmt::format("column index {} out of range for k={}", indices[i], d.k()));
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw IndexError("column indices must be strictly ascending");
    }
  }
  if (indices.empty()) throw IndexError("empty column selection");

  Matrix out(d.samples().rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = d.samples().col(static_cast<Eigen::Index>(indices[j]));
  }
  const GridGeometry geometry =
      indices.size() == d.k() ? d.geometry()
                              : GridGeometry(static_cast<std::uint32_t>(indices.size()), 1, 1);
  return ContrastDataset(d.name(), std::move(out), d.labels(), geometry);
}

ContrastDataset select_rows(const ContrastDataset& d, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), d.samples().cols());
  Labels labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= d.n()) {
      throw IndexError(fmt::format("row index {} out of range for n={}", rows[i], d.n()));
    }
    out.row(static_cast<Eigen::Index>(i)) = d.samples().row(static_cast<Eigen::Index>(rows[i]));
    labels.push_back(d.labels()[rows[i]]);
  }
  return ContrastDataset(d.name(), std::move(out), std::move(labels), d.geometry());
}

IndexList compose(std::span<const std::size_t> outer, std::span<const std::size_t> inner) {
  IndexList out;
  out.reserve(inner.size());
  for (std::size_t j : inner) {
    if (j >= outer.size()) {
      throw IndexError(fmt::format("inner index {} out of range for {} outer indices", j,
                                   outer.size()));
    }
    out.push_back(outer[j]);
  }
  return out;
}

ContrastDataset standardize_rows(const ContrastDataset& d) {
  Matrix out = d.samples();
  const double k = static_cast<double>(out.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double mean = out.row(i).sum() / k;
    out.row(i).array() -= mean;
    const double sd = std::sqrt(out.row(i).squaredNorm() / k);
    if (sd > 0.0) out.row(i) /= sd;
  }
  return ContrastDataset(d.name(), std::move(out), d.labels(), d.geometry());
}

Labels canonical_labels(std::span<const double> raw) {
  std::set<double> distinct(raw.begin(), raw.end());
  if (distinct.size() != 2) {
    throw DataError(fmt::format("expected exactly two distinct label values, found {}",
                                distinct.size()));
  }
  const double low = *distinct.begin();
  Labels out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back(v == low ? -1 : 1);
  return out;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

class ByteReader {
 public:
  explicit ByteReader(std::vector<unsigned char> data) : data_(std::move(data)) {}

  std::size_t remaining() const { return data_.size() - pos_; }

  void need(std::size_t bytes, const char* what) const {
    if (remaining() < bytes) throw FormatError(fmt::format("truncated XFD1 file while reading {}", what));
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t{data_[pos_ + b]} << (8 * b);
    pos_ += 4;
    return v;
  }
  double f64() {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{data_[pos_ + b]} << (8 * b);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  unsigned char byte() { return data_[pos_++]; }

 private:
  std::vector<unsigned char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

ContrastDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  ByteReader reader(std::move(bytes));

  reader.need(4, "magic");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(reader.byte());
  if (std::memcmp(magic, "XFD1", 4) != 0) {
    throw FormatError(fmt::format("'{}' is not an XFD1 file (bad magic)", path.string()));
  }
  const std::uint32_t n = reader.u32("n");
  const std::uint32_t k = reader.u32("k");
  std::array<std::uint32_t, 3> dims{};
  for (auto& d : dims) d = reader.u32("dims");
  if (n == 0 || k == 0 || dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
    throw FormatError("XFD1 header has a zero size field");
  }
  if (std::uint64_t{dims[0]} * dims[1] * dims[2] != k) {
    throw FormatError(fmt::format("XFD1 header dims {}x{}x{} do not multiply to k={}", dims[0],
                                  dims[1], dims[2], k));
  }
  const std::uint64_t payload = std::uint64_t{n} + std::uint64_t{n} * k * 8;
  if (reader.remaining() != payload) {
    throw FormatError(fmt::format("XFD1 payload is {} bytes, expected {}", reader.remaining(),
                                  payload));
  }

  Labels labels(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const unsigned char b = reader.byte();
    if (b > 1) throw FormatError(fmt::format("label byte {} at row {} is not 0 or 1", int{b}, i));
    labels[i] = b == 1 ? 1 : -1;
  }
  Matrix samples(n, k);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) samples(i, j) = reader.f64();
  }

  ContrastDataset d(path.stem().string(), std::move(samples), std::move(labels),
                    GridGeometry(dims));
  check_cv_ready(d);
  return d;
}

void save_dataset(const ContrastDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write("XFD1", 4);
  put_u32(out, static_cast<std::uint32_t>(d.n()));
  put_u32(out, static_cast<std::uint32_t>(d.k()));
  for (std::uint32_t dim : d.geometry().dims()) put_u32(out, dim);
  for (int label : d.labels()) out.put(label == 1 ? '\x01' : '\x00');
  const Matrix& x = d.samples();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) put_f64(out, x(i, j));
  }
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

ContrastDataset load_csv_dataset(const std::filesystem::path& path, const GridGeometry& geometry) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));

  std::vector<double> raw_labels;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  const std::size_t k = geometry.voxel_count();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::size_t column = 0;
    while (std::getline(fields, cell, ',')) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(),
                                      line_no, cell));
      }
      (column == 0 ? raw_labels : values).push_back(v);
      ++column;
    }
    if (width == 0) width = column;
    if (column != width) {
      throw FormatError(fmt::format("{}:{}: expected {} columns like the first row, got {}",
                                    path.string(), line_no, width, column));
    }
  }
  if (raw_labels.empty()) throw FormatError(fmt::format("'{}' contains no rows", path.string()));
  if (width != k + 1) {
    throw DimError(fmt::format("'{}' has {} feature columns but dims give k={}", path.string(),
                               width - 1, k));
  }

  const auto n = static_cast<Eigen::Index>(raw_labels.size());
  Matrix samples = Eigen::Map<Matrix>(values.data(), n, static_cast<Eigen::Index>(k));
  ContrastDataset d(path.stem().string(), std::move(samples), canonical_labels(raw_labels),
                    geometry);
  check_cv_ready(d);
  return d;
}

}  // namespace xferscope
