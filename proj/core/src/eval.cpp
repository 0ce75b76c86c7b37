#include "xferscope/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "xferscope/error.hpp"
#include "xferscope/kernel_solvers.hpp"

namespace xferscope {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

IndexList class_members(std::span<const int> labels, int label) {
  IndexList out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<double> default_C_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(splitmix(seed) ^ stream);
}

IndexList FoldPlan::test_indices(std::size_t fold) const {
  IndexList out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

IndexList FoldPlan::train_indices(std::size_t fold) const {
  IndexList out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw CvError(fmt::format("cross-validation needs at least 2 folds, got {}", n_folds));
  FoldPlan plan{labels.size(), n_folds, seed, std::vector<std::size_t>(labels.size(), 0)};
  std::size_t dealt = 0;
  for (int label : {-1, 1}) {
    IndexList members = class_members(labels, label);
    if (members.size() < n_folds) {
      throw CvError(fmt::format("class {:+d} has {} samples, fewer than {} folds", label,
                                members.size(), n_folds));
    }
    std::mt19937_64 rng(derive_seed(seed, label > 0 ? 2 : 1));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) plan.assignments[idx] = dealt++ % n_folds;
  }
  return plan;
}

SubsamplePlan make_subsample_plan(std::span<const int> labels, std::size_t n_subsamples,
                                  double keep_fraction, std::uint64_t seed) {
  if (n_subsamples == 0) throw CvError("need at least one subsample");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw CvError(fmt::format("keep fraction must lie in (0, 1], got {}", keep_fraction));
  }
  SubsamplePlan plan{n_subsamples, keep_fraction, seed, {}};
  const IndexList members[2] = {class_members(labels, -1), class_members(labels, 1)};
  std::size_t keep[2];
  for (int g = 0; g < 2; ++g) {
    keep[g] = static_cast<std::size_t>(
        std::floor(keep_fraction * static_cast<double>(members[g].size()) + 0.5));
    if (keep[g] < 2) {
      throw CvError(fmt::format("keep fraction {} leaves {} samples of class {:+d}; need 2",
                                keep_fraction, keep[g], g == 0 ? -1 : 1));
    }
  }
  for (std::size_t s = 0; s < n_subsamples; ++s) {
    std::mt19937_64 rng(derive_seed(seed, 100 + s));
    IndexList chosen;
    for (int g = 0; g < 2; ++g) {
      IndexList pool = members[g];
      std::shuffle(pool.begin(), pool.end(), rng);
      chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep[g]));
    }
    std::sort(chosen.begin(), chosen.end());
    plan.index_sets.push_back(std::move(chosen));
  }
  return plan;
}

std::vector<ContrastDataset> subsample_source(const ContrastDataset& d, const SubsamplePlan& plan) {
  std::vector<ContrastDataset> out;
  out.reserve(plan.index_sets.size());
  for (const IndexList& rows : plan.index_sets) out.push_back(select_rows(d, rows));
  return out;
}

Matrix gather(const Matrix& gram, std::span<const std::size_t> rows,
              std::span<const std::size_t> cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          gram(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

CSelection select_C_gram(const Matrix& gram, std::span<const int> y, ClassifierKind kind,
                         std::span<const double> C_grid, std::size_t n_folds, std::uint64_t seed,
                         const SolverOptions& options) {
  if (C_grid.empty()) throw CvError("empty C grid");
  for (double C : C_grid) {
    if (!(C > 0.0)) throw CvError(fmt::format("C grid entries must be positive, got {}", C));
  }
  require_both_classes(y);
  CSelection result;
  if (C_grid.size() == 1) {
    result.C = C_grid[0];
    return result;
  }

  std::size_t smallest = y.size();
  for (int label : {-1, 1}) {
    smallest = std::min(smallest, static_cast<std::size_t>(std::count(y.begin(), y.end(), label)));
  }
  result.inner_folds = std::min(n_folds, smallest);
  const FoldPlan plan = stratified_kfold(y, result.inner_folds, seed);

  struct Split {
    IndexList train, test;
    Matrix train_gram, cross;
    Labels train_y, test_y;
  };
  std::vector<Split> splits(result.inner_folds);
  for (std::size_t f = 0; f < result.inner_folds; ++f) {
    Split& s = splits[f];
    s.train = plan.train_indices(f);
    s.test = plan.test_indices(f);
    s.train_gram = gather(gram, s.train, s.train);
    s.cross = gather(gram, s.test, s.train);
    for (std::size_t i : s.train) s.train_y.push_back(y[i]);
    for (std::size_t i : s.test) s.test_y.push_back(y[i]);
  }

  double best = -1.0;
  for (double C : C_grid) {
    double total = 0.0;
    for (const Split& s : splits) {
      const KernelModel model = solve_gram(kind, s.train_gram, s.train_y, C, options);
      total += accuracy(predict_gram(model, s.cross), s.test_y);
    }
    const double mean = total / static_cast<double>(splits.size());
    result.mean_accuracy.push_back(mean);
    if (mean > best || (mean == best && C < result.C)) {
      best = mean;
      result.C = C;
    }
  }
  return result;
}

CSelection nested_select_C(const Matrix& x, std::span<const int> y, ClassifierKind kind,
                           std::span<const double> C_grid, std::size_t n_folds,
                           std::uint64_t seed, const SolverOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DimError(fmt::format("{} rows but {} labels", x.rows(), y.size()));
  }
  return select_C_gram(x * x.transpose(), y, kind, C_grid, n_folds, seed, options);
}

}  // namespace xferscope
