// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "xferscope/experiment.hpp"
#include "xferscope/linmodel.hpp"
#include "xferscope/parallel.hpp"
#include "xferscope/serialize.hpp"
#include "xferscope/stats.hpp"
#include "xferscope_cli/commands.hpp"

namespace fs = std::filesystem;
namespace xs = xferscope;
namespace xt = xferscope::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("xferscope_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

xs::cli::ExperimentConfig default_run() {
  const fs::path path = xt::source_dir() / "configs" / "default_run.json";
  return xs::cli::parse_experiment_config(xs::read_text_file(path), path.parent_path());
}

xs::TaskPair default_pair() {
  const auto cfg = default_run();
  const auto spec = xs::parse_synthetic_spec(xs::read_text_file(*cfg.spec_path));
  return xs::generate_pair(spec).pair;
}

xs::TaskPair reversed(const xs::TaskPair& p) {
  return xs::TaskPair(p.target, p.source, p.target.name() + "→" + p.source.name());
}

// 1: stats against independent oracles
Outcome stats_oracles() {
  std::mt19937_64 rng(101);
  double worst_f = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng() % 47, k = 1 + rng() % 200;
    const xs::Matrix x = xt::random_matrix(n, k, rng);
    xs::Labels y = xt::balanced_labels(n);
    std::shuffle(y.begin(), y.end(), rng);
    const auto f = xs::anova_f(x, y);
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = x(i, j);
      const double oracle = xt::brute_force_f(col, y);
      worst_f = std::max(worst_f, std::abs(f[j] - oracle) / std::max(std::abs(oracle), 1e-300));
    }
  }

  double worst_t = 0;
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(3 + rng() % 20), b(3 + rng() % 20);
    const double shift = normal(rng), scale = 0.2 + std::abs(normal(rng));
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = shift + scale * normal(rng);
    const auto r = xs::welch_t(a, b);
    const auto o = xt::scalar_welch(a, b);
    worst_t = std::max({worst_t, std::abs(r.t_stat - o.t) / (1 + std::abs(o.t)),
                        std::abs(r.dof - o.dof) / (1 + o.dof), std::abs(r.p_value - o.p)});
  }

  const double cauchy = std::abs(xs::t_sf(1.0, 1.0) - 0.25);
  double worst_sf = 0;
  std::uniform_real_distribution<double> tu(-6.0, 6.0), du(0.5, 60.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double t = tu(rng), dof = du(rng);
    worst_sf = std::max(worst_sf, std::abs(xs::t_sf(t, dof) - xt::t_sf_quadrature(t, dof)));
  }

  Outcome o;
  o.pass = worst_f <= 1e-10 && worst_t <= 1e-8 && cauchy <= 1e-9 && worst_sf <= 1e-8;
  o.detail = fmt::format("F rel err {:.2e}, Welch err {:.2e}, |t_sf(1,1)-0.25| {:.2e}, quadrature err {:.2e}",
                         worst_f, worst_t, cauchy, worst_sf);
  return o;
}

// 2: solver correctness
Outcome optimizers() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal;
  const std::size_t n = 40, k = 8;
  const xs::Matrix x = xt::random_matrix(n, k, rng);
  xs::Labels y = xt::balanced_labels(n);
  double worst_grad = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double C = std::pow(10.0, -2.0 + 4.0 * double(rep) / 19.0);
    std::vector<double> point(k + 1);
    for (auto& v : point) v = normal(rng);
    const auto objective = [&](const std::vector<double>& p) {
      return xs::logreg_objective(x, y, C, Eigen::Map<const xs::Vector>(p.data(), k), p[k]);
    };
    const auto fd = xt::central_gradient(objective, point, 1e-5);
    const auto g = xs::logreg_gradient(x, y, C, Eigen::Map<const xs::Vector>(point.data(), k), point[k]);
    double num = 0, den = 0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double analytic = j < k ? g.weights[j] : g.intercept;
      num += (analytic - fd[j]) * (analytic - fd[j]);
      den += fd[j] * fd[j];
    }
    worst_grad = std::max(worst_grad, std::sqrt(num / den));
  }

  // duality gap with the dual objective recomputed from the returned multipliers
  double worst_gap = 0;
  for (double C : {0.01, 1.0, 100.0}) {
    const xs::Matrix xn = xt::random_matrix(60, 200, rng);
    const xs::Labels yn = xt::balanced_labels(60);
    xs::FitDiagnostics diag;
    const auto m = xs::fit_linear_svc(xn, yn, C, {}, &diag);
    const double primal = xs::svc_primal_objective(xn, yn, C, m.weights, m.intercept);
    xs::Vector v = xs::Vector::Zero(201);
    double sum_alpha = 0;
    for (std::size_t i = 0; i < 60; ++i) {
      v.head(200) += diag.dual[i] * yn[i] * xn.row(i).transpose();
      v[200] += diag.dual[i] * yn[i];
      sum_alpha += diag.dual[i];
    }
    const double dual = sum_alpha - 0.5 * v.squaredNorm();
    worst_gap = std::max(worst_gap, (primal - dual) / (1.0 + std::abs(primal)));
  }

  auto [xsep, ysep] = xt::separable_data(100, 10, 0.5, rng);
  double worst_acc = 1.0;
  for (auto kind : {xs::ClassifierKind::LinearSVC, xs::ClassifierKind::LogisticL2}) {
    const auto m = xs::fit(kind, xsep, ysep, 1.0);
    worst_acc = std::min(worst_acc, xs::accuracy(xs::predict(m, xsep), ysep));
  }

  Outcome o;
  o.pass = worst_grad <= 1e-5 && worst_gap <= 1e-3 && worst_acc >= 0.99;
  o.detail = fmt::format("gradient rel err {:.2e}, gap/(1+|P|) {:.2e}, separable accuracy {:.3f}",
                         worst_grad, worst_gap, worst_acc);
  return o;
}

// 3: SVC and logreg curves on the default pair
Outcome classifier_agreement() {
  const auto run = default_run();
  const auto pair = default_pair();
  double worst = 0;
  std::string where;
  for (const auto& p : {pair, reversed(pair)}) {
    auto svc = run.analysis;
    svc.protocol.classifier = xs::ClassifierKind::LinearSVC;
    auto lr = run.analysis;
    lr.protocol.classifier = xs::ClassifierKind::LogisticL2;
    const auto a = xs::analyze_direction(p, svc, p.direction_name);
    const auto b = xs::analyze_direction(p, lr, p.direction_name);
    const std::pair<const xs::AccuracyCurve*, const xs::AccuracyCurve*> curves[] = {
        {&a.inline_curve, &b.inline_curve},
        {&a.transfer_curve, &b.transfer_curve},
        {&a.selection_curve, &b.selection_curve}};
    for (const auto& [ca, cb] : curves) {
      for (Eigen::Index i = 0; i < ca->mean.size(); ++i) {
        const double d = std::abs(ca->mean(i) - cb->mean(i));
        if (d > worst) {
          worst = d;
          where = fmt::format("{} {} at {:.4f}", p.direction_name, xs::to_string(ca->role),
                              ca->grid.fractions[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  return {worst <= 0.03, fmt::format("max |SVC - logreg| = {:.4f} ({})", worst, where)};
}

// 4: convergence and spatial selectivity on the default pair
Outcome converging_curves() {
  const auto run = default_run();
  const auto spec = xs::parse_synthetic_spec(xs::read_text_file(*run.spec_path));
  const auto gen = xs::generate_pair(spec);
  const auto r = xs::analyze_direction(gen.pair, run.analysis, "A→B");
  const double p_full = r.selection_comparison.p_values.back();
  const auto& d = r.selection_scale;
  const double dice = xs::selectivity_scores(r.selected_voxels.indices, gen.truth.shared_mask).dice;
  Outcome o;
  o.pass = p_full >= 0.05 && d.selected_fraction < 0.5 && !d.exhausted && dice >= 0.5;
  o.detail = fmt::format("p at 1.0 = {:.3f}, selected fraction {:.4f}{}, Dice vs shared {:.3f}", p_full,
                         d.selected_fraction, d.exhausted ? " (exhausted)" : "", dice);
  return o;
}

// 5: transfer stays below inline on an asymmetric pair
Outcome nonconverging_curves() {
  const auto base = default_run().analysis;
  std::vector<std::vector<double>> diffs;
  std::vector<double> fractions;
  for (std::uint64_t sd = 1; sd <= 5; ++sd) {
    auto opts = base;
    opts.protocol.seed = sd;
    const auto r = xs::analyze_direction(xs::generate_pair(xt::asymmetric_spec(500 + sd)).pair, opts, "A→B");
    diffs.emplace_back(r.transfer_comparison.mean_diff);
    fractions.push_back(r.transfer_scale.selected_fraction);
  }
  double worst = 1.0;
  for (std::size_t i = 0; i < diffs.front().size(); ++i) {
    std::vector<double> at;
    for (const auto& d : diffs) at.push_back(d[i]);
    worst = std::min(worst, median(at));
  }
  const double med_fraction = median(fractions);
  std::string list;
  for (double f : fractions) list += fmt::format("{}{:.3f}", list.empty() ? "" : ",", f);
  return {worst >= 0.05 && med_fraction >= 0.5,
          fmt::format("min over grid of median(inline - transfer) = {:.3f}; median transfer scale {:.3f} [{}]",
                      worst, med_fraction, list)};
}

// 6: A is closer to B than to C
Outcome similarity_ordering() {
  const auto base = default_run().analysis;
  int wins = 0;
  std::string list;
  for (std::uint64_t sd = 1; sd <= 5; ++sd) {
    auto opts = base;
    opts.protocol.seed = sd;
    const auto t = xt::three_tasks(900 + sd, 0.4);
    const double ab = xs::analyze_direction(xs::TaskPair(t.a, t.b, "A→B"), opts, "A→B").selection_area;
    const double ac = xs::analyze_direction(xs::TaskPair(t.a, t.c, "A→C"), opts, "A→C").selection_area;
    wins += ab > ac;
    list += fmt::format("{}{:.2f}/{:.2f}", list.empty() ? "" : " ", ab, ac);
  }
  return {wins >= 4, fmt::format("area(A→B) > area(A→C) in {}/5 seeds [{}]", wins, list)};
}

// 7: the two directions pick different scales
Outcome asymmetry() {
  const auto base = default_run().analysis;
  int differ = 0;
  std::string list;
  for (std::uint64_t sd = 1; sd <= 5; ++sd) {
    auto opts = base;
    opts.protocol.seed = sd;
    const auto pair = xs::generate_pair(xt::lopsided_spec(700 + sd)).pair;
    const double ab = xs::analyze_direction(pair, opts, "A→B").selection_scale.selected_fraction;
    const double ba = xs::analyze_direction(reversed(pair), opts, "B→A").selection_scale.selected_fraction;
    differ += ab != ba;
    list += fmt::format("{}{:.3f}/{:.3f}", list.empty() ? "" : " ", ab, ba);
  }
  return {differ >= 3, fmt::format("A→B and B→A scales differ in {}/5 seeds [{}]", differ, list)};
}

// 8: permuted target labels give chance curves
Outcome chance_level() {
  const auto run = default_run();
  const auto pair = default_pair();
  xs::Labels y = pair.target.labels();
  std::mt19937_64 rng(808);
  std::shuffle(y.begin(), y.end(), rng);
  const xs::ContrastDataset permuted(pair.target.name(), pair.target.samples(), y, pair.target.geometry());
  const auto r = xs::analyze_direction(xs::TaskPair(pair.source, permuted, "A→B*"), run.analysis, "A→B*");
  const auto [lo, hi] = xt::binomial_chance_interval(permuted.n(), 0.99);
  int outside = 0, checks = 0;
  double min_mean = 1, max_mean = 0;
  for (const auto* c : {&r.inline_curve, &r.transfer_curve, &r.selection_curve}) {
    for (Eigen::Index i = 0; i < c->mean.size(); ++i) {
      ++checks;
      outside += c->mean(i) < lo || c->mean(i) > hi;
      min_mean = std::min(min_mean, c->mean(i));
      max_mean = std::max(max_mean, c->mean(i));
    }
  }
  return {outside == 0, fmt::format("{} of {} means outside [{:.4f}, {:.4f}]; observed range [{:.4f}, {:.4f}]",
                                    outside, checks, lo, hi, min_mean, max_mean)};
}

std::string slurp_tree(const fs::path& root, std::vector<std::string>& names) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    names.push_back(fs::relative(f, root).string());
    all += names.back() + '\n' + xs::read_text_file(f);
  }
  return all;
}

int run_cli(const fs::path& out_dir, const char* threads) {
  ::setenv("XFERSCOPE_THREADS", threads, 1);
  xs::cli::RunOverrides o;
  o.output_dir = out_dir;
  std::ostringstream out, err;
  const int code = xs::cli::cmd_run(xt::source_dir() / "configs" / "default_run.json", o, out, err);
  ::unsetenv("XFERSCOPE_THREADS");
  return code;
}

// 9: byte-identical outputs across runs and thread counts
Outcome determinism() {
  const fs::path dir = scratch("determinism");
  const int c1 = run_cli(dir / "one", "1");
  const int c2 = run_cli(dir / "again", "1");
  const int c4 = run_cli(dir / "four", "4");
  if (c1 || c2 || c4) return {false, fmt::format("cmd_run exit codes {}, {}, {}", c1, c2, c4)};
  std::vector<std::string> n1, n2, n4;
  const auto a = slurp_tree(dir / "one", n1);
  const auto b = slurp_tree(dir / "again", n2);
  const auto c = slurp_tree(dir / "four", n4);
  fs::remove_all(dir);
  return {a == b && a == c && n1.size() >= 15,
          fmt::format("{} files compared, same-seed rerun {}, 1 vs 4 threads {}", n1.size(),
                      a == b ? "identical" : "DIFFERENT", a == c ? "identical" : "DIFFERENT")};
}

// 10: full default experiment wall time
Outcome performance() {
  const fs::path dir = scratch("performance");
  const auto start = std::chrono::steady_clock::now();
  const int code = run_cli(dir, "0");
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool report = fs::exists(dir / "report.json");
  fs::remove_all(dir);
  return {code == 0 && report && s < 300.0,
          fmt::format("default experiment (k=10000, both directions) in {:.1f} s, {} hardware threads", s,
                      xs::resolve_threads(0))};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "stats oracle equivalence", 10, stats_oracles},
      {2, "optimizer correctness", 10, optimizers},
      {3, "SVC/logreg agreement", 120, classifier_agreement},
      {4, "converging curves on a shared blob", 120, converging_curves},
      {5, "non-converging transfer curves", 180, nonconverging_curves},
      {6, "similarity ordering", 240, similarity_ordering},
      {7, "asymmetry", 180, asymmetry},
      {8, "chance level under permuted labels", 120, chance_level},
      {9, "determinism", 240, determinism},
      {10, "desk-scale performance", 300, performance},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = s <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    fmt::print("criterion {:>2} {}: {} ({:.1f} s of {:.0f} s) {}{}\n", c.id, c.name, pass ? "PASS" : "FAIL", s,
               c.budget_s, o.detail, in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
