#include "xferscope_cli/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "xferscope/error.hpp"
#include "xferscope/serialize.hpp"
#include "xferscope/synth.hpp"

namespace xferscope::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("run config: bad value for '{}': {}", key, e.what()));
  }
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", what, text));
  }
  return v;
}

struct Task {
  ContrastDataset a;
  ContrastDataset b;
  std::optional<GroundTruth> truth;
  GridGeometry geometry;
};

Task load_tasks(const ExperimentConfig& cfg) {
  if (cfg.spec_path) {
    SyntheticSpec spec = parse_synthetic_spec(read_text_file(*cfg.spec_path));
    if (cfg.dims) spec.geometry = GridGeometry(*cfg.dims);
    spec.validate();
    SyntheticPair sp = generate_pair(spec);
    return {std::move(sp.pair.source), std::move(sp.pair.target), std::move(sp.truth), spec.geometry};
  }
  if (cfg.from_csv) {
    if (!cfg.dims) throw ConfigError("--from-csv needs grid dims (--dims X,Y,Z or \"dims\" in the config)");
    const GridGeometry g(*cfg.dims);
    ContrastDataset a = load_csv_dataset(*cfg.source_path, g);
    ContrastDataset b = load_csv_dataset(*cfg.target_path, g);
    return {std::move(a), std::move(b), std::nullopt, g};
  }
  ContrastDataset a = load_dataset(*cfg.source_path);
  ContrastDataset b = load_dataset(*cfg.target_path);
  if (cfg.dims && a.geometry() != GridGeometry(*cfg.dims)) {
    throw DimError("--dims disagrees with the geometry stored in the source file");
  }
  GridGeometry g = a.geometry();
  return {std::move(a), std::move(b), std::nullopt, g};
}

std::string curve_csv(const AccuracyCurve& curve) {
  std::ostringstream s;
  write_curve_csv(s, curve);
  return s.str();
}

void write_direction(const fs::path& dir, const DirectionResult& r, const ExperimentConfig& cfg) {
  fs::create_directories(dir);
  const ProtocolConfig& p = cfg.analysis.protocol;
  if (cfg.write_csv) {
    write_text_file(dir / "curve_inline.csv", curve_csv(r.inline_curve));
    write_text_file(dir / "curve_transfer.csv", curve_csv(r.transfer_curve));
    write_text_file(dir / "curve_selection.csv", curve_csv(r.selection_curve));
  }
  if (cfg.write_json) {
    write_text_file(dir / "comparison_transfer.json",
                    comparison_json(r.transfer_comparison, r.transfer_scale, r.transfer_area,
                                    CurveRole::Transfer, cfg.analysis.alpha));
    write_text_file(dir / "comparison_selection.json",
                    comparison_json(r.selection_comparison, r.selection_scale, r.selection_area,
                                    CurveRole::SelectionTransfer, cfg.analysis.alpha));
    write_text_file(dir / "curves_summary.json",
                    curves_summary_json({&r.inline_curve, &r.transfer_curve, &r.selection_curve}, p));
    write_text_file(dir / "selection_selected.json", selection_json(r.selected_voxels));
  }
}

std::string score_entry(const Selectivity& s) {
  return fmt::format("{{\"precision\": {:.4f}, \"recall\": {:.4f}, \"dice\": {:.4f}}}", s.precision,
                     s.recall, s.dice);
}

}  // namespace

void ExperimentConfig::validate() const {
  const bool has_pair = source_path.has_value() || target_path.has_value();
  if (has_pair == spec_path.has_value()) {
    throw ConfigError("run config needs exactly one of (\"source\" and \"target\") or \"synthetic_spec\"");
  }
  if (has_pair && !(source_path && target_path)) {
    throw ConfigError("run config needs both \"source\" and \"target\"");
  }
  if (!write_csv && !write_json) throw ConfigError("run config: \"formats\" selects no output");
  if (!(analysis.alpha > 0.0 && analysis.alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must lie in (0, 1], got {}", analysis.alpha));
  }
  analysis.protocol.validate();
}

std::array<std::uint32_t, 3> parse_dims(const std::string& text) {
  std::array<std::uint32_t, 3> dims{};
  std::size_t start = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',', start);
    if ((i < 2) == (comma == std::string::npos)) {
      throw ConfigError(fmt::format("dims '{}' must look like X,Y,Z", text));
    }
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const std::uint64_t v = parse_u64(part, "dims");
    if (v == 0 || v > 0xFFFFFFFFu) throw ConfigError(fmt::format("dims '{}' must be positive", text));
    dims[i] = static_cast<std::uint32_t>(v);
    start = comma + 1;
  }
  return dims;
}

Directions parse_directions(const std::string& text) {
  if (text == "both") return Directions::Both;
  if (text == "A→B" || text == "A->B" || text == "AtoB") return Directions::AtoB;
  if (text == "B→A" || text == "B->A" || text == "BtoA") return Directions::BtoA;
  throw ConfigError(fmt::format("unknown directions '{}' (expected A→B, B→A or both)", text));
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("XFERSCOPE_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  return static_cast<std::size_t>(parse_u64(raw, "XFERSCOPE_THREADS"));
}

ExperimentConfig parse_experiment_config(const std::string& json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("run config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw FormatError("run config must be a JSON object");
  static const std::vector<std::string> known = {"source", "target", "synthetic_spec", "from_csv",
                                                 "dims", "output_dir", "directions", "formats",
                                                 "alpha", "ttest", "protocol"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw FormatError(fmt::format("run config: unknown key '{}'", item.key()));
    }
  }

  ExperimentConfig cfg;
  if (j.contains("source")) cfg.source_path = resolve(base_dir, field<std::string>(j, "source"));
  if (j.contains("target")) cfg.target_path = resolve(base_dir, field<std::string>(j, "target"));
  if (j.contains("synthetic_spec")) {
    cfg.spec_path = resolve(base_dir, field<std::string>(j, "synthetic_spec"));
  }
  if (j.contains("from_csv")) cfg.from_csv = field<bool>(j, "from_csv");
  if (j.contains("dims")) {
    const auto d = field<std::vector<std::int64_t>>(j, "dims");
    if (d.size() != 3) throw FormatError("run config: \"dims\" needs three entries");
    cfg.dims = parse_dims(fmt::format("{},{},{}", d[0], d[1], d[2]));
  }
  if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, field<std::string>(j, "output_dir"));
  else cfg.output_dir = base_dir / "out";
  if (j.contains("directions")) cfg.directions = parse_directions(field<std::string>(j, "directions"));
  if (j.contains("formats")) {
    cfg.write_csv = cfg.write_json = false;
    for (const auto& f : field<std::vector<std::string>>(j, "formats")) {
      if (f == "csv") cfg.write_csv = true;
      else if (f == "json") cfg.write_json = true;
      else throw ConfigError(fmt::format("run config: unknown format '{}'", f));
    }
  }
  if (j.contains("alpha")) cfg.analysis.alpha = field<double>(j, "alpha");
  if (j.contains("ttest")) cfg.analysis.ttest = parse_ttest_kind(field<std::string>(j, "ttest"));
  if (j.contains("protocol")) cfg.analysis.protocol = parse_protocol_config(j.at("protocol").dump());
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& o) {
  ProtocolConfig& p = cfg.analysis.protocol;
  if (o.seed) p.seed = *o.seed;
  if (o.alpha) cfg.analysis.alpha = *o.alpha;
  if (o.n_points) p.n_points = *o.n_points;
  if (o.min_voxels) p.min_voxels = *o.min_voxels;
  if (o.classifier) p.classifier = parse_classifier_kind(*o.classifier);
  if (o.inline_selection) p.inline_selection = parse_inline_selection_mode(*o.inline_selection);
  if (o.dims) cfg.dims = parse_dims(*o.dims);
  if (o.directions) cfg.directions = parse_directions(*o.directions);
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.from_csv) cfg.from_csv = true;
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* x = dynamic_cast<const Error*>(&e)) {
    switch (x->kind()) {
      case ErrorKind::Input: return kExitInput;
      case ErrorKind::Validation: return kExitValidation;
      case ErrorKind::Numerical: return kExitNumerical;
    }
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return kExitInput;
  return kExitInternal;
}

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

int cmd_synth(const fs::path& spec_path, const fs::path& out_dir, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const SyntheticSpec spec = parse_synthetic_spec(read_text_file(spec_path));
    const SyntheticPair sp = generate_pair(spec);
    fs::create_directories(out_dir);
    save_dataset(sp.pair.source, out_dir / "source.xfd");
    save_dataset(sp.pair.target, out_dir / "target.xfd");
    write_text_file(out_dir / "truth.json", ground_truth_json(sp.truth, spec.geometry));
    out << fmt::format("wrote {} (n={}, k={}; shared mask {} voxels)\n", out_dir.string(),
                       sp.pair.source.n(), sp.pair.source.k(), sp.truth.shared_mask.size());
    return kExitOk;
  });
}

int cmd_run(const fs::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = parse_experiment_config(read_text_file(config_path),
                                                   config_path.parent_path());
    apply_overrides(cfg, overrides);
    cfg.analysis.protocol.threads = threads_from_env();
    cfg.validate();

    Task task = load_tasks(cfg);
    std::vector<std::pair<std::string, DirectionResult>> results;
    if (cfg.directions != Directions::BtoA) {
      results.emplace_back("A_to_B", analyze_direction(TaskPair(task.a, task.b, "A→B"), cfg.analysis, "A→B"));
    }
    if (cfg.directions != Directions::AtoB) {
      results.emplace_back("B_to_A", analyze_direction(TaskPair(task.b, task.a, "B→A"), cfg.analysis, "B→A"));
    }

    // All computation is done; write from this thread only.
    fs::create_directories(cfg.output_dir);
    std::vector<const DirectionResult*> rows;
    for (const auto& [dir, r] : results) {
      write_direction(cfg.output_dir / dir, r, cfg);
      rows.push_back(&r);
    }
    if (cfg.write_json) write_text_file(cfg.output_dir / "report.json", report_json(rows, cfg.analysis));
    if (task.truth) write_text_file(cfg.output_dir / "truth.json", ground_truth_json(*task.truth, task.geometry));

    for (const auto* r : rows) {
      out << fmt::format("{} ({}): transfer scale {:.2f}%, selection scale {:.2f}%{}, p-area {:.2f}\n",
                         r->direction, r->pair, r->transfer_scale.selected_percent,
                         r->selection_scale.selected_percent,
                         r->selection_scale.exhausted ? " (exhausted)" : "", r->selection_area);
    }
    return kExitOk;
  });
}

int cmd_score(const fs::path& selection_path, const fs::path& truth_path, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const VoxelSelection sel = parse_selection(read_text_file(selection_path));
    if (sel.indices.empty()) throw FormatError(fmt::format("{}: selection is empty", selection_path.string()));
    const GroundTruth truth = parse_ground_truth(read_text_file(truth_path));
    out << fmt::format("{{\"n_selected\": {}, \"fraction\": {:.4f}, \"shared\": {}, \"source\": {}, \"target\": {}}}\n",
                       sel.indices.size(), sel.fraction,
                       score_entry(selectivity_scores(sel.indices, truth.shared_mask)),
                       score_entry(selectivity_scores(sel.indices, truth.source_mask)),
                       score_entry(selectivity_scores(sel.indices, truth.target_mask)));
    return kExitOk;
  });
}

int cmd_import(const fs::path& csv_path, const std::string& dims, const fs::path& out_path,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ContrastDataset d = load_csv_dataset(csv_path, GridGeometry(parse_dims(dims)));
    save_dataset(d, out_path);
    out << fmt::format("wrote {} (n={}, k={})\n", out_path.string(), d.n(), d.k());
    return kExitOk;
  });
}

}  // namespace xferscope::cli
