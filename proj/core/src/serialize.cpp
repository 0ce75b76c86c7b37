#include "xferscope/serialize.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "xferscope/error.hpp"

namespace xferscope {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("{} is not valid JSON: {}", what, e.what()));
  }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const char* what) {
  if (!j.is_object()) throw FormatError(fmt::format("{} must be a JSON object", what));
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view key : allowed) known = known || key == item.key();
    if (!known) throw FormatError(fmt::format("{}: unknown key '{}'", what, item.key()));
  }
}

template <typename T>
T get_as(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: bad value for '{}': {}", what, key, e.what()));
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const char* what) {
  if (j.contains(key)) out = get_as<T>(j, key, what);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

GridGeometry geometry_from(const json& j, const char* key, const char* what) {
  const auto dims = get_as<std::vector<std::int64_t>>(j, key, what);
  if (dims.size() != 3) throw FormatError(fmt::format("{}: '{}' needs three entries", what, key));
  for (auto d : dims) {
    if (d <= 0 || d > 0xFFFFFFFFLL) throw ConfigError(fmt::format("{}: dims must be positive", what));
  }
  return GridGeometry(static_cast<std::uint32_t>(dims[0]), static_cast<std::uint32_t>(dims[1]),
                      static_cast<std::uint32_t>(dims[2]));
}

std::vector<BlobSpec> blobs_from(const json& j, const char* key) {
  std::vector<BlobSpec> out;
  if (!j.contains(key)) return out;
  const json& list = j.at(key);
  if (!list.is_array()) throw FormatError(fmt::format("synthetic spec: '{}' must be an array", key));
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string what = fmt::format("synthetic spec {}[{}]", key, i);
    const json& b = list[i];
    reject_unknown(b, {"center", "radius", "amplitude"}, what.c_str());
    BlobSpec blob;
    const auto center = get_as<std::vector<double>>(b, "center", what.c_str());
    if (center.size() != 3) throw FormatError(fmt::format("{}: center needs three coordinates", what));
    blob.center = {center[0], center[1], center[2]};
    read_opt(b, "radius", blob.radius, what.c_str());
    read_opt(b, "amplitude", blob.amplitude, what.c_str());
    out.push_back(blob);
  }
  return out;
}

json blobs_to(const std::vector<BlobSpec>& blobs) {
  json out = json::array();
  for (const BlobSpec& b : blobs) {
    out.push_back({{"center", {b.center[0], b.center[1], b.center[2]}},
                   {"radius", b.radius},
                   {"amplitude", b.amplitude}});
  }
  return out;
}

IndexList indices_from(const json& j, const char* key, const char* what) {
  const auto raw = get_as<std::vector<std::int64_t>>(j, key, what);
  IndexList out;
  out.reserve(raw.size());
  for (auto v : raw) {
    if (v < 0) throw FormatError(fmt::format("{}: negative index in '{}'", what, key));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

json protocol_to(const ProtocolConfig& cfg) {
  return {{"classifier", to_string(cfg.classifier)},
          {"C_grid", cfg.C_grid},
          {"n_folds", cfg.n_folds},
          {"n_subsamples", cfg.n_subsamples},
          {"subsample_fraction", cfg.subsample_fraction},
          {"n_points", cfg.n_points},
          {"min_voxels", cfg.min_voxels},
          {"seed", cfg.seed},
          {"inline_selection", to_string(cfg.inline_selection)},
          {"standardize_samples", cfg.standardize_samples}};
}

json decision_to(const ScaleDecision& d) {
  return {{"method", to_string(d.method)},
          {"grid_index", d.grid_index},
          {"selected_fraction", d.selected_fraction},
          {"selected_percent", d.selected_percent},
          {"exhausted", d.exhausted}};
}

}  // namespace

std::string_view to_string(TTestKind kind) noexcept {
  return kind == TTestKind::Welch ? "welch" : "student";
}

TTestKind parse_ttest_kind(std::string_view text) {
  if (text == "welch") return TTestKind::Welch;
  if (text == "student") return TTestKind::Student;
  throw ConfigError(fmt::format("unknown t-test '{}' (expected welch or student)", text));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text) {
  const char* what = "synthetic spec";
  const json j = parse(json_text, what);
  reject_unknown(j,
                 {"geometry", "n_per_class", "shared_blobs", "source_only_blobs",
                  "target_only_blobs", "noise_sigma", "smoothing_fwhm", "seed", "source_name",
                  "target_name"},
                 what);
  SyntheticSpec spec;
  if (j.contains("geometry")) spec.geometry = geometry_from(j, "geometry", what);
  read_opt(j, "n_per_class", spec.n_per_class, what);
  spec.shared_blobs = blobs_from(j, "shared_blobs");
  spec.source_only_blobs = blobs_from(j, "source_only_blobs");
  spec.target_only_blobs = blobs_from(j, "target_only_blobs");
  read_opt(j, "noise_sigma", spec.noise_sigma, what);
  read_opt(j, "smoothing_fwhm", spec.smoothing_fwhm, what);
  read_opt(j, "seed", spec.seed, what);
  read_opt(j, "source_name", spec.source_name, what);
  read_opt(j, "target_name", spec.target_name, what);
  spec.validate();
  return spec;
}

std::string synthetic_spec_json(const SyntheticSpec& spec) {
  const auto& d = spec.geometry.dims();
  const json j = {{"geometry", {d[0], d[1], d[2]}},
                  {"n_per_class", spec.n_per_class},
                  {"shared_blobs", blobs_to(spec.shared_blobs)},
                  {"source_only_blobs", blobs_to(spec.source_only_blobs)},
                  {"target_only_blobs", blobs_to(spec.target_only_blobs)},
                  {"noise_sigma", spec.noise_sigma},
                  {"smoothing_fwhm", spec.smoothing_fwhm},
                  {"seed", spec.seed},
                  {"source_name", spec.source_name},
                  {"target_name", spec.target_name}};
  return j.dump(2) + "\n";
}

std::string ground_truth_json(const GroundTruth& truth, const GridGeometry& geometry) {
  const auto& d = geometry.dims();
  const json j = {{"dims", {d[0], d[1], d[2]}},
                  {"shared_mask", truth.shared_mask},
                  {"source_mask", truth.source_mask},
                  {"target_mask", truth.target_mask}};
  return j.dump() + "\n";
}

GroundTruth parse_ground_truth(std::string_view json_text) {
  const char* what = "ground truth";
  const json j = parse(json_text, what);
  reject_unknown(j, {"dims", "shared_mask", "source_mask", "target_mask"}, what);
  GroundTruth truth;
  truth.shared_mask = indices_from(j, "shared_mask", what);
  truth.source_mask = indices_from(j, "source_mask", what);
  truth.target_mask = indices_from(j, "target_mask", what);
  return truth;
}

std::string selection_json(const VoxelSelection& selection) {
  const json j = {{"fraction", selection.fraction}, {"indices", selection.indices}};
  return j.dump() + "\n";
}

VoxelSelection parse_selection(std::string_view json_text) {
  const char* what = "selection";
  const json j = parse(json_text, what);
  reject_unknown(j, {"fraction", "indices"}, what);
  VoxelSelection sel;
  read_opt(j, "fraction", sel.fraction, what);
  sel.indices = indices_from(j, "indices", what);
  return sel;
}

ProtocolConfig parse_protocol_config(std::string_view json_text) {
  const char* what = "protocol config";
  const json j = parse(json_text, what);
  reject_unknown(j,
                 {"classifier", "C_grid", "n_folds", "n_subsamples", "subsample_fraction",
                  "n_points", "min_voxels", "seed", "inline_selection", "standardize_samples"},
                 what);
  ProtocolConfig cfg;
  if (j.contains("classifier")) cfg.classifier = parse_classifier_kind(get_as<std::string>(j, "classifier", what));
  read_opt(j, "C_grid", cfg.C_grid, what);
  read_opt(j, "n_folds", cfg.n_folds, what);
  read_opt(j, "n_subsamples", cfg.n_subsamples, what);
  read_opt(j, "subsample_fraction", cfg.subsample_fraction, what);
  read_opt(j, "n_points", cfg.n_points, what);
  read_opt(j, "min_voxels", cfg.min_voxels, what);
  read_opt(j, "seed", cfg.seed, what);
  if (j.contains("inline_selection")) {
    cfg.inline_selection = parse_inline_selection_mode(get_as<std::string>(j, "inline_selection", what));
  }
  read_opt(j, "standardize_samples", cfg.standardize_samples, what);
  cfg.validate();
  return cfg;
}

std::string protocol_config_json(const ProtocolConfig& cfg) { return protocol_to(cfg).dump(2) + "\n"; }

void write_curve_csv(std::ostream& out, const AccuracyCurve& curve) {
  out << "role,fraction,replicate_id,accuracy\n";
  const std::string_view role = to_string(curve.role);
  for (Eigen::Index p = 0; p < curve.replicates.rows(); ++p) {
    for (Eigen::Index r = 0; r < curve.replicates.cols(); ++r) {
      out << fmt::format("{},{:.17g},{},{:.17g}\n", role, curve.grid.fractions[static_cast<std::size_t>(p)], r,
                         curve.replicates(p, r));
    }
  }
}

std::string curves_summary_json(const std::vector<const AccuracyCurve*>& curves,
                                const ProtocolConfig& cfg) {
  json list = json::array();
  for (const AccuracyCurve* c : curves) {
    std::vector<double> means(c->mean.data(), c->mean.data() + c->mean.size());
    list.push_back({{"role", to_string(c->role)},
                    {"fractions", c->grid.fractions},
                    {"means", means},
                    {"replicates", c->replicates.cols()}});
  }
  const json j = {{"curves", list}, {"config", protocol_to(cfg)}, {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

std::string comparison_json(const CurveComparison& cmp, const ScaleDecision& decision,
                            double area, CurveRole candidate, double alpha) {
  json t_stats = json::array();
  for (double t : cmp.t_stats) {
    if (std::isfinite(t)) {
      t_stats.push_back(t);
    } else {
      t_stats.push_back(t > 0 ? "inf" : "-inf");
    }
  }
  const json j = {{"reference", to_string(CurveRole::Inline)},
                  {"candidate", to_string(candidate)},
                  {"fractions", cmp.fractions},
                  {"t_stats", t_stats},
                  {"dof", cmp.dof},
                  {"p_values", cmp.p_values},
                  {"mean_diff", cmp.mean_diff},
                  {"degenerate", cmp.degenerate},
                  {"alpha", alpha},
                  {"decision", decision_to(decision)},
                  {"area_under_p_curve", area}};
  return j.dump(2) + "\n";
}

std::string report_json(const std::vector<const DirectionResult*>& rows,
                        const AnalysisOptions& options) {
  json list = json::array();
  for (const DirectionResult* r : rows) {
    list.push_back(
        {{"pair", r->pair},
         {"direction", r->direction},
         {"method", {{"transfer", to_string(r->transfer_scale.method)},
                     {"selection", to_string(r->selection_scale.method)}}},
         {"selected_percent", {{"transfer", round2(r->transfer_scale.selected_percent)},
                               {"selection", round2(r->selection_scale.selected_percent)}}},
         {"exhausted", {{"transfer", r->transfer_scale.exhausted},
                        {"selection", r->selection_scale.exhausted}}},
         {"area_under_p_curve", {{"transfer", round2(r->transfer_area)},
                                 {"selection", round2(r->selection_area)}}},
         {"alpha", options.alpha},
         {"config", protocol_to(options.protocol)},
         {"seed", options.protocol.seed}});
  }
  const json j = {{"schema", "xferscope-report-1"},
                  {"ttest", to_string(options.ttest)},
                  {"rows", list}};
  return j.dump(2) + "\n";
}

}  // namespace xferscope
