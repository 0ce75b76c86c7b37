#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xferscope/experiment.hpp"
#include "xferscope/synth.hpp"

namespace xferscope {

// JSON and CSV forms of the artifact's files. Malformed text raises
// FormatError, out-of-range values ConfigError, missing files IoError.

std::string read_text_file(const std::filesystem::path& path);
/// Writes `text` to `path`, replacing it. Throws IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Synthetic spec: keys mirror SyntheticSpec ("geometry" is [x, y, z]).
SyntheticSpec parse_synthetic_spec(std::string_view json_text);
std::string synthetic_spec_json(const SyntheticSpec& spec);

// Ground truth: {"dims": [...], "shared_mask": [...], "source_mask": [...], "target_mask": [...]}.
std::string ground_truth_json(const GroundTruth& truth, const GridGeometry& geometry);
GroundTruth parse_ground_truth(std::string_view json_text);

// Voxel selection: {"fraction": f, "indices": [...]}.
std::string selection_json(const VoxelSelection& selection);
VoxelSelection parse_selection(std::string_view json_text);

// Protocol settings; keys are the ProtocolConfig field names, enums as the
// CLI spells them ("svc", "foldwise", ...). Missing keys keep defaults.
ProtocolConfig parse_protocol_config(std::string_view json_text);
std::string protocol_config_json(const ProtocolConfig& cfg);

/// Long-format curve table: role,fraction,replicate_id,accuracy.
void write_curve_csv(std::ostream& out, const AccuracyCurve& curve);

/// {"role", "fractions", "means", "config", "seed"} for each curve.
std::string curves_summary_json(const std::vector<const AccuracyCurve*>& curves,
                                const ProtocolConfig& cfg);

std::string comparison_json(const CurveComparison& cmp, const ScaleDecision& decision,
                            double area, CurveRole candidate, double alpha);

/// One summary row per directed pair:
/// {pair, direction, method, selected_percent, exhausted, area_under_p_curve,
///  alpha, config, seed}, where the per-method fields are objects keyed by
/// "transfer" and "selection". Percentages and areas carry two decimals.
std::string report_json(const std::vector<const DirectionResult*>& rows,
                        const AnalysisOptions& options);

std::string_view to_string(TTestKind kind) noexcept;
TTestKind parse_ttest_kind(std::string_view text);

}  // namespace xferscope
