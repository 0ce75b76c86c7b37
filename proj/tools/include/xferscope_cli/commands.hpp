#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xferscope/experiment.hpp"

namespace xferscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitInternal = 1;

enum class Directions { AtoB, BtoA, Both };

/// The run config file. Relative paths resolve against the config's folder.
struct ExperimentConfig {
  std::optional<std::filesystem::path> source_path;
  std::optional<std::filesystem::path> target_path;
  std::optional<std::filesystem::path> spec_path;
  bool from_csv = false;
  std::optional<std::array<std::uint32_t, 3>> dims;
  std::filesystem::path output_dir = "out";
  Directions directions = Directions::Both;
  bool write_csv = true;
  bool write_json = true;
  AnalysisOptions analysis;

  /// Throws ConfigError unless exactly one of (pair paths, spec path) is set.
  void validate() const;
};

/// Flag overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::size_t> n_points;
  std::optional<std::size_t> min_voxels;
  std::optional<std::string> classifier;
  std::optional<std::string> inline_selection;
  std::optional<std::string> dims;  // "X,Y,Z"
  std::optional<std::string> directions;
  std::optional<std::filesystem::path> output_dir;
  bool from_csv = false;
};

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir);
void apply_overrides(ExperimentConfig& cfg, const RunOverrides& o);

std::array<std::uint32_t, 3> parse_dims(const std::string& text);
Directions parse_directions(const std::string& text);

/// Reads XFERSCOPE_THREADS (unset or empty means 0 = auto).
std::size_t threads_from_env();

// Each command returns an exit code and reports failures on `err`.
int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides,
            std::ostream& out, std::ostream& err);
int cmd_score(const std::filesystem::path& selection_path, const std::filesystem::path& truth_path,
              std::ostream& out, std::ostream& err);
int cmd_import(const std::filesystem::path& csv_path, const std::string& dims,
               const std::filesystem::path& out_path,
               std::ostream& out, std::ostream& err);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace xferscope::cli
