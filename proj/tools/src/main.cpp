#include <iostream>

#include <CLI11.hpp>

#include "xferscope_cli/commands.hpp"

namespace cli = xferscope::cli;

int main(int argc, char** argv) {
  CLI::App app{"xferscope: cross-task transfer analysis of voxel classification"};
  app.require_subcommand(1);

  std::string spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic task pair");
  synth->add_option("spec", spec_path, "synthetic spec JSON")->required();
  synth->add_option("out_dir", synth_out, "output folder")->required();

  std::string config_path;
  cli::RunOverrides ov;
  auto* run = app.add_subcommand("run", "run the three protocols and write curves and report");
  run->add_option("config", config_path, "run config JSON")->required();
  run->add_option("--seed", ov.seed, "master seed");
  run->add_option("--alpha", ov.alpha, "significance level for the selection scale");
  run->add_option("--n-points", ov.n_points, "grid points");
  run->add_option("--min-voxels", ov.min_voxels, "smallest selection size");
  run->add_option("--classifier", ov.classifier, "svc or logreg");
  run->add_option("--inline-selection", ov.inline_selection, "foldwise or wholetask");
  run->add_option("--dims", ov.dims, "grid dims X,Y,Z");
  run->add_option("--directions", ov.directions, "A->B, B->A or both");
  run->add_option("--out", ov.output_dir, "output folder (overrides the config)");
  run->add_flag("--from-csv", ov.from_csv, "source and target are CSV files");

  std::string sel_path, truth_path;
  auto* score = app.add_subcommand("score", "overlap of a voxel selection with ground truth");
  score->add_option("selection", sel_path, "selection JSON")->required();
  score->add_option("truth", truth_path, "truth JSON")->required();

  std::string csv_path, import_out, import_dims;
  auto* import = app.add_subcommand("import", "convert a labelled CSV into an XFD1 file");
  import->add_option("csv", csv_path, "CSV: label then one column per voxel")->required();
  import->add_option("out", import_out, "output .xfd")->required();
  import->add_option("--dims", import_dims, "grid dims X,Y,Z")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInput;
  }

  if (*synth) return cli::cmd_synth(spec_path, synth_out, std::cout, std::cerr);
  if (*run) return cli::cmd_run(config_path, ov, std::cout, std::cerr);
  if (*score) return cli::cmd_score(sel_path, truth_path, std::cout, std::cerr);
  return cli::cmd_import(csv_path, import_dims, import_out, std::cout, std::cerr);
}
