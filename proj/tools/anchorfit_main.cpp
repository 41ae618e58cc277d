/**
 * anchorfit: design and verify adaptive anchor pyramids.
 *
 * Commands:
 *   ingest   - summarize ground-truth boxes (AR / size percentiles, mAR_obj)
 *   design   - build an anchor config from mAR_obj and the IoU threshold
 *   verify   - brute-force the coverage guarantees of a config
 *   match    - match placed ground truth against the tiled anchors
 *   scatter  - width/height scatter of anchors and ground truth (CSV or SVG)
 *   chain    - stride and receptive field of a layer chain
 *
 * Exit codes: 0 success, 1 I/O failure, 2 parse/argument failure,
 * 3 a verified guarantee does not hold.
 */

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "manifest.hpp"

int main(int argc, char** argv) {
  using namespace anchorfit::cli;

  CLI::App app{"Adaptive anchor design and verification"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Summarize a ground-truth box CSV");
  ingest_cmd->add_option("--in,-i", ingest.input, "CSV with image_id,cx,cy,width,height")
      ->required();
  ingest_cmd->add_option("-o,--out", ingest.output, "DatasetStats JSON")->required();
  ingest_cmd->add_option("--recommend", ingest.recommend_output, "Also write a design summary");
  ingest_cmd->add_option("--iou", ingest.iou, "IoU threshold for the design summary");

  DesignArgs design;
  double mar_obj = 0.0;
  auto* design_cmd = app.add_subcommand("design", "Build an anchor configuration");
  auto* stats_opt = design_cmd->add_option("--stats", design.stats, "DatasetStats JSON");
  auto* mar_opt = design_cmd->add_option("--mar-obj", mar_obj, "Maximum object AR (k)");
  stats_opt->excludes(mar_opt);
  design_cmd->add_option("--iou", design.iou, "IoU threshold T in (0, 1)");
  design_cmd->add_option("--template", design.template_path, "Layer template JSON");
  design_cmd->add_flag("--double-set", design.double_set, "Add the second anchor set");
  design_cmd->add_option("--first-max-ar", design.first_layer_max_ar, "AR cap, first layer");
  design_cmd->add_option("--last-max-ar", design.last_layer_max_ar, "AR cap, last layer");
  design_cmd->add_option("-o,--out", design.output, "AnchorConfig JSON")->required();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check the coverage guarantees of a config");
  verify_cmd->add_option("--config", verify.config, "AnchorConfig JSON")->required();
  verify_cmd->add_option("--k", verify.k, "Maximum object AR")->required();
  verify_cmd->add_option("--iou", verify.iou, "IoU threshold T in (0, 1)");
  verify_cmd->add_option("--grid", verify.grid, "SIZESxARS[xOFFSETS], e.g. 512x256x16");
  verify_cmd->add_option("--grid-csv", verify.grid_csv, "Dump the concentric IoU grid");
  verify_cmd->add_option("-o,--out", verify.output, "CoverageReport JSON")->required();

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "Match placed ground truth to tiled anchors");
  match_cmd->add_option("--config", match.config, "AnchorConfig JSON")->required();
  match_cmd->add_option("--boxes", match.boxes, "Ground-truth CSV")->required();
  match_cmd->add_option("--iou", match.iou, "IoU threshold T in (0, 1)");
  match_cmd->add_option("-o,--out", match.output, "Match CSV")->required();

  ScatterArgs scatter;
  auto* scatter_cmd = app.add_subcommand("scatter", "Anchor / ground-truth shape scatter");
  scatter_cmd->add_option("--config", scatter.config, "AnchorConfig JSON")->required();
  scatter_cmd->add_option("--boxes", scatter.boxes, "Ground-truth CSV");
  scatter_cmd->add_option("-o,--out", scatter.output, "Output .svg or .csv")->required();

  ChainArgs chain;
  auto* chain_cmd = app.add_subcommand("chain", "Stride and receptive field of a layer chain");
  chain_cmd->add_option("--arch", chain.arch, "Architecture descriptor JSON");
  chain_cmd->add_option("-o,--out", chain.output, "ChainGeometry JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (*ingest_cmd) return run_ingest(ingest);
  if (*design_cmd) {
    if (*mar_opt) design.mar_obj = mar_obj;
    return run_design(design);
  }
  if (*verify_cmd) return run_verify(verify);
  if (*match_cmd) return run_match(match);
  if (*scatter_cmd) return run_scatter(scatter);
  if (*chain_cmd) return run_chain(chain);
  return kExitParse;
}
