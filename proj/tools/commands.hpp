#pragma once

#include <optional>
#include <string>

namespace anchorfit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitParse = 2,
  kExitGuaranteeFailed = 3,
};

struct IngestArgs {
  std::string input;
  std::string output;
  std::string recommend_output;  // optional design summary
  double iou = 0.5;
};

struct DesignArgs {
  std::string stats;
  std::optional<double> mar_obj;
  double iou = 0.5;
  std::string template_path;  // empty: built-in five-layer template
  bool double_set = false;
  double first_layer_max_ar = 2.0;
  double last_layer_max_ar = 1.5;
  std::string output;
};

struct VerifyArgs {
  std::string config;
  double k = 1.0;
  double iou = 0.5;
  std::string grid = "512x256";  // SIZExAR[xOFFSET]
  std::string grid_csv;
  std::string output;
};

struct MatchArgs {
  std::string config;
  std::string boxes;
  double iou = 0.5;
  std::string output;
};

struct ScatterArgs {
  std::string config;
  std::string boxes;
  std::string output;  // .svg or .csv
};

struct ChainArgs {
  std::string arch;  // empty: built-in VGG16 detection chain
  std::string output;
};

int run_ingest(const IngestArgs& args);
int run_design(const DesignArgs& args);
int run_verify(const VerifyArgs& args);
int run_match(const MatchArgs& args);
int run_scatter(const ScatterArgs& args);
int run_chain(const ChainArgs& args);

}  // namespace anchorfit::cli
