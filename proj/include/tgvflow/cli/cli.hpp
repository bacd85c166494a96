#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tgvflow/pyramid.hpp"
#include "tgvflow/solver.hpp"
#include "tgvflow/synth.hpp"

namespace tgvflow::cli {

namespace fs = std::filesystem;

struct OutputOptions {
  fs::path dir = ".";
  bool raw = true;   // .field files
  bool png = false;  // colormapped images
  std::optional<double> vmin;
  std::optional<double> vmax;
  bool overlay = false;  // blend images onto f1
};

struct FlowConfig {
  fs::path f1;
  fs::path f2;
  std::optional<fs::path> truth;
  SolverParams solver;
  PyramidParams pyramid;
  OutputOptions output;
};

struct SynthConfig {
  SyntheticSpec spec;
  int width = 100;
  int height = 100;
  std::uint64_t seed = 7;
  std::optional<fs::path> base;  // replaces the generated texture
  fs::path out_dir = ".";
};

struct ComparePriorsConfig {
  fs::path f1;
  fs::path f2;
  std::optional<fs::path> truth;
  std::vector<Prior> priors{Prior::H1, Prior::TV, Prior::TV2, Prior::TVTV2, Prior::IC, Prior::TGV};
  std::vector<SolverParams> params;  // indexed by Prior; defaults from prior_defaults()
  PyramidParams pyramid;
  std::optional<fs::path> csv;

  ComparePriorsConfig();
  SolverParams& of(Prior p) { return params[static_cast<std::size_t>(p)]; }
  const SolverParams& of(Prior p) const { return params[static_cast<std::size_t>(p)]; }
};

struct BlockMatchConfig {
  fs::path f1;
  fs::path f2;
  std::optional<fs::path> truth;
  int window = 11;
  int search = 4;
  OutputOptions output;
};

struct RenderConfig {
  fs::path input;
  std::string plane;  // empty: first plane
  fs::path out = "render.png";
  std::optional<double> vmin;
  std::optional<double> vmax;
  std::optional<fs::path> background;
};

/// Per-prior regularization weights used for the prior comparison:
/// H1 50; TV 0.1; TV2 0.1; TV-TV2 0.1/0.02; IC 0.1/1/0.5e-5; TGV 0.1/2.
SolverParams prior_defaults(Prior p);

struct FlowReport {
  SolveResult result;
  std::optional<EndpointError> epe;
};

struct PriorRow {
  Prior prior;
  double energy = 0.0;
  std::optional<double> epe_mean;
  std::optional<double> epe_max;
  std::optional<double> strain_rms;  // RMS of dx u1 against the truth
};

FlowReport cmd_flow(const FlowConfig& cfg, std::ostream& out);
void cmd_synth(const SynthConfig& cfg, std::ostream& out);
std::vector<PriorRow> cmd_compare_priors(const ComparePriorsConfig& cfg, std::ostream& out);
DisplacementField cmd_baseline_bm(const BlockMatchConfig& cfg, std::ostream& out);
void cmd_render(const RenderConfig& cfg, std::ostream& out);

/// Parse arguments and dispatch. Returns the process exit code:
/// 0 success, 1 I/O error, 2 validation or usage error, 3 divergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tgvflow::cli
