#include "tgvflow/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "tgvflow/cli/baseline.hpp"
#include "tgvflow/cli/colormap.hpp"
#include "tgvflow/cli/io.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"

namespace tgvflow::cli {

namespace {

using Planes = std::vector<std::pair<std::string, ScalarField>>;

void require_same_shape(const ScalarField& f1, const ScalarField& f2) {
  if (!f1.same_shape(f2))
    throw ValidationError("input images differ in size (" + std::to_string(f1.width()) + "x" +
                          std::to_string(f1.height()) + " vs " + std::to_string(f2.width()) +
                          "x" + std::to_string(f2.height()) + ")");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::pair<double, double> plane_range(const ScalarField& f, const OutputOptions& o) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  if (m == 0.0) m = 1.0;
  const double lo = o.vmin.value_or(-m);
  const double hi = o.vmax.value_or(m);
  return {lo, hi};
}

// Writes one .field file holding all planes and, if requested, one image per plane.
void emit(const OutputOptions& o, const std::string& stem, const Planes& planes,
          const ScalarField* background, std::ostream& out) {
  ensure_dir(o.dir);
  if (o.raw) {
    const auto path = o.dir / (stem + ".field");
    io::write_fields(path, planes);
    out << "wrote " << path.string() << '\n';
  }
  if (o.png) {
    for (const auto& [name, f] : planes) {
      const auto [lo, hi] = plane_range(f, o);
      const auto path = o.dir / (name + ".png");
      render_colormap(f, lo, hi, path, o.overlay ? background : nullptr);
      out << "wrote " << path.string() << '\n';
    }
  }
}

Planes flow_planes(const DisplacementField& u) { return {{"u1", u.u1}, {"u2", u.u2}}; }

Planes gradient_planes(const std::string& prefix, const GradientField& g) {
  return {{prefix + "1x", g[0]}, {prefix + "1y", g[1]}, {prefix + "2x", g[2]}, {prefix + "2y", g[3]}};
}

Planes strain_planes(const StrainField& e) {
  return {{"eps11", e.eps11}, {"eps12", e.eps12}, {"eps22", e.eps22}};
}

std::string fmt(std::optional<double> v, int precision = 6) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(precision) << *v;
  return s.str();
}

}  // namespace

ComparePriorsConfig::ComparePriorsConfig() {
  for (Prior p : {Prior::H1, Prior::TV, Prior::TV2, Prior::TVTV2, Prior::IC, Prior::TGV})
    params.push_back(prior_defaults(p));
}

SolverParams prior_defaults(Prior p) {
  SolverParams sp;
  sp.prior = p;
  switch (p) {
    case Prior::H1: sp.lambda1 = 50.0; break;
    case Prior::TV: sp.lambda1 = 0.1; break;
    case Prior::TV2: sp.lambda1 = 0.1; break;
    case Prior::TVTV2:
      sp.lambda1 = 0.1;
      sp.lambda2 = 0.02;
      break;
    case Prior::IC:
      sp.lambda1 = 0.1;
      sp.lambda2 = 1.0;
      sp.lambda3 = 0.5e-5;
      break;
    case Prior::TGV:
      sp.lambda1 = 0.1;
      sp.lambda2 = 2.0;
      break;
  }
  return sp;
}

FlowReport cmd_flow(const FlowConfig& cfg, std::ostream& out) {
  cfg.solver.validate();
  cfg.pyramid.validate();
  const auto f1 = io::read_image(cfg.f1);
  const auto f2 = io::read_image(cfg.f2);
  require_same_shape(f1, f2);
  std::optional<DisplacementField> truth;
  if (cfg.truth) {
    truth = io::read_flow(*cfg.truth);
    require_same_shape(f1, truth->u1);
  }

  FlowReport report{coarse_to_fine_solve(f1, f2, cfg.solver, cfg.pyramid), std::nullopt};
  const auto& r = report.result;
  emit(cfg.output, "flow", flow_planes(r.u), &f1, out);
  emit(cfg.output, "split_a", gradient_planes("a", r.a), &f1, out);
  emit(cfg.output, "split_s", gradient_planes("s", r.s), &f1, out);
  emit(cfg.output, "strain", strain_planes(strain_from_flow(r.u)), &f1, out);

  out << "prior=" << prior_name(cfg.solver.prior) << " size=" << f1.width() << "x" << f1.height()
      << " levels=" << pyramid_levels(f1.width(), f1.height(), cfg.pyramid)
      << " energy=" << std::setprecision(10) << r.energy_trace.back() << '\n';
  if (truth) {
    report.epe = endpoint_error(r.u, *truth);
    out << "epe_mean=" << std::setprecision(10) << report.epe->mean
        << " epe_max=" << report.epe->max << '\n';
  }
  return report;
}

void cmd_synth(const SynthConfig& cfg, std::ostream& out) {
  const ScalarField base = cfg.base ? io::read_image(*cfg.base)
                                    : value_noise_texture(cfg.width, cfg.height, cfg.seed);
  const auto u_true = generate_flow(base.width(), base.height(), cfg.spec);
  const auto pair = warp_generate(base, u_true);
  ensure_dir(cfg.out_dir);
  io::write_pgm16(cfg.out_dir / "f1.pgm", pair.f1);
  io::write_pgm16(cfg.out_dir / "f2.pgm", pair.f2);
  io::write_fields(cfg.out_dir / "f1.field", {{"f1", pair.f1}});
  io::write_fields(cfg.out_dir / "f2.field", {{"f2", pair.f2}});
  io::write_fields(cfg.out_dir / "u_true.field", flow_planes(u_true));
  out << "wrote f1, f2 (.pgm, .field) and u_true.field to " << cfg.out_dir.string() << '\n';
}

std::vector<PriorRow> cmd_compare_priors(const ComparePriorsConfig& cfg, std::ostream& out) {
  cfg.pyramid.validate();
  for (Prior p : cfg.priors) cfg.of(p).validate();
  const auto f1 = io::read_image(cfg.f1);
  const auto f2 = io::read_image(cfg.f2);
  require_same_shape(f1, f2);
  std::optional<DisplacementField> truth;
  std::optional<ScalarField> true_dx;
  if (cfg.truth) {
    truth = io::read_flow(*cfg.truth);
    require_same_shape(f1, truth->u1);
    true_dx = strain_from_flow(*truth).eps11;
  }

  std::vector<PriorRow> rows;
  for (Prior p : cfg.priors) {
    auto sp = cfg.of(p);
    sp.prior = p;
    const auto r = coarse_to_fine_solve(f1, f2, sp, cfg.pyramid);
    PriorRow row{p, r.energy_trace.back(), {}, {}, {}};
    if (truth) {
      const auto e = endpoint_error(r.u, *truth);
      row.epe_mean = e.mean;
      row.epe_max = e.max;
      row.strain_rms = rms_difference(strain_from_flow(r.u).eps11, *true_dx);
    }
    rows.push_back(row);
  }

  out << std::left << std::setw(8) << "prior" << std::right << std::setw(14) << "epe_mean"
      << std::setw(14) << "epe_max" << std::setw(14) << "strain_rms" << std::setw(16) << "energy"
      << '\n';
  for (const auto& row : rows)
    out << std::left << std::setw(8) << prior_name(row.prior) << std::right << std::setw(14)
        << fmt(row.epe_mean) << std::setw(14) << fmt(row.epe_max) << std::setw(14)
        << fmt(row.strain_rms) << std::setw(16) << fmt(row.energy, 8) << '\n';

  if (cfg.csv) {
    if (cfg.csv->has_parent_path()) ensure_dir(cfg.csv->parent_path());
    std::ofstream csv(*cfg.csv);
    if (!csv) throw IoError("cannot write " + cfg.csv->string());
    csv << "prior,epe_mean,epe_max,strain_rms,energy\n" << std::setprecision(17);
    for (const auto& row : rows)
      csv << prior_name(row.prior) << ',' << fmt(row.epe_mean, 17) << ','
          << fmt(row.epe_max, 17) << ',' << fmt(row.strain_rms, 17) << ',' << row.energy << '\n';
    if (!csv) throw IoError("cannot write " + cfg.csv->string());
  }
  return rows;
}

DisplacementField cmd_baseline_bm(const BlockMatchConfig& cfg, std::ostream& out) {
  const auto f1 = io::read_image(cfg.f1);
  const auto f2 = io::read_image(cfg.f2);
  require_same_shape(f1, f2);
  auto u = block_match_baseline(f1, f2, cfg.window, cfg.search);
  emit(cfg.output, "flow", flow_planes(u), &f1, out);
  emit(cfg.output, "strain", strain_planes(strain_from_flow(u)), &f1, out);
  if (cfg.truth) {
    const auto truth = io::read_flow(*cfg.truth);
    require_same_shape(f1, truth.u1);
    const auto e = endpoint_error(u, truth);
    out << "epe_mean=" << std::setprecision(10) << e.mean << " epe_max=" << e.max << '\n';
  }
  return u;
}

void cmd_render(const RenderConfig& cfg, std::ostream& out) {
  const auto ff = io::read_fields(cfg.input);
  const ScalarField& f = cfg.plane.empty() ? ff.planes.front() : ff.plane(cfg.plane);
  OutputOptions range;
  range.vmin = cfg.vmin;
  range.vmax = cfg.vmax;
  const auto [lo, hi] = plane_range(f, range);
  std::optional<ScalarField> bg;
  if (cfg.background) {
    bg = io::read_image(*cfg.background);
    require_same_shape(f, *bg);
  }
  render_colormap(f, lo, hi, cfg.out, bg ? &*bg : nullptr);
  out << "wrote " << cfg.out.string() << '\n';
}

namespace {

// Command-line bindings. Options write straight into the config structs;
// optionals are staged through NaN sentinels.
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

std::optional<double> staged(double v) {
  return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

struct OutputFlags {
  CLI::Option* raw = nullptr;
  CLI::Option* png = nullptr;
  double vmin = kUnset;
  double vmax = kUnset;

  void add(CLI::App* app, OutputOptions& o) {
    app->add_option("--out", o.dir, "Output directory");
    raw = app->add_flag("--raw", "Write .field files (default unless --png is given)");
    png = app->add_flag("--png", "Write colormapped PNG images");
    app->add_option("--vmin", vmin, "Lower end of the colour range");
    app->add_option("--vmax", vmax, "Upper end of the colour range");
    app->add_flag("--overlay", o.overlay, "Blend images onto f1");
  }

  void finish(OutputOptions& o) const {
    o.png = png->count() > 0;
    o.raw = raw->count() > 0 || !o.png;
    o.vmin = staged(vmin);
    o.vmax = staged(vmax);
  }
};

void add_pyramid_flags(CLI::App* app, PyramidParams& pp) {
  app->add_option("--levels-min-dim", pp.min_dim, "Smallest image side of the coarsest level");
  app->add_option("--factor", pp.factor, "Downsampling factor between levels");
  app->add_option("--warps", pp.warps_per_level, "Linearizations per level");
  app->add_option("--median-radius", pp.median_radius, "Median filter radius (0 disables)");
}

const std::vector<std::string> kPriorNames{"h1", "tv", "tv2", "tvtv2", "ic", "tgv"};

// Options from `--config FILE` are spliced in right after the subcommand
// name, so anything given explicitly on the command line comes later and
// wins. The file holds one key=value per line; '#' starts a comment.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      --i;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      --i;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
    extra.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  const auto sub = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return !a.empty() && a[0] != '-'; });
  if (sub == args.end()) throw ValidationError("--config needs a subcommand");
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

int run_parsed(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"TGV optical flow and strain estimation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1, 1);

  FlowConfig flow;
  std::string flow_prior = "tgv";
  double flow_tau = kUnset;
  OutputFlags flow_out;
  auto* c_flow = app.add_subcommand("flow", "Estimate displacement and strain between two images");
  c_flow->add_option("f1", flow.f1, "Reference image")->required();
  c_flow->add_option("f2", flow.f2, "Deformed image")->required();
  c_flow->add_option("--truth", flow.truth, "Ground-truth flow (.field) for an EPE report");
  c_flow->add_option("--lambda1", flow.solver.lambda1, "Weight of the first-order term")->capture_default_str();
  c_flow->add_option("--lambda2", flow.solver.lambda2, "Weight of the second-order term")->capture_default_str();
  c_flow->add_option("--lambda3", flow.solver.lambda3, "Quadratic weight (ic prior only)")->capture_default_str();
  c_flow->add_option("--iters", flow.solver.iterations, "Iterations per linearization");
  c_flow->add_option("--tau", flow_tau, "Primal and dual step size");
  c_flow->add_option("--prior", flow_prior, "Regularizer")->capture_default_str()->check(CLI::IsMember(kPriorNames, CLI::ignore_case));
  c_flow->add_flag("--constrain", flow.solver.constrain_positive_x,
                   "Require the x-component of the non-smooth part to be >= 0");
  add_pyramid_flags(c_flow, flow.pyramid);
  flow_out.add(c_flow, flow.output);

  SynthConfig synth;
  std::string synth_kind = "piecewise";
  double amplitude = kUnset, slope = kUnset, max_abs = kUnset;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic image pair with known flow");
  c_synth->add_option("--kind", synth_kind, "Flow pattern")->capture_default_str()->check(CLI::IsMember({"piecewise", "halfjump"}));
  c_synth->add_option("--width", synth.width)->capture_default_str();
  c_synth->add_option("--height", synth.height)->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Texture seed")->capture_default_str();
  c_synth->add_option("--amplitude", amplitude, "Jump amplitude in pixels");
  c_synth->add_option("--slope", slope, "Ramp slope (piecewise kind)");
  c_synth->add_option("--max-abs", max_abs, "Clamp of the generated flow");
  c_synth->add_option("--base", synth.base, "Use this image instead of the generated texture");
  c_synth->add_option("--out", synth.out_dir, "Output directory");

  ComparePriorsConfig cmp;
  std::vector<std::string> cmp_priors;
  int cmp_iters = 0;
  auto* c_cmp = app.add_subcommand("compare-priors", "Run every regularizer on one image pair");
  c_cmp->add_option("f1", cmp.f1, "Reference image")->required();
  c_cmp->add_option("f2", cmp.f2, "Deformed image")->required();
  c_cmp->add_option("--truth", cmp.truth, "Ground-truth flow (.field)");
  c_cmp->add_option("--priors", cmp_priors, "Subset of priors to run")
      ->check(CLI::IsMember(kPriorNames, CLI::ignore_case))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  c_cmp->add_option("--iters", cmp_iters, "Iterations per linearization for every prior");
  c_cmp->add_option("--h1-lambda", cmp.of(Prior::H1).lambda1);
  c_cmp->add_option("--tv-lambda", cmp.of(Prior::TV).lambda1);
  c_cmp->add_option("--tv2-lambda", cmp.of(Prior::TV2).lambda1);
  c_cmp->add_option("--tvtv2-lambda1", cmp.of(Prior::TVTV2).lambda1);
  c_cmp->add_option("--tvtv2-lambda2", cmp.of(Prior::TVTV2).lambda2);
  c_cmp->add_option("--ic-lambda1", cmp.of(Prior::IC).lambda1);
  c_cmp->add_option("--ic-lambda2", cmp.of(Prior::IC).lambda2);
  c_cmp->add_option("--ic-lambda3", cmp.of(Prior::IC).lambda3);
  c_cmp->add_option("--tgv-lambda1", cmp.of(Prior::TGV).lambda1);
  c_cmp->add_option("--tgv-lambda2", cmp.of(Prior::TGV).lambda2);
  add_pyramid_flags(c_cmp, cmp.pyramid);
  c_cmp->add_option("--out", cmp.csv, "CSV file for the result rows");

  BlockMatchConfig bm;
  OutputFlags bm_out;
  auto* c_bm = app.add_subcommand("baseline-bm", "Block-matching correlation baseline");
  c_bm->add_option("f1", bm.f1, "Reference image")->required();
  c_bm->add_option("f2", bm.f2, "Deformed image")->required();
  c_bm->add_option("--truth", bm.truth, "Ground-truth flow (.field)");
  c_bm->add_option("--window", bm.window, "Odd window side");
  c_bm->add_option("--search", bm.search, "Search radius in pixels");
  bm_out.add(c_bm, bm.output);

  RenderConfig render;
  double render_vmin = kUnset, render_vmax = kUnset;
  auto* c_render = app.add_subcommand("render", "Colormap one plane of a .field file");
  c_render->add_option("input", render.input, ".field file")->required();
  c_render->add_option("--plane", render.plane, "Plane name (default: first)");
  c_render->add_option("--out", render.out, "Output PNG");
  c_render->add_option("--vmin", render_vmin, "Lower end of the colour range");
  c_render->add_option("--vmax", render_vmax, "Upper end of the colour range");
  c_render->add_option("--background", render.background, "Blend onto this image");

  // Listed for --help only; expand_config consumes the flag before parsing.
  std::string config_file;
  for (auto* c : {c_flow, c_synth, c_cmp, c_bm, c_render})
    c->add_option("--config", config_file, "Read options from a key=value file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_flow->parsed()) {
      flow.solver.prior = parse_prior(flow_prior);
      if (!std::isnan(flow_tau)) flow.solver.tau1 = flow.solver.tau2 = flow_tau;
      flow_out.finish(flow.output);
      cmd_flow(flow, out);
    } else if (c_synth->parsed()) {
      synth.spec = synth_kind == "halfjump" ? SyntheticSpec::half_jump_default()
                                            : SyntheticSpec::piecewise_default();
      if (!std::isnan(amplitude)) synth.spec.jump_amplitude = amplitude;
      if (!std::isnan(slope)) synth.spec.ramp_slope = slope;
      if (!std::isnan(max_abs)) synth.spec.max_abs = max_abs;
      cmd_synth(synth, out);
    } else if (c_cmp->parsed()) {
      if (!cmp_priors.empty()) {
        cmp.priors.clear();
        for (const auto& name : cmp_priors) cmp.priors.push_back(parse_prior(name));
      }
      if (cmp_iters != 0)
        for (auto& sp : cmp.params) sp.iterations = cmp_iters;
      cmd_compare_priors(cmp, out);
    } else if (c_bm->parsed()) {
      bm_out.finish(bm.output);
      cmd_baseline_bm(bm, out);
    } else if (c_render->parsed()) {
      render.vmin = staged(render_vmin);
      render.vmax = staged(render_vmax);
      cmd_render(render, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  std::vector<const char*> argv{"tgvflow"};
  for (const auto& a : expanded) argv.push_back(a.c_str());
  return run_parsed(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace tgvflow::cli
