// qplab command-line front end.
//
// Subcommands: verify, eval, chart, unchart, leaf, calibrate.
// Exit codes: 0 success / suite passed, 1 computation or verification
// failure, 2 configuration or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qplab/qplab.hpp"

namespace {

using namespace qplab;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f.good()) throw std::runtime_error("cannot write output file: " + out_path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

struct CommonOpts {
  std::string point_text;
  std::string matrix_text;
  std::string suite = "all";
  bool write = false;
};

void add_shared_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--form-scale", cfg.form_scale, "scale c of K(x,y) = c tr(xy)");
  cmd->add_option("--seed", cfg.seed, "seed for sampled checks");
  cmd->add_option("--tol", cfg.tol, "override every check tolerance");
  cmd->add_option("--grid", cfg.grid, "verification grid, NTAUxNTHETAxNRHO");
  cmd->add_option("--steps", cfg.steps, "leaf integrator step count");
  cmd->add_option("--step-size", cfg.step_size, "leaf integrator step size");
  cmd->add_option("--format", cfg.format, "output format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.out, "write output to a file instead of stdout");
}

Mat parse_group_matrix(const std::string& text) {
  if (text == "identity" || text == "id" || text == "e")
    return Mat::Identity(2, 2);
  std::istringstream is(text);
  std::string part;
  double vals[4];
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(is, part, ','))
      throw std::invalid_argument("matrix must be a,b,c,d (row major) or 'identity'");
    vals[i] = parse_angle(part);
  }
  if (std::getline(is, part, ','))
    throw std::invalid_argument("matrix must have exactly four entries");
  Mat m(2, 2);
  m(0, 0) = vals[0];
  m(0, 1) = vals[1];
  m(1, 0) = vals[2];
  m(1, 1) = vals[3];
  return m;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  const VerificationReport report = run_suite(suite, to_suite_config(cfg));
  emit(cfg.format == "csv" ? report_to_csv(report) : report_to_json(report), cfg.out);
  return report.pass ? kExitOk : kExitFail;
}

int cmd_eval(const RunConfig& cfg, const CommonOpts& opts) {
  BtzModel model(cfg.form_scale);
  std::ostringstream os;
  if (!opts.point_text.empty()) {
    const ChartPoint p = parse_chart_point(opts.point_text);
    const RMat a = coordinate_bivector(model, p);
    if (cfg.format == "csv") {
      os << "tau,theta,rho,p_tau_theta,p_tau_rho,p_theta_rho,closed_form\n"
         << csv_row({p.tau, p.theta, p.rho, a(0, 1), a(0, 2), a(1, 2),
                     closed_form_coeff(p)})
         << "\n";
    } else {
      os << "{\n  \"point\": " << chart_point_json(p) << ",\n"
         << "  \"components\": {\"tau_theta\": " << jsonio::num(a(0, 1))
         << ", \"tau_rho\": " << jsonio::num(a(0, 2))
         << ", \"theta_rho\": " << jsonio::num(a(1, 2)) << "},\n"
         << "  \"closed_form\": " << jsonio::num(closed_form_coeff(p)) << ",\n"
         << "  \"classification\": "
         << jsonio::str(leaf_rank_name(classify_point(model, p))) << "\n}\n";
    }
  } else if (!opts.matrix_text.empty()) {
    const Mat m = parse_group_matrix(opts.matrix_text);
    if (model.ctx()->group_residual(m) > 1e-9)
      throw std::invalid_argument("matrix is not in SL(2,R)");
    const GroupElement s{model.ctx(), m};
    const BivectorMap bv = p_s_sigma(s, model.qt());
    const int rank = image_basis(s, model.qt()).rank;
    if (cfg.format == "csv") {
      os << "row,h,e,f\n";
      const char* names[3] = {"h", "e", "f"};
      for (int i = 0; i < 3; ++i)
        os << names[i] << "," << csv_row({bv.matrix(i, 0), bv.matrix(i, 1),
                                          bv.matrix(i, 2)})
           << "\n";
      os << "# rank=" << rank << (rank == 0 ? " (identity orbit)" : "") << "\n";
    } else {
      os << "{\n  \"matrix\": [[" << jsonio::num(m(0, 0).real()) << ", "
         << jsonio::num(m(0, 1).real()) << "], [" << jsonio::num(m(1, 0).real()) << ", "
         << jsonio::num(m(1, 1).real()) << "]],\n";
      os << "  \"bivector\": [";
      for (int i = 0; i < 3; ++i) {
        if (i) os << ", ";
        os << "[" << jsonio::num(bv.matrix(i, 0)) << ", " << jsonio::num(bv.matrix(i, 1))
           << ", " << jsonio::num(bv.matrix(i, 2)) << "]";
      }
      os << "],\n  \"rank\": " << rank << ",\n  \"note\": "
         << jsonio::str(rank == 0 ? "rank-0 (identity orbit)" : "rank-2") << "\n}\n";
    }
  } else {
    // No point or matrix: evaluate the whole verification grid.
    BtzConfig bc;
    parse_grid_spec(cfg.grid, bc);
    const auto grid = make_structure_grid(bc.grid_tau, bc.grid_theta, bc.grid_rho);
    os << (cfg.format == "csv" ? grid_to_csv(model, grid)
                               : grid_to_json(model, grid, cfg.grid, cfg.seed));
  }
  emit(os.str(), cfg.out);
  return kExitOk;
}

int cmd_chart(const RunConfig& cfg, const CommonOpts& opts) {
  if (opts.point_text.empty()) throw std::invalid_argument("chart needs --point tau,theta,rho");
  const ChartPoint p = parse_chart_point(opts.point_text);
  const Mat z = chart_matrix(p);
  std::ostringstream os;
  if (cfg.format == "csv") {
    os << "m00,m01,m10,m11\n"
       << csv_row({z(0, 0).real(), z(0, 1).real(), z(1, 0).real(), z(1, 1).real()})
       << "\n";
  } else {
    os << "{\n  \"point\": " << chart_point_json(p) << ",\n  \"matrix\": [["
       << jsonio::num(z(0, 0).real()) << ", " << jsonio::num(z(0, 1).real()) << "], ["
       << jsonio::num(z(1, 0).real()) << ", " << jsonio::num(z(1, 1).real()) << "]]\n}\n";
  }
  emit(os.str(), cfg.out);
  return kExitOk;
}

int cmd_unchart(const RunConfig& cfg, const CommonOpts& opts) {
  if (opts.matrix_text.empty()) throw std::invalid_argument("unchart needs --matrix a,b,c,d");
  BtzModel model(cfg.form_scale);
  const Mat m = parse_group_matrix(opts.matrix_text);
  const ChartInverse inv = inverse_chart(GroupElement{model.ctx(), m});
  const char* branch = inv.branch == ChartBranch::principal ? "principal" : "reflected";
  std::ostringstream os;
  if (cfg.format == "csv") {
    os << "tau,theta,rho,branch\n"
       << csv_row({inv.point.tau, inv.point.theta, inv.point.rho}) << "," << branch
       << "\n";
  } else {
    os << "{\n  \"point\": " << chart_point_json(inv.point)
       << ",\n  \"branch\": " << jsonio::str(branch) << "\n}\n";
  }
  emit(os.str(), cfg.out);
  return kExitOk;
}

int cmd_leaf(const RunConfig& cfg, const CommonOpts& opts) {
  if (opts.point_text.empty()) throw std::invalid_argument("leaf needs --start tau,theta,rho");
  BtzModel model(cfg.form_scale);
  const ChartPoint start = parse_chart_point(opts.point_text);
  const LeafTrace trace = trace_leaf(model, start, cfg.steps, cfg.step_size);
  emit(cfg.format == "csv"
           ? trace_to_csv(trace)
           : trace_to_json(trace, start, cfg.steps, cfg.step_size, cfg.form_scale,
                           cfg.seed),
       cfg.out);
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, const CommonOpts& opts, bool grid_given) {
  BtzModel model(cfg.form_scale);
  BtzConfig bc;
  parse_grid_spec(cfg.grid, bc);
  const int n_tau = grid_given ? bc.grid_tau : 20;
  const int n_rho = grid_given ? bc.grid_rho : 20;
  const Calibration cal = calibrate_scale(model, make_calibration_grid(n_tau, n_rho));
  const double calibrated = cfg.form_scale * cal.scale_ratio;
  std::ostringstream os;
  os << "{\n  \"grid\": " << jsonio::str(std::to_string(n_tau) + "x" + std::to_string(n_rho))
     << ",\n  \"n_used\": " << cal.n_used
     << ",\n  \"form_scale\": " << jsonio::num(cfg.form_scale)
     << ",\n  \"scale_ratio\": " << jsonio::num(cal.scale_ratio)
     << ",\n  \"calibrated_form_scale\": " << jsonio::num(calibrated)
     << ",\n  \"spread\": " << jsonio::num(cal.spread) << "\n}\n";
  emit(os.str(), cfg.out);
  if (opts.write) write_form_scale(calibrated);
  return cal.spread < 1e-8 ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qplab;

  CLI::App app{"qplab: quasi-Poisson structures on matrix Lie groups, numerically"};
  app.require_subcommand(1);

  RunConfig cfg;
  try {
    load_config_file(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  CommonOpts opts;
  std::string group_flag;
  std::string sigma_flag;

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", opts.suite, "all | core | double | bivector | btz | su2");
  CLI::Option* group_opt =
      verify->add_option("--group", group_flag, "restrict checks to one group");
  CLI::Option* sigma_opt =
      verify->add_option("--sigma", sigma_flag, "restrict checks to one involution: id | adH");
  add_shared_options(verify, cfg);

  CLI::App* eval = app.add_subcommand("eval", "evaluate the bivector at a point");
  eval->add_option("--point", opts.point_text, "chart point tau,theta,rho (pi-expressions ok)");
  eval->add_option("--matrix", opts.matrix_text, "SL(2,R) matrix a,b,c,d or 'identity'");
  add_shared_options(eval, cfg);

  CLI::App* chart_cmd = app.add_subcommand("chart", "chart point -> matrix");
  chart_cmd->add_option("--point", opts.point_text, "chart point tau,theta,rho");
  add_shared_options(chart_cmd, cfg);

  CLI::App* unchart = app.add_subcommand("unchart", "matrix -> chart point");
  unchart->add_option("--matrix", opts.matrix_text, "SL(2,R) matrix a,b,c,d");
  add_shared_options(unchart, cfg);

  CLI::App* leaf = app.add_subcommand("leaf", "trace the symplectic leaf through a point");
  leaf->add_option("--start", opts.point_text, "starting chart point tau,theta,rho");
  add_shared_options(leaf, cfg);

  CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate K against the closed form");
  calibrate->add_flag("--write", opts.write, "persist the calibrated form scale");
  add_shared_options(calibrate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (group_opt->count() > 0) cfg.group = group_flag;
  if (sigma_opt->count() > 0) cfg.sigma = sigma_flag;

  try {
    if (app.got_subcommand(verify)) return cmd_verify(cfg, opts.suite);
    if (app.got_subcommand(eval)) return cmd_eval(cfg, opts);
    if (app.got_subcommand(chart_cmd)) return cmd_chart(cfg, opts);
    if (app.got_subcommand(unchart)) return cmd_unchart(cfg, opts);
    if (app.got_subcommand(leaf)) return cmd_leaf(cfg, opts);
    if (app.got_subcommand(calibrate))
      return cmd_calibrate(cfg, opts, calibrate->count("--grid") > 0);
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfig;
}
