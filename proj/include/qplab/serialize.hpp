#ifndef QPLAB_SERIALIZE_HPP
#define QPLAB_SERIALIZE_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qplab/btz.hpp"
#include "qplab/numerics.hpp"

namespace qplab {

/// Minimal JSON value formatting. Reports and traces are emitted through
/// these helpers only, so identical inputs give byte-identical documents:
/// fixed key order, LF separators, 17-significant-digit numbers.
namespace jsonio {

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string str(const std::string& s) { return "\"" + escape(s) + "\""; }

inline std::string num(double v) {
  if (!std::isfinite(v)) return "\"non-finite\"";
  return fmt_g17(v);
}

inline std::string boolean(bool b) { return b ? "true" : "false"; }

}  // namespace jsonio

/// One CSV row of doubles, 17 significant digits, LF ending appended by the
/// caller's writer.
inline std::string csv_row(const std::vector<double>& vals) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ',';
    out += fmt_g17(vals[i]);
  }
  return out;
}

inline const char* leaf_rank_name(LeafRank r) {
  return r == LeafRank::rank0 ? "rank-0" : "rank-2";
}

/// CSV document for a leaf trace: header, one row per point, a comment footer
/// carrying the conserved-coordinate drift and the truncation flag.
inline std::string trace_to_csv(const LeafTrace& trace) {
  std::string out = "tau,theta,rho\n";
  for (const ChartPoint& p : trace.points)
    out += csv_row({p.tau, p.theta, p.rho}) + "\n";
  out += "# classification=" + std::string(leaf_rank_name(trace.classification));
  out += " rho_ref=" + fmt_g17(trace.rho_ref);
  out += " rho_drift=" + fmt_g17(trace.rho_drift);
  out += trace.truncated ? " truncated=1\n" : " truncated=0\n";
  return out;
}

inline std::string chart_point_json(const ChartPoint& p) {
  return "{\"tau\": " + jsonio::num(p.tau) + ", \"theta\": " + jsonio::num(p.theta) +
         ", \"rho\": " + jsonio::num(p.rho) + "}";
}

/// JSON document for a leaf trace: {config, seed, points[]} plus the trace
/// diagnostics.
inline std::string trace_to_json(const LeafTrace& trace, const ChartPoint& start,
                                 int steps, double step_size, double form_scale,
                                 std::uint64_t seed) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"config\": {\"start\": " << chart_point_json(start)
     << ", \"steps\": " << steps << ", \"step_size\": " << jsonio::num(step_size)
     << ", \"form_scale\": " << jsonio::num(form_scale) << "},\n";
  os << "  \"seed\": " << seed << ",\n";
  os << "  \"classification\": " << jsonio::str(leaf_rank_name(trace.classification))
     << ",\n";
  os << "  \"rho_ref\": " << jsonio::num(trace.rho_ref) << ",\n";
  os << "  \"rho_drift\": " << jsonio::num(trace.rho_drift) << ",\n";
  os << "  \"truncated\": " << jsonio::boolean(trace.truncated) << ",\n";
  os << "  \"points\": [";
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    if (i) os << ", ";
    os << chart_point_json(trace.points[i]);
  }
  os << "]\n}\n";
  return os.str();
}

/// CSV for grid evaluations of the coordinate bivector: the chart point, the
/// three independent components, and the closed-form coefficient.
inline std::string grid_to_csv(const BtzModel& model,
                               const std::vector<ChartPoint>& grid) {
  std::string out = "tau,theta,rho,p_tau_theta,p_tau_rho,p_theta_rho,closed_form\n";
  for (const ChartPoint& p : grid) {
    const RMat a = coordinate_bivector(model, p);
    out += csv_row({p.tau, p.theta, p.rho, a(0, 1), a(0, 2), a(1, 2),
                    closed_form_coeff(p)}) +
           "\n";
  }
  return out;
}

/// JSON for the same grid evaluation: {config, seed, points[]}.
inline std::string grid_to_json(const BtzModel& model,
                                const std::vector<ChartPoint>& grid,
                                const std::string& grid_spec, std::uint64_t seed) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"config\": {\"grid\": " << jsonio::str(grid_spec)
     << ", \"form_scale\": " << jsonio::num(model.form_scale()) << "},\n";
  os << "  \"seed\": " << seed << ",\n";
  os << "  \"points\": [";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ChartPoint& p = grid[i];
    const RMat a = coordinate_bivector(model, p);
    if (i) os << ", ";
    os << "{\"tau\": " << jsonio::num(p.tau) << ", \"theta\": " << jsonio::num(p.theta)
       << ", \"rho\": " << jsonio::num(p.rho)
       << ", \"p_tau_theta\": " << jsonio::num(a(0, 1))
       << ", \"p_tau_rho\": " << jsonio::num(a(0, 2))
       << ", \"p_theta_rho\": " << jsonio::num(a(1, 2))
       << ", \"closed_form\": " << jsonio::num(closed_form_coeff(p)) << "}";
  }
  os << "]\n}\n";
  return os.str();
}

}  // namespace qplab

#endif
