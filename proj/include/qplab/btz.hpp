#ifndef QPLAB_BTZ_HPP
#define QPLAB_BTZ_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qplab/quasi_poisson.hpp"

namespace qplab {

constexpr double kPi = 3.14159265358979323846;
constexpr double kThetaPeriod = 2.0 * kPi;

/// (tau, theta, rho) coordinates on the open domain
/// I = { [[u+x, y+t],[y-t, u-x]] : u^2 - x^2 - y^2 + t^2 = 1, t^2 - y^2 > 0 }
/// of SL(2,R), via
///   z(tau,theta,rho) = [[ sinh(r/2) + cosh(r/2) cos(tau),
///                         exp(theta) cosh(r/2) sin(tau) ],
///                       [ -exp(-theta) cosh(r/2) sin(tau),
///                         -sinh(r/2) + cosh(r/2) cos(tau) ]].
/// The principal chart has tau in (0, pi) (the t > 0 component).
struct ChartPoint {
  double tau = 0.0;
  double theta = 0.0;
  double rho = 0.0;
};

/// Which component of I a matrix lies in: the principal piece is the image of
/// the (0,pi) chart; a reflected point satisfies s = -z(point).
enum class ChartBranch { principal, reflected };

struct ChartInverse {
  ChartPoint point;
  ChartBranch branch = ChartBranch::principal;
};

enum class LeafRank { rank0, rank2 };

/// Configuration for the SL(2,R) model: form scale, verification grid shape,
/// and the leaf integrator step.
struct BtzConfig {
  double form_scale = 1.0;
  int grid_tau = 20;
  int grid_theta = 20;
  int grid_rho = 5;
  int steps = 10000;
  double step_size = 1e-3;
};

/// The SL(2,R) instance: context with its Ad_H involution (H = diag(1,-1)).
class BtzModel {
public:
  explicit BtzModel(double form_scale = 1.0)
      : ctx_(make_sl2r(form_scale)), qt_(ctx_, make_adh_involution(ctx_)) {}

  const ContextPtr& ctx() const { return ctx_; }
  const QuasiTriple& qt() const { return qt_; }
  double form_scale() const { return ctx_->form_scale(); }

private:
  ContextPtr ctx_;
  QuasiTriple qt_;
};

inline Mat chart_matrix(const ChartPoint& p) {
  const double c = std::cosh(p.rho / 2.0);
  const double s = std::sinh(p.rho / 2.0);
  Mat z(2, 2);
  z(0, 0) = s + c * std::cos(p.tau);
  z(0, 1) = std::exp(p.theta) * c * std::sin(p.tau);
  z(1, 0) = -std::exp(-p.theta) * c * std::sin(p.tau);
  z(1, 1) = -s + c * std::cos(p.tau);
  return z;
}

inline GroupElement chart(const BtzModel& model, const ChartPoint& p) {
  return GroupElement{model.ctx(), chart_matrix(p)};
}

namespace detail {

struct DomainCoords {
  double u, x, y, t;
  double det_residual;
  double imag_residual;
};

inline DomainCoords domain_coords(const Mat& m) {
  DomainCoords d{};
  d.imag_residual = std::max(std::max(std::abs(m(0, 0).imag()), std::abs(m(0, 1).imag())),
                             std::max(std::abs(m(1, 0).imag()), std::abs(m(1, 1).imag())));
  const double a = m(0, 0).real();
  const double b = m(0, 1).real();
  const double c = m(1, 0).real();
  const double e = m(1, 1).real();
  d.u = 0.5 * (a + e);
  d.x = 0.5 * (a - e);
  d.y = 0.5 * (b + c);
  d.t = 0.5 * (b - c);
  d.det_residual = std::abs((a * e - b * c) - 1.0);
  return d;
}

}  // namespace detail

/// Membership test for I: unit determinant (within 1e-9) and t^2 - y^2 above
/// `margin` (0 for the open condition itself; guarded operations pass 1e-9).
inline bool in_domain_I(const GroupElement& s, double margin = 0.0) {
  const auto d = detail::domain_coords(s.matrix);
  if (d.imag_residual > 1e-9) return false;
  if (d.det_residual > 1e-9) return false;
  return d.t * d.t - d.y * d.y > margin;
}

/// Inverts the chart. Throws std::domain_error off the domain (or within
/// 1e-9 of its boundary, where the chart degenerates). For t < 0 the result
/// carries the reflected branch flag and satisfies s = -z(point).
inline ChartInverse inverse_chart(const GroupElement& s) {
  if (!in_domain_I(s, 1e-9))
    throw std::domain_error("matrix is not in the model domain");
  const auto d = detail::domain_coords(s.matrix);
  const double q = std::sqrt(d.t * d.t - d.y * d.y);

  ChartInverse out;
  if (d.t > 0.0) {
    out.branch = ChartBranch::principal;
    out.point.tau = std::atan2(q, d.u);
    out.point.rho = 2.0 * std::asinh(d.x);
    out.point.theta = 0.5 * std::log((d.t + d.y) / (d.t - d.y));
  } else {
    // -s lies in the principal piece; z(point) = -s.
    out.branch = ChartBranch::reflected;
    out.point.tau = std::atan2(q, -d.u);
    out.point.rho = 2.0 * std::asinh(-d.x);
    out.point.theta = 0.5 * std::log((-d.t - d.y) / (-d.t + d.y));
  }
  return out;
}

/// Right-trivialized chart frame at p: columns are the basis coordinates of
/// v_i = (dz/dc_i) z^-1 for c = (tau, theta, rho).
inline RMat chart_frame(const BtzModel& model, const ChartPoint& p) {
  if (std::abs(std::sin(p.tau)) < 1e-9)
    throw std::domain_error("chart frame is singular at sin(tau) = 0");
  const double c = std::cosh(p.rho / 2.0);
  const double s = std::sinh(p.rho / 2.0);
  const double ct = std::cos(p.tau);
  const double st = std::sin(p.tau);
  const double ep = std::exp(p.theta);
  const double em = std::exp(-p.theta);

  Mat z = chart_matrix(p);
  Mat zi = z.inverse();

  Mat dz_tau(2, 2);
  dz_tau(0, 0) = -c * st;
  dz_tau(0, 1) = ep * c * ct;
  dz_tau(1, 0) = -em * c * ct;
  dz_tau(1, 1) = -c * st;

  Mat dz_theta(2, 2);
  dz_theta(0, 0) = 0.0;
  dz_theta(0, 1) = ep * c * st;
  dz_theta(1, 0) = em * c * st;
  dz_theta(1, 1) = 0.0;

  Mat dz_rho(2, 2);
  dz_rho(0, 0) = 0.5 * (c + s * ct);
  dz_rho(0, 1) = ep * 0.5 * s * st;
  dz_rho(1, 0) = -em * 0.5 * s * st;
  dz_rho(1, 1) = 0.5 * (-c + s * ct);

  RMat frame(3, 3);
  frame.col(0) = model.ctx()->coords_of(Mat(dz_tau * zi));
  frame.col(1) = model.ctx()->coords_of(Mat(dz_theta * zi));
  frame.col(2) = model.ctx()->coords_of(Mat(dz_rho * zi));
  return frame;
}

/// Coordinate components of P_S^sigma at chart(p), as the antisymmetric 3x3
/// array A with A(i,j) = P(K1 v_j, K1 v_i), where K1 is the flat map of the
/// reference trace form (scale 1) and v_i the chart frame fields. This is
/// the component convention under which the model's closed-form coefficient
/// 2 cosh^2(rho/2) sin(tau) sinh(rho) appears in the (tau,theta) slot, with
/// form_scale 1. The plain coframe components of the same tensor are
/// tanh(rho/2)/sin(tau) there; both descriptions carry the identical
/// bivector, the difference is the chosen frame pairing, and this module
/// reports the dual-frame one.
inline RMat coordinate_bivector(const BtzModel& model, const ChartPoint& p) {
  const GroupElement z = chart(model, p);
  if (!in_domain_I(z, 1e-9))
    throw std::domain_error("chart point lies outside the model domain");
  const RMat frame = chart_frame(model, p);
  const RMat m = p_s_sigma(z, model.qt()).matrix;
  const RMat w = model.ctx()->gram_trace() * frame;
  return RMat(w.transpose() * m.transpose() * w);
}

/// The model's closed-form (tau,theta) coefficient.
inline double closed_form_coeff(const ChartPoint& p) {
  const double c = std::cosh(p.rho / 2.0);
  return 2.0 * c * c * std::sin(p.tau) * std::sinh(p.rho);
}

/// The comparison coefficient 1 / (cosh^2(rho/2) sin(tau)).
inline double comparison_coeff(const ChartPoint& p) {
  const double st = std::sin(p.tau);
  if (std::abs(st) < 1e-12)
    throw std::domain_error("comparison_coeff diverges at sin(tau) = 0");
  const double c = std::cosh(p.rho / 2.0);
  return 1.0 / (c * c * st);
}

/// tau in [0.1, pi-0.1] x rho in [-2,2], theta = 0: the calibration grid.
inline std::vector<ChartPoint> make_calibration_grid(int n_tau = 20, int n_rho = 20) {
  std::vector<ChartPoint> pts;
  for (double tau : linspace(0.1, kPi - 0.1, n_tau))
    for (double rho : linspace(-2.0, 2.0, n_rho))
      pts.push_back(ChartPoint{tau, 0.0, rho});
  return pts;
}

/// The verification grid over tau in [0.1, pi-0.1], theta in [0, 2pi),
/// rho in [-2, 2].
inline std::vector<ChartPoint> make_structure_grid(int n_tau = 20, int n_theta = 20,
                                                   int n_rho = 5) {
  std::vector<ChartPoint> pts;
  for (double tau : linspace(0.1, kPi - 0.1, n_tau))
    for (int k = 0; k < n_theta; ++k)
      for (double rho : linspace(-2.0, 2.0, n_rho))
        pts.push_back(ChartPoint{tau, kThetaPeriod * k / n_theta, rho});
  return pts;
}

struct Calibration {
  double scale_ratio = 1.0;  ///< median of component / closed-form coefficient
  double spread = 0.0;       ///< max relative deviation of the ratio from the median
  int n_used = 0;
};

/// Ratio of the computed (tau,theta) component to the closed-form coefficient
/// over the grid. The ratio is a single constant precisely because the
/// closed form is exact up to the K normalization; `spread` quantifies that.
/// The calibrated form scale is form_scale * scale_ratio.
inline Calibration calibrate_scale(const BtzModel& model,
                                   const std::vector<ChartPoint>& grid) {
  std::vector<double> ratios;
  for (const ChartPoint& p : grid) {
    const double f = closed_form_coeff(p);
    if (std::abs(f) < 1e-6) continue;
    ratios.push_back(coordinate_bivector(model, p)(0, 1) / f);
  }
  if (ratios.size() < 10)
    throw std::invalid_argument("calibration grid is degenerate (fewer than 10 usable points)");
  std::sort(ratios.begin(), ratios.end());
  const std::size_t mid = ratios.size() / 2;
  const double median = (ratios.size() % 2 == 1)
                            ? ratios[mid]
                            : 0.5 * (ratios[mid - 1] + ratios[mid]);
  double spread = 0.0;
  for (double r : ratios) spread = std::max(spread, std::abs(r / median - 1.0));
  return Calibration{median, spread, static_cast<int>(ratios.size())};
}

/// Reduces theta to [0, 2pi); tau and rho are untouched. Idempotent.
inline ChartPoint wrap_quotient(const ChartPoint& p) {
  double theta = std::fmod(p.theta, kThetaPeriod);
  if (theta < 0.0) theta += kThetaPeriod;
  return ChartPoint{p.tau, theta, p.rho};
}

/// exp(k pi H); twisted conjugation by it shifts theta by 2 pi k.
inline GroupElement theta_shift_element(const BtzModel& model, int k) {
  RVec c = RVec::Zero(3);
  c(0) = kPi * k;
  return exp_matrix(algebra_from_coords(model.ctx(), c));
}

/// Rank of the bivector at chart(p): rank0 exactly on the identity orbit
/// (the rho = 0 slice, where the closed-form coefficient vanishes).
inline LeafRank classify_point(const BtzModel& model, const ChartPoint& p) {
  const GroupElement z = chart(model, p);
  if (!in_domain_I(z, 1e-9))
    throw std::domain_error("chart point lies outside the model domain");
  const int rank = image_basis(z, model.qt()).rank;
  if (rank == 0) return LeafRank::rank0;
  if (rank == 2) return LeafRank::rank2;
  throw std::runtime_error("unexpected bivector rank " + std::to_string(rank));
}

/// A traced symplectic leaf: chart points with theta wrapped, the conserved
/// rho, and the drift actually observed.
struct LeafTrace {
  std::vector<ChartPoint> points;
  double rho_ref = 0.0;
  LeafRank classification = LeafRank::rank2;
  bool truncated = false;  ///< the integration hit the tau boundary
  double rho_drift = 0.0;  ///< max |rho - rho_ref| along the trace
};

namespace detail {

/// Unit-speed chart components of the infinitesimal twisted action of the
/// generator with basis index `gen` (1 = E, 2 = F: the non-sigma-fixed
/// directions). Normalizing makes the field invariant under theta shifts,
/// which scale the raw action field of E and F.
inline RVec leaf_field(const BtzModel& model, const ChartPoint& p, int gen) {
  const GroupElement z = chart(model, p);
  const AlgebraVector v =
      infinitesimal_action(z, basis_vector(model.ctx(), gen), model.qt());
  const RMat frame = chart_frame(model, p);
  RVec w = frame.fullPivLu().solve(v.coords);
  const double norm = w.norm();
  if (norm < 1e-13) throw std::runtime_error("leaf field vanished along trace");
  return RVec(w / norm);
}

inline bool tau_ok(const ChartPoint& p) {
  return p.tau > 1e-4 && p.tau < kPi - 1e-4;
}

/// One classical RK4 step of dp/dl = field(p).
inline ChartPoint rk4_step(const BtzModel& model, const ChartPoint& p, int gen,
                           double h) {
  const auto f = [&](const ChartPoint& q) { return leaf_field(model, q, gen); };
  const auto advance = [](const ChartPoint& q, const RVec& d, double scale) {
    return ChartPoint{q.tau + scale * d(0), q.theta + scale * d(1), q.rho + scale * d(2)};
  };
  const RVec k1 = f(p);
  const RVec k2 = f(advance(p, k1, h / 2.0));
  const RVec k3 = f(advance(p, k2, h / 2.0));
  const RVec k4 = f(advance(p, k3, h));
  RVec d = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  return advance(p, d, h);
}

}  // namespace detail

/// Traces the leaf through `start` by integrating the two orbit-distribution
/// fields (the normalized action fields of E and F), one leg per field, both
/// legs starting at `start`. rho is a Casimir: it stays at start.rho up to
/// integrator noise. Legs that reach the tau boundary are truncated and the
/// trace flagged.
inline LeafTrace trace_leaf(const BtzModel& model, const ChartPoint& start,
                            int n_steps, double step_size) {
  if (step_size <= 0.0 || n_steps < 1)
    throw std::invalid_argument("trace_leaf needs positive steps and step size");
  if (classify_point(model, start) == LeafRank::rank0)
    throw std::runtime_error("rank-0 point: each identity-orbit point is its own leaf");

  LeafTrace trace;
  trace.rho_ref = start.rho;
  trace.classification = LeafRank::rank2;
  trace.points.push_back(wrap_quotient(start));

  for (int gen : {1, 2}) {
    ChartPoint p = start;
    for (int step = 0; step < n_steps; ++step) {
      ChartPoint next = detail::rk4_step(model, p, gen, step_size);
      if (!detail::tau_ok(next)) {
        trace.truncated = true;
        break;
      }
      p = next;
      trace.points.push_back(wrap_quotient(p));
      trace.rho_drift = std::max(trace.rho_drift, std::abs(p.rho - trace.rho_ref));
    }
  }
  return trace;
}

}  // namespace qplab

#endif
