#ifndef QPLAB_QUASI_POISSON_HPP
#define QPLAB_QUASI_POISSON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qplab/double_construction.hpp"
#include "qplab/lie_context.hpp"

namespace qplab {

/// Value of a bivector field at a point, as the linear map g* -> g in basis
/// coordinates (right-trivialized): coords(P(xi)) = matrix * xi.coords.
/// The scalar P(xi,eta) is xi(P(eta)) = xi^T * matrix * eta.
struct BivectorMap {
  Mat base_point;
  RMat matrix;
};

/// tau_s = Ad_s o sigma - sigma o Ad_{s^-1}, as a matrix on the algebra.
/// K-skew; vanishes at s = e.
struct TwistOperator {
  Mat base_point;
  RMat matrix;
};

/// Value of a trivector field at a point: the alternating array of its
/// evaluations on basis covector triples. Only strictly increasing triples
/// are stored, so antisymmetry under index swaps is exact by construction.
class TrivectorValue {
public:
  TrivectorValue(Mat base_point, int dim)
      : base_point_(std::move(base_point)),
        dim_(dim),
        comp_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  const Mat& base_point() const { return base_point_; }
  int dim() const { return dim_; }

  void set(int i, int j, int k, double value) {
    comp_[index(i, j, k)] = value;  // callers fill i < j < k
  }

  double operator()(int i, int j, int k) const {
    if (i == j || j == k || i == k) return 0.0;
    double sign = 1.0;
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (j > k) { std::swap(j, k); sign = -sign; }
    if (i > j) { std::swap(i, j); sign = -sign; }
    return sign * comp_[index(i, j, k)];
  }

private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }

  Mat base_point_;
  int dim_;
  std::vector<double> comp_;
};

namespace detail {

/// (1/c) G1^-1, the coordinate matrix of K^-1: g* -> g.
inline RMat k_inv_matrix(const ContextPtr& ctx) {
  return ctx->gram_trace_inv() / ctx->form_scale();
}

}  // namespace detail

/// P_D^sigma at d = (a,b), right-trivialized, as a map d* -> d:
/// (xi,eta) |-> 1/2 ( K^-1(eta o sigma o (Ad_{sigma(b) a^-1} - 1)),
///                   -K^-1(xi  o sigma o (Ad_{sigma(a) b^-1} - 1)) ).
inline BivectorMap p_d_sigma(const GroupElement& a, const GroupElement& b,
                             const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  detail::ensure_same(ctx, a.ctx);
  detail::ensure_same(ctx, b.ctx);
  const int n = ctx->dim();
  const RMat s = qt.sigma().alg_matrix();
  const RMat kinv = detail::k_inv_matrix(ctx);
  const RMat id = RMat::Identity(n, n);

  const Mat sb_ainv = qt.sigma().apply_raw(b.matrix) * a.matrix.inverse();
  const Mat sa_binv = qt.sigma().apply_raw(a.matrix) * b.matrix.inverse();
  const RMat c1 = s * (ad_matrix(ctx, sb_ainv) - id);
  const RMat c2 = s * (ad_matrix(ctx, sa_binv) - id);

  RMat m = RMat::Zero(2 * n, 2 * n);
  m.block(0, n, n, n) = 0.5 * kinv * c1.transpose();
  m.block(n, 0, n, n) = -0.5 * kinv * c2.transpose();

  Mat base = Mat::Zero(2 * ctx->rep_dim(), 2 * ctx->rep_dim());
  base.block(0, 0, ctx->rep_dim(), ctx->rep_dim()) = a.matrix;
  base.block(ctx->rep_dim(), ctx->rep_dim(), ctx->rep_dim(), ctx->rep_dim()) = b.matrix;
  return BivectorMap{std::move(base), std::move(m)};
}

/// P_S^sigma by the closed form, right-trivialized at s:
/// xi |-> 1/2 (Ad_{sigma(s)^-1} - Ad_s) o sigma o K^-1(xi).
inline BivectorMap p_s_sigma(const GroupElement& s, const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  detail::ensure_same(ctx, s.ctx);
  const Mat ss_inv = qt.sigma().apply_raw(s.matrix).inverse();
  const RMat a1 = ad_matrix(ctx, ss_inv);
  const RMat a2 = ad_matrix(ctx, s.matrix);
  RMat m = 0.5 * (a1 - a2) * qt.sigma().alg_matrix() * detail::k_inv_matrix(ctx);
  return BivectorMap{s.matrix, std::move(m)};
}

/// Pushforward of P_D^sigma through (a,b) |-> a b^-1, a bivector at s = a b^-1.
/// Depends on the fiber representative only through a b^-1.
inline BivectorMap project_p_d_to_s(const GroupElement& a, const GroupElement& b,
                                    const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  const int n = ctx->dim();
  const Mat s = a.matrix * b.matrix.inverse();
  const BivectorMap pd = p_d_sigma(a, b, qt);

  // Tangent map of the quotient: (x,y) |-> x - Ad_{ab^-1} y.
  RMat proj(n, 2 * n);
  proj.block(0, 0, n, n) = RMat::Identity(n, n);
  proj.block(0, n, n, n) = -ad_matrix(ctx, s);
  RMat m = proj * pd.matrix * proj.transpose();
  return BivectorMap{s, std::move(m)};
}

/// Pushforward of P_D^sigma through the identification (g,h) |-> g sigma(h)^-1
/// of S^sigma with G. Equals the sigma = id closed form at g sigma(h)^-1.
inline BivectorMap p_s_via_s_sigma(const GroupElement& g, const GroupElement& h,
                                   const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  const int n = ctx->dim();
  const Mat m_pt = g.matrix * qt.sigma().apply_raw(h.matrix).inverse();
  const BivectorMap pd = p_d_sigma(g, h, qt);

  // Tangent map of (g,h) |-> g sigma(h)^-1: (x,y) |-> x - Ad_m sigma(y).
  RMat proj(n, 2 * n);
  proj.block(0, 0, n, n) = RMat::Identity(n, n);
  proj.block(0, n, n, n) = -ad_matrix(ctx, m_pt) * qt.sigma().alg_matrix();
  RMat m = proj * pd.matrix * proj.transpose();
  return BivectorMap{m_pt, std::move(m)};
}

inline TwistOperator twist_operator(const GroupElement& s, const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  detail::ensure_same(ctx, s.ctx);
  const RMat sm = qt.sigma().alg_matrix();
  RMat t = ad_matrix(ctx, s.matrix) * sm - sm * ad_matrix(ctx, Mat(s.matrix.inverse()));
  return TwistOperator{s.matrix, std::move(t)};
}

/// 1/2 [P_S^sigma(s), P_S^sigma(s)](xi,eta,nu) in closed form:
/// 1/4 K(x, [y, tau_s z] + [tau_s y, z] - tau_s [y,z]),  x = K^-1 xi etc.
inline double schouten_closed(const GroupElement& s, const Covector& xi,
                              const Covector& eta, const Covector& nu,
                              const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  const RMat t = twist_operator(s, qt).matrix;
  const AlgebraVector x = k_sharp(xi);
  const AlgebraVector y = k_sharp(eta);
  const AlgebraVector z = k_sharp(nu);
  const AlgebraVector ty = algebra_from_coords(ctx, RVec(t * y.coords));
  const AlgebraVector tz = algebra_from_coords(ctx, RVec(t * z.coords));
  const AlgebraVector yz = bracket(y, z);
  const AlgebraVector tyz = algebra_from_coords(ctx, RVec(t * yz.coords));
  RVec combo = bracket(y, tz).coords + bracket(ty, z).coords - tyz.coords;
  return 0.25 * k_form(x, algebra_from_coords(ctx, combo));
}

/// Infinitesimal twisted-conjugation action at s, right-trivialized:
/// x |-> x - Ad_s sigma(x).
inline AlgebraVector infinitesimal_action(const GroupElement& s, const AlgebraVector& x,
                                          const QuasiTriple& qt) {
  AlgebraVector adsx = Ad(s, qt.sigma()(x));
  return algebra_from_coords(x.ctx, RVec(x.coords - adsx.coords));
}

/// Pushforward of phi^sigma under the infinitesimal action. The covector
/// parameter of the action's dual map carries a factor 1/2: a g_+^sigma*
/// element (zeta, zeta o sigma) restricts to 2 zeta under the Delta_+^sigma
/// identification, so the dual of x |-> x - Ad_s sigma(x) sends xi to the
/// parameter 1/2 xi o (1 - Ad_s sigma). With that bookkeeping
/// 1/2 [P,P] = (phi^sigma)_S holds exactly.
inline double phi_s(const GroupElement& s, const Covector& xi, const Covector& eta,
                    const Covector& nu, const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  const RMat dual =
      0.5 * (RMat::Identity(ctx->dim(), ctx->dim()) -
             ad_matrix(ctx, s.matrix) * qt.sigma().alg_matrix())
                .transpose();
  const Covector zx{ctx, dual * xi.coords};
  const Covector ze{ctx, dual * eta.coords};
  const Covector zn{ctx, dual * nu.coords};
  return 2.0 * k_form(k_sharp(zn), bracket(k_sharp(zx), k_sharp(ze)));
}

namespace detail {

template <typename Fn>
TrivectorValue trivector_from(const GroupElement& s, const QuasiTriple& qt, Fn&& fn) {
  const int n = qt.ctx()->dim();
  TrivectorValue out(s.matrix, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Covector xi = k_flat(basis_vector(qt.ctx(), i));
        const Covector eta = k_flat(basis_vector(qt.ctx(), j));
        const Covector nu = k_flat(basis_vector(qt.ctx(), k));
        out.set(i, j, k, fn(xi, eta, nu));
      }
  return out;
}

}  // namespace detail

/// 1/2 [P_S^sigma, P_S^sigma] at s on K-flat basis covector triples.
inline TrivectorValue half_schouten_trivector(const GroupElement& s,
                                              const QuasiTriple& qt) {
  return detail::trivector_from(
      s, qt, [&](const Covector& a, const Covector& b, const Covector& c) {
        return schouten_closed(s, a, b, c, qt);
      });
}

/// (phi^sigma)_S at s on the same triples; equals half_schouten_trivector.
inline TrivectorValue phi_s_trivector(const GroupElement& s, const QuasiTriple& qt) {
  return detail::trivector_from(
      s, qt, [&](const Covector& a, const Covector& b, const Covector& c) {
        return phi_s(s, a, b, c, qt);
      });
}

/// Twisted conjugation (g,s) |-> g s sigma(g)^-1.
inline GroupElement act(const GroupElement& g, const GroupElement& s,
                        const QuasiTriple& qt) {
  detail::ensure_same(g.ctx, s.ctx);
  return GroupElement{s.ctx,
                      g.matrix * s.matrix * qt.sigma().apply_raw(g.matrix).inverse()};
}

/// || Ad_g o P(s) o Ad_g^* - P(g s sigma(g)^-1) ||_max. Zero by the
/// invariance of P_S^sigma under the twisted action.
inline double invariance_residual(const GroupElement& g, const GroupElement& s,
                                  const QuasiTriple& qt) {
  const RMat adg = ad_matrix(qt.ctx(), g.matrix);
  const RMat lhs = adg * p_s_sigma(s, qt).matrix * adg.transpose();
  const RMat rhs = p_s_sigma(act(g, s, qt), qt).matrix;
  return max_abs(RMat(lhs - rhs));
}

/// Spanning data for the image of P_S^sigma(s): the direct images
/// (Ad_{sigma(s)^-1} - Ad_s) sigma(b_i) and the factored spanning set
/// (1 - Ad_s sigma)(1 + Ad_s sigma)(b_i) = (1 - Ad_{s sigma(s)})(b_i).
struct ImageBasis {
  std::vector<AlgebraVector> direct;
  std::vector<AlgebraVector> factored;
  int rank = 0;
};

inline ImageBasis image_basis(const GroupElement& s, const QuasiTriple& qt,
                              double pivot_tol = 1e-8) {
  const ContextPtr& ctx = qt.ctx();
  const int n = ctx->dim();
  const RMat sm = qt.sigma().alg_matrix();
  const Mat ss_inv = qt.sigma().apply_raw(s.matrix).inverse();
  const RMat direct_m = (ad_matrix(ctx, ss_inv) - ad_matrix(ctx, s.matrix)) * sm;
  const RMat ads_sigma = ad_matrix(ctx, s.matrix) * sm;
  const RMat factored_m =
      (RMat::Identity(n, n) - ads_sigma) * (RMat::Identity(n, n) + ads_sigma);

  ImageBasis out;
  for (int i = 0; i < n; ++i) {
    out.direct.push_back(algebra_from_coords(ctx, RVec(direct_m.col(i))));
    out.factored.push_back(algebra_from_coords(ctx, RVec(factored_m.col(i))));
  }
  out.rank = pivot_rank(direct_m, pivot_tol);
  return out;
}

/// Largest least-squares defect of the image columns of P(s) against the
/// orbit distribution span { b_i - Ad_s sigma(b_i) }; zero when the image is
/// tangent to the twisted-conjugation orbit.
inline double image_tangency_residual(const GroupElement& s, const QuasiTriple& qt) {
  const ContextPtr& ctx = qt.ctx();
  const int n = ctx->dim();
  const RMat orbit =
      RMat::Identity(n, n) - ad_matrix(ctx, s.matrix) * qt.sigma().alg_matrix();
  const ImageBasis img = image_basis(s, qt);
  Eigen::ColPivHouseholderQR<RMat> qr(orbit);
  double worst = 0.0;
  for (const AlgebraVector& v : img.direct) {
    RVec sol = qr.solve(v.coords);
    worst = std::max(worst, max_abs(RMat(orbit * sol - v.coords)));
  }
  return worst;
}

/// Outcome of the sampled fixed-point test; `witness` moves s when not fixed.
struct FixedPointResult {
  bool fixed = true;
  std::optional<GroupElement> witness;
};

/// True iff act(g, s) = s for every sampled g. Samples are exp of scaled
/// basis directions first, then seeded random group elements.
inline FixedPointResult fixed_point_check(const GroupElement& s, const QuasiTriple& qt,
                                          int n_samples = 64,
                                          std::uint64_t seed = 42,
                                          double tol = 1e-10) {
  if (n_samples < 1) throw std::invalid_argument("fixed_point_check needs n_samples >= 1");
  const ContextPtr& ctx = qt.ctx();
  std::vector<GroupElement> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int round = 0; static_cast<int>(samples.size()) < n_samples; ++round) {
    const double scale = 0.35 + 0.45 * round;
    for (int i = 0; i < ctx->dim() && static_cast<int>(samples.size()) < n_samples; ++i) {
      for (double sign : {1.0, -1.0}) {
        if (static_cast<int>(samples.size()) >= n_samples) break;
        RVec c = RVec::Zero(ctx->dim());
        c(i) = sign * scale;
        samples.push_back(exp_matrix(algebra_from_coords(ctx, c)));
      }
    }
    if (round > 8) break;
  }
  Rng rng(seed);
  while (static_cast<int>(samples.size()) < n_samples) samples.push_back(sample_group(ctx, rng));

  for (const GroupElement& g : samples) {
    const GroupElement moved = act(g, s, qt);
    if (max_abs(Mat(moved.matrix - s.matrix)) > tol)
      return FixedPointResult{false, g};
  }
  return FixedPointResult{true, std::nullopt};
}

/// Residual of the su(2) statement that right multiplication by
/// U = diag(i, -i) intertwines conjugation with the Ad_H-twisted action and
/// carries P_S onto P_S^sigma. Both checks are exact identities:
/// U = iH, so Ad_U = sigma on the group and the algebra, and right
/// translation is invisible in the right trivialization.
inline double su2_isomorphism_residual(const GroupElement& s, const QuasiTriple& qt_id,
                                       const QuasiTriple& qt_sigma, int n_samples,
                                       std::uint64_t seed = 42) {
  if (qt_id.ctx()->family() != GroupFamily::su2)
    throw std::invalid_argument("su2_isomorphism_residual needs an su2 context");
  detail::ensure_same(qt_id.ctx(), qt_sigma.ctx());
  const ContextPtr& ctx = qt_id.ctx();
  Mat u = Mat::Zero(2, 2);
  u(0, 0) = Cplx(0, 1);
  u(1, 1) = Cplx(0, -1);
  const GroupElement su{ctx, s.matrix * u};

  double worst = max_abs(
      RMat(p_s_sigma(s, qt_id).matrix - p_s_sigma(su, qt_sigma).matrix));

  Rng rng(seed);
  for (int k = 0; k < n_samples; ++k) {
    const GroupElement g = sample_group(ctx, rng);
    const Mat conj_then_u = g.matrix * s.matrix * g.matrix.inverse() * u;
    const Mat u_then_twist =
        g.matrix * (s.matrix * u) * qt_sigma.sigma().apply_raw(g.matrix).inverse();
    worst = std::max(worst, max_abs(Mat(conj_then_u - u_then_twist)));
  }
  return worst;
}

/// Finite-difference evaluation of 1/2 [P_S^sigma, P_S^sigma](xi,eta,nu) at s.
///
/// Chart: x |-> exp(x^) s around s. The right-trivialized coordinate frame at
/// chart position x is T(x^) b_i with T = 1 + ad/2 + ad^2/6 (the differential
/// of exp, truncated; evaluation only needs first derivatives at x = 0, so
/// the O(|x|^3) truncation drops out of the central differences). Chart
/// components are T^-1 M T^-T; the bracket is the standard coordinate sum
/// sum_l ( P^{li} d_l P^{jk} + P^{lj} d_l P^{ki} + P^{lk} d_l P^{ij} )
/// contracted with the covectors.
inline double schouten_fd(const GroupElement& s, const Covector& xi, const Covector& eta,
                          const Covector& nu, const QuasiTriple& qt, double h = 1e-4) {
  if (h < 1e-12) throw std::invalid_argument("schouten_fd: step underflow");
  const ContextPtr& ctx = qt.ctx();
  const int n = ctx->dim();
  const RMat id = RMat::Identity(n, n);

  const auto chart_components = [&](const RVec& x) -> RMat {
    const Mat xm = ctx->matrix_of(x);
    const GroupElement pos{ctx, exp_matrix(algebra_from_matrix(ctx, xm)).matrix * s.matrix};
    const RMat m = p_s_sigma(pos, qt).matrix;
    const RMat a = ad_algebra_matrix(ctx, xm);
    const RMat frame = id + 0.5 * a + (a * a) / 6.0;
    const RMat frame_inv = frame.inverse();
    return frame_inv * m * frame_inv.transpose();
  };

  const RMat p0 = p_s_sigma(s, qt).matrix;
  std::vector<RMat> dp(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    RVec step = RVec::Zero(n);
    step(l) = h;
    dp[static_cast<std::size_t>(l)] =
        (chart_components(step) - chart_components(RVec(-step))) / (2.0 * h);
  }

  const RVec px = p0 * xi.coords;
  const RVec pe = p0 * eta.coords;
  const RVec pn = p0 * nu.coords;
  double total = 0.0;
  for (int l = 0; l < n; ++l) {
    const RMat& d = dp[static_cast<std::size_t>(l)];
    total += px(l) * eta.coords.dot(d * nu.coords);
    total += pe(l) * nu.coords.dot(d * xi.coords);
    total += pn(l) * xi.coords.dot(d * eta.coords);
  }
  return total;
}

}  // namespace qplab

#endif
