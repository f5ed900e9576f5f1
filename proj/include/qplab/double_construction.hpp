#ifndef QPLAB_DOUBLE_CONSTRUCTION_HPP
#define QPLAB_DOUBLE_CONSTRUCTION_HPP

#include <stdexcept>
#include <utility>

#include "qplab/lie_context.hpp"

namespace qplab {

/// Element of the doubled algebra d = g (+) g.
struct DoubleVector {
  AlgebraVector left;
  AlgebraVector right;
};

/// Element of the doubled group D = G x G.
struct DoubleGroup {
  GroupElement left;
  GroupElement right;
};

/// Element of d* = g* (+) g*.
struct DoubleCovector {
  Covector left;
  Covector right;
};

/// The split pairing, the twisted diagonal embeddings and the quasi-triple
/// characteristic maps for a context with involution sigma. The sigma = id
/// instance recovers the plain diagonal family.
class QuasiTriple {
public:
  QuasiTriple(ContextPtr ctx, Involution sigma)
      : ctx_(std::move(ctx)), sigma_(std::move(sigma)) {
    detail::ensure_same(ctx_, sigma_.ctx());
  }

  const ContextPtr& ctx() const { return ctx_; }
  const Involution& sigma() const { return sigma_; }

private:
  ContextPtr ctx_;
  Involution sigma_;
};

/// <(x,y),(x',y')> = K(x,x') - K(y,y'); the (n,n)-signature form on d.
inline double pairing(const DoubleVector& u, const DoubleVector& v) {
  return k_form(u.left, v.left) - k_form(u.right, v.right);
}

/// (xi,eta) applied to (x,y) through the natural duality of d* with d.
inline double pair(const DoubleCovector& a, const DoubleVector& u) {
  return pair(a.left, u.left) + pair(a.right, u.right);
}

inline DoubleVector delta_plus(const AlgebraVector& x) { return {x, x}; }

inline DoubleVector delta_minus(const AlgebraVector& x) {
  return {x, algebra_from_coords(x.ctx, RVec(-x.coords))};
}

inline DoubleVector delta_plus_sigma(const AlgebraVector& x, const QuasiTriple& qt) {
  return {x, qt.sigma()(x)};
}

/// (x, -sigma(x))
inline DoubleVector delta_minus_sigma(const AlgebraVector& x, const QuasiTriple& qt) {
  AlgebraVector sx = qt.sigma()(x);
  return {x, algebra_from_coords(sx.ctx, RVec(-sx.coords))};
}

inline DoubleGroup delta_plus_grp(const GroupElement& g) { return {g, g}; }

inline DoubleGroup delta_plus_sigma_grp(const GroupElement& g, const QuasiTriple& qt) {
  return {g, qt.sigma()(g)};
}

/// Component of u along g_+^sigma in d = g_+^sigma (+) g_-^sigma:
/// (x,y) |-> Delta_+^sigma((x + sigma y)/2).
inline DoubleVector project_plus(const DoubleVector& u, const QuasiTriple& qt) {
  AlgebraVector sy = qt.sigma()(u.right);
  AlgebraVector half = algebra_from_coords(u.left.ctx, RVec(0.5 * (u.left.coords + sy.coords)));
  return delta_plus_sigma(half, qt);
}

/// Component along g_-^sigma: (x,y) |-> Delta_-^sigma((x - sigma y)/2).
inline DoubleVector project_minus(const DoubleVector& u, const QuasiTriple& qt) {
  AlgebraVector sy = qt.sigma()(u.right);
  AlgebraVector half = algebra_from_coords(u.left.ctx, RVec(0.5 * (u.left.coords - sy.coords)));
  return delta_minus_sigma(half, qt);
}

/// Pullback of a covector through sigma: (xi o sigma)(x) = xi(sigma x).
inline Covector compose_sigma(const Covector& xi, const QuasiTriple& qt) {
  return Covector{xi.ctx, qt.sigma().alg_matrix().transpose() * xi.coords};
}

/// Splits (xi,eta) into its annihilator-of-g_-^sigma and annihilator-of-
/// g_+^sigma parts:
/// (xi,eta) = 1/2 (xi + eta o sigma, xi o sigma + eta)
///          + 1/2 (xi - eta o sigma, -xi o sigma + eta).
inline std::pair<DoubleCovector, DoubleCovector> decompose_covector(
    const DoubleCovector& a, const QuasiTriple& qt) {
  const RMat st = qt.sigma().alg_matrix().transpose();
  RVec xs = st * a.left.coords;   // xi o sigma
  RVec es = st * a.right.coords;  // eta o sigma
  DoubleCovector plus{Covector{a.left.ctx, 0.5 * (a.left.coords + es)},
                      Covector{a.left.ctx, 0.5 * (xs + a.right.coords)}};
  DoubleCovector minus{Covector{a.left.ctx, 0.5 * (a.left.coords - es)},
                       Covector{a.left.ctx, 0.5 * (-xs + a.right.coords)}};
  return {std::move(plus), std::move(minus)};
}

/// j: the g_+^sigma* covector with parameter xi goes to Delta_-^sigma(K^-1 xi).
/// Characterised by <j(a), w> = a(w) for all w in g_+^sigma.
inline DoubleVector j_map(const Covector& xi, const QuasiTriple& qt) {
  return delta_minus_sigma(k_sharp(xi), qt);
}

/// F^sigma(xi,eta) = p_-[j xi, j eta]; identically zero when sigma is an
/// involutive algebra morphism, since [g_-^sigma, g_-^sigma] lies in g_+^sigma.
inline DoubleVector f_sigma(const Covector& xi, const Covector& eta,
                            const QuasiTriple& qt) {
  DoubleVector jx = j_map(xi, qt);
  DoubleVector je = j_map(eta, qt);
  DoubleVector br{bracket(jx.left, je.left), bracket(jx.right, je.right)};
  return project_minus(br, qt);
}

/// phi^sigma(xi,eta,nu) in closed form: 2 K(K^-1 nu, [K^-1 xi, K^-1 eta]).
inline double phi_sigma(const Covector& xi, const Covector& eta, const Covector& nu,
                        const QuasiTriple& qt, double mismatch_tol = 1e-8) {
  const AlgebraVector x = k_sharp(xi);
  const AlgebraVector y = k_sharp(eta);
  const AlgebraVector z = k_sharp(nu);
  const double closed = 2.0 * k_form(z, bracket(x, y));

  // Defining form <j nu, [j xi, j eta]>; the two must agree.
  DoubleVector jx = j_map(xi, qt);
  DoubleVector je = j_map(eta, qt);
  DoubleVector jn = j_map(nu, qt);
  DoubleVector br{bracket(jx.left, je.left), bracket(jx.right, je.right)};
  const double defining = pairing(jn, br);
  if (rel_residual(closed, defining) > mismatch_tol)
    throw std::runtime_error("phi_sigma: closed and defining forms disagree");
  return closed;
}

/// Same two routes, exposed for the verification suite.
inline std::pair<double, double> phi_sigma_routes(const Covector& xi, const Covector& eta,
                                                  const Covector& nu,
                                                  const QuasiTriple& qt) {
  const double closed =
      2.0 * k_form(k_sharp(nu), bracket(k_sharp(xi), k_sharp(eta)));
  DoubleVector jx = j_map(xi, qt);
  DoubleVector je = j_map(eta, qt);
  DoubleVector jn = j_map(nu, qt);
  DoubleVector br{bracket(jx.left, je.left), bracket(jx.right, je.right)};
  return {closed, pairing(jn, br)};
}

/// r-matrix of the quasi-triple: (xi,eta) |-> 1/2 Delta_-^sigma(K^-1(xi + eta o sigma)).
inline DoubleVector r_matrix(const DoubleCovector& a, const QuasiTriple& qt) {
  Covector es = compose_sigma(a.right, qt);
  Covector sum{a.left.ctx, RVec(a.left.coords + es.coords)};
  AlgebraVector v = k_sharp(sum);
  AlgebraVector half = algebra_from_coords(v.ctx, RVec(0.5 * v.coords));
  return delta_minus_sigma(half, qt);
}

/// r-matrix computed through decompose_covector + j, for the two-route check:
/// the plus part of (xi,eta) has parameter 1/2 (xi + eta o sigma) and the
/// r-matrix is (0, j(plus part)) in the g_+^sigma (+) g_-^sigma splitting.
inline DoubleVector r_matrix_via_decomposition(const DoubleCovector& a,
                                               const QuasiTriple& qt) {
  auto [plus, minus] = decompose_covector(a, qt);
  return j_map(plus.left, qt);
}

}  // namespace qplab

#endif
