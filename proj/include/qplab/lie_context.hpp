#ifndef QPLAB_LIE_CONTEXT_HPP
#define QPLAB_LIE_CONTEXT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qplab/numerics.hpp"

namespace qplab {

enum class GroupFamily { sl2r, slnr, su2 };

class LieContext;
using ContextPtr = std::shared_ptr<const LieContext>;

/// A matrix Lie group/algebra pair with a fixed ordered basis, the trace
/// pairing K(x,y) = form_scale * Re tr(xy), and the derived Gram data.
///
/// Everything downstream (doubles, bivectors, the SL(2,R) model) computes in
/// the coordinates of this basis. Instances are immutable; share by ContextPtr.
class LieContext {
public:
  LieContext(GroupFamily family, std::string name, int rep_dim,
             std::vector<Mat> basis, double form_scale)
      : family_(family),
        name_(std::move(name)),
        rep_dim_(rep_dim),
        form_scale_(form_scale),
        basis_(std::move(basis)) {
    if (form_scale_ <= 0.0) throw std::invalid_argument("form_scale must be positive");
    const int n = static_cast<int>(basis_.size());
    gram1_.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gram1_(i, j) = (basis_[i] * basis_[j]).trace().real();
    Eigen::FullPivLU<RMat> lu(gram1_);
    if (!lu.isInvertible())
      throw std::invalid_argument("degenerate trace form on the chosen basis");
    gram1_inv_ = lu.inverse();

    // Structure constants: [b_i, b_j] = sum_k c_ijk b_k, stored as
    // struct_consts_[i](j, k) = c_ijk.
    struct_consts_.assign(static_cast<std::size_t>(n), RMat::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Mat br = basis_[i] * basis_[j] - basis_[j] * basis_[i];
        struct_consts_[static_cast<std::size_t>(i)].row(j) = coords_of(br).transpose();
      }
  }

  GroupFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  int rep_dim() const { return rep_dim_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  double form_scale() const { return form_scale_; }
  const std::vector<Mat>& basis() const { return basis_; }

  /// Gram matrix of K on the basis (includes form_scale).
  RMat gram() const { return form_scale_ * gram1_; }
  const RMat& gram_trace() const { return gram1_; }
  const RMat& gram_trace_inv() const { return gram1_inv_; }

  /// c_ijk with [b_i, b_j] = sum_k c_ijk b_k.
  double structure_constant(int i, int j, int k) const {
    return struct_consts_[static_cast<std::size_t>(i)](j, k);
  }
  const std::vector<RMat>& structure_constants() const { return struct_consts_; }

  /// Coordinates of an algebra-valued matrix in the basis, via the Gram
  /// system gram1 * c = (Re tr(b_j m))_j. Exact for m in the span.
  RVec coords_of(const Mat& m) const {
    const int n = dim();
    RVec k(n);
    for (int j = 0; j < n; ++j) k(j) = (basis_[j] * m).trace().real();
    return gram1_inv_ * k;
  }

  Mat matrix_of(const RVec& coords) const {
    Mat m = Mat::Zero(rep_dim_, rep_dim_);
    for (int i = 0; i < dim(); ++i) m += Cplx(coords(i), 0.0) * basis_[i];
    return m;
  }

  /// Residual of m against its own basis expansion; ~0 iff m lies in the
  /// algebra span (trace-free, and anti-Hermitian for su2).
  double span_residual(const Mat& m) const {
    return max_abs(Mat(m - matrix_of(coords_of(m))));
  }

  /// Group-membership residual: |det-1|, plus the unitarity defect for su2.
  double group_residual(const Mat& g) const {
    double r = std::abs(g.determinant() - Cplx(1.0, 0.0));
    if (family_ == GroupFamily::su2) {
      Mat defect = g.adjoint() * g - Mat::Identity(rep_dim_, rep_dim_);
      r = std::max(r, max_abs(defect));
    }
    return r;
  }

private:
  GroupFamily family_;
  std::string name_;
  int rep_dim_;
  double form_scale_;
  std::vector<Mat> basis_;
  RMat gram1_;
  RMat gram1_inv_;
  std::vector<RMat> struct_consts_;
};

/// Element of the Lie algebra: matrix plus its coordinates, kept in sync.
struct AlgebraVector {
  ContextPtr ctx;
  Mat matrix;
  RVec coords;
};

/// Invertible matrix in the group (det 1; unitary as well for su2).
struct GroupElement {
  ContextPtr ctx;
  Mat matrix;
};

/// Element of the dual algebra, stored in the basis dual to ctx->basis():
/// xi(x) = coords . coords_of(x).
struct Covector {
  ContextPtr ctx;
  RVec coords;
};

namespace detail {
inline void ensure_same(const ContextPtr& a, const ContextPtr& b) {
  if (a.get() != b.get()) throw std::invalid_argument("operands use different LieContexts");
}
}  // namespace detail

inline AlgebraVector algebra_from_matrix(ContextPtr ctx, const Mat& m) {
  RVec c = ctx->coords_of(m);
  return AlgebraVector{std::move(ctx), m, std::move(c)};
}

inline AlgebraVector algebra_from_coords(ContextPtr ctx, const RVec& coords) {
  Mat m = ctx->matrix_of(coords);
  return AlgebraVector{std::move(ctx), std::move(m), coords};
}

inline AlgebraVector basis_vector(const ContextPtr& ctx, int i) {
  RVec c = RVec::Zero(ctx->dim());
  c(i) = 1.0;
  return algebra_from_coords(ctx, c);
}

inline AlgebraVector zero_algebra(const ContextPtr& ctx) {
  return algebra_from_coords(ctx, RVec::Zero(ctx->dim()));
}

inline GroupElement group_identity(ContextPtr ctx) {
  Mat m = Mat::Identity(ctx->rep_dim(), ctx->rep_dim());
  return GroupElement{std::move(ctx), std::move(m)};
}

inline GroupElement group_from_matrix(ContextPtr ctx, const Mat& m) {
  return GroupElement{std::move(ctx), m};
}

inline GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  detail::ensure_same(a.ctx, b.ctx);
  return GroupElement{a.ctx, a.matrix * b.matrix};
}

inline GroupElement inverse(const GroupElement& g) {
  return GroupElement{g.ctx, g.matrix.inverse()};
}

inline Covector covector_from_coords(ContextPtr ctx, const RVec& coords) {
  return Covector{std::move(ctx), coords};
}

/// xi(x)
inline double pair(const Covector& xi, const AlgebraVector& x) {
  detail::ensure_same(xi.ctx, x.ctx);
  return xi.coords.dot(x.coords);
}

/// [x, y] = xy - yx
inline AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) {
  detail::ensure_same(x.ctx, y.ctx);
  return algebra_from_matrix(x.ctx, Mat(x.matrix * y.matrix - y.matrix * x.matrix));
}

/// K(x, y) = form_scale * Re tr(xy)
inline double k_form(const AlgebraVector& x, const AlgebraVector& y) {
  detail::ensure_same(x.ctx, y.ctx);
  return x.ctx->form_scale() * (x.matrix * y.matrix).trace().real();
}

/// x -> K(x, .)
inline Covector k_flat(const AlgebraVector& x) {
  return Covector{x.ctx, x.ctx->form_scale() * (x.ctx->gram_trace() * x.coords)};
}

/// Inverse of k_flat.
inline Covector k_flat_of_coords(const ContextPtr& ctx, const RVec& vec_coords) {
  return Covector{ctx, ctx->form_scale() * (ctx->gram_trace() * vec_coords)};
}

inline AlgebraVector k_sharp(const Covector& xi) {
  RVec c = (xi.ctx->gram_trace_inv() * xi.coords) / xi.ctx->form_scale();
  return algebra_from_coords(xi.ctx, c);
}

/// Ad_g x = g x g^-1
inline AlgebraVector Ad(const GroupElement& g, const AlgebraVector& x) {
  detail::ensure_same(g.ctx, x.ctx);
  Eigen::FullPivLU<Mat> lu(g.matrix);
  if (!lu.isInvertible()) throw std::invalid_argument("Ad of a non-invertible matrix");
  return algebra_from_matrix(x.ctx, Mat(g.matrix * x.matrix * lu.inverse()));
}

/// Matrix of Ad_g on the algebra, in basis coordinates.
inline RMat ad_matrix(const ContextPtr& ctx, const Mat& g) {
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible()) throw std::invalid_argument("Ad of a non-invertible matrix");
  const Mat ginv = lu.inverse();
  const int n = ctx->dim();
  RMat out(n, n);
  for (int i = 0; i < n; ++i)
    out.col(i) = ctx->coords_of(Mat(g * ctx->basis()[i] * ginv));
  return out;
}

/// Matrix of ad_x = [x, .] on the algebra, in basis coordinates.
inline RMat ad_algebra_matrix(const ContextPtr& ctx, const Mat& x) {
  const int n = ctx->dim();
  RMat out(n, n);
  for (int i = 0; i < n; ++i)
    out.col(i) = ctx->coords_of(Mat(x * ctx->basis()[i] - ctx->basis()[i] * x));
  return out;
}

/// Involution sigma of the group and algebra. Either the identity or
/// conjugation by a fixture matrix F (sigma = Ad_F). F need not itself
/// satisfy the group's det constraint: conjugation by any involutive
/// invertible matrix that preserves the algebra is an automorphism.
class Involution {
public:
  static Involution identity(ContextPtr ctx) {
    Involution s;
    s.ctx_ = std::move(ctx);
    s.is_identity_ = true;
    s.alg_matrix_ = RMat::Identity(s.ctx_->dim(), s.ctx_->dim());
    return s;
  }

  static Involution ad_of(ContextPtr ctx, const Mat& fixture) {
    Involution s;
    s.ctx_ = std::move(ctx);
    s.is_identity_ = false;
    s.fixture_ = fixture;
    s.fixture_inv_ = fixture.inverse();
    s.alg_matrix_ = ad_matrix(s.ctx_, fixture);
    return s;
  }

  const ContextPtr& ctx() const { return ctx_; }
  bool is_identity() const { return is_identity_; }
  const Mat& fixture() const { return fixture_; }

  /// Matrix of sigma on the algebra in basis coordinates.
  const RMat& alg_matrix() const { return alg_matrix_; }

  AlgebraVector operator()(const AlgebraVector& x) const {
    detail::ensure_same(ctx_, x.ctx);
    if (is_identity_) return x;
    return algebra_from_matrix(ctx_, Mat(fixture_ * x.matrix * fixture_inv_));
  }

  GroupElement operator()(const GroupElement& g) const {
    detail::ensure_same(ctx_, g.ctx);
    if (is_identity_) return g;
    return GroupElement{ctx_, fixture_ * g.matrix * fixture_inv_};
  }

  Mat apply_raw(const Mat& m) const {
    if (is_identity_) return m;
    return fixture_ * m * fixture_inv_;
  }

private:
  ContextPtr ctx_;
  bool is_identity_ = true;
  Mat fixture_;
  Mat fixture_inv_;
  RMat alg_matrix_;
};

/// Matrix exponential into the group. 2x2 trace-free matrices use the closed
/// form exp(x) = a(d) I + b(d) x with d = det x (x^2 = -d I); other sizes use
/// scaling-and-squaring with a Taylor series.
inline GroupElement exp_matrix(const AlgebraVector& x) {
  const ContextPtr& ctx = x.ctx;
  const int n = ctx->rep_dim();
  const Mat& m = x.matrix;

  // Diagonal matrices exponentiate entrywise; the closed form below loses
  // precision on them through cosh(w) - sinh(w) when w is large.
  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && m(i, j) != Cplx(0.0, 0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Mat out = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i) out(i, i) = std::exp(m(i, i));
    return GroupElement{ctx, std::move(out)};
  }

  if (n == 2 && std::abs(m.trace()) < 1e-12) {
    const double d = m.determinant().real();
    double a;
    double b;
    if (d > 1e-10) {
      const double w = std::sqrt(d);
      a = std::cos(w);
      b = std::sin(w) / w;
    } else if (d < -1e-10) {
      const double w = std::sqrt(-d);
      a = std::cosh(w);
      b = std::sinh(w) / w;
    } else {
      a = 1.0 - d / 2.0 + d * d / 24.0;
      b = 1.0 - d / 6.0 + d * d / 120.0;
    }
    return GroupElement{ctx, a * Mat::Identity(2, 2) + Cplx(b, 0.0) * m};
  }

  // Scaling and squaring with a plain Taylor sum; dimensions here are tiny.
  double norm = m.cwiseAbs().sum();
  int squarings = 0;
  Mat scaled = m;
  while (norm > 0.5) {
    scaled *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (max_abs(term) < 1e-20) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return GroupElement{ctx, std::move(result)};
}

// --- context factories ---------------------------------------------------

/// sl(2,R) with the ordered basis H = diag(1,-1), E = [[0,1],[0,0]],
/// F = [[0,0],[1,0]].
inline ContextPtr make_sl2r(double form_scale = 1.0) {
  std::vector<Mat> basis(3, Mat::Zero(2, 2));
  basis[0](0, 0) = 1.0;
  basis[0](1, 1) = -1.0;
  basis[1](0, 1) = 1.0;
  basis[2](1, 0) = 1.0;
  return std::make_shared<LieContext>(GroupFamily::sl2r, "sl2r", 2, std::move(basis),
                                      form_scale);
}

/// sl(n,R), basis ordered as (H_1..H_{n-1}, E_12, E_21, E_13, E_31, ...),
/// H_i = E_ii - E_{i+1,i+1}.
inline ContextPtr make_slnr(int n, double form_scale = 1.0) {
  if (n < 2) throw std::invalid_argument("slnr needs n >= 2");
  std::vector<Mat> basis;
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    basis.push_back(std::move(h));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
      Mat f = Mat::Zero(n, n);
      f(j, i) = 1.0;
      basis.push_back(f);
    }
  }
  return std::make_shared<LieContext>(GroupFamily::slnr, "sl" + std::to_string(n) + "r",
                                      n, std::move(basis), form_scale);
}

/// su(2) with the anti-Hermitian basis (i s3, i s1, i s2).
inline ContextPtr make_su2(double form_scale = 1.0) {
  std::vector<Mat> basis(3, Mat::Zero(2, 2));
  basis[0](0, 0) = Cplx(0, 1);
  basis[0](1, 1) = Cplx(0, -1);
  basis[1](0, 1) = Cplx(0, 1);
  basis[1](1, 0) = Cplx(0, 1);
  basis[2](0, 1) = 1.0;
  basis[2](1, 0) = -1.0;
  return std::make_shared<LieContext>(GroupFamily::su2, "su2", 2, std::move(basis),
                                      form_scale);
}

inline ContextPtr make_context(const std::string& name, double form_scale = 1.0) {
  if (name == "sl2r") return make_sl2r(form_scale);
  if (name == "su2") return make_su2(form_scale);
  if (name.size() >= 4 && name.substr(0, 2) == "sl" && name.back() == 'r') {
    const int n = std::stoi(name.substr(2, name.size() - 3));
    return make_slnr(n, form_scale);
  }
  throw std::invalid_argument("unknown group: " + name);
}

/// The diagonal signature fixture used for the Ad_H-type involution of each
/// family: diag(1,-1) for the 2x2 groups, diag(1,-1,1,...) for sl(n,R).
inline Involution make_adh_involution(const ContextPtr& ctx) {
  const int n = ctx->rep_dim();
  Mat h = Mat::Identity(n, n);
  for (int i = 1; i < n; i += 2) h(i, i) = -1.0;
  return Involution::ad_of(ctx, h);
}

// --- seeded sampling ------------------------------------------------------

/// Algebra sample with matrix entries uniform in [-1,1] (trace-free by
/// construction; anti-Hermitian for su2).
inline AlgebraVector sample_algebra(const ContextPtr& ctx, Rng& rng) {
  const int n = ctx->rep_dim();
  Mat m = Mat::Zero(n, n);
  switch (ctx->family()) {
    case GroupFamily::sl2r:
    case GroupFamily::slnr: {
      RVec diag(n);
      for (int i = 0; i < n; ++i) diag(i) = rng.uniform();
      diag.array() -= diag.mean();
      for (int i = 0; i < n; ++i) {
        m(i, i) = diag(i);
        for (int j = 0; j < n; ++j)
          if (i != j) m(i, j) = rng.uniform();
      }
      break;
    }
    case GroupFamily::su2: {
      const double a = rng.uniform();
      const double b = rng.uniform();
      const double c = rng.uniform();
      m(0, 0) = Cplx(0, a);
      m(1, 1) = Cplx(0, -a);
      m(0, 1) = Cplx(c, b);
      m(1, 0) = Cplx(-c, b);
      break;
    }
  }
  return algebra_from_matrix(ctx, m);
}

/// Group sample: exp of an algebra sample.
inline GroupElement sample_group(const ContextPtr& ctx, Rng& rng) {
  return exp_matrix(sample_algebra(ctx, rng));
}

/// Covector sample with dual-basis coordinates uniform in [-1,1].
inline Covector sample_covector(const ContextPtr& ctx, Rng& rng) {
  RVec c(ctx->dim());
  for (int i = 0; i < ctx->dim(); ++i) c(i) = rng.uniform();
  return Covector{ctx, std::move(c)};
}

}  // namespace qplab

#endif
