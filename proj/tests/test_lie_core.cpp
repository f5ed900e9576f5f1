#include <catch2/catch.hpp>

#include "qplab/lie_context.hpp"

using namespace qplab;

namespace {
constexpr double pi = 3.14159265358979323846;
const ContextPtr sl2 = make_sl2r();
const AlgebraVector H = basis_vector(sl2, 0);
const AlgebraVector E = basis_vector(sl2, 1);
const AlgebraVector F = basis_vector(sl2, 2);
}  // namespace

TEST_CASE("sl2r bracket on the standard basis") {
  CHECK(max_abs(Mat(bracket(H, E).matrix - 2.0 * E.matrix)) < 1e-14);
  CHECK(max_abs(Mat(bracket(E, F).matrix - H.matrix)) < 1e-14);
  CHECK(max_abs(bracket(E, E).matrix) == 0.0);

  Rng rng(7);
  const AlgebraVector x = sample_algebra(sl2, rng);
  CHECK(bracket(x, x).coords.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bracket rejects mixed contexts") {
  const ContextPtr other = make_sl2r();
  CHECK_THROWS_AS(bracket(H, basis_vector(other, 0)), std::invalid_argument);
}

TEST_CASE("trace form values") {
  CHECK(k_form(E, F) == Approx(1.0));
  CHECK(k_form(H, H) == Approx(2.0));
  CHECK(k_form(H, E) == Approx(0.0).margin(1e-15));
}

TEST_CASE("musical isomorphisms") {
  CHECK(pair(k_flat(E), F) == Approx(1.0));

  const RVec flat_h = k_flat(H).coords;
  CHECK(flat_h(0) == Approx(2.0));
  CHECK(flat_h(1) == Approx(0.0).margin(1e-15));
  CHECK(flat_h(2) == Approx(0.0).margin(1e-15));

  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const AlgebraVector x = sample_algebra(sl2, rng);
    CHECK((k_sharp(k_flat(x)).coords - x.coords).cwiseAbs().maxCoeff() < 1e-12);
    const Covector xi = sample_covector(sl2, rng);
    CHECK((k_flat(k_sharp(xi)).coords - xi.coords).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("form scale propagates through K") {
  const ContextPtr scaled = make_sl2r(3.0);
  const AlgebraVector e = basis_vector(scaled, 1);
  const AlgebraVector f = basis_vector(scaled, 2);
  CHECK(k_form(e, f) == Approx(3.0));
  CHECK((k_sharp(k_flat(e)).coords - e.coords).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjoint action") {
  // H is not in SL(2,R) but conjugation by it is still well-defined.
  const GroupElement h_conj{sl2, H.matrix};
  CHECK(max_abs(Mat(Ad(h_conj, E).matrix + E.matrix)) < 1e-14);

  CHECK(max_abs(Mat(Ad(group_identity(sl2), F).matrix - F.matrix)) < 1e-14);

  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const GroupElement g = sample_group(sl2, rng);
    const AlgebraVector x = sample_algebra(sl2, rng);
    const AlgebraVector y = sample_algebra(sl2, rng);
    const AlgebraVector lhs = Ad(g, bracket(x, y));
    const AlgebraVector rhs = bracket(Ad(g, x), Ad(g, y));
    CHECK((lhs.coords - rhs.coords).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("involution Ad_H on sl2r") {
  const Involution sigma = make_adh_involution(sl2);
  CHECK(max_abs(Mat(sigma(E).matrix + E.matrix)) < 1e-14);
  CHECK(max_abs(Mat(sigma(H).matrix - H.matrix)) < 1e-14);

  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const GroupElement g = sample_group(sl2, rng);
    CHECK(max_abs(Mat(sigma(sigma(g)).matrix - g.matrix)) < 1e-12);
  }
}

TEST_CASE("matrix exponential") {
  SECTION("exp(0) is the identity") {
    CHECK(max_abs(Mat(exp_matrix(zero_algebra(sl2)).matrix - Mat::Identity(2, 2))) ==
          0.0);
  }

  SECTION("diagonal: exp(pi H) = diag(e^pi, e^-pi)") {
    RVec c = RVec::Zero(3);
    c(0) = pi;
    const Mat g = exp_matrix(algebra_from_coords(sl2, c)).matrix;
    CHECK(g(0, 0).real() == Approx(std::exp(pi)).epsilon(1e-14));
    CHECK(g(1, 1).real() == Approx(std::exp(-pi)).epsilon(1e-14));
    CHECK(std::abs(g(0, 1)) == 0.0);
  }

  SECTION("nilpotent: exp(t E) = [[1,t],[0,1]]") {
    RVec c = RVec::Zero(3);
    c(1) = 0.37;
    const Mat g = exp_matrix(algebra_from_coords(sl2, c)).matrix;
    CHECK(g(0, 0).real() == Approx(1.0));
    CHECK(g(0, 1).real() == Approx(0.37));
    CHECK(std::abs(g(1, 0)) < 1e-15);
  }

  SECTION("trigonometric branch stays in SU(2)") {
    const ContextPtr su = make_su2();
    Rng rng(13);
    for (int i = 0; i < 10; ++i) {
      const GroupElement g = sample_group(su, rng);
      CHECK(su->group_residual(g.matrix) < 1e-12);
    }
  }

  SECTION("exp(x) exp(-x) = 1 across representations") {
    for (const ContextPtr& ctx : {make_sl2r(), make_slnr(3), make_su2()}) {
      Rng rng(17);
      for (int i = 0; i < 10; ++i) {
        const AlgebraVector x = sample_algebra(ctx, rng);
        const Mat prod =
            exp_matrix(x).matrix *
            exp_matrix(algebra_from_coords(ctx, RVec(-x.coords))).matrix;
        CHECK(max_abs(Mat(prod - Mat::Identity(ctx->rep_dim(), ctx->rep_dim()))) <
              1e-12);
      }
    }
  }
}

TEST_CASE("contexts satisfy their structural invariants") {
  for (const ContextPtr& ctx : {make_sl2r(), make_slnr(3), make_su2()}) {
    const int n = ctx->dim();

    SECTION("basis is trace-free and independent: " + ctx->name()) {
      for (const Mat& b : ctx->basis()) CHECK(std::abs(b.trace()) < 1e-15);
      CHECK(pivot_rank(ctx->gram_trace()) == n);
    }

    SECTION("structure constants reproduce the commutator: " + ctx->name()) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const AlgebraVector br = bracket(basis_vector(ctx, i), basis_vector(ctx, j));
          CHECK(ctx->span_residual(br.matrix) < 1e-12);
          Mat sum = Mat::Zero(ctx->rep_dim(), ctx->rep_dim());
          for (int k = 0; k < n; ++k)
            sum += Cplx(ctx->structure_constant(i, j, k), 0.0) * ctx->basis()[k];
          CHECK(max_abs(Mat(br.matrix - sum)) < 1e-12);
          for (int k = 0; k < n; ++k)
            CHECK(ctx->structure_constant(i, j, k) ==
                  Approx(-ctx->structure_constant(j, i, k)).margin(1e-13));
        }
    }

    SECTION("Jacobi identity: " + ctx->name()) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const AlgebraVector bi = basis_vector(ctx, i);
            const AlgebraVector bj = basis_vector(ctx, j);
            const AlgebraVector bk = basis_vector(ctx, k);
            const RVec cyc = bracket(bracket(bi, bj), bk).coords +
                             bracket(bracket(bj, bk), bi).coords +
                             bracket(bracket(bk, bi), bj).coords;
            CHECK(cyc.cwiseAbs().maxCoeff() < 1e-12);
          }
    }

    SECTION("K is Ad-invariant: " + ctx->name()) {
      Rng rng(fnv1a64(ctx->name()));
      for (int k = 0; k < 50; ++k) {
        const GroupElement g = sample_group(ctx, rng);
        const AlgebraVector x = sample_algebra(ctx, rng);
        const AlgebraVector y = sample_algebra(ctx, rng);
        CHECK(rel_residual(k_form(Ad(g, x), Ad(g, y)), k_form(x, y)) < 1e-10);
      }
    }

    SECTION("involution axioms on the full basis: " + ctx->name()) {
      const Involution sigma = make_adh_involution(ctx);
      for (int i = 0; i < n; ++i) {
        const AlgebraVector bi = basis_vector(ctx, i);
        CHECK((sigma(sigma(bi)).coords - bi.coords).cwiseAbs().maxCoeff() < 1e-12);
        for (int j = 0; j < n; ++j) {
          const AlgebraVector bj = basis_vector(ctx, j);
          const RVec morph =
              sigma(bracket(bi, bj)).coords - bracket(sigma(bi), sigma(bj)).coords;
          CHECK(morph.cwiseAbs().maxCoeff() < 1e-12);
          CHECK(std::abs(k_form(sigma(bi), sigma(bj)) - k_form(bi, bj)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("group membership residuals") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i)
    CHECK(sl2->group_residual(sample_group(sl2, rng).matrix) < 1e-10);

  const ContextPtr sl3 = make_slnr(3);
  for (int i = 0; i < 10; ++i)
    CHECK(sl3->group_residual(sample_group(sl3, rng).matrix) < 1e-10);

  Mat bad = Mat::Identity(2, 2);
  bad(0, 0) = 2.0;
  CHECK(sl2->group_residual(bad) > 0.5);
}

TEST_CASE("algebra vectors keep matrix and coordinates in sync") {
  Rng rng(29);
  for (const ContextPtr& ctx : {make_sl2r(), make_slnr(3), make_su2()}) {
    for (int i = 0; i < 10; ++i) {
      const AlgebraVector x = sample_algebra(ctx, rng);
      CHECK(max_abs(Mat(ctx->matrix_of(x.coords) - x.matrix)) < 1e-12);
      CHECK(ctx->span_residual(x.matrix) < 1e-12);
    }
  }
}
