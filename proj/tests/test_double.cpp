#include <catch2/catch.hpp>

#include "qplab/double_construction.hpp"

using namespace qplab;

namespace {
const ContextPtr sl2 = make_sl2r();
const QuasiTriple qt_sigma(sl2, make_adh_involution(sl2));
const QuasiTriple qt_id(sl2, Involution::identity(sl2));
const AlgebraVector H = basis_vector(sl2, 0);
const AlgebraVector E = basis_vector(sl2, 1);
const AlgebraVector F = basis_vector(sl2, 2);

double coords_gap(const DoubleVector& a, const DoubleVector& b) {
  return std::max((a.left.coords - b.left.coords).cwiseAbs().maxCoeff(),
                  (a.right.coords - b.right.coords).cwiseAbs().maxCoeff());
}

double norm_of(const DoubleVector& a) {
  return std::max(a.left.coords.cwiseAbs().maxCoeff(),
                  a.right.coords.cwiseAbs().maxCoeff());
}
}  // namespace

TEST_CASE("split pairing") {
  CHECK(pairing({E, E}, {F, F}) == Approx(0.0).margin(1e-15));
  CHECK(pairing({E, zero_algebra(sl2)}, {F, zero_algebra(sl2)}) == Approx(1.0));

  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const AlgebraVector x = sample_algebra(sl2, rng);
    const AlgebraVector y = sample_algebra(sl2, rng);
    CHECK(pairing(delta_plus_sigma(x, qt_sigma), delta_plus_sigma(y, qt_sigma)) ==
          Approx(0.0).margin(1e-13));
  }
}

TEST_CASE("twisted diagonal embeddings") {
  CHECK(coords_gap(delta_minus_sigma(E, qt_sigma), DoubleVector{E, E}) < 1e-14);
  CHECK(coords_gap(delta_plus_sigma(H, qt_sigma), DoubleVector{H, H}) < 1e-14);

  Rng rng(37);
  const AlgebraVector x = sample_algebra(sl2, rng);
  const DoubleVector dm = delta_minus(x);
  CHECK((dm.right.coords + x.coords).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("projections onto the twisted splitting") {
  const DoubleVector ee{E, E};
  CHECK(norm_of(project_plus(ee, qt_sigma)) < 1e-14);
  CHECK(coords_gap(project_minus(ee, qt_sigma), ee) < 1e-14);

  const DoubleVector hh{H, H};
  CHECK(coords_gap(project_plus(hh, qt_sigma), hh) < 1e-14);
  CHECK(norm_of(project_minus(hh, qt_sigma)) < 1e-14);

  Rng rng(41);
  for (int i = 0; i < 50; ++i) {
    const DoubleVector u{sample_algebra(sl2, rng), sample_algebra(sl2, rng)};
    const DoubleVector p = project_plus(u, qt_sigma);
    const DoubleVector m = project_minus(u, qt_sigma);
    CHECK((p.left.coords + m.left.coords - u.left.coords).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK((p.right.coords + m.right.coords - u.right.coords).cwiseAbs().maxCoeff() <
          1e-13);
  }
}

TEST_CASE("direct sum of the twisted subspaces") {
  for (const QuasiTriple* qt : {&qt_sigma, &qt_id}) {
    const int n = sl2->dim();
    RMat span(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      const DoubleVector p = delta_plus_sigma(basis_vector(sl2, i), *qt);
      const DoubleVector m = delta_minus_sigma(basis_vector(sl2, i), *qt);
      span.col(i) << p.left.coords, p.right.coords;
      span.col(n + i) << m.left.coords, m.right.coords;
    }
    CHECK(pivot_rank(span, 1e-8) == 2 * n);
  }
}

TEST_CASE("covector decomposition") {
  Rng rng(43);
  const Covector xi = sample_covector(sl2, rng);
  const Covector xi_sigma = compose_sigma(xi, qt_sigma);

  SECTION("plus-type covectors decompose trivially") {
    const DoubleCovector a{xi, xi_sigma};
    const auto [plus, minus] = decompose_covector(a, qt_sigma);
    CHECK((plus.left.coords - xi.coords).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((plus.right.coords - xi_sigma.coords).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(minus.left.coords.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(minus.right.coords.cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("minus-type covectors decompose trivially") {
    const DoubleCovector a{xi, Covector{sl2, RVec(-xi_sigma.coords)}};
    const auto [plus, minus] = decompose_covector(a, qt_sigma);
    CHECK(plus.left.coords.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((minus.left.coords - xi.coords).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("(xi, 0) splits into half plus and half minus parts") {
    const DoubleCovector a{xi, Covector{sl2, RVec::Zero(3)}};
    const auto [plus, minus] = decompose_covector(a, qt_sigma);
    CHECK((plus.left.coords - 0.5 * xi.coords).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((plus.right.coords - 0.5 * xi_sigma.coords).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((minus.left.coords - 0.5 * xi.coords).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((minus.right.coords + 0.5 * xi_sigma.coords).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("parts annihilate the complementary subspaces") {
    for (int i = 0; i < 25; ++i) {
      const DoubleCovector a{sample_covector(sl2, rng), sample_covector(sl2, rng)};
      const auto [plus, minus] = decompose_covector(a, qt_sigma);
      const AlgebraVector w = sample_algebra(sl2, rng);
      CHECK(std::abs(pair(plus, delta_minus_sigma(w, qt_sigma))) < 1e-13);
      CHECK(std::abs(pair(minus, delta_plus_sigma(w, qt_sigma))) < 1e-13);
    }
  }
}

TEST_CASE("j map") {
  CHECK(coords_gap(j_map(k_flat(E), qt_sigma), DoubleVector{E, E}) < 1e-13);

  const DoubleVector jh = j_map(k_flat(H), qt_sigma);
  CHECK((jh.left.coords - H.coords).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((jh.right.coords + H.coords).cwiseAbs().maxCoeff() < 1e-13);

  SECTION("characterized by its pairing against the plus subspace") {
    Rng rng(47);
    for (int i = 0; i < 50; ++i) {
      const Covector xi = sample_covector(sl2, rng);
      const AlgebraVector w = sample_algebra(sl2, rng);
      const double lhs = pairing(j_map(xi, qt_sigma), delta_plus_sigma(w, qt_sigma));
      const double rhs =
          pair(xi, w) + pair(compose_sigma(xi, qt_sigma), qt_sigma.sigma()(w));
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("F^sigma vanishes") {
  CHECK(norm_of(f_sigma(k_flat(E), k_flat(F), qt_sigma)) < 1e-14);

  Rng rng(53);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i)
    worst = std::max(worst, norm_of(f_sigma(sample_covector(sl2, rng),
                                            sample_covector(sl2, rng), qt_sigma)));
  CHECK(worst < 1e-12);

  for (int i = 0; i < 20; ++i)
    CHECK(norm_of(f_sigma(sample_covector(sl2, rng), sample_covector(sl2, rng),
                          qt_id)) < 1e-12);
}

TEST_CASE("phi^sigma") {
  // 2 K(F, [H, E]) = 2 K(F, 2E) = 4 tr(FE) = 4
  CHECK(phi_sigma(k_flat(H), k_flat(E), k_flat(F), qt_sigma) == Approx(4.0));

  Rng rng(59);
  const Covector a = sample_covector(sl2, rng);
  const Covector b = sample_covector(sl2, rng);
  const Covector c = sample_covector(sl2, rng);
  CHECK(std::abs(phi_sigma(a, a, c, qt_sigma)) < 1e-13);
  CHECK(phi_sigma(a, b, c, qt_sigma) == Approx(-phi_sigma(b, a, c, qt_sigma)));

  SECTION("closed form equals the defining form") {
    for (const ContextPtr& ctx : {make_sl2r(), make_slnr(3), make_su2()}) {
      const QuasiTriple qt(ctx, make_adh_involution(ctx));
      Rng r(fnv1a64(ctx->name()) ^ 61);
      for (int i = 0; i < 30; ++i) {
        const auto [closed, defining] =
            phi_sigma_routes(sample_covector(ctx, r), sample_covector(ctx, r),
                             sample_covector(ctx, r), qt);
        CHECK(rel_residual(closed, defining) < 1e-10);
      }
    }
  }
}

TEST_CASE("r-matrix") {
  Rng rng(67);
  const Covector xi = sample_covector(sl2, rng);
  const Covector eta = sample_covector(sl2, rng);
  const Covector zero{sl2, RVec::Zero(3)};

  SECTION("(xi, 0): half of Delta_-^sigma(K^-1 xi)") {
    const DoubleVector r = r_matrix({xi, zero}, qt_sigma);
    const AlgebraVector v = k_sharp(xi);
    const DoubleVector expect =
        delta_minus_sigma(algebra_from_coords(sl2, RVec(0.5 * v.coords)), qt_sigma);
    CHECK(coords_gap(r, expect) < 1e-13);
  }

  SECTION("(0, eta): half of Delta_-^sigma(K^-1(eta o sigma))") {
    const DoubleVector r = r_matrix({zero, eta}, qt_sigma);
    const AlgebraVector v = k_sharp(compose_sigma(eta, qt_sigma));
    const DoubleVector expect =
        delta_minus_sigma(algebra_from_coords(sl2, RVec(0.5 * v.coords)), qt_sigma);
    CHECK(coords_gap(r, expect) < 1e-13);
  }

  SECTION("minus-type input is annihilated, consistently across both routes") {
    const Covector f_flat = k_flat(F);
    const Covector minus_sigma{sl2, RVec(-compose_sigma(f_flat, qt_sigma).coords)};
    const DoubleCovector a{f_flat, minus_sigma};
    CHECK(norm_of(r_matrix(a, qt_sigma)) < 1e-13);
    CHECK(coords_gap(r_matrix(a, qt_sigma), r_matrix_via_decomposition(a, qt_sigma)) <
          1e-13);
  }

  SECTION("two routes agree on random input") {
    for (int i = 0; i < 50; ++i) {
      const DoubleCovector a{sample_covector(sl2, rng), sample_covector(sl2, rng)};
      CHECK(coords_gap(r_matrix(a, qt_sigma),
                       r_matrix_via_decomposition(a, qt_sigma)) < 1e-12);
    }
  }
}
