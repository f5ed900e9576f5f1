#ifndef QPLAB_VERIFY_HPP
#define QPLAB_VERIFY_HPP

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qplab/btz.hpp"
#include "qplab/double_construction.hpp"
#include "qplab/lie_context.hpp"
#include "qplab/quasi_poisson.hpp"
#include "qplab/serialize.hpp"

namespace qplab {

/// One residual family: its worst observed residual against its tolerance.
struct CheckResult {
  std::string name;
  std::string group;
  std::string sigma;
  int n = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string kind = "abs";
  bool pass = false;
};

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::optional<double> tol_override;   ///< replaces every family tolerance
  std::optional<std::string> group;     ///< restrict to one group name
  std::optional<std::string> sigma;     ///< restrict to "id" or "adH"
  double form_scale = 1.0;
  BtzConfig btz;
};

struct VerificationReport {
  std::string suite;
  SuiteConfig config;
  std::vector<CheckResult> checks;
  bool pass = true;
  int n_checks = 0;
};

namespace detail {

/// Collects CheckResults; every family draws its randomness from a stream
/// derived from (seed, family, group, sigma), so residuals do not depend on
/// which suite ran the family.
class SuiteRunner {
public:
  explicit SuiteRunner(const SuiteConfig& cfg) : cfg_(cfg) {}

  Rng rng(const std::string& name, const std::string& group, const std::string& sigma) const {
    return Rng(cfg_.seed ^ fnv1a64(name + "/" + group + "/" + sigma));
  }

  void add(std::string name, std::string group, std::string sigma, int n,
           double max_residual, double default_tol, std::string kind) {
    CheckResult r;
    r.name = std::move(name);
    r.group = std::move(group);
    r.sigma = std::move(sigma);
    r.n = n;
    r.max_residual = max_residual;
    r.tolerance = cfg_.tol_override.value_or(default_tol);
    r.kind = std::move(kind);
    r.pass = std::isfinite(max_residual) && max_residual < r.tolerance;
    checks_.push_back(std::move(r));
  }

  bool group_enabled(const std::string& g) const {
    return !cfg_.group || *cfg_.group == g;
  }
  bool sigma_enabled(const std::string& s) const {
    return !cfg_.sigma || *cfg_.sigma == s;
  }

  const SuiteConfig& cfg() const { return cfg_; }
  std::vector<CheckResult> take() { return std::move(checks_); }

private:
  SuiteConfig cfg_;
  std::vector<CheckResult> checks_;
};

struct Family {
  std::string group_name;
  ContextPtr ctx;
  Involution sigma;
  std::string sigma_name;
};

/// The test families: each group with its Ad_H-type involution and with the
/// identity involution.
inline std::vector<Family> make_families(const SuiteRunner& run, double form_scale) {
  std::vector<Family> out;
  for (const char* g : {"sl2r", "sl3r", "su2"}) {
    if (!run.group_enabled(g)) continue;
    ContextPtr ctx = make_context(g, form_scale);
    if (run.sigma_enabled("adH"))
      out.push_back(Family{g, ctx, make_adh_involution(ctx), "adH"});
    if (run.sigma_enabled("id"))
      out.push_back(Family{g, ctx, Involution::identity(ctx), "id"});
  }
  return out;
}

// ---------------------------------------------------------------- core ----

inline void core_checks(SuiteRunner& run) {
  for (const Family& fam : make_families(run, run.cfg().form_scale)) {
    const ContextPtr& ctx = fam.ctx;
    const int n = ctx->dim();

    if (fam.sigma_name == "adH") {  // context-level families, once per group
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          AlgebraVector br = bracket(basis_vector(ctx, i), basis_vector(ctx, j));
          worst = std::max(worst, max_abs(Mat(br.matrix - ctx->matrix_of(br.coords))));
        }
      run.add("structure_constants_reproduce_commutator", fam.group_name, "-",
              n * n, worst, 1e-12, "abs");

      worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const AlgebraVector bi = basis_vector(ctx, i);
            const AlgebraVector bj = basis_vector(ctx, j);
            const AlgebraVector bk = basis_vector(ctx, k);
            RVec cyc = bracket(bracket(bi, bj), bk).coords +
                       bracket(bracket(bj, bk), bi).coords +
                       bracket(bracket(bk, bi), bj).coords;
            worst = std::max(worst, cyc.cwiseAbs().maxCoeff());
          }
      run.add("jacobi_identity", fam.group_name, "-", n * n * n, worst, 1e-12, "abs");

      Rng rng = run.rng("ad_invariance", fam.group_name, "-");
      worst = 0.0;
      for (int k = 0; k < 200; ++k) {
        const GroupElement g = sample_group(ctx, rng);
        const AlgebraVector x = sample_algebra(ctx, rng);
        const AlgebraVector y = sample_algebra(ctx, rng);
        worst = std::max(worst,
                         rel_residual(k_form(Ad(g, x), Ad(g, y)), k_form(x, y)));
      }
      run.add("ad_invariance_of_k", fam.group_name, "-", 200, worst, 1e-10, "rel");

      rng = run.rng("exp_inverse", fam.group_name, "-");
      worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const AlgebraVector x = sample_algebra(ctx, rng);
        const Mat prod = exp_matrix(x).matrix *
                         exp_matrix(algebra_from_coords(ctx, RVec(-x.coords))).matrix;
        worst = std::max(worst, max_abs(Mat(prod - Mat::Identity(ctx->rep_dim(),
                                                                 ctx->rep_dim()))));
      }
      run.add("exp_inverse_roundtrip", fam.group_name, "-", 50, worst, 1e-12, "abs");

      rng = run.rng("k_musical", fam.group_name, "-");
      worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const AlgebraVector x = sample_algebra(ctx, rng);
        worst = std::max(worst,
                         (k_sharp(k_flat(x)).coords - x.coords).cwiseAbs().maxCoeff());
        const Covector xi = sample_covector(ctx, rng);
        worst = std::max(worst,
                         (k_flat(k_sharp(xi)).coords - xi.coords).cwiseAbs().maxCoeff());
      }
      run.add("k_musical_roundtrip", fam.group_name, "-", 100, worst, 1e-12, "abs");
    }

    // Involution axioms, for each configured sigma, on the full basis.
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const AlgebraVector bi = basis_vector(ctx, i);
      worst = std::max(worst,
                       (fam.sigma(fam.sigma(bi)).coords - bi.coords).cwiseAbs().maxCoeff());
      for (int j = 0; j < n; ++j) {
        const AlgebraVector bj = basis_vector(ctx, j);
        RVec morph = fam.sigma(bracket(bi, bj)).coords -
                     bracket(fam.sigma(bi), fam.sigma(bj)).coords;
        worst = std::max(worst, morph.cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(k_form(fam.sigma(bi), fam.sigma(bj)) -
                                         k_form(bi, bj)));
      }
    }
    run.add("involution_axioms", fam.group_name, fam.sigma_name, n * n, worst,
            1e-12, "abs");
  }
}

// -------------------------------------------------------------- double ----

inline void double_checks(SuiteRunner& run) {
  for (const Family& fam : make_families(run, run.cfg().form_scale)) {
    const ContextPtr& ctx = fam.ctx;
    const QuasiTriple qt(ctx, fam.sigma);
    const int n = ctx->dim();

    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const AlgebraVector bi = basis_vector(ctx, i);
        const AlgebraVector bj = basis_vector(ctx, j);
        worst = std::max(worst, std::abs(pairing(delta_plus_sigma(bi, qt),
                                                 delta_plus_sigma(bj, qt))));
        worst = std::max(worst, std::abs(pairing(delta_minus_sigma(bi, qt),
                                                 delta_minus_sigma(bj, qt))));
      }
    run.add("isotropy", fam.group_name, fam.sigma_name, 2 * n * n, worst, 1e-12, "abs");

    RMat span(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      const DoubleVector p = delta_plus_sigma(basis_vector(ctx, i), qt);
      const DoubleVector m = delta_minus_sigma(basis_vector(ctx, i), qt);
      span.col(i) << p.left.coords, p.right.coords;
      span.col(n + i) << m.left.coords, m.right.coords;
    }
    const int rank = pivot_rank(span, 1e-8);
    run.add("direct_sum_decomposition", fam.group_name, fam.sigma_name, 1,
            static_cast<double>(2 * n - rank), 0.5, "abs");

    Rng rng = run.rng("projection_resolution", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const DoubleVector u{sample_algebra(ctx, rng), sample_algebra(ctx, rng)};
      const DoubleVector p = project_plus(u, qt);
      const DoubleVector m = project_minus(u, qt);
      worst = std::max(worst, (p.left.coords + m.left.coords - u.left.coords)
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst, (p.right.coords + m.right.coords - u.right.coords)
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    run.add("projection_resolution_of_identity", fam.group_name, fam.sigma_name, 100,
            worst, 1e-12, "abs");

    rng = run.rng("covector_decomposition", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const DoubleCovector a{sample_covector(ctx, rng), sample_covector(ctx, rng)};
      const auto [plus, minus] = decompose_covector(a, qt);
      worst = std::max(worst, (plus.left.coords + minus.left.coords - a.left.coords)
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst,
                       (plus.right.coords + minus.right.coords - a.right.coords)
                           .cwiseAbs()
                           .maxCoeff());
      const AlgebraVector w = sample_algebra(ctx, rng);
      worst = std::max(worst, std::abs(pair(plus, delta_minus_sigma(w, qt))));
      worst = std::max(worst, std::abs(pair(minus, delta_plus_sigma(w, qt))));
    }
    run.add("covector_decomposition_annihilators", fam.group_name, fam.sigma_name,
            100, worst, 1e-12, "abs");

    rng = run.rng("j_characterization", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Covector xi = sample_covector(ctx, rng);
      const AlgebraVector w = sample_algebra(ctx, rng);
      const double lhs = pairing(j_map(xi, qt), delta_plus_sigma(w, qt));
      const double rhs = pair(xi, w) + pair(compose_sigma(xi, qt), fam.sigma(w));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    run.add("j_characterization", fam.group_name, fam.sigma_name, 50, worst, 1e-12,
            "abs");

    rng = run.rng("f_sigma", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const DoubleVector f =
          f_sigma(sample_covector(ctx, rng), sample_covector(ctx, rng), qt);
      worst = std::max(worst, f.left.coords.cwiseAbs().maxCoeff());
      worst = std::max(worst, f.right.coords.cwiseAbs().maxCoeff());
    }
    run.add("f_sigma_vanishes", fam.group_name, fam.sigma_name, 100, worst, 1e-12,
            "abs");

    rng = run.rng("phi_sigma", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto [closed, defining] =
          phi_sigma_routes(sample_covector(ctx, rng), sample_covector(ctx, rng),
                           sample_covector(ctx, rng), qt);
      worst = std::max(worst, rel_residual(closed, defining));
    }
    run.add("phi_sigma_two_routes", fam.group_name, fam.sigma_name, 100, worst, 1e-10,
            "rel");

    rng = run.rng("r_matrix", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const DoubleCovector a{sample_covector(ctx, rng), sample_covector(ctx, rng)};
      const DoubleVector r1 = r_matrix(a, qt);
      const DoubleVector r2 = r_matrix_via_decomposition(a, qt);
      worst = std::max(worst, (r1.left.coords - r2.left.coords).cwiseAbs().maxCoeff());
      worst = std::max(worst, (r1.right.coords - r2.right.coords).cwiseAbs().maxCoeff());
    }
    run.add("r_matrix_two_routes", fam.group_name, fam.sigma_name, 100, worst, 1e-12,
            "abs");
  }
}

// ------------------------------------------------------------ bivector ----

inline void bivector_checks(SuiteRunner& run) {
  for (const Family& fam : make_families(run, run.cfg().form_scale)) {
    const ContextPtr& ctx = fam.ctx;
    const QuasiTriple qt(ctx, fam.sigma);

    Rng rng = run.rng("antisymmetry", fam.group_name, fam.sigma_name);
    double worst = 0.0;
    for (int k = 0; k < 25; ++k) {
      const GroupElement a = sample_group(ctx, rng);
      const GroupElement b = sample_group(ctx, rng);
      const RMat pd = p_d_sigma(a, b, qt).matrix;
      worst = std::max(worst, max_abs(RMat(pd + pd.transpose())));
      const RMat ps = p_s_sigma(sample_group(ctx, rng), qt).matrix;
      worst = std::max(worst, max_abs(RMat(ps + ps.transpose())));
    }
    run.add("bivector_antisymmetry", fam.group_name, fam.sigma_name, 50, worst, 1e-10,
            "abs");

    rng = run.rng("projectability", fam.group_name, fam.sigma_name);
    double spread = 0.0;
    double closed_gap = 0.0;
    const int n_base = (fam.group_name == "sl2r") ? 20 : 5;
    const int n_fiber = (fam.group_name == "sl2r") ? 50 : 10;
    for (int k = 0; k < n_base; ++k) {
      const GroupElement a = sample_group(ctx, rng);
      const GroupElement b = sample_group(ctx, rng);
      const RMat ref = project_p_d_to_s(a, b, qt).matrix;
      const GroupElement s{ctx, a.matrix * b.matrix.inverse()};
      closed_gap = std::max(closed_gap, max_abs(RMat(ref - p_s_sigma(s, qt).matrix)));
      for (int f = 0; f < n_fiber; ++f) {
        const GroupElement c = sample_group(ctx, rng);
        const RMat other =
            project_p_d_to_s(multiply(a, c), multiply(b, c), qt).matrix;
        spread = std::max(spread, max_abs(RMat(other - ref)));
      }
    }
    run.add("projectability_fiber_spread", fam.group_name, fam.sigma_name,
            n_base * n_fiber, spread, 1e-9, "abs");
    run.add("projection_matches_closed_form", fam.group_name, fam.sigma_name, n_base,
            closed_gap, 1e-10, "abs");

    // The S / S^sigma identification, against the sigma = id closed form.
    if (fam.sigma_name == "adH") {
      const QuasiTriple qt_id(ctx, Involution::identity(ctx));
      rng = run.rng("s_vs_s_sigma", fam.group_name, fam.sigma_name);
      worst = 0.0;
      double fiber_worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const GroupElement g = sample_group(ctx, rng);
        const GroupElement h = sample_group(ctx, rng);
        const BivectorMap via = p_s_via_s_sigma(g, h, qt);
        const GroupElement m{ctx, via.base_point};
        worst = std::max(worst, max_abs(RMat(via.matrix - p_s_sigma(m, qt_id).matrix)));
        const GroupElement c = sample_group(ctx, rng);
        const BivectorMap moved =
            p_s_via_s_sigma(multiply(g, c), multiply(h, fam.sigma(c)), qt);
        fiber_worst = std::max(fiber_worst, max_abs(RMat(moved.matrix - via.matrix)));
      }
      run.add("s_vs_s_sigma_identification", fam.group_name, fam.sigma_name, 100,
              worst, 1e-10, "abs");
      run.add("s_sigma_fiber_independence", fam.group_name, fam.sigma_name, 100,
              fiber_worst, 1e-10, "abs");
    }

    rng = run.rng("quasi_poisson_identity", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const GroupElement s = sample_group(ctx, rng);
      const Covector xi = sample_covector(ctx, rng);
      const Covector eta = sample_covector(ctx, rng);
      const Covector nu = sample_covector(ctx, rng);
      worst = std::max(worst, rel_residual(schouten_closed(s, xi, eta, nu, qt),
                                           phi_s(s, xi, eta, nu, qt)));
    }
    run.add("quasi_poisson_identity", fam.group_name, fam.sigma_name, 100, worst,
            1e-9, "rel");

    rng = run.rng("invariance", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k)
      worst = std::max(worst, invariance_residual(sample_group(ctx, rng),
                                                  sample_group(ctx, rng), qt));
    run.add("invariance_residual", fam.group_name, fam.sigma_name, 100, worst, 1e-10,
            "abs");

    rng = run.rng("image_tangency", fam.group_name, fam.sigma_name);
    worst = 0.0;
    double span_gap = 0.0;
    for (int k = 0; k < 50; ++k) {
      const GroupElement s = sample_group(ctx, rng);
      worst = std::max(worst, image_tangency_residual(s, qt));
      const ImageBasis img = image_basis(s, qt);
      RMat direct(ctx->dim(), ctx->dim());
      RMat factored(ctx->dim(), ctx->dim());
      for (int i = 0; i < ctx->dim(); ++i) {
        direct.col(i) = img.direct[static_cast<std::size_t>(i)].coords;
        factored.col(i) = img.factored[static_cast<std::size_t>(i)].coords;
      }
      Eigen::ColPivHouseholderQR<RMat> qr_d(direct);
      Eigen::ColPivHouseholderQR<RMat> qr_f(factored);
      for (int i = 0; i < ctx->dim(); ++i) {
        span_gap = std::max(span_gap,
                            max_abs(RMat(direct * qr_d.solve(factored.col(i)) -
                                         factored.col(i))));
        span_gap = std::max(span_gap,
                            max_abs(RMat(factored * qr_f.solve(direct.col(i)) -
                                         direct.col(i))));
      }
    }
    run.add("image_tangent_to_orbit", fam.group_name, fam.sigma_name, 50, worst, 1e-9,
            "abs");
    run.add("image_spans_coincide", fam.group_name, fam.sigma_name, 50, span_gap,
            1e-9, "abs");

    rng = run.rng("action_law", fam.group_name, fam.sigma_name);
    worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const GroupElement g1 = sample_group(ctx, rng);
      const GroupElement g2 = sample_group(ctx, rng);
      const GroupElement s = sample_group(ctx, rng);
      const Mat lhs = act(g1, act(g2, s, qt), qt).matrix;
      const Mat rhs = act(multiply(g1, g2), s, qt).matrix;
      worst = std::max(worst, max_abs(Mat(lhs - rhs)));
    }
    run.add("action_composition_law", fam.group_name, fam.sigma_name, 100, worst,
            1e-10, "abs");

    const RMat tw = twist_operator(group_identity(ctx), qt).matrix;
    run.add("twist_vanishes_at_identity", fam.group_name, fam.sigma_name, 1,
            max_abs(tw), 1e-14, "abs");

    // Oracle agreement and the closed-form Schouten values, where they are
    // informative: the bracket vanishes identically on sl2r and su2 (orbits
    // have dimension at most 2), and is generically nonzero on sl3r.
    if (fam.group_name == "sl3r" && fam.sigma_name == "adH") {
      rng = run.rng("schouten_fd", fam.group_name, fam.sigma_name);
      worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const GroupElement s = sample_group(ctx, rng);
        const Covector xi = sample_covector(ctx, rng);
        const Covector eta = sample_covector(ctx, rng);
        const Covector nu = sample_covector(ctx, rng);
        worst = std::max(worst, std::abs(schouten_fd(s, xi, eta, nu, qt, 1e-4) -
                                         schouten_closed(s, xi, eta, nu, qt)));
      }
      run.add("schouten_fd_vs_closed", fam.group_name, fam.sigma_name, 50, worst,
              1e-5, "abs");
    }
    if (fam.group_name == "sl2r" && fam.sigma_name == "adH") {
      rng = run.rng("schouten_vanishes", fam.group_name, fam.sigma_name);
      worst = 0.0;
      for (int k = 0; k < 100; ++k)
        worst = std::max(
            worst, std::abs(schouten_closed(sample_group(ctx, rng),
                                            sample_covector(ctx, rng),
                                            sample_covector(ctx, rng),
                                            sample_covector(ctx, rng), qt)));
      run.add("sl2r_schouten_vanishes", fam.group_name, fam.sigma_name, 100, worst,
              1e-10, "abs");
    }
  }
}

// ----------------------------------------------------------------- btz ----

inline void btz_checks(SuiteRunner& run) {
  if (!run.group_enabled("sl2r")) return;
  const BtzConfig& bc = run.cfg().btz;
  BtzModel model(run.cfg().form_scale);

  const auto grid = make_structure_grid(bc.grid_tau, bc.grid_theta, bc.grid_rho);

  double det_worst = 0.0;
  for (const ChartPoint& p : grid)
    det_worst = std::max(det_worst,
                         std::abs(chart_matrix(p).determinant() - Cplx(1.0, 0.0)));
  run.add("chart_determinant", "sl2r", "adH", static_cast<int>(grid.size()), det_worst,
          1e-12, "abs");

  Rng rng = run.rng("chart_roundtrip", "sl2r", "adH");
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const ChartPoint p{rng.uniform(0.05, kPi - 0.05), rng.uniform(-6.0, 6.0),
                       rng.uniform(-2.5, 2.5)};
    const ChartInverse inv = inverse_chart(chart(model, p));
    worst = std::max({worst, std::abs(inv.point.tau - p.tau),
                      std::abs(inv.point.theta - p.theta),
                      std::abs(inv.point.rho - p.rho),
                      inv.branch == ChartBranch::principal ? 0.0 : 1.0});
  }
  run.add("chart_roundtrip", "sl2r", "adH", 500, worst, 1e-10, "abs");

  const Calibration cal = calibrate_scale(model, make_calibration_grid());
  run.add("calibration_spread", "sl2r", "adH", cal.n_used, cal.spread, 1e-8, "abs");

  const Calibration fine = calibrate_scale(model, make_calibration_grid(40, 40));
  run.add("calibration_grid_stability", "sl2r", "adH", fine.n_used,
          std::abs(fine.scale_ratio - cal.scale_ratio), 1e-8, "abs");

  BtzModel calibrated(run.cfg().form_scale * cal.scale_ratio);
  double structure_worst = 0.0;
  double match_worst = 0.0;
  double locus_worst = 0.0;
  for (const ChartPoint& p : grid) {
    const RMat a = coordinate_bivector(calibrated, p);
    structure_worst = std::max({structure_worst, std::abs(a(0, 2)), std::abs(a(1, 2))});
    const double f = closed_form_coeff(p);
    match_worst = std::max(match_worst, std::abs(a(0, 1) - f));
    const bool rank0 = classify_point(calibrated, p) == LeafRank::rank0;
    const bool vanishing = std::abs(f) < 1e-9;
    if (rank0 != vanishing) locus_worst = 1.0;
  }
  run.add("component_structure_tau_rho_theta_rho", "sl2r", "adH",
          static_cast<int>(grid.size()), structure_worst, 1e-9, "abs");
  run.add("closed_form_coefficient_match", "sl2r", "adH",
          static_cast<int>(grid.size()), match_worst, 1e-8, "abs");
  run.add("vanishing_locus_is_rank0", "sl2r", "adH", static_cast<int>(grid.size()),
          locus_worst, 0.5, "abs");

  const LeafTrace trace =
      trace_leaf(calibrated, ChartPoint{kPi / 2, 0.0, 1.0}, bc.steps, bc.step_size);
  run.add("leaf_rho_drift", "sl2r", "adH", static_cast<int>(trace.points.size()),
          trace.rho_drift, 1e-8, "abs");

  const LeafTrace shifted =
      trace_leaf(calibrated, ChartPoint{kPi / 2, 1.0, 1.0}, bc.steps, bc.step_size);
  worst = (trace.points.size() == shifted.points.size()) ? 0.0 : 1.0;
  const std::size_t m = std::min(trace.points.size(), shifted.points.size());
  for (std::size_t i = 0; i < m; ++i) {
    double dth =
        std::fmod(std::abs(shifted.points[i].theta - trace.points[i].theta - 1.0),
                  kThetaPeriod);
    dth = std::min(dth, kThetaPeriod - dth);
    worst = std::max({worst, std::abs(shifted.points[i].tau - trace.points[i].tau),
                      dth, std::abs(shifted.points[i].rho - trace.points[i].rho)});
  }
  run.add("leaf_theta_shift_symmetry", "sl2r", "adH", static_cast<int>(m), worst,
          1e-8, "abs");

  rng = run.rng("quotient_wrap", "sl2r", "adH");
  worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ChartPoint p{rng.uniform(0.1, kPi - 0.1), rng.uniform(-25.0, 25.0),
                       rng.uniform(-2.0, 2.0)};
    const ChartPoint w = wrap_quotient(p);
    worst = std::max(worst, std::abs(wrap_quotient(w).theta - w.theta));
    const int shift = static_cast<int>(std::floor(p.theta / kThetaPeriod));
    const GroupElement lhs = chart(model, w);
    const GroupElement rhs = act(theta_shift_element(model, -shift),
                                 chart(model, p), model.qt());
    worst = std::max(worst, max_abs(Mat(lhs.matrix - rhs.matrix)));
  }
  run.add("quotient_wrap_identity", "sl2r", "adH", 100, worst, 1e-10, "abs");
}

// ----------------------------------------------------------------- su2 ----

inline void su2_checks(SuiteRunner& run) {
  if (run.group_enabled("su2")) {
    ContextPtr ctx = make_su2(run.cfg().form_scale);
    const QuasiTriple qt_id(ctx, Involution::identity(ctx));
    const QuasiTriple qt_sigma(ctx, make_adh_involution(ctx));
    Rng rng = run.rng("su2_isomorphism", "su2", "adH");
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const GroupElement s = sample_group(ctx, rng);
      worst = std::max(worst, su2_isomorphism_residual(s, qt_id, qt_sigma, 8,
                                                       run.cfg().seed + k));
    }
    run.add("su2_right_translation_intertwines", "su2", "adH", 50, worst, 1e-9,
            "abs");
  }

  if (run.group_enabled("sl2r")) {
    ContextPtr ctx = make_sl2r(run.cfg().form_scale);
    const QuasiTriple qt_id(ctx, Involution::identity(ctx));
    const QuasiTriple qt_sigma(ctx, make_adh_involution(ctx));

    const GroupElement id = group_identity(ctx);
    const GroupElement neg{ctx, Mat(-Mat::Identity(2, 2))};
    double worst = 0.0;
    if (!fixed_point_check(id, qt_id, 64, run.cfg().seed).fixed) worst = 1.0;
    if (!fixed_point_check(neg, qt_id, 64, run.cfg().seed).fixed) worst = 1.0;
    run.add("conjugation_fixes_center", "sl2r", "id", 2, worst, 0.5, "abs");

    const FixedPointResult res = fixed_point_check(id, qt_sigma, 64, run.cfg().seed);
    worst = res.fixed ? 1.0 : 0.0;  // must NOT be fixed
    if (res.witness) {
      const GroupElement moved = act(*res.witness, id, qt_sigma);
      if (max_abs(Mat(moved.matrix - id.matrix)) < 1e-10) worst = 1.0;
    } else {
      worst = 1.0;
    }
    run.add("twisted_action_moves_identity", "sl2r", "adH", 64, worst, 0.5, "abs");
  }
}

}  // namespace detail

/// Runs the named suite: all | core | double | bivector | btz | su2.
inline VerificationReport run_suite(const std::string& suite, const SuiteConfig& cfg) {
  detail::SuiteRunner runner(cfg);
  bool known = false;
  if (suite == "core" || suite == "all") {
    detail::core_checks(runner);
    known = true;
  }
  if (suite == "double" || suite == "all") {
    detail::double_checks(runner);
    known = true;
  }
  if (suite == "bivector" || suite == "all") {
    detail::bivector_checks(runner);
    known = true;
  }
  if (suite == "btz" || suite == "all") {
    detail::btz_checks(runner);
    known = true;
  }
  if (suite == "su2" || suite == "all") {
    detail::su2_checks(runner);
    known = true;
  }
  if (!known) throw std::invalid_argument("unknown suite: " + suite);

  VerificationReport report;
  report.suite = suite;
  report.config = cfg;
  report.checks = runner.take();
  report.n_checks = static_cast<int>(report.checks.size());
  report.pass = true;
  for (const CheckResult& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

/// Deterministic JSON rendering of a report (fixed key order, LF endings,
/// 17-significant-digit numbers).
inline std::string report_to_json(const VerificationReport& r) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"suite\": " << jsonio::str(r.suite) << ",\n";
  os << "  \"seed\": " << r.config.seed << ",\n";
  os << "  \"config\": {\"group\": " << jsonio::str(r.config.group.value_or("all"))
     << ", \"sigma\": " << jsonio::str(r.config.sigma.value_or("all"))
     << ", \"form_scale\": " << jsonio::num(r.config.form_scale)
     << ", \"grid\": " << jsonio::str(std::to_string(r.config.btz.grid_tau) + "x" +
                                    std::to_string(r.config.btz.grid_theta) + "x" +
                                    std::to_string(r.config.btz.grid_rho))
     << ", \"steps\": " << r.config.btz.steps
     << ", \"step_size\": " << jsonio::num(r.config.btz.step_size) << "},\n";
  os << "  \"tolerances\": {\"abs\": " << jsonio::num(1e-10)
     << ", \"rel\": " << jsonio::num(1e-10) << ", \"override\": "
     << (r.config.tol_override ? jsonio::num(*r.config.tol_override) : "null") << "},\n";
  os << "  \"n_checks\": " << r.n_checks << ",\n";
  os << "  \"pass\": " << jsonio::boolean(r.pass) << ",\n";
  os << "  \"checks\": [\n";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const CheckResult& c = r.checks[i];
    os << "    {\"name\": " << jsonio::str(c.name) << ", \"group\": " << jsonio::str(c.group)
       << ", \"sigma\": " << jsonio::str(c.sigma) << ", \"n\": " << c.n
       << ", \"max_residual\": " << jsonio::num(c.max_residual)
       << ", \"tolerance\": " << jsonio::num(c.tolerance)
       << ", \"kind\": " << jsonio::str(c.kind)
       << ", \"pass\": " << jsonio::boolean(c.pass) << "}";
    os << (i + 1 < r.checks.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

/// CSV rendering: one row per check.
inline std::string report_to_csv(const VerificationReport& r) {
  std::string out = "name,group,sigma,n,max_residual,tolerance,kind,pass\n";
  for (const CheckResult& c : r.checks) {
    out += c.name + "," + c.group + "," + c.sigma + "," + std::to_string(c.n) + "," +
           fmt_g17(c.max_residual) + "," + fmt_g17(c.tolerance) + "," + c.kind + "," +
           (c.pass ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace qplab

#endif
