#include "polyglue/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "polyglue/cauchy_riemann.hpp"
#include "polyglue/norms.hpp"
#include "polyglue/profiles.hpp"
#include "polyglue/splice.hpp"
#include "polyglue/surface.hpp"
#include "polyglue/sweep.hpp"

namespace polyglue {

namespace {

using Clock = std::chrono::steady_clock;

double pair_max_diff(const MapPair& a, const MapPair& b) {
  double worst = 0.0;
  for (std::size_t n = 0; n < a.plus.raw().size(); ++n)
    worst = std::max(worst, std::abs(a.plus.raw()[n] - b.plus.raw()[n]));
  for (std::size_t n = 0; n < a.minus.raw().size(); ++n)
    worst = std::max(worst, std::abs(a.minus.raw()[n] - b.minus.raw()[n]));
  return worst;
}

double map_max_abs(const CylinderMap& m) {
  double worst = 0.0;
  for (double v : m.raw()) worst = std::max(worst, std::abs(v));
  return worst;
}

double map_max_diff(const CylinderMap& a, const CylinderMap& b) {
  double worst = 0.0;
  for (std::size_t n = 0; n < a.raw().size(); ++n)
    worst = std::max(worst, std::abs(a.raw()[n] - b.raw()[n]));
  return worst;
}

// --------------------------------------------------------------------------
// Random connected noded surfaces for criterion 1.
// --------------------------------------------------------------------------

NodedSurface random_surface(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ncomp(1, 8);
  std::uniform_int_distribution<int> gdist(0, 3);
  std::uniform_int_distribution<int> extra_nodes(0, 3);
  std::uniform_int_distribution<int> extra_marked(0, 4);

  const int n = ncomp(rng);
  std::vector<std::pair<std::string, int>> comps;
  std::vector<int> point_counter(n, 0);
  for (int i = 0; i < n; ++i) {
    int g = gdist(rng);
    if (g == 3) g = 0;  // weight toward spheres so that weeding happens
    comps.emplace_back("c" + std::to_string(i), g);
  }
  auto fresh_point = [&](int c) {
    return SurfacePoint{comps[c].first, "p" + std::to_string(point_counter[c]++)};
  };

  std::vector<NodePair> nodes;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    nodes.push_back({fresh_point(i), fresh_point(pick(rng))});
  }
  const int extras = extra_nodes(rng);
  for (int e = 0; e < extras && n >= 1; ++e) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    nodes.push_back({fresh_point(pick(rng)), fresh_point(pick(rng))});
  }

  std::vector<SurfacePoint> marked;
  const int m0 = extra_marked(rng);
  for (int m = 0; m < m0; ++m) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    marked.push_back(fresh_point(pick(rng)));
  }

  NodedSurface s(true, comps, marked, nodes);
  // enforce the stabilization precondition 2 g_a + #M >= 3
  int ga = arithmetic_genus(s);
  while (2 * ga + static_cast<int>(marked.size()) < 3) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    marked.push_back(fresh_point(pick(rng)));
    s = NodedSurface(true, comps, marked, nodes);
    ga = arithmetic_genus(s);
  }
  return s;
}

NodedSurface relabel_components(const NodedSurface& s, std::mt19937_64& rng) {
  const auto& comps = s.components();
  std::vector<int> perm(comps.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::map<std::string, std::string> ren;
  std::vector<std::pair<std::string, int>> comps2;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ren[comps[i].first] = "z" + std::to_string(perm[i]);
    comps2.emplace_back(ren[comps[i].first], comps[i].second);
  }
  std::sort(comps2.begin(), comps2.end());
  auto fix = [&](SurfacePoint p) {
    p.component = ren.at(p.component);
    return p;
  };
  std::vector<SurfacePoint> marked2;
  for (const auto& m : s.marked()) marked2.push_back(fix(m));
  std::vector<NodePair> nodes2;
  for (const auto& [x, y] : s.nodes()) nodes2.push_back({fix(x), fix(y)});
  return NodedSurface(s.ordered_marked(), comps2, marked2, nodes2);
}

CriterionResult criterion1(bool quick) {
  CriterionResult res{1, "genus/stabilization suite", false, 0.0, 0.0};
  const int n_surfaces = quick ? 100 : 500;
  std::mt19937_64 rng(20240601);
  int failures = 0;
  for (int trial = 0; trial < n_surfaces; ++trial) {
    const NodedSurface s = random_surface(rng);
    const int ga = arithmetic_genus(s);
    const NodedSurface st = stabilize(s);
    bool ok = arithmetic_genus(st) == ga;
    ok = ok && is_stable(st);
    ok = ok && is_connected(st);
    ok = ok && stabilize(st).to_json() == st.to_json();
    const std::string canon = canonical_form(st);
    for (int reorder = 0; reorder < 5 && ok; ++reorder) {
      const NodedSurface sp = relabel_components(s, rng);
      ok = canonical_form(stabilize(sp)) == canon;
    }
    if (!ok) ++failures;
  }
  res.value = failures;
  res.threshold = 0;
  res.pass = failures == 0;
  res.detail = std::to_string(n_surfaces) + " surfaces";
  return res;
}

CriterionResult criterion2() {
  CriterionResult res{2, "profile conversion length identity", false, 0.0, 1e-10};
  double worst = 0.0;
  for (int j = 1; j <= 20; ++j) {
    const double r = std::pow(2.0, -j);
    const GluingParameter a(r, 0.3);
    double rel;
    if (j <= 8) {
      // representable route: R from the converted log-modulus
      const double R_exp = gluing_length(Profile::exponential, r);
      const double lam = profile_convert_log_abs(a);
      const double R_back = -lam / (2.0 * std::numbers::pi);
      rel = std::abs(R_back - R_exp) / R_exp;
      if (std::exp(lam) > 0.0) {
        // fully numeric route while the converted modulus is normal
        const GluingParameter conv = profile_convert(a);
        const double R_log = gluing_length(Profile::logarithmic, conv.abs());
        rel = std::max(rel, std::abs(R_log - R_exp) / R_exp);
        if (conv.twist() != a.twist()) rel = 1.0;
      }
    } else {
      // log-length form; the dropped correction is below e^{-2^j + 1}
      const double LR = log_gluing_length(Profile::exponential, r);
      rel = std::abs(LR - 1.0 / r) / (1.0 / r);
    }
    worst = std::max(worst, rel);
  }
  res.value = worst;
  res.pass = worst <= res.threshold;
  return res;
}

// Common exactness-tier splice setup: a-grid realized through the
// exponential profile's inverse at R_j = 4 + j (so |a| <= 1/2, R/ds and
// twist*n_t integral).
struct SpliceFixture {
  SpliceContext ctx;
  Grid plus_grid;
};

SpliceFixture splice_fixture(int j, std::mt19937_64& rng) {
  const double R = 4.0 + j;
  std::uniform_int_distribution<int> tw(0, 15);
  const double twist = tw(rng) / 16.0;
  SpliceContext ctx = SpliceContext::from_length(R, twist, Profile::exponential);
  const double S = R + 2.0;
  const int n_half = static_cast<int>(std::lround(S / 0.125)) + 1;
  return {ctx, Grid(0.0, S, n_half, 16)};
}

CriterionResult criterion3(bool quick) {
  CriterionResult res{3, "total-gluing round trips", false, 0.0, 1e-10};
  const int n_samples = quick ? 10 : 50;
  std::mt19937_64 rng(777);
  double worst = 0.0;
  for (int j = 1; j <= 8; ++j) {
    auto fx = splice_fixture(j, rng);
    for (int s = 0; s < n_samples; ++s) {
      {
        const MapPair h = random_E_pair(fx.plus_grid, 2, rng);
        const NeckMap v = plus_glue(fx.ctx, h);
        const NeckMap w = minus_glue(fx.ctx, h);
        const MapPair back = total_unglue(fx.ctx, v, w);
        worst = std::max(worst, pair_max_diff(h, back));
        const NeckMap v2 = plus_glue(fx.ctx, back);
        const NeckMap w2 = minus_glue(fx.ctx, back);
        worst = std::max(worst, map_max_diff(v.map(), v2.map()));
        worst = std::max(worst, map_max_diff(w.map(), w2.map()));
      }
      {
        const MapPair xi = random_F_pair(fx.plus_grid, 2, rng);
        const NeckMap v = hat_plus_glue(fx.ctx, xi);
        const NeckMap w = hat_minus_glue(fx.ctx, xi);
        const MapPair back = hat_total_unglue(fx.ctx, v, w);
        worst = std::max(worst, pair_max_diff(xi, back));
      }
    }
  }
  res.value = worst;
  res.pass = worst <= res.threshold;
  return res;
}

CriterionResult criterion4(bool quick) {
  CriterionResult res{4, "projection identities", false, 0.0, 1e-10};
  const int n_samples = quick ? 10 : 50;
  std::mt19937_64 rng(888);
  double worst = 0.0;
  for (int j = 1; j <= 8; ++j) {
    auto fx = splice_fixture(j, rng);
    for (int s = 0; s < n_samples; ++s) {
      const MapPair h = random_E_pair(fx.plus_grid, 2, rng);
      const MapPair ph = project(fx.ctx, h);
      worst = std::max(worst, pair_max_diff(project(fx.ctx, ph), ph));  // idempotent
      const NeckMap gh = plus_glue(fx.ctx, h);
      const NeckMap gph = plus_glue(fx.ctx, ph);
      worst = std::max(worst, map_max_diff(gh.map(), gph.map()));  // range identity
      const NeckMap wph = minus_glue(fx.ctx, ph);                  // kernel identity
      worst = std::max(worst, map_max_abs(wph.map()));
      for (double c : wph.map().constant()) worst = std::max(worst, std::abs(c));

      const MapPair xi = random_F_pair(fx.plus_grid, 2, rng);
      const MapPair pxi = hat_project(fx.ctx, xi);
      worst = std::max(worst, pair_max_diff(hat_project(fx.ctx, pxi), pxi));
    }
  }
  res.value = worst;
  res.pass = worst <= res.threshold;
  return res;
}

// Independent per-node 2x2 linear-solve oracle for the projections.
MapPair project_oracle(const SpliceContext& ctx, const MapPair& h, bool hat) {
  const NeckMap vn = hat ? hat_plus_glue(ctx, h) : plus_glue(ctx, h);
  const CylinderMap& v = vn.map();
  const double R = ctx.R();
  const int d = h.dim();
  std::vector<double> vol(d, 0.0);
  if (!hat) vol = v.circle_mean(0.5 * R);

  auto solve_node = [&](double s, double t) {
    Eigen::Matrix2d M;
    const double b = ctx.beta(s);
    M << b, 1.0 - b, -(1.0 - b), b;
    Eigen::PartialPivLU<Eigen::Matrix2d> lu(M);
    std::vector<double> plus(d), minus(d);
    const auto vv = v.evaluate(s, t, true);
    for (int k = 0; k < d; ++k) {
      Eigen::Vector2d rhs(vv[k], hat ? 0.0 : (2.0 * b - 1.0) * vol[k]);
      Eigen::Vector2d sol = lu.solve(rhs);
      plus[k] = sol(0);
      minus[k] = sol(1);
    }
    return std::make_pair(plus, minus);
  };

  CylinderMap ep(h.plus.grid(), d);
  CylinderMap em(h.minus.grid(), d);
  const Grid& gp = h.plus.grid();
  for (int i = 0; i < gp.n_s; ++i) {
    const double s = gp.s(i);
    for (int j = 0; j < gp.n_t; ++j) {
      std::vector<double> val(d);
      if (s <= R + 1e-9) {
        val = solve_node(std::min(s, R), gp.t(j)).first;
      } else {
        for (int k = 0; k < d; ++k) val[k] = hat ? 0.0 : vol[k];
      }
      for (int k = 0; k < d; ++k) ep.at(i, j, k) = val[k];
    }
  }
  const Grid& gm = h.minus.grid();
  for (int i = 0; i < gm.n_s; ++i) {
    const double sp = gm.s(i);
    const double s = sp + R;
    for (int j = 0; j < gm.n_t; ++j) {
      std::vector<double> val(d);
      if (s >= -1e-9) {
        val = solve_node(std::max(s, 0.0), gm.t(j) + ctx.twist()).second;
      } else {
        for (int k = 0; k < d; ++k) val[k] = hat ? 0.0 : vol[k];
      }
      for (int k = 0; k < d; ++k) em.at(i, j, k) = val[k];
    }
  }
  if (hat) return MapPair(std::move(ep), std::move(em), PairSpace::F);
  ep.set_constant(Asympt::constant, vol);
  em.set_constant(Asympt::constant, vol);
  return MapPair(std::move(ep), std::move(em), PairSpace::E);
}

CriterionResult criterion5(bool quick) {
  CriterionResult res{5, "closed-form projections vs 2x2 solve oracle", false, 0.0, 1e-10};
  const int n_samples = quick ? 10 : 50;
  std::mt19937_64 rng(999);
  double worst = 0.0;
  for (int j = 1; j <= 8; ++j) {
    auto fx = splice_fixture(j, rng);
    for (int s = 0; s < n_samples; ++s) {
      const MapPair h = random_E_pair(fx.plus_grid, 2, rng);
      worst = std::max(worst, pair_max_diff(project(fx.ctx, h), project_oracle(fx.ctx, h, false)));
      const MapPair xi = random_F_pair(fx.plus_grid, 2, rng);
      worst = std::max(worst, pair_max_diff(hat_project(fx.ctx, xi), project_oracle(fx.ctx, xi, true)));
    }
  }
  res.value = worst;
  res.pass = worst <= res.threshold;
  return res;
}

CriterionResult criterion6(bool quick, const std::string& out_dir) {
  CriterionResult res{6, "gluing norm-equivalence uniformity", false, 0.0, 10.0};
  SweepSpec spec;
  spec.samples = quick ? 6 : 20;
  spec.seed = 4242;
  double worst_spread = 0.0;
  for (SweepMode mode : {SweepMode::hat_gluing, SweepMode::total_gluing}) {
    const auto rows = run_sweep(spec, mode);
    for (int m : spec.levels) {
      double lo = 1e300, hi = 0.0;
      for (const auto& r : rows)
        if (r.m == m) {
          lo = std::min(lo, r.ratio_min);
          hi = std::max(hi, r.ratio_max);
        }
      worst_spread = std::max(worst_spread, hi / lo);
    }
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      const char* base = mode == SweepMode::hat_gluing ? "sweep_hat" : "sweep_full";
      std::ofstream(out_dir + "/" + base + ".csv") << sweep_csv(rows, spec, mode);
      std::ofstream(out_dir + "/" + base + "_plot.py") << sweep_plot(rows, mode);
    }
  }
  res.value = worst_spread;
  res.pass = worst_spread <= res.threshold;
  return res;
}

CriterionResult criterion7(bool quick) {
  CriterionResult res{7, "linear CR solve and kernel counts", false, 0.0, 1e-3};
  const std::vector<double> Rs = quick ? std::vector<double>{5, 10} : std::vector<double>{5, 10, 20};
  const double delta = std::numbers::pi;
  double worst = 0.0;
  bool kernel_ok = true;
  std::ostringstream detail;

  const auto J0 = ComplexStructureField::standard_matrix(2);
  for (double R : Rs) {
    SpliceContext ctx = SpliceContext::from_length(R, 0.0);
    const Grid g(-4.0, R + 4.0, 64, 32);

    // manufactured antipodal-constant sample
    CylinderMap u(g, 2);
    const std::vector<double> cstar = {0.7, -0.4};
    for (int i = 0; i < g.n_s; ++i) {
      const double s = g.s(i);
      const double prof = 1.0 - 2.0 * ctx.beta(s);
      const double x = (s - 0.5 * R) / 1.5;
      const double env = std::exp(-x * x);
      for (int j = 0; j < g.n_t; ++j) {
        const double t = g.t(j);
        u.at(i, j, 0) = prof * cstar[0] + env * std::cos(2 * std::numbers::pi * t);
        u.at(i, j, 1) = prof * cstar[1] + env * 0.5 * std::sin(2 * std::numbers::pi * t + 0.3);
      }
    }
    u.set_constant(Asympt::antipodal, cstar);
    NeckMap un;
    un.a = ctx.parameter();
    un.R = R;
    un.values = u;
    const NeckMap rhs = apply_solver_operator(ctx, J0, un);

    const CRSolveResult sol = linear_cr_solve(ctx, J0, rhs, delta);
    worst = std::max(worst, map_max_diff(sol.solution.map(), u));

    // zero-rhs injectivity across weights
    for (double dlt : {0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi}) {
      NeckMap zero = rhs;
      std::fill(zero.map().raw().begin(), zero.map().raw().end(), 0.0);
      const CRSolveResult z = linear_cr_solve(ctx, J0, zero, dlt);
      worst = std::max(worst, map_max_abs(z.solution.map()));
    }
  }

  {
    const auto rep2 = kernel_diagnostic(5.0, ComplexStructureField::standard_matrix(2),
                                        delta, 48, 23, 4.0);
    kernel_ok = kernel_ok && rep2.near_zero == 2;
    detail << "near_zero(2n=2)=" << rep2.near_zero;
    const auto rep4 = kernel_diagnostic(5.0, ComplexStructureField::standard_matrix(4),
                                        delta, 32, 15, 4.0);
    kernel_ok = kernel_ok && rep4.near_zero == 4;
    detail << " near_zero(2n=4)=" << rep4.near_zero;
  }

  res.value = worst;
  res.pass = worst <= res.threshold && kernel_ok;
  res.detail = detail.str();
  return res;
}

CriterionResult criterion8(bool quick) {
  CriterionResult res{8, "filled section consistency", false, 0.0, 1e-10};
  const int n_samples = quick ? 4 : 10;
  std::mt19937_64 rng(31337);
  const double R = 6.0;
  SpliceContext ctx = SpliceContext::from_length(R, 0.25);
  const double S = R + 2.0;
  const Grid plus_grid(0.0, S, static_cast<int>(std::lround(S / 0.25)) + 1, 8);

  const auto J = ComplexStructureField::bump_conjugated(2, 0.4, {0.2, -0.1});
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  double worst_core = 0.0;   // criterion bound 1e-12
  double worst_oracle = 0.0; // criterion bound 1e-10
  for (int s = 0; s < n_samples; ++s) {
    MapPair u = random_E_pair(plus_grid, 2, rng);
    // keep the base small so J varies gently over its image
    for (auto* m : {&u.plus, &u.minus})
      for (auto& v : m->raw()) v *= 0.3;
    {
      auto c = u.constant();
      for (auto& x : c) x *= 0.3;
      u.plus.set_constant(Asympt::constant, c);
      u.minus.set_constant(Asympt::constant, c);
    }
    const MapPair h_raw = random_E_pair(plus_grid, 2, rng);

    // splicing-core consistency: project h first, then the second filled
    // equation must vanish
    const MapPair h_core = project(ctx, h_raw);
    const FilledResult fc = filled_section(ctx, u, h_core, J);
    const NeckMap anti = hat_minus_glue(ctx, fc.xi);
    worst_core = std::max(worst_core, map_max_abs(anti.map()));

    // full residual vs an independent per-node 2x2 assembly of both equations
    const FilledResult ff = filled_section(ctx, u, h_raw, J);
    const CylinderMap& rhs1 = ff.rhs_neck.map();
    const CylinderMap& rhs2 = ff.rhs_cyl.map();
    const Grid& gp = ff.xi.plus.grid();
    for (int i = 0; i < gp.n_s; ++i) {
      const double sv = gp.s(i);
      for (int j = 0; j < gp.n_t; ++j) {
        std::vector<double> expect(2);
        if (sv <= R + 1e-9) {
          const double b = ctx.beta(sv);
          Eigen::Matrix2d M;
          M << b, 1.0 - b, -(1.0 - b), b;
          Eigen::PartialPivLU<Eigen::Matrix2d> lu(M);
          const auto v1 = rhs1.evaluate(std::min(sv, R), gp.t(j), true);
          const auto v2 = rhs2.evaluate(std::min(sv, R), gp.t(j), true);
          for (int k = 0; k < 2; ++k) {
            Eigen::Vector2d sol = lu.solve(Eigen::Vector2d(v1[k], v2[k]));
            expect[k] = sol(0);
          }
        } else {
          const auto v2 = rhs2.evaluate(sv, gp.t(j), true);
          for (int k = 0; k < 2; ++k) expect[k] = -v2[k];
        }
        for (int k = 0; k < 2; ++k)
          worst_oracle = std::max(worst_oracle, std::abs(ff.xi.plus.at(i, j, k) - expect[k]));
      }
    }
  }
  res.value = std::max(worst_oracle, worst_core);
  res.pass = worst_core <= 1e-12 && worst_oracle <= 1e-10;
  res.detail = "core=" + std::to_string(worst_core) + " oracle=" + std::to_string(worst_oracle);
  return res;
}

CriterionResult criterion9() {
  CriterionResult res{9, "index formula agreement (exhaustive box)", false, 0.0, 0.0};
  long long checked = 0;
  bool ok = true;
  for (int two_n = 2; two_n <= 20; two_n += 2)
    for (long long g = 0; g <= 10; ++g)
      for (long long k = 0; k <= 10; ++k)
        for (long long c1 = -10; c1 <= 10; ++c1) {
          fredholm_index(two_n, g, k, c1);  // throws if the two forms disagree
          ++checked;
        }
  ok = ok && fredholm_index(6, 0, 3, 0) == 6;
  ok = ok && fredholm_index(4, 1, 1, 2) == 6;
  res.value = static_cast<double>(checked);
  res.pass = ok;
  res.detail = std::to_string(checked) + " tuples";
  return res;
}

CriterionResult criterion10(bool quick) {
  CriterionResult res{10, "contraction modulus non-increasing in radius", false, 0.0, 0.0};
  const int n_pairs = quick ? 6 : 12;
  const double S = 7.0;
  const Grid plus_grid(0.0, S, static_cast<int>(std::lround(S / 0.25)) + 1, 8);
  const std::vector<double> q = {0.1, -0.2};
  CylinderMap up(plus_grid, 2, Asympt::constant, q);
  CylinderMap um(Grid(-S, 0.0, plus_grid.n_s, plus_grid.n_t), 2, Asympt::constant, q);
  for (int i = 0; i < plus_grid.n_s; ++i)
    for (int j = 0; j < plus_grid.n_t; ++j)
      for (int k = 0; k < 2; ++k) {
        up.at(i, j, k) = q[k];
        um.at(i, j, k) = q[k];
      }
  const MapPair base(up, um, PairSpace::E);
  const auto J = ComplexStructureField::bump_conjugated(2, 0.4, q);

  bool ok = true;
  std::ostringstream detail;
  for (double R : {0.0, 6.0}) {
    const SpliceContext ctx = R == 0.0 ? SpliceContext() : SpliceContext::from_length(R, 0.0);
    double prev = 1e300;
    for (double rho : {0.1, 0.05, 0.025}) {
      const auto rep = contraction_modulus(ctx, base, J, rho, n_pairs, 555);
      ok = ok && rep.modulus <= prev * (1.0 + 1e-9);
      prev = rep.modulus;
      detail << (R == 0.0 ? "a0" : "aR") << "/" << rho << ":" << rep.modulus << " ";
      res.value = std::max(res.value, rep.modulus);
    }
  }
  res.pass = ok;
  res.detail = detail.str();
  return res;
}

CriterionResult criterion11(bool quick) {
  CriterionResult res{11, "transversal constraint vs grid-search oracle", false, 0.0, 1e-6};
  const int n_cases = quick ? 8 : 20;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int dim = 4;
  std::vector<std::vector<double>> H_basis;
  for (int k = 2; k < dim; ++k) {
    std::vector<double> e(dim, 0.0);
    e[k] = 1.0;
    H_basis.push_back(e);
  }

  double worst = 0.0;
  for (int trial = 0; trial < n_cases; ++trial) {
    const double ax = 0.15 * unif(rng), ay = 0.15 * unif(rng);
    const double qxx = 0.2 * unif(rng), qxy = 0.2 * unif(rng), qyy = 0.2 * unif(rng);
    auto f = [&](double x, double y) {
      std::vector<double> v(dim, 0.0);
      v[0] = x + ax + qxx * x * x + qxy * x * y;
      v[1] = y + ay + qyy * y * y - qxy * x * x;
      v[2] = 0.3 * x - 0.1 * y;
      v[3] = 0.2 * x * y;
      return v;
    };
    const DiskMap v = DiskMap::sample(33, dim, f);
    const auto z = transversal_constraint(v, H_basis);

    // staged zoom grid search on |B^T v| over the half-disk
    auto objective = [&](double x, double y) {
      const auto val = v.evaluate(x, y);
      return std::hypot(val[0], val[1]);
    };
    double cx = 0.0, cy = 0.0, half = 0.5;
    for (int stage = 0; stage < 5; ++stage) {
      double best = 1e300, bx = cx, by = cy;
      const int n = 65;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x = cx - half + 2.0 * half * i / (n - 1);
          const double y = cy - half + 2.0 * half * j / (n - 1);
          if (x * x + y * y > 0.25) continue;
          const double o = objective(x, y);
          if (o < best) {
            best = o;
            bx = x;
            by = y;
          }
        }
      cx = bx;
      cy = by;
      half = 4.0 * half / (n - 1);
    }
    worst = std::max(worst, std::hypot(z[0] - cx, z[1] - cy));
  }
  res.value = worst;
  res.pass = worst <= res.threshold;
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool quick, const std::string& out_dir) {
  std::vector<CriterionResult> out;
  auto timed = [&](auto&& fn) {
    const auto t0 = Clock::now();
    CriterionResult r = fn();
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  timed([&] { return criterion1(quick); });
  timed([&] { return criterion2(); });
  timed([&] { return criterion3(quick); });
  timed([&] { return criterion4(quick); });
  timed([&] { return criterion5(quick); });
  timed([&] { return criterion6(quick, out_dir); });
  timed([&] { return criterion7(quick); });
  timed([&] { return criterion8(quick); });
  timed([&] { return criterion9(); });
  timed([&] { return criterion10(quick); });
  timed([&] { return criterion11(quick); });
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream out;
  out.precision(3);
  out << (r.pass ? "PASS" : "FAIL") << "  #" << r.id << " " << r.name << "  value=" << r.value
      << " threshold=" << r.threshold;
  if (!r.detail.empty()) out << "  [" << r.detail << "]";
  out << "  (" << r.seconds << " s)";
  return out.str();
}

}  // namespace polyglue
