#include "polyglue/splice.hpp"

#include <cmath>
#include <stdexcept>

namespace polyglue {

namespace {

constexpr double kNodeTol = 1e-9;

bool near_integer(double x) { return std::abs(x - std::round(x)) < kNodeTol; }

// Number of nodes to span [0, len] at target spacing ds (exact when len/ds
// is integral, otherwise the nearest not-coarser grid).
int span_nodes(double len, double ds) {
  const double q = len / ds;
  const int n = near_integer(q) ? static_cast<int>(std::round(q)) : static_cast<int>(std::ceil(q));
  return std::max(n, 3) + 1;
}

void check_pair_grids(const SpliceContext& ctx, const MapPair& h) {
  const Grid& gp = h.plus.grid();
  const Grid& gm = h.minus.grid();
  if (std::abs(gp.ds() - gm.ds()) > kNodeTol || gp.n_t != gm.n_t)
    throw std::invalid_argument("splice: pair grids must share spacing and n_t");
  if (std::abs(gp.s_max + gm.s_min) > kNodeTol)
    throw std::invalid_argument("splice: pair grids must span [0,S] and [-S,0]");
  if (!ctx.is_zero() && gp.s_max < ctx.R() - kNodeTol)
    throw std::invalid_argument("splice: pair grids too short for the neck (need S >= R)");
}

std::vector<double> eval_plus(const MapPair& h, double s, double t) {
  return h.plus.evaluate(s, t, /*clamp_to_profile=*/true);
}

std::vector<double> eval_minus(const MapPair& h, double s, double t) {
  return h.minus.evaluate(s, t, /*clamp_to_profile=*/true);
}

MapPair zero_pair_like(const MapPair& h, PairSpace space) {
  CylinderMap p(h.plus.grid(), h.dim());
  CylinderMap m(h.minus.grid(), h.dim());
  if (space == PairSpace::E) {
    p.set_constant(Asympt::constant, std::vector<double>(h.dim(), 0.0));
    m.set_constant(Asympt::constant, std::vector<double>(h.dim(), 0.0));
  }
  return MapPair(std::move(p), std::move(m), space);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SpliceContext::SpliceContext(GluingParameter a, Profile profile) : a_(a), profile_(profile) {
  if (a_.is_zero()) return;
  if (a_.abs() > 0.5 + 1e-15)
    throw std::invalid_argument("SpliceContext: |a| > 1/2 outside the gluing disk");
  R_ = gluing_length(profile_, a_.abs());
  if (R_ < 2.0)
    throw std::invalid_argument("SpliceContext: neck length R < 2; cutoff transition does not fit");
}

SpliceContext SpliceContext::from_length(double R, double twist, Profile profile) {
  if (R == 0.0) return SpliceContext();
  return SpliceContext(GluingParameter(inverse_length(profile, R), twist), profile);
}

std::vector<double> neck_average(const SpliceContext& ctx, const MapPair& h) {
  if (ctx.is_zero()) throw std::domain_error("neck_average: a = 0");
  const double R = ctx.R();
  auto mp = h.plus.circle_mean(0.5 * R);
  auto mm = h.minus.circle_mean(-0.5 * R);
  for (std::size_t k = 0; k < mp.size(); ++k) mp[k] = 0.5 * (mp[k] + mm[k]);
  return mp;
}

NeckMap zero_on_neck(const SpliceContext& ctx, const Grid& pair_grid, int dim) {
  const double R = ctx.R();
  Grid g(0.0, R, span_nodes(R, pair_grid.ds()), pair_grid.n_t);
  NeckMap out;
  out.a = ctx.parameter();
  out.R = R;
  out.values = CylinderMap(g, dim);
  return out;
}

NeckMap zero_on_cylinder(const SpliceContext& ctx, const Grid& pair_grid, int dim) {
  const double R = ctx.R();
  const double S = pair_grid.s_max;
  Grid g(R - S, S, span_nodes(2.0 * S - R, pair_grid.ds()), pair_grid.n_t);
  NeckMap out;
  out.a = ctx.parameter();
  out.R = R;
  out.values = CylinderMap(g, dim);
  return out;
}

NeckMap plus_glue(const SpliceContext& ctx, const MapPair& h) {
  if (ctx.is_zero()) {
    NeckMap out;
    out.degenerate = h;
    return out;
  }
  check_pair_grids(ctx, h);
  NeckMap out = zero_on_neck(ctx, h.plus.grid(), h.dim());
  CylinderMap& v = *out.values;
  const Grid& g = v.grid();
  const double R = ctx.R();
  const double th = ctx.twist();
  for (int i = 0; i < g.n_s; ++i) {
    const double s = g.s(i);
    const double b = ctx.beta(s);
    for (int j = 0; j < g.n_t; ++j) {
      const double t = g.t(j);
      std::vector<double> acc(h.dim(), 0.0);
      if (b != 0.0) {
        const auto up = eval_plus(h, s, t);
        for (int k = 0; k < h.dim(); ++k) acc[k] += b * up[k];
      }
      if (b != 1.0) {
        const auto um = eval_minus(h, s - R, t - th);
        for (int k = 0; k < h.dim(); ++k) acc[k] += (1.0 - b) * um[k];
      }
      for (int k = 0; k < h.dim(); ++k) v.at(i, j, k) = acc[k];
    }
  }
  return out;
}

NeckMap minus_glue(const SpliceContext& ctx, const MapPair& h) {
  if (ctx.is_zero()) {
    NeckMap out;
    out.degenerate = zero_pair_like(h, h.space);
    return out;
  }
  check_pair_grids(ctx, h);
  const auto av = neck_average(ctx, h);
  NeckMap out = zero_on_cylinder(ctx, h.plus.grid(), h.dim());
  CylinderMap& w = *out.values;
  const Grid& g = w.grid();
  const double R = ctx.R();
  const double th = ctx.twist();
  for (int i = 0; i < g.n_s; ++i) {
    const double s = g.s(i);
    const double b = ctx.beta(s);
    for (int j = 0; j < g.n_t; ++j) {
      const double t = g.t(j);
      std::vector<double> acc(h.dim(), 0.0);
      if (b != 1.0) {
        const auto up = eval_plus(h, s, t);
        for (int k = 0; k < h.dim(); ++k) acc[k] -= (1.0 - b) * (up[k] - av[k]);
      }
      if (b != 0.0) {
        const auto um = eval_minus(h, s - R, t - th);
        for (int k = 0; k < h.dim(); ++k) acc[k] += b * (um[k] - av[k]);
      }
      for (int k = 0; k < h.dim(); ++k) w.at(i, j, k) = acc[k];
    }
  }
  const auto c = h.constant();
  std::vector<double> w_inf(h.dim());
  for (int k = 0; k < h.dim(); ++k) w_inf[k] = av[k] - c[k];
  w.set_constant(Asympt::antipodal, w_inf);
  return out;
}

NeckMap hat_plus_glue(const SpliceContext& ctx, const MapPair& xi) { return plus_glue(ctx, xi); }

NeckMap hat_minus_glue(const SpliceContext& ctx, const MapPair& xi) {
  if (ctx.is_zero()) {
    NeckMap out;
    out.degenerate = zero_pair_like(xi, PairSpace::F);
    return out;
  }
  check_pair_grids(ctx, xi);
  NeckMap out = zero_on_cylinder(ctx, xi.plus.grid(), xi.dim());
  CylinderMap& w = *out.values;
  const Grid& g = w.grid();
  const double R = ctx.R();
  const double th = ctx.twist();
  for (int i = 0; i < g.n_s; ++i) {
    const double s = g.s(i);
    const double b = ctx.beta(s);
    for (int j = 0; j < g.n_t; ++j) {
      const double t = g.t(j);
      std::vector<double> acc(xi.dim(), 0.0);
      if (b != 1.0) {
        const auto up = eval_plus(xi, s, t);
        for (int k = 0; k < xi.dim(); ++k) acc[k] -= (1.0 - b) * up[k];
      }
      if (b != 0.0) {
        const auto um = eval_minus(xi, s - R, t - th);
        for (int k = 0; k < xi.dim(); ++k) acc[k] += b * um[k];
      }
      for (int k = 0; k < xi.dim(); ++k) w.at(i, j, k) = acc[k];
    }
  }
  const auto c = xi.constant();
  if (max_abs(c) != 0.0) {
    std::vector<double> w_inf(xi.dim());
    for (int k = 0; k < xi.dim(); ++k) w_inf[k] = -c[k];
    w.set_constant(Asympt::antipodal, w_inf);
  }
  return out;
}

namespace {

struct UngluePrep {
  double R, th, S;
  Grid plus_grid, minus_grid;
  int dim;
};

UngluePrep prep_unglue(const SpliceContext& ctx, const NeckMap& v, const NeckMap& w) {
  if (v.is_degenerate() || w.is_degenerate())
    throw std::invalid_argument("unglue: expected grid-valued neck maps for a != 0");
  const double R = ctx.R();
  const Grid& gw = w.map().grid();
  if (std::abs(gw.s_min - (R - gw.s_max)) > 1e-6)
    throw std::invalid_argument("unglue: cylinder truncation must be symmetric about R/2");
  const double S = gw.s_max;
  const Grid& gv = v.map().grid();
  if (std::abs(gv.s_min) > kNodeTol || std::abs(gv.s_max - R) > 1e-6)
    throw std::invalid_argument("unglue: neck map must span [0, R]");
  const int dim = v.map().dim();
  if (dim != w.map().dim()) throw std::invalid_argument("unglue: dimension mismatch");

  const double ds = gw.ds();
  Grid plus_grid(0.0, S, span_nodes(S, ds), gw.n_t);
  Grid minus_grid(-S, 0.0, span_nodes(S, ds), gw.n_t);
  return {R, ctx.twist(), S, plus_grid, minus_grid, dim};
}

}  // namespace

MapPair total_unglue(const SpliceContext& ctx, const NeckMap& v, const NeckMap& w) {
  if (ctx.is_zero()) {
    if (!v.is_degenerate()) throw std::invalid_argument("total_unglue: a = 0 expects a degenerate v");
    bool w_zero = w.is_degenerate()
                      ? (max_abs(w.degenerate->plus.raw()) == 0.0 && max_abs(w.degenerate->minus.raw()) == 0.0)
                      : (max_abs(w.map().raw()) == 0.0);
    if (!w_zero) throw std::domain_error("total_unglue: a = 0 is degenerate; w must vanish");
    return *v.degenerate;
  }
  auto pr = prep_unglue(ctx, v, w);
  const auto vol = v.map().circle_mean(0.5 * pr.R);  // [v]

  std::vector<double> w_inf(pr.dim, 0.0);
  if (w.map().asympt() == Asympt::antipodal) w_inf = w.map().constant();
  std::vector<double> c(pr.dim);
  for (int k = 0; k < pr.dim; ++k) c[k] = -w_inf[k] + vol[k];

  CylinderMap hp(pr.plus_grid, pr.dim, Asympt::constant, c);
  CylinderMap hm(pr.minus_grid, pr.dim, Asympt::constant, c);

  auto solve_at = [&](double s, double t, bool want_plus) {
    const double b = ctx.beta(s);
    const double g = b * b + (1.0 - b) * (1.0 - b);
    const auto vv = v.map().evaluate(s, t, true);
    auto ww = w.map().evaluate(s, t, true);
    for (int k = 0; k < pr.dim; ++k) ww[k] += (2.0 * b - 1.0) * vol[k];  // w-hat
    std::vector<double> out(pr.dim);
    for (int k = 0; k < pr.dim; ++k)
      out[k] = want_plus ? (b * vv[k] - (1.0 - b) * ww[k]) / g
                         : ((1.0 - b) * vv[k] + b * ww[k]) / g;
    return out;
  };

  for (int i = 0; i < pr.plus_grid.n_s; ++i) {
    const double s = pr.plus_grid.s(i);
    for (int j = 0; j < pr.plus_grid.n_t; ++j) {
      const double t = pr.plus_grid.t(j);
      std::vector<double> val(pr.dim);
      if (s <= pr.R + kNodeTol) {
        val = solve_at(std::min(s, pr.R), t, true);
      } else {
        const auto ww = w.map().evaluate(s, t, true);
        for (int k = 0; k < pr.dim; ++k) val[k] = -ww[k] + vol[k];
      }
      for (int k = 0; k < pr.dim; ++k) hp.at(i, j, k) = val[k];
    }
  }
  for (int i = 0; i < pr.minus_grid.n_s; ++i) {
    const double sp = pr.minus_grid.s(i);
    const double s = sp + pr.R;
    for (int j = 0; j < pr.minus_grid.n_t; ++j) {
      const double tp = pr.minus_grid.t(j);
      const double t = tp + ctx.twist();
      std::vector<double> val(pr.dim);
      if (s >= -kNodeTol) {
        val = solve_at(std::max(s, 0.0), t, false);
      } else {
        const auto ww = w.map().evaluate(s, t, true);
        for (int k = 0; k < pr.dim; ++k) val[k] = ww[k] + vol[k];
      }
      for (int k = 0; k < pr.dim; ++k) hm.at(i, j, k) = val[k];
    }
  }
  return MapPair(std::move(hp), std::move(hm), PairSpace::E);
}

MapPair hat_total_unglue(const SpliceContext& ctx, const NeckMap& v, const NeckMap& w) {
  if (ctx.is_zero()) {
    if (!v.is_degenerate()) throw std::invalid_argument("hat_total_unglue: a = 0 expects a degenerate v");
    bool w_zero = w.is_degenerate()
                      ? (max_abs(w.degenerate->plus.raw()) == 0.0 && max_abs(w.degenerate->minus.raw()) == 0.0)
                      : (max_abs(w.map().raw()) == 0.0);
    if (!w_zero) throw std::domain_error("hat_total_unglue: a = 0 is degenerate; w must vanish");
    MapPair out = *v.degenerate;
    out.space = PairSpace::F;
    out.plus.set_constant(Asympt::none, {});
    out.minus.set_constant(Asympt::none, {});
    return out;
  }
  auto pr = prep_unglue(ctx, v, w);
  CylinderMap xp(pr.plus_grid, pr.dim);
  CylinderMap xm(pr.minus_grid, pr.dim);

  auto solve_at = [&](double s, double t, bool want_plus) {
    const double b = ctx.beta(s);
    const double g = b * b + (1.0 - b) * (1.0 - b);
    const auto vv = v.map().evaluate(s, t, true);
    const auto ww = w.map().evaluate(s, t, true);
    std::vector<double> out(pr.dim);
    for (int k = 0; k < pr.dim; ++k)
      out[k] = want_plus ? (b * vv[k] - (1.0 - b) * ww[k]) / g
                         : ((1.0 - b) * vv[k] + b * ww[k]) / g;
    return out;
  };

  for (int i = 0; i < pr.plus_grid.n_s; ++i) {
    const double s = pr.plus_grid.s(i);
    for (int j = 0; j < pr.plus_grid.n_t; ++j) {
      const double t = pr.plus_grid.t(j);
      std::vector<double> val(pr.dim);
      if (s <= pr.R + kNodeTol) {
        val = solve_at(std::min(s, pr.R), t, true);
      } else {
        const auto ww = w.map().evaluate(s, t, true);
        for (int k = 0; k < pr.dim; ++k) val[k] = -ww[k];
      }
      for (int k = 0; k < pr.dim; ++k) xp.at(i, j, k) = val[k];
    }
  }
  for (int i = 0; i < pr.minus_grid.n_s; ++i) {
    const double sp = pr.minus_grid.s(i);
    const double s = sp + pr.R;
    for (int j = 0; j < pr.minus_grid.n_t; ++j) {
      const double tp = pr.minus_grid.t(j);
      const double t = tp + ctx.twist();
      std::vector<double> val(pr.dim);
      if (s >= -kNodeTol) {
        val = solve_at(std::max(s, 0.0), t, false);
      } else {
        const auto ww = w.map().evaluate(s, t, true);
        for (int k = 0; k < pr.dim; ++k) val[k] = ww[k];
      }
      for (int k = 0; k < pr.dim; ++k) xm.at(i, j, k) = val[k];
    }
  }
  return MapPair(std::move(xp), std::move(xm), PairSpace::F);
}

MapPair project(const SpliceContext& ctx, const MapPair& h) {
  if (ctx.is_zero()) return h;
  check_pair_grids(ctx, h);
  const auto av = neck_average(ctx, h);
  const double R = ctx.R();
  const double th = ctx.twist();
  const int dim = h.dim();

  CylinderMap ep(h.plus.grid(), dim, Asympt::constant, av);
  CylinderMap em(h.minus.grid(), dim, Asympt::constant, av);

  const Grid& gp = h.plus.grid();
  for (int i = 0; i < gp.n_s; ++i) {
    const double s = gp.s(i);
    const double b = ctx.beta(s);
    const double g = b * b + (1.0 - b) * (1.0 - b);
    for (int j = 0; j < gp.n_t; ++j) {
      const double t = gp.t(j);
      std::vector<double> val(dim);
      for (int k = 0; k < dim; ++k) val[k] = (1.0 - b / g) * av[k];
      if (b != 0.0) {
        const auto up = eval_plus(h, s, t);
        for (int k = 0; k < dim; ++k) val[k] += (b * b / g) * up[k];
      }
      if (b != 0.0 && b != 1.0) {
        const auto um = eval_minus(h, s - R, t - th);
        for (int k = 0; k < dim; ++k) val[k] += (b * (1.0 - b) / g) * um[k];
      }
      for (int k = 0; k < dim; ++k) ep.at(i, j, k) = val[k];
    }
  }
  const Grid& gm = h.minus.grid();
  for (int i = 0; i < gm.n_s; ++i) {
    const double sp = gm.s(i);
    const double bm = ctx.beta(-sp);
    const double g = bm * bm + (1.0 - bm) * (1.0 - bm);
    for (int j = 0; j < gm.n_t; ++j) {
      const double tp = gm.t(j);
      std::vector<double> val(dim);
      for (int k = 0; k < dim; ++k) val[k] = (1.0 - bm / g) * av[k];
      if (bm != 0.0 && bm != 1.0) {
        const auto up = eval_plus(h, sp + R, tp + th);
        for (int k = 0; k < dim; ++k) val[k] += (bm * (1.0 - bm) / g) * up[k];
      }
      if (bm != 0.0) {
        const auto um = eval_minus(h, sp, tp);
        for (int k = 0; k < dim; ++k) val[k] += (bm * bm / g) * um[k];
      }
      for (int k = 0; k < dim; ++k) em.at(i, j, k) = val[k];
    }
  }
  return MapPair(std::move(ep), std::move(em), PairSpace::E);
}

MapPair hat_project(const SpliceContext& ctx, const MapPair& xi) {
  if (ctx.is_zero()) return xi;
  check_pair_grids(ctx, xi);
  const double R = ctx.R();
  const double th = ctx.twist();
  const int dim = xi.dim();

  CylinderMap ep(xi.plus.grid(), dim);
  CylinderMap em(xi.minus.grid(), dim);

  const Grid& gp = xi.plus.grid();
  for (int i = 0; i < gp.n_s; ++i) {
    const double s = gp.s(i);
    const double b = ctx.beta(s);
    const double g = b * b + (1.0 - b) * (1.0 - b);
    for (int j = 0; j < gp.n_t; ++j) {
      const double t = gp.t(j);
      std::vector<double> val(dim, 0.0);
      if (b != 0.0) {
        const auto up = eval_plus(xi, s, t);
        for (int k = 0; k < dim; ++k) val[k] += (b * b / g) * up[k];
      }
      if (b != 0.0 && b != 1.0) {
        const auto um = eval_minus(xi, s - R, t - th);
        for (int k = 0; k < dim; ++k) val[k] += (b * (1.0 - b) / g) * um[k];
      }
      for (int k = 0; k < dim; ++k) ep.at(i, j, k) = val[k];
    }
  }
  const Grid& gm = xi.minus.grid();
  for (int i = 0; i < gm.n_s; ++i) {
    const double sp = gm.s(i);
    const double bm = ctx.beta(-sp);
    const double g = bm * bm + (1.0 - bm) * (1.0 - bm);
    for (int j = 0; j < gm.n_t; ++j) {
      const double tp = gm.t(j);
      std::vector<double> val(dim, 0.0);
      if (bm != 0.0 && bm != 1.0) {
        const auto up = eval_plus(xi, sp + R, tp + th);
        for (int k = 0; k < dim; ++k) val[k] += (bm * (1.0 - bm) / g) * up[k];
      }
      if (bm != 0.0) {
        const auto um = eval_minus(xi, sp, tp);
        for (int k = 0; k < dim; ++k) val[k] += (bm * bm / g) * um[k];
      }
      for (int k = 0; k < dim; ++k) em.at(i, j, k) = val[k];
    }
  }
  return MapPair(std::move(ep), std::move(em), PairSpace::F);
}

double splicing_core_residual(const SpliceContext& ctx, const MapPair& h, const ScScale& scale) {
  if (ctx.is_zero()) return 0.0;
  const auto w = minus_glue(ctx, h);
  const auto& wm = w.map();
  std::vector<double> w_inf = wm.asympt() == Asympt::antipodal
                                  ? wm.constant()
                                  : std::vector<double>(wm.dim(), 0.0);
  // |c_w|^2 + e^{delta_0 R} |||w - (1-2 beta_a) c_w|||^2_{2, delta_0}
  std::vector<double> w_hat = wm.raw();
  const Grid& g = wm.grid();
  for (int i = 0; i < g.n_s; ++i) {
    const double prof = 1.0 - 2.0 * ctx.beta(g.s(i));
    for (int j = 0; j < g.n_t; ++j)
      for (int k = 0; k < wm.dim(); ++k)
        w_hat[(static_cast<std::size_t>(i) * g.n_t + j) * wm.dim() + k] -= prof * w_inf[k];
  }
  CylinderMap tmp(g, wm.dim());
  tmp.raw() = std::move(w_hat);
  const double delta0 = scale.delta(0);
  const double tail = weighted_norm(tmp, 2, delta0, WeightCenter::neck(ctx.R()), NormPart::full);
  double head = 0.0;
  for (double c : w_inf) head += c * c;
  return std::sqrt(head + std::exp(delta0 * ctx.R()) * tail * tail);
}

bool in_splicing_core(const SpliceContext& ctx, const MapPair& h, double tol) {
  if (ctx.is_zero()) return true;
  const double res = splicing_core_residual(ctx, h);
  const double size = pair_norm_E(h, 0, ScScale{});
  return res <= tol * std::max(1.0, size);
}

namespace {

MapPair transfer_d(const SpliceContext& ctx, const MapPair& eta, int p, int q) {
  if (ctx.is_zero()) {
    CylinderMap dp(eta.plus.grid(), eta.dim());
    CylinderMap dm(eta.minus.grid(), eta.dim());
    dp.raw() = derivative_grid(eta.plus, p, q);
    dm.raw() = derivative_grid(eta.minus, p, q);
    return MapPair(std::move(dp), std::move(dm), PairSpace::F);
  }
  NeckMap v = plus_glue(ctx, eta);
  CylinderMap dv(v.map().grid(), eta.dim());
  dv.raw() = derivative_grid(v.map(), p, q);
  NeckMap rhs1;
  rhs1.a = ctx.parameter();
  rhs1.R = ctx.R();
  rhs1.values = std::move(dv);
  NeckMap rhs2 = zero_on_cylinder(ctx, eta.plus.grid(), eta.dim());
  return hat_total_unglue(ctx, rhs1, rhs2);
}

MapPair transfer_c(const SpliceContext& ctx, const MapPair& eta, int p, int q) {
  if (ctx.is_zero()) return zero_pair_like(eta, PairSpace::F);
  NeckMap w = minus_glue(ctx, eta);
  CylinderMap dw(w.map().grid(), eta.dim());
  dw.raw() = derivative_grid(w.map(), p, q);
  NeckMap rhs2;
  rhs2.a = ctx.parameter();
  rhs2.R = ctx.R();
  rhs2.values = std::move(dw);
  NeckMap rhs1 = zero_on_neck(ctx, eta.plus.grid(), eta.dim());
  return hat_total_unglue(ctx, rhs1, rhs2);
}

}  // namespace

MapPair transfer_ds(const SpliceContext& ctx, const MapPair& eta) { return transfer_d(ctx, eta, 1, 0); }
MapPair transfer_dt(const SpliceContext& ctx, const MapPair& eta) { return transfer_d(ctx, eta, 0, 1); }
MapPair transfer_cs(const SpliceContext& ctx, const MapPair& eta) { return transfer_c(ctx, eta, 1, 0); }
MapPair transfer_ct(const SpliceContext& ctx, const MapPair& eta) { return transfer_c(ctx, eta, 0, 1); }

}  // namespace polyglue
