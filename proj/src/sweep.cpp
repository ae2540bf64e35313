#include "polyglue/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polyglue/norms.hpp"

namespace polyglue {

namespace {

Grid minus_grid_of(const Grid& plus_grid) {
  return Grid(-plus_grid.s_max, 0.0, plus_grid.n_s, plus_grid.n_t);
}

// Smooth decaying field: trig modes in t under an e^{-kappa |s|} envelope.
void fill_decaying(CylinderMap& m, std::mt19937_64& rng, double kappa_min, double kappa_max) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double kappa = kappa_min + 0.5 * (kappa_max - kappa_min) * (unif(rng) + 1.0);
  const int d = m.dim();
  std::vector<double> a0(d), a1(d), b1(d), a2(d), ph(d);
  for (int k = 0; k < d; ++k) {
    a0[k] = unif(rng);
    a1[k] = unif(rng);
    b1[k] = unif(rng);
    a2[k] = 0.5 * unif(rng);
    ph[k] = std::numbers::pi * unif(rng);
  }
  const Grid& g = m.grid();
  for (int i = 0; i < g.n_s; ++i) {
    const double env = std::exp(-kappa * std::abs(g.s(i)));
    for (int j = 0; j < g.n_t; ++j) {
      const double t = g.t(j);
      for (int k = 0; k < d; ++k)
        m.at(i, j, k) = env * (a0[k] + a1[k] * std::cos(2 * std::numbers::pi * t + ph[k]) +
                               b1[k] * std::sin(2 * std::numbers::pi * t) +
                               a2[k] * std::cos(4 * std::numbers::pi * t));
    }
  }
}

}  // namespace

MapPair random_F_pair(const Grid& plus_grid, int dim, std::mt19937_64& rng, double kappa_min,
                      double kappa_max) {
  CylinderMap p(plus_grid, dim);
  CylinderMap m(minus_grid_of(plus_grid), dim);
  fill_decaying(p, rng, kappa_min, kappa_max);
  fill_decaying(m, rng, kappa_min, kappa_max);
  return MapPair(std::move(p), std::move(m), PairSpace::F);
}

MapPair random_E_pair(const Grid& plus_grid, int dim, std::mt19937_64& rng, double kappa_min,
                      double kappa_max) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CylinderMap p(plus_grid, dim);
  CylinderMap m(minus_grid_of(plus_grid), dim);
  fill_decaying(p, rng, kappa_min, kappa_max);
  fill_decaying(m, rng, kappa_min, kappa_max);
  std::vector<double> c(dim);
  for (int k = 0; k < dim; ++k) c[k] = unif(rng);
  for (int i = 0; i < plus_grid.n_s; ++i)
    for (int j = 0; j < plus_grid.n_t; ++j)
      for (int k = 0; k < dim; ++k) {
        p.at(i, j, k) += c[k];
        m.at(i, j, k) += c[k];
      }
  p.set_constant(Asympt::constant, c);
  m.set_constant(Asympt::constant, c);
  return MapPair(std::move(p), std::move(m), PairSpace::E);
}

SweepMode sweep_mode_from_string(const std::string& name) {
  if (name == "hat") return SweepMode::hat_gluing;
  if (name == "full") return SweepMode::total_gluing;
  if (name == "ds") return SweepMode::d_s;
  if (name == "dt") return SweepMode::d_t;
  if (name == "cs") return SweepMode::c_s;
  if (name == "ct") return SweepMode::c_t;
  throw std::invalid_argument("unknown sweep mode: " + name);
}

namespace {

SweepRow sweep_cell(const SweepSpec& spec, SweepMode mode, double R, int m) {
  const ScScale scale;
  const SpliceContext ctx = SpliceContext::from_length(R, spec.twist, spec.profile);
  const int n_half = static_cast<int>(std::lround((R + spec.margin) / spec.ds)) + 1;
  const Grid plus_grid(0.0, R + spec.margin, n_half, spec.n_t);
  // generic elements of the level-m space decay just above its weight
  const double kap_lo = scale.delta(m) + 0.1;
  const double kap_hi = scale.delta(m) + 0.45;

  // one RNG stream per cell keeps cells independent of evaluation order
  std::mt19937_64 rng(spec.seed ^ (static_cast<unsigned long long>(m * 7919) << 16) ^
                      static_cast<unsigned long long>(std::lround(R * 64.0)));

  SweepRow row;
  row.abs_a = ctx.parameter().abs();
  row.R = R;
  row.m = m;
  row.ratio_min = 1e300;
  row.ratio_max = 0.0;

  for (int sample = 0; sample < spec.samples; ++sample) {
    double num = 0.0, den = 0.0;
    switch (mode) {
      case SweepMode::hat_gluing: {
        const MapPair xi = random_F_pair(plus_grid, spec.dim, rng, kap_lo, kap_hi);
        const NeckMap q = hat_plus_glue(ctx, xi);
        const NeckMap p = hat_minus_glue(ctx, xi);
        num = neck_norm(q, p, m, scale, NeckNormMode::G_hat, ctx.cutoff());
        den = pair_norm_F(xi, m, scale);
        break;
      }
      case SweepMode::total_gluing: {
        const MapPair h = random_E_pair(plus_grid, spec.dim, rng, kap_lo, kap_hi);
        const NeckMap q = plus_glue(ctx, h);
        const NeckMap p = minus_glue(ctx, h);
        num = neck_norm(q, p, m, scale, NeckNormMode::G, ctx.cutoff());
        den = pair_norm_E(h, m, scale);
        break;
      }
      case SweepMode::d_s:
      case SweepMode::d_t:
      case SweepMode::c_s:
      case SweepMode::c_t: {
        const MapPair eta = random_E_pair(plus_grid, spec.dim, rng, kap_lo, kap_hi);
        MapPair out = (mode == SweepMode::d_s)   ? transfer_ds(ctx, eta)
                      : (mode == SweepMode::d_t) ? transfer_dt(ctx, eta)
                      : (mode == SweepMode::c_s) ? transfer_cs(ctx, eta)
                                                 : transfer_ct(ctx, eta);
        num = pair_norm_F(out, m, scale);
        den = pair_norm_E(eta, m, scale);
        break;
      }
    }
    if (den <= 0.0) continue;
    const double ratio = num / den;
    row.ratio_min = std::min(row.ratio_min, ratio);
    row.ratio_max = std::max(row.ratio_max, ratio);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, SweepMode mode) {
  std::vector<std::pair<double, int>> cells;
  for (double R : spec.lengths)
    for (int m : spec.levels) cells.emplace_back(R, m);

  std::vector<SweepRow> rows(cells.size());
  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      rows[i] = sweep_cell(spec, mode, cells[i].first, cells[i].second);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(mtx);
            if (next >= cells.size()) return;
            i = next++;
          }
          rows[i] = sweep_cell(spec, mode, cells[i].first, cells[i].second);
        }
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const SweepSpec& spec, SweepMode mode) {
  std::ostringstream out;
  out.precision(15);
  const char* names[] = {"hat", "full", "ds", "dt", "cs", "ct"};
  out << "# sweep-estimates mode=" << names[static_cast<int>(mode)] << " seed=" << spec.seed
      << " samples=" << spec.samples << " ds=" << spec.ds << " n_t=" << spec.n_t << "\n";
  out << "# abs_a,R,m,ratio_lower,ratio_upper\n";
  for (const auto& r : rows)
    out << r.abs_a << "," << r.R << "," << r.m << "," << r.ratio_min << "," << r.ratio_max << "\n";
  return out.str();
}

std::string sweep_plot(const std::vector<SweepRow>& rows, SweepMode mode) {
  std::vector<int> ms;
  for (const auto& r : rows)
    if (std::find(ms.begin(), ms.end(), r.m) == ms.end()) ms.push_back(r.m);
  std::vector<Series> series;
  for (int m : ms) {
    Series lo{"m=" + std::to_string(m) + " lower", {}, {}};
    Series hi{"m=" + std::to_string(m) + " upper", {}, {}};
    for (const auto& r : rows)
      if (r.m == m) {
        lo.x.push_back(r.R);
        lo.y.push_back(r.ratio_min);
        hi.x.push_back(r.R);
        hi.y.push_back(r.ratio_max);
      }
    series.push_back(lo);
    series.push_back(hi);
  }
  const char* names[] = {"hat_gluing_ratio", "total_gluing_ratio", "transfer_ds_ratio",
                         "transfer_dt_ratio", "transfer_cs_ratio", "transfer_ct_ratio"};
  return emit_plot_script(names[static_cast<int>(mode)], "R", "ratio", series);
}

}  // namespace polyglue
