#include "polyglue/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace polyglue {

double WeightCenter::weight(double s) const {
  switch (kind) {
    case Kind::half_cylinder:
      return std::abs(s);
    case Kind::neck:
      return std::abs(s - 0.5 * R);
  }
  return 0.0;
}

namespace {

// Squared weighted Sobolev seminorm sum over all multi-indices |alpha| <= k
// of the raw array attached to `grid`.
double weighted_sq(const std::vector<double>& base, const Grid& grid, int dim, int k, double delta,
                   WeightCenter center) {
  if (k < 0 || k > 4) throw std::invalid_argument("weighted norm: order k must lie in [0,4]");
  CylinderMap holder(grid, dim);
  holder.raw() = base;

  const double ds = grid.ds();
  const double dt = grid.dt();
  double total = 0.0;
  for (int p = 0; p + 0 <= k; ++p) {
    for (int q = 0; p + q <= k; ++q) {
      const auto d = derivative_grid(holder, p, q, DerivScheme::fd2);
      for (int i = 0; i < grid.n_s; ++i) {
        const double mu_s = (i == 0 || i == grid.n_s - 1) ? 0.5 * ds : ds;
        const double w = std::exp(2.0 * delta * center.weight(grid.s(i)));
        double row = 0.0;
        for (int j = 0; j < grid.n_t; ++j)
          for (int c = 0; c < dim; ++c) {
            const double v = d[(static_cast<std::size_t>(i) * grid.n_t + j) * dim + c];
            row += v * v;
          }
        total += row * mu_s * dt * w;
      }
    }
  }
  return total;
}

std::vector<double> remainder_values(const CylinderMap& u) {
  std::vector<double> v = u.raw();
  if (u.asympt() == Asympt::constant) {
    const auto& c = u.constant();
    const int dim = u.dim();
    for (std::size_t n = 0; n < v.size(); ++n) v[n] -= c[n % dim];
  } else if (u.asympt() == Asympt::antipodal) {
    throw std::invalid_argument(
        "weighted_norm: antipodal maps need the cutoff profile; use neck_norm");
  }
  return v;
}

double norm_sq_of(const CylinderMap& u, int k, double delta, WeightCenter center, NormPart part) {
  const auto v = (part == NormPart::remainder) ? remainder_values(u) : u.raw();
  return weighted_sq(v, u.grid(), u.dim(), k, delta, center);
}

double sq(double x) { return x * x; }

}  // namespace

double weighted_norm(const CylinderMap& u, int k, double delta, WeightCenter center, NormPart part) {
  return std::sqrt(norm_sq_of(u, k, delta, center, part));
}

double pair_norm_E(const MapPair& h, int m, const ScScale& scale) {
  if (h.space != PairSpace::E) throw std::invalid_argument("pair_norm_E: expected an E-pair");
  const double delta = scale.delta(m);
  const int k = ScScale::order_E(m);
  double total = 0.0;
  for (double c : h.constant()) total += sq(c);
  total += norm_sq_of(h.plus, k, delta, WeightCenter::half(), NormPart::remainder);
  total += norm_sq_of(h.minus, k, delta, WeightCenter::half(), NormPart::remainder);
  return std::sqrt(total);
}

double pair_norm_F(const MapPair& xi, int m, const ScScale& scale) {
  if (xi.space != PairSpace::F) throw std::invalid_argument("pair_norm_F: expected an F-pair");
  const double delta = scale.delta(m);
  const int k = ScScale::order_F(m);
  double total = norm_sq_of(xi.plus, k, delta, WeightCenter::half(), NormPart::full) +
                 norm_sq_of(xi.minus, k, delta, WeightCenter::half(), NormPart::full);
  return std::sqrt(total);
}

double neck_norm(const NeckMap& q, const NeckMap& p, int m, const ScScale& scale,
                 NeckNormMode mode, const Cutoff& cutoff) {
  if (q.is_degenerate() || p.is_degenerate())
    throw std::invalid_argument("neck_norm: degenerate (a = 0) pair has no neck norms");
  if (std::abs(q.R - p.R) > 1e-12 || std::abs(q.a.abs() - p.a.abs()) > 1e-15 ||
      std::abs(q.a.twist() - p.a.twist()) > 1e-15)
    throw std::invalid_argument("neck_norm: mismatched gluing parameters");

  const double R = q.R;
  const double delta = scale.delta(m);
  const int k = m + 2;
  const auto center = WeightCenter::neck(R);
  const auto& qm = q.map();
  const auto& pm = p.map();
  const int dim = qm.dim();

  if (mode == NeckNormMode::G_hat) {
    const double a2 = weighted_sq(qm.raw(), qm.grid(), dim, k, -delta, center);
    const double b2 = weighted_sq(pm.raw(), pm.grid(), dim, k, delta, center);
    return std::sqrt(std::exp(delta * R) * (a2 + b2));
  }

  // G-mode: mean value of q on the middle circle and the antipodal constant
  // of p enter explicitly.
  const auto mean_q = qm.circle_mean(0.5 * R);
  std::vector<double> p_inf(dim, 0.0);
  if (pm.asympt() == Asympt::antipodal) p_inf = pm.constant();

  double head = 0.0;
  for (int c = 0; c < dim; ++c) head += sq(mean_q[c] - p_inf[c]);

  std::vector<double> q_shift = qm.raw();
  for (std::size_t n = 0; n < q_shift.size(); ++n)
    q_shift[n] += -mean_q[n % dim] + p_inf[n % dim];

  std::vector<double> p_hat = pm.raw();
  {
    const auto& g = pm.grid();
    for (int i = 0; i < g.n_s; ++i) {
      const double prof = 1.0 - 2.0 * cutoff(g.s(i) - 0.5 * R);
      for (int j = 0; j < g.n_t; ++j)
        for (int c = 0; c < dim; ++c)
          p_hat[(static_cast<std::size_t>(i) * g.n_t + j) * dim + c] -= prof * p_inf[c];
    }
  }

  const double a2 = weighted_sq(q_shift, qm.grid(), dim, k, -delta, center);
  const double b2 = weighted_sq(p_hat, pm.grid(), dim, k, delta, center);
  return std::sqrt(head + std::exp(delta * R) * (a2 + b2));
}

}  // namespace polyglue
