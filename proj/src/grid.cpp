#include "polyglue/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polyglue {

Grid::Grid(double smin, double smax, int ns, int nt) : s_min(smin), s_max(smax), n_s(ns), n_t(nt) {
  if (!(s_min < s_max)) throw std::invalid_argument("Grid: s_min must be < s_max");
  if (n_s < 4 || n_t < 4) throw std::invalid_argument("Grid: need n_s >= 4 and n_t >= 4");
}

CylinderMap::CylinderMap(Grid grid, int dim) : grid_(grid), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("CylinderMap: dim must be >= 1");
  values_.assign(grid_.nodes() * dim_, 0.0);
}

CylinderMap::CylinderMap(Grid grid, int dim, Asympt kind, std::vector<double> constant)
    : CylinderMap(grid, dim) {
  set_constant(kind, std::move(constant));
}

void CylinderMap::set_constant(Asympt kind, std::vector<double> c) {
  if (kind == Asympt::none) {
    kind_ = kind;
    c_.clear();
    return;
  }
  if (static_cast<int>(c.size()) != dim_)
    throw std::invalid_argument("CylinderMap: constant dimension mismatch");
  kind_ = kind;
  c_ = std::move(c);
}

double& CylinderMap::at(int i, int j, int k) {
  return values_[(static_cast<std::size_t>(i) * grid_.n_t + j) * dim_ + k];
}

double CylinderMap::at(int i, int j, int k) const {
  return values_[(static_cast<std::size_t>(i) * grid_.n_t + j) * dim_ + k];
}

namespace {

// Finite-difference weights on arbitrary nodes (Fornberg 1988), for the
// m-th derivative at x0 = 0 given node offsets in units of h.
std::vector<double> fornberg(int m, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<std::vector<double>>> d(
      m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0.0)));
  d[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k) {
        d[k][i][j] = (x[i] * d[k][i - 1][j] - (k > 0 ? k * d[k - 1][i - 1][j] : 0.0)) / c3;
      }
    }
    for (int k = 0; k <= std::min(i, m); ++k) {
      d[k][i][i] = c1 / c2 * ((k > 0 ? k * d[k - 1][i - 1][i - 1] : 0.0) - x[i - 1] * d[k][i - 1][i - 1]);
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = d[m][n][j];
  return w;
}

int interior_width(int p) { return p <= 2 ? 3 : 5; }

}  // namespace

std::vector<double> fd_weights(int deriv, const std::vector<double>& offsets, double h) {
  std::vector<double> x(offsets);
  auto w = fornberg(deriv, x);
  const double scale = std::pow(h, -deriv);
  for (auto& v : w) v *= scale;
  return w;
}

namespace {

// One s-derivative sweep of order p over a raw value array.
std::vector<double> diff_s(const std::vector<double>& v, const Grid& g, int dim, int p) {
  if (p == 0) return v;
  if (p > 4) throw std::invalid_argument("derivative order beyond supported stencils (<= 4)");
  const int w_int = interior_width(p);
  const int w_bnd = p + 2;
  const double h = g.ds();

  std::map<std::pair<int, int>, std::vector<double>> cache;  // (lo offset, width) -> weights
  auto weights_for = [&](int lo_off, int width) -> const std::vector<double>& {
    auto key = std::make_pair(lo_off, width);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> offs(width);
    for (int k = 0; k < width; ++k) offs[k] = lo_off + k;
    auto w = fd_weights(p, offs, h);
    return cache.emplace(key, std::move(w)).first->second;
  };

  std::vector<double> out(v.size(), 0.0);
  for (int i = 0; i < g.n_s; ++i) {
    int width = w_int;
    int lo = i - (w_int - 1) / 2;
    if (lo < 0 || lo + width > g.n_s) {
      width = std::min(w_bnd, g.n_s);
      lo = std::clamp(i - width / 2, 0, g.n_s - width);
    }
    const auto& w = weights_for(lo - i, width);
    for (int j = 0; j < g.n_t; ++j)
      for (int k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (int q = 0; q < width; ++q)
          acc += w[q] * v[(static_cast<std::size_t>(lo + q) * g.n_t + j) * dim + k];
        out[(static_cast<std::size_t>(i) * g.n_t + j) * dim + k] = acc;
      }
  }
  return out;
}

std::vector<double> diff_t_fd(const std::vector<double>& v, const Grid& g, int dim, int q) {
  if (q == 0) return v;
  if (q > 4) throw std::invalid_argument("derivative order beyond supported stencils (<= 4)");
  const int width = interior_width(q);
  const double h = g.dt();
  std::vector<double> offs(width);
  for (int k = 0; k < width; ++k) offs[k] = k - (width - 1) / 2;
  const auto w = fd_weights(q, offs, h);

  std::vector<double> out(v.size(), 0.0);
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j)
      for (int k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (int m = 0; m < width; ++m) {
          int jj = (j + static_cast<int>(offs[m]) % g.n_t + g.n_t) % g.n_t;
          acc += w[m] * v[(static_cast<std::size_t>(i) * g.n_t + jj) * dim + k];
        }
        out[(static_cast<std::size_t>(i) * g.n_t + j) * dim + k] = acc;
      }
  return out;
}

std::vector<double> diff_t_spectral(const std::vector<double>& v, const Grid& g, int dim, int q) {
  std::vector<double> cur = v;
  if (q == 0) return cur;
  const auto D = spectral_diff_matrix(g.n_t);
  for (int rep = 0; rep < q; ++rep) {
    std::vector<double> out(cur.size(), 0.0);
    for (int i = 0; i < g.n_s; ++i)
      for (int j = 0; j < g.n_t; ++j)
        for (int k = 0; k < dim; ++k) {
          double acc = 0.0;
          for (int l = 0; l < g.n_t; ++l)
            acc += D[static_cast<std::size_t>(j) * g.n_t + l] *
                   cur[(static_cast<std::size_t>(i) * g.n_t + l) * dim + k];
          out[(static_cast<std::size_t>(i) * g.n_t + j) * dim + k] = acc;
        }
    cur = std::move(out);
  }
  return cur;
}

}  // namespace

std::vector<double> derivative_grid(const CylinderMap& u, int p, int q, DerivScheme t_scheme) {
  auto v = diff_s(u.raw(), u.grid(), u.dim(), p);
  if (t_scheme == DerivScheme::spectral) return diff_t_spectral(v, u.grid(), u.dim(), q);
  return diff_t_fd(v, u.grid(), u.dim(), q);
}

std::vector<double> spectral_diff_matrix(int n) {
  if (n < 2) throw std::invalid_argument("spectral_diff_matrix: n must be >= 2");
  std::vector<double> D(static_cast<std::size_t>(n) * n, 0.0);
  const bool even = (n % 2 == 0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int diff = j - k;
      const double sgn = (diff % 2 == 0) ? 1.0 : -1.0;
      const double arg = std::numbers::pi * diff / n;
      // even n: cotangent cardinal (Nyquist-cosine convention);
      // odd n: cosecant cardinal (no Nyquist mode)
      D[static_cast<std::size_t>(j) * n + k] =
          std::numbers::pi * sgn * (even ? 1.0 / std::tan(arg) : 1.0 / std::sin(arg));
    }
  return D;
}

namespace {

// Fritsch-Carlson monotone cubic slopes for one scalar column.
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0), delta(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / h;
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      d[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
    }
  }
  auto end_slope = [](double d0, double d1) {
    double d_end = 1.5 * d0 - 0.5 * d1;  // second-order one-sided estimate
    if (d_end * d0 <= 0.0)
      d_end = 0.0;
    else if (d0 * d1 <= 0.0 && std::abs(d_end) > 3.0 * std::abs(d0))
      d_end = 3.0 * d0;
    return d_end;
  };
  d[0] = end_slope(delta[0], delta[1]);
  d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
  return d;
}

double hermite(double y0, double y1, double d0, double d1, double h, double x) {
  const double u = x / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

double pchip_eval(const std::vector<double>& y, double s_min, double h, double s) {
  const std::size_t n = y.size();
  auto d = pchip_slopes(y, h);
  int cell = static_cast<int>(std::floor((s - s_min) / h));
  cell = std::clamp(cell, 0, static_cast<int>(n) - 2);
  const double x = s - (s_min + cell * h);
  return hermite(y[cell], y[cell + 1], d[cell], d[cell + 1], h, x);
}

// Cardinal trigonometric interpolation on n (even) equispaced samples of a
// period-1 function.
double trig_eval(const std::vector<double>& y, double t) {
  const int n = static_cast<int>(y.size());
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double x = t - static_cast<double>(j) / n;
    x -= std::round(x);
    double w;
    if (std::abs(x) < 1e-14) {
      w = 1.0;
    } else {
      w = std::sin(std::numbers::pi * n * x) / (n * std::tan(std::numbers::pi * x));
    }
    acc += y[j] * w;
  }
  return acc;
}

}  // namespace

std::vector<double> CylinderMap::evaluate(double s, double t, bool clamp_to_profile) const {
  const double ds = grid_.ds();
  std::vector<double> out(dim_, 0.0);

  if (s < grid_.s_min - 1e-12 * ds || s > grid_.s_max + 1e-12 * ds) {
    if (!clamp_to_profile) throw std::out_of_range("CylinderMap::evaluate: s outside grid");
    if (kind_ == Asympt::none) return out;
    if (kind_ == Asympt::constant) return c_;
    // antipodal: +c beyond the right end, -c beyond the left end
    for (int k = 0; k < dim_; ++k) out[k] = (s > grid_.s_max ? c_[k] : -c_[k]);
    return out;
  }

  double tw = t - std::floor(t);
  const double si = (s - grid_.s_min) / ds;
  const double tj = tw * grid_.n_t;
  const bool s_on_node = std::abs(si - std::round(si)) < 1e-9;
  const bool t_on_node = std::abs(tj - std::round(tj)) < 1e-9;

  if (s_on_node && t_on_node) {
    const int i = std::clamp(static_cast<int>(std::round(si)), 0, grid_.n_s - 1);
    const int j = static_cast<int>(std::round(tj)) % grid_.n_t;
    for (int k = 0; k < dim_; ++k) out[k] = at(i, j, k);
    return out;
  }

  if (t_on_node) {
    const int j = static_cast<int>(std::round(tj)) % grid_.n_t;
    std::vector<double> col(grid_.n_s);
    for (int k = 0; k < dim_; ++k) {
      for (int i = 0; i < grid_.n_s; ++i) col[i] = at(i, j, k);
      out[k] = pchip_eval(col, grid_.s_min, ds, s);
    }
    return out;
  }

  // Interpolate in s per t-node, then trigonometrically in t.
  std::vector<double> row(grid_.n_t);
  std::vector<double> col(grid_.n_s);
  for (int k = 0; k < dim_; ++k) {
    for (int j = 0; j < grid_.n_t; ++j) {
      if (s_on_node) {
        const int i = std::clamp(static_cast<int>(std::round(si)), 0, grid_.n_s - 1);
        row[j] = at(i, j, k);
      } else {
        for (int i = 0; i < grid_.n_s; ++i) col[i] = at(i, j, k);
        row[j] = pchip_eval(col, grid_.s_min, ds, s);
      }
    }
    out[k] = trig_eval(row, tw);
  }
  return out;
}

std::vector<double> CylinderMap::circle_mean(double s0) const {
  const double ds = grid_.ds();
  if (s0 < grid_.s_min - 1e-12 * ds || s0 > grid_.s_max + 1e-12 * ds)
    throw std::out_of_range("circle_mean: s0 outside grid");
  std::vector<double> out(dim_, 0.0);
  const double si = (s0 - grid_.s_min) / ds;
  if (std::abs(si - std::round(si)) < 1e-9) {
    const int i = std::clamp(static_cast<int>(std::round(si)), 0, grid_.n_s - 1);
    for (int j = 0; j < grid_.n_t; ++j)
      for (int k = 0; k < dim_; ++k) out[k] += at(i, j, k);
  } else {
    std::vector<double> col(grid_.n_s);
    for (int j = 0; j < grid_.n_t; ++j)
      for (int k = 0; k < dim_; ++k) {
        for (int i = 0; i < grid_.n_s; ++i) col[i] = at(i, j, k);
        out[k] += pchip_eval(col, grid_.s_min, ds, s0);
      }
  }
  for (auto& v : out) v /= grid_.n_t;
  return out;
}

std::string CylinderMap::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  const char* kind = kind_ == Asympt::none ? "none" : (kind_ == Asympt::constant ? "constant" : "antipodal");
  out << "# " << dim_ << " " << grid_.n_s << " " << grid_.n_t << " " << grid_.s_min << " "
      << grid_.s_max << " " << kind;
  for (double c : c_) out << " " << c;
  out << "\n";
  for (int i = 0; i < grid_.n_s; ++i)
    for (int j = 0; j < grid_.n_t; ++j) {
      for (int k = 0; k < dim_; ++k) out << (k ? "," : "") << at(i, j, k);
      out << "\n";
    }
  return out.str();
}

CylinderMap CylinderMap::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw std::invalid_argument("grid csv: missing header");
  std::istringstream hdr(line.substr(1));
  int dim, ns, nt;
  double smin, smax;
  std::string kind_str;
  if (!(hdr >> dim >> ns >> nt >> smin >> smax >> kind_str))
    throw std::invalid_argument("grid csv: malformed header");
  Asympt kind = Asympt::none;
  if (kind_str == "constant") kind = Asympt::constant;
  else if (kind_str == "antipodal") kind = Asympt::antipodal;
  else if (kind_str != "none") throw std::invalid_argument("grid csv: unknown asympt kind");
  std::vector<double> c;
  double cv;
  while (hdr >> cv) c.push_back(cv);
  CylinderMap m(Grid(smin, smax, ns, nt), dim);
  if (kind != Asympt::none) m.set_constant(kind, c);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      if (!std::getline(in, line)) throw std::invalid_argument("grid csv: truncated");
      std::istringstream row(line);
      std::string cell;
      for (int k = 0; k < dim; ++k) {
        if (!std::getline(row, cell, ',')) throw std::invalid_argument("grid csv: short row");
        m.at(i, j, k) = std::stod(cell);
      }
    }
  return m;
}

MapPair::MapPair(CylinderMap p, CylinderMap m, PairSpace sp)
    : plus(std::move(p)), minus(std::move(m)), space(sp) {
  if (plus.dim() != minus.dim()) throw std::invalid_argument("MapPair: dimension mismatch");
  if (std::abs(plus.grid().s_min) > 1e-12 || std::abs(minus.grid().s_max) > 1e-12)
    throw std::invalid_argument("MapPair: plus map must start at 0, minus map must end at 0");
  if (space == PairSpace::E) {
    if (plus.asympt() != Asympt::constant || minus.asympt() != Asympt::constant ||
        plus.constant() != minus.constant())
      throw std::invalid_argument("MapPair(E): matching asymptotic constants required");
  } else {
    auto zero_like = [](const CylinderMap& u) {
      if (u.asympt() == Asympt::none) return true;
      for (double c : u.constant())
        if (c != 0.0) return false;
      return true;
    };
    if (!zero_like(plus) || !zero_like(minus))
      throw std::invalid_argument("MapPair(F): asymptotic constants must vanish");
  }
}

std::vector<double> MapPair::constant() const {
  if (space == PairSpace::E) return plus.constant();
  return std::vector<double>(plus.dim(), 0.0);
}

const CylinderMap& NeckMap::map() const {
  if (!values) throw std::logic_error("NeckMap: degenerate (a = 0) has no grid values");
  return *values;
}

CylinderMap& NeckMap::map() {
  if (!values) throw std::logic_error("NeckMap: degenerate (a = 0) has no grid values");
  return *values;
}

PointLift lift_point(const GluingParameter& a, double R, double s, double t, double margin) {
  if (a.is_zero()) throw std::domain_error("lift_point: a = 0 has separate disks, not a neck");
  if (s < 0.0 || s > R) throw std::out_of_range("lift_point: s outside [0, R]");
  double tp = t - a.twist();
  tp -= std::floor(tp);
  double tw = t - std::floor(t);
  PointLift lift;
  lift.chart_x = {s, tw};
  lift.chart_y = {s - R, tp};
  lift.neck_interior = (s >= margin && s <= R - margin);
  return lift;
}

}  // namespace polyglue
