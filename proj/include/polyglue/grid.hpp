#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polyglue/profiles.hpp"

namespace polyglue {

/// Uniform tensor grid on [s_min, s_max] x S^1 with the circle of
/// circumference 1. s-samples include both endpoints; t-samples are
/// t_j = j / n_t, periodic.
struct Grid {
  double s_min = 0.0;
  double s_max = 1.0;
  int n_s = 4;
  int n_t = 4;

  Grid() = default;
  Grid(double smin, double smax, int ns, int nt);

  double ds() const { return (s_max - s_min) / (n_s - 1); }
  double dt() const { return 1.0 / n_t; }
  double s(int i) const { return s_min + i * ds(); }
  double t(int j) const { return static_cast<double>(j) / n_t; }
  std::size_t nodes() const { return static_cast<std::size_t>(n_s) * n_t; }

  bool operator==(const Grid&) const = default;
};

/// Asymptotic behavior attached to a grid-sampled map. Values stored on the
/// grid are the full map; beyond the grid the decaying remainder is treated
/// as zero, so the map continues as its asymptotic profile.
enum class Asympt {
  none,       ///< no constant; map treated as zero beyond the grid
  constant,   ///< u -> c at the far end(s)
  antipodal,  ///< u -> +c as s -> +inf and -c as s -> -inf
};

/// Grid-sampled map into R^d. Storage is s-major: value(i,j)[k].
class CylinderMap {
public:
  CylinderMap() = default;
  CylinderMap(Grid grid, int dim);
  CylinderMap(Grid grid, int dim, Asympt kind, std::vector<double> constant);

  const Grid& grid() const { return grid_; }
  int dim() const { return dim_; }
  Asympt asympt() const { return kind_; }
  const std::vector<double>& constant() const { return c_; }
  void set_constant(Asympt kind, std::vector<double> c);

  double& at(int i, int j, int k);
  double at(int i, int j, int k) const;
  const std::vector<double>& raw() const { return values_; }
  std::vector<double>& raw() { return values_; }

  /// Full map value with trigonometric interpolation in t and monotone cubic
  /// interpolation in s; exact at nodes. s outside the grid range throws
  /// unless `clamp_to_profile` is set, in which case the asymptotic profile
  /// value is returned (remainder treated as zero).
  std::vector<double> evaluate(double s, double t, bool clamp_to_profile = false) const;

  /// t-quadrature of u(s0, .); exact for trigonometric polynomials of degree
  /// < n_t / 2. Interpolates in s off nodes.
  std::vector<double> circle_mean(double s0) const;

  std::string to_csv() const;
  static CylinderMap from_csv(const std::string& text);

private:
  Grid grid_;
  int dim_ = 0;
  Asympt kind_ = Asympt::none;
  std::vector<double> c_;
  std::vector<double> values_;
};

/// Which function space a pair of half-cylinder maps lives in.
enum class PairSpace {
  E,  ///< matching asymptotic constants c+ = c-
  F,  ///< zero asymptotic constants
};

/// A pair (u+, u-) on [0,S] x S^1 and [-S,0] x S^1 with matching (E) or zero
/// (F) asymptotic constants.
struct MapPair {
  CylinderMap plus;
  CylinderMap minus;
  PairSpace space = PairSpace::E;

  MapPair() = default;
  MapPair(CylinderMap p, CylinderMap m, PairSpace sp);

  int dim() const { return plus.dim(); }
  /// The shared asymptotic constant (zero vector for F-pairs).
  std::vector<double> constant() const;
};

/// Map on the finite neck Z_a = [0,R] x S^1 or on a truncation of the
/// infinite cylinder C_a, tagged with its gluing parameter. The a = 0
/// degenerate case stores the unglued pair instead.
struct NeckMap {
  GluingParameter a;
  double R = 0.0;                      ///< neck length (a != 0)
  std::optional<CylinderMap> values;   ///< a != 0
  std::optional<MapPair> degenerate;   ///< a == 0

  bool is_degenerate() const { return a.is_zero(); }
  const CylinderMap& map() const;
  CylinderMap& map();
};

/// Pre-image(s) of the neck point [s,t] on Z_a: the D_x-chart coordinates
/// (s,t) and the D_y-chart coordinates (s - R, t - theta mod 1). Points with
/// s in [h, R-h] lie in the sub-cylinder Z_a(-h) (neck interior); the rest
/// are core-adjacent.
struct PointLift {
  std::array<double, 2> chart_x;  ///< (s, t)
  std::array<double, 2> chart_y;  ///< (s', t')
  bool neck_interior = false;
};

PointLift lift_point(const GluingParameter& a, double R, double s, double t, double margin);

/// Second-order finite-difference weights for the p-th derivative at offset
/// positions (Fornberg). Used by the stencil engine; exposed for tests.
std::vector<double> fd_weights(int deriv, const std::vector<double>& offsets, double h);

enum class DerivScheme {
  fd2,       ///< compact second-order stencils (one-sided at s-ends)
  spectral,  ///< exact differentiation of resolved harmonics (t only)
};

/// Derivative grid d^p/ds^p d^q/dt^q of a map's stored values. t-stencils
/// are periodic; the spectral scheme applies to the t-direction only.
std::vector<double> derivative_grid(const CylinderMap& u, int p, int q,
                                    DerivScheme t_scheme = DerivScheme::fd2);

/// Dense spectral differentiation matrix (order 1) on n periodic samples of
/// the unit circle.
std::vector<double> spectral_diff_matrix(int n);

}  // namespace polyglue
