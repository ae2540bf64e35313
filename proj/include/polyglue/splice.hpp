#pragma once

#include "polyglue/cutoff.hpp"
#include "polyglue/grid.hpp"
#include "polyglue/norms.hpp"
#include "polyglue/profiles.hpp"

namespace polyglue {

/// Gluing parameter together with the cut-off data derived from it:
/// beta_a(s) = beta(s - R/2) and gamma_a = beta_a^2 + (1-beta_a)^2.
/// Splice formulas require |a| <= 1/2 and a neck of length R >= 2 so that
/// the cut-off transition zone [R/2-1, R/2+1] lies inside [0,R].
class SpliceContext {
public:
  SpliceContext() = default;  ///< a = 0
  SpliceContext(GluingParameter a, Profile profile = Profile::exponential);
  /// Convenience: parameter with the given neck length under `profile`.
  static SpliceContext from_length(double R, double twist, Profile profile = Profile::exponential);

  const GluingParameter& parameter() const { return a_; }
  bool is_zero() const { return a_.is_zero(); }
  double R() const { return R_; }
  double twist() const { return a_.twist(); }
  const Cutoff& cutoff() const { return cutoff_; }

  double beta(double s) const { return cutoff_.value(s - 0.5 * R_); }
  double dbeta(double s) const { return cutoff_.derivative(s - 0.5 * R_); }
  double gamma(double s) const {
    const double b = beta(s);
    return b * b + (1.0 - b) * (1.0 - b);
  }

private:
  GluingParameter a_;
  Profile profile_ = Profile::exponential;
  Cutoff cutoff_;
  double R_ = 0.0;
};

/// av_a(h) = ( [h+]_R + [h-]_R ) / 2 with [h+-]_R the circle means at
/// s = +-R/2.
std::vector<double> neck_average(const SpliceContext& ctx, const MapPair& h);

/// Gluing: beta_a u+ + (1 - beta_a) u-(s-R, t-theta) on Z_a = [0,R] x S^1.
/// At a = 0 the pair itself (degenerate neck map).
NeckMap plus_glue(const SpliceContext& ctx, const MapPair& h);

/// Anti-gluing on (a truncation of) C_a:
///   -(1-beta_a)(h+ - av) + beta_a (h-(s-R,t-theta) - av),
/// with antipodal asymptotic constants av - c. At a = 0 the zero pair.
NeckMap minus_glue(const SpliceContext& ctx, const MapPair& h);

/// Hat gluing: same combination as plus_glue, for zero-constant pairs.
NeckMap hat_plus_glue(const SpliceContext& ctx, const MapPair& xi);

/// Hat anti-gluing: -(1-beta_a) xi+ + beta_a xi-(s-R, t-theta); no average
/// subtraction. At a = 0 zero.
NeckMap hat_minus_glue(const SpliceContext& ctx, const MapPair& xi);

/// Inverse of the total gluing (plus_glue, minus_glue): the unique E-pair h
/// with glue(h) = v and anti-glue(h) = w. Asymptotic constants come out as
/// h(+-inf) = -w(inf) + [v]. At a = 0 only w = 0 is invertible.
MapPair total_unglue(const SpliceContext& ctx, const NeckMap& v, const NeckMap& w);

/// Inverse of the total hat-gluing: per-node 2x2 solve with determinant
/// gamma_a; returns an F-pair.
MapPair hat_total_unglue(const SpliceContext& ctx, const NeckMap& v, const NeckMap& w);

/// Splicing projection pi_a onto ker(anti-glue) along ker(glue), by the
/// closed-form coefficients. pi_0 = id.
MapPair project(const SpliceContext& ctx, const MapPair& h);

/// Hat splicing projection on zero-constant pairs. pi_0 = id.
MapPair hat_project(const SpliceContext& ctx, const MapPair& xi);

/// Scale-invariant size of the anti-glued data of h; zero exactly on the
/// splicing core.
double splicing_core_residual(const SpliceContext& ctx, const MapPair& h, const ScScale& scale = ScScale{});

/// True iff the anti-glued part of h vanishes up to `tol` relative to the
/// E_0-size of h (splicing core membership pi_a(h) = h).
bool in_splicing_core(const SpliceContext& ctx, const MapPair& h, double tol = 1e-10);

/// Transfer operators: the unique F-pair xi with
///   D^a: hat_glue(xi) = d(glue(eta)),   hat_antiglue(xi) = 0
///   C^a: hat_glue(xi) = 0,              hat_antiglue(xi) = d(antiglue(eta))
/// in the s- or t-direction. At a = 0, D^0 is the plain derivative and
/// C^0 = 0.
MapPair transfer_ds(const SpliceContext& ctx, const MapPair& eta);
MapPair transfer_dt(const SpliceContext& ctx, const MapPair& eta);
MapPair transfer_cs(const SpliceContext& ctx, const MapPair& eta);
MapPair transfer_ct(const SpliceContext& ctx, const MapPair& eta);

/// Zero-valued neck maps on the canonical grids derived from a pair's grid
/// spacing (Z_a = [0,R], C_a truncation [R-S, S] for half-length S).
NeckMap zero_on_neck(const SpliceContext& ctx, const Grid& pair_grid, int dim);
NeckMap zero_on_cylinder(const SpliceContext& ctx, const Grid& pair_grid, int dim);

}  // namespace polyglue
