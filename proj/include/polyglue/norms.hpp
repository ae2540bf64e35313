#pragma once

#include "polyglue/cutoff.hpp"
#include "polyglue/grid.hpp"
#include "polyglue/profiles.hpp"

namespace polyglue {

/// Center of the exponential weight e^{2 delta w(s)}.
struct WeightCenter {
  enum class Kind { half_cylinder, neck } kind = Kind::half_cylinder;
  double R = 0.0;  ///< used by the neck kind: w(s) = |s - R/2|

  static WeightCenter half() { return {Kind::half_cylinder, 0.0}; }
  static WeightCenter neck(double R) { return {Kind::neck, R}; }
  double weight(double s) const;
};

/// Which values enter the norm: the decaying remainder (full values minus
/// the declared asymptotic constant) or the stored values as-is.
enum class NormPart { remainder, full };

/// Discrete ( sum_{|alpha| <= k} int |D^alpha u|^2 e^{2 delta w(s)} )^{1/2}
/// with trapezoid quadrature in s and exact uniform quadrature in t.
/// Supported derivative order k <= 4.
double weighted_norm(const CylinderMap& u, int k, double delta, WeightCenter center,
                     NormPart part = NormPart::remainder);

/// E_m-norm of a matching-constant pair:
/// ( |c|^2 + ||r+||^2_{3+m,delta_m} + ||r-||^2_{3+m,delta_m} )^{1/2}.
double pair_norm_E(const MapPair& h, int m, const ScScale& scale);

/// F_m-norm of a zero-constant pair:
/// ( ||xi+||^2_{2+m,delta_m} + ||xi-||^2_{2+m,delta_m} )^{1/2}.
double pair_norm_F(const MapPair& xi, int m, const ScScale& scale);

enum class NeckNormMode { G, G_hat };

/// G^a_m / hat-G^a_m norms of a pair (q on Z_a, p on C_a):
///   hat: ( e^{delta_m R} [ |||q|||^2_{m+2,-delta_m} + |||p|||^2_{m+2,delta_m} ] )^{1/2}
///   G:   ( |[q]_a - p_inf|^2 + e^{delta_m R} ( |||q - [q]_a + p_inf|||^2_{m+2,-delta_m}
///            + |||p_hat|||^2_{m+2,delta_m} ) )^{1/2},  p_hat = p - (1-2 beta_a) p_inf.
double neck_norm(const NeckMap& q, const NeckMap& p, int m, const ScScale& scale,
                 NeckNormMode mode, const Cutoff& cutoff = Cutoff{});

}  // namespace polyglue
