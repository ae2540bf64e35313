#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace polyglue {

/// Gluing profiles converting a parameter modulus r in (0,1] into a neck
/// length R in [0,inf). Both are strictly decreasing diffeomorphisms.
enum class Profile { logarithmic, exponential };

/// R = phi(r). Logarithmic: -(1/2pi) ln r. Exponential: e^{1/r} - e.
double gluing_length(Profile p, double r);

/// ln phi(r), evaluated without overflow for extreme moduli.
/// For the exponential profile this is 1/r + log1p(-e^{1 - 1/r}).
double log_gluing_length(Profile p, double r);

/// r = phi^{-1}(R). Closed form for both profiles.
double inverse_length(Profile p, double R);

/// Complex gluing parameter a = |a| e^{-2 pi i theta} with |a| < 1 and the
/// twist theta normalized to [0,1). Stored in polar form; the zero parameter
/// has modulus 0 and twist 0.
class GluingParameter {
public:
  GluingParameter() = default;
  GluingParameter(double modulus, double twist);
  static GluingParameter from_complex(std::complex<double> a);

  bool is_zero() const { return abs_ == 0.0; }
  double abs() const { return abs_; }
  double twist() const { return twist_; }
  std::complex<double> value() const;

  /// Neck length R = phi(|a|) under the given profile. Requires a != 0.
  double length(Profile p) const;

private:
  double abs_ = 0.0;
  double twist_ = 0.0;
};

/// Converts a gluing parameter between the exponential and logarithmic
/// profiles so that the glued surfaces agree: the result a~ satisfies
/// phi_log(|a~|) = phi_exp(|a|), with the twist preserved and 0 -> 0.
GluingParameter profile_convert(const GluingParameter& a);

/// log |a~| for the conversion above: -2 pi (e^{1/|a|} - e). Stays
/// representable down to |a| ~ 1/700 where the converted modulus itself
/// underflows to zero.
double profile_convert_log_abs(const GluingParameter& a);

/// Strictly increasing weight sequence (delta_m) in (0, 2 pi) together with
/// the regularity offsets of the base (E) and fiber (F) scales.
class ScScale {
public:
  /// Default scale delta_m = 2 pi - pi 2^{-m} (delta_0 = pi).
  ScScale() = default;
  explicit ScScale(std::vector<double> deltas);

  double delta(std::size_t m) const;
  /// Derivative order carried by level m: m+3 for E-type, m+2 for F-type.
  static int order_E(int m) { return m + 3; }
  static int order_F(int m) { return m + 2; }

private:
  std::vector<double> deltas_;  // empty means the closed-form default
};

/// Bundle bi-level (m,k); valid iff 0 <= k <= m+1.
struct BiLevel {
  int m = 0;
  int k = 0;
};

bool bilevel_valid(int m, int k);

/// Number of vanishing quadrant coordinates of a point in [0,inf)^k (the
/// free part of the ambient space does not contribute). Exact zero test.
int degeneration_index(const std::vector<double>& quadrant_coords);

}  // namespace polyglue
