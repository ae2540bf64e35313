#include "polyglue/profiles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyglue {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double gluing_length(Profile p, double r) {
  if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("gluing_length: r must lie in (0,1]");
  switch (p) {
    case Profile::logarithmic:
      return -std::log(r) / two_pi;
    case Profile::exponential:
      return std::exp(1.0 / r) - std::numbers::e;
  }
  throw std::logic_error("unreachable");
}

double log_gluing_length(Profile p, double r) {
  if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("log_gluing_length: r must lie in (0,1]");
  switch (p) {
    case Profile::logarithmic:
      return std::log(-std::log(r)) - std::log(two_pi);
    case Profile::exponential: {
      // ln(e^{1/r} - e) = 1/r + ln(1 - e^{1 - 1/r}); the correction term is
      // exactly representable for all r < 1 and -inf at r = 1.
      const double inv = 1.0 / r;
      return inv + std::log1p(-std::exp(1.0 - inv));
    }
  }
  throw std::logic_error("unreachable");
}

double inverse_length(Profile p, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("inverse_length: R must be >= 0");
  switch (p) {
    case Profile::logarithmic:
      return std::exp(-two_pi * R);
    case Profile::exponential:
      return 1.0 / std::log(R + std::numbers::e);
  }
  throw std::logic_error("unreachable");
}

GluingParameter::GluingParameter(double modulus, double twist) {
  if (!(modulus >= 0.0) || modulus >= 1.0)
    throw std::invalid_argument("GluingParameter: modulus must lie in [0,1)");
  if (modulus == 0.0) {
    abs_ = 0.0;
    twist_ = 0.0;
    return;
  }
  abs_ = modulus;
  twist_ = twist - std::floor(twist);
  if (twist_ == 1.0) twist_ = 0.0;
}

GluingParameter GluingParameter::from_complex(std::complex<double> a) {
  const double m = std::abs(a);
  if (m == 0.0) return GluingParameter();
  // a = |a| e^{-2 pi i theta}  =>  theta = -arg(a) / 2pi  (mod 1)
  return GluingParameter(m, -std::arg(a) / two_pi);
}

std::complex<double> GluingParameter::value() const {
  if (abs_ == 0.0) return {0.0, 0.0};
  return std::polar(abs_, -two_pi * twist_);
}

double GluingParameter::length(Profile p) const {
  if (is_zero()) throw std::domain_error("GluingParameter::length: a = 0 has no finite neck");
  return gluing_length(p, abs_);
}

GluingParameter profile_convert(const GluingParameter& a) {
  if (a.is_zero()) return GluingParameter();
  const double log_abs = profile_convert_log_abs(a);
  return GluingParameter(std::exp(log_abs), a.twist());
}

double profile_convert_log_abs(const GluingParameter& a) {
  if (a.is_zero()) throw std::domain_error("profile_convert_log_abs: a = 0");
  return -two_pi * (std::exp(1.0 / a.abs()) - std::numbers::e);
}

ScScale::ScScale(std::vector<double> deltas) : deltas_(std::move(deltas)) {
  if (deltas_.empty()) throw std::invalid_argument("ScScale: empty sequence");
  double prev = 0.0;
  for (double d : deltas_) {
    if (!(d > prev) || !(d < two_pi))
      throw std::invalid_argument("ScScale: sequence must be strictly increasing in (0, 2pi)");
    prev = d;
  }
}

double ScScale::delta(std::size_t m) const {
  if (deltas_.empty())
    return two_pi - std::numbers::pi * std::pow(2.0, -static_cast<double>(m));
  if (m >= deltas_.size()) throw std::out_of_range("ScScale::delta: level beyond sequence");
  return deltas_[m];
}

bool bilevel_valid(int m, int k) {
  if (m < 0 || k < 0) throw std::invalid_argument("bilevel_valid: m,k must be >= 0");
  return k <= m + 1;
}

int degeneration_index(const std::vector<double>& quadrant_coords) {
  int count = 0;
  for (double c : quadrant_coords) {
    if (c < 0.0) throw std::invalid_argument("degeneration_index: negative quadrant coordinate");
    if (c == 0.0) ++count;
  }
  return count;
}

}  // namespace polyglue
