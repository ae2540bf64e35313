#include "polyglue/cutoff.hpp"

#include <cmath>

namespace polyglue {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// psi'(x) = psi(x) / x^2 for x > 0.
double psi_prime(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

}  // namespace

double Cutoff::value(double s) const {
  if (s <= -1.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = psi(1.0 - s);
  const double b = psi(1.0 + s);
  return a / (a + b);
}

double Cutoff::derivative(double s) const {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double a = psi(1.0 - s);
  const double b = psi(1.0 + s);
  const double ap = psi_prime(1.0 - s);
  const double bp = psi_prime(1.0 + s);
  const double denom = (a + b) * (a + b);
  return (-ap * b - a * bp) / denom;
}

}  // namespace polyglue
