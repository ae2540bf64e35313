#pragma once

namespace polyglue {

/// Smooth cut-off beta: R -> [0,1] with beta(-s) + beta(s) = 1, beta = 1 on
/// (-inf,-1], beta = 0 on [1,inf) and beta' < 0 on (-1,1). Realized as
/// beta(s) = psi(1-s) / (psi(1-s) + psi(1+s)) with psi(x) = e^{-1/x} for
/// x > 0 and psi = 0 otherwise, so beta(0) = 1/2 exactly.
class Cutoff {
public:
  double operator()(double s) const { return value(s); }
  double value(double s) const;
  double derivative(double s) const;
};

}  // namespace polyglue
