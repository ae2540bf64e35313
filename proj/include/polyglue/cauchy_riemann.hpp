#pragma once

#include <array>
#include <functional>
#include <vector>

#include "polyglue/grid.hpp"
#include "polyglue/profiles.hpp"
#include "polyglue/splice.hpp"

namespace polyglue {

/// Almost complex structure on R^{2n}: a field of 2n x 2n matrices
/// (row-major) with J(p)^2 = -I.
class ComplexStructureField {
public:
  using Evaluator = std::function<std::vector<double>(const std::vector<double>&)>;

  /// Constant structure J(p) = J0.
  static ComplexStructureField constant(std::vector<double> J0, int dim);
  ComplexStructureField(Evaluator eval, int dim, bool is_constant);

  int dim() const { return dim_; }
  bool is_constant() const { return constant_; }
  std::vector<double> operator()(const std::vector<double>& p) const { return eval_(p); }

  /// Standard block rotation J0 (x,y) -> (-y,x) on R^{2n}.
  static std::vector<double> standard_matrix(int dim);

  /// Non-constant structure A(p) J0 A(p)^{-1}, A(p) = I + eps e^{-|p-c|^2} S;
  /// the conjugation keeps J(p)^2 = -I exactly.
  static ComplexStructureField bump_conjugated(int dim, double eps, std::vector<double> center);

  /// max over sample points of ||J(p)^2 + I||_max; the structure invariant.
  double square_defect(const std::vector<std::vector<double>>& samples) const;

private:
  Evaluator eval_;
  int dim_ = 2;
  bool constant_ = true;
};

/// Constant-coefficient operator d_s u + J0 d_t u, nodewise on the grid.
/// t-derivatives are spectral, s-derivatives second-order stencils.
CylinderMap dbar0(const CylinderMap& u, const std::vector<double>& J0);

/// Nonlinear Cauchy-Riemann expression (1/2)[d_s u + J(u) d_t u].
CylinderMap cr_apply(const CylinderMap& u, const ComplexStructureField& J);

/// The filled section at gluing parameter a: the unique F-pair xi with
///   hat_glue(xi)     = (1/2)[ d_s g + J(g) d_t g ],  g = glue(u + h),
///   hat_antiglue(xi) = dbar0( antiglue(h) )  with J0 = J(asymptotic of u).
/// At a = 0 this is the plain CR expression of the pair u + h.
struct FilledResult {
  MapPair xi;
  NeckMap rhs_neck;  ///< first-equation right-hand side on Z_a (a != 0)
  NeckMap rhs_cyl;   ///< second-equation right-hand side on C_a (a != 0)
};
FilledResult filled_section(const SpliceContext& ctx, const MapPair& u, const MapPair& h,
                            const ComplexStructureField& J);

/// Weighted least-squares solve of dbar0 u = rhs on a truncation of C_a in
/// the delta-weighted norm, with the antipodal-constant ansatz
/// u = (1 - 2 beta_a) c + r and the decaying remainder treated as zero
/// beyond the grid. No Dirichlet rows; ghost equations absorb the far field.
struct CRSolveResult {
  NeckMap solution;       ///< full values, antipodal constant recorded
  double residual = 0.0;  ///< ||A x - b|| / max(1, ||b||), weighted
  double sigma_max = 0.0;
  double sigma_min = 0.0;  ///< power-iteration estimates (condition probe)
};
CRSolveResult linear_cr_solve(const SpliceContext& ctx, const std::vector<double>& J0,
                              const NeckMap& rhs, double delta, bool condition_probe = false);

/// Applies exactly the solver's discrete operator rows to a full map with
/// declared antipodal constant (manufactured right-hand sides).
NeckMap apply_solver_operator(const SpliceContext& ctx, const std::vector<double>& J0,
                              const NeckMap& u);

/// Singular-value report for the discretized dbar0 on the extended cylinder
/// truncation with the -delta weight. Exactly dim near-zero values are
/// expected on the full space (the constants); the mean-zero restriction is
/// bounded below.
struct KernelReport {
  std::vector<double> singular_values;  ///< ascending, full space
  int near_zero = 0;                    ///< count below threshold * sigma_max
  double sigma_max = 0.0;
  double smallest_nonzero = 0.0;
  double sigma_min_meanzero = 0.0;      ///< restricted to [u]_a = 0
  double threshold = 1e-6;
};
KernelReport kernel_diagnostic(double R, const std::vector<double>& J0, double delta, int n_s,
                               int n_t, double s_margin, double threshold = 1e-6);

/// Fredholm index 2 c1 + (2n - 6)(1 - g) + 2 k, asserted against the
/// equivalent form 2n (1 - g) + 2 c1 + 6 g - 6 + 2 k.
long long fredholm_index(int two_n, long long genus, long long marked, long long c1);

/// Germ-normal-form contraction diagnostic: splits the discretized
/// linearization of the filled section at (a=0, eta=0) by SVD, freezes the
/// invertible block at each parameter, and samples the Lipschitz ratio of
/// B(a,w) = w - L(a)^{-1} P (f_a(w) - f_0(0)) over pairs with E_0-norms at
/// most rho.
struct ContractionReport {
  double modulus = 0.0;
  int kernel_dim = 0;
  int pairs_used = 0;
};
ContractionReport contraction_modulus(const SpliceContext& ctx, const MapPair& base,
                                      const ComplexStructureField& J, double rho, int n_pairs,
                                      unsigned seed);

/// C^1 map of the closed square [-1,1]^2 (covering the unit disk) into
/// R^{2n}, sampled on a tensor grid with Catmull-Rom interpolation.
class DiskMap {
public:
  DiskMap(int n, int dim);
  int n() const { return n_; }
  int dim() const { return dim_; }
  double& at(int i, int j, int k);
  double at(int i, int j, int k) const;
  double x(int i) const { return -1.0 + 2.0 * i / (n_ - 1); }
  std::vector<double> evaluate(double x, double y) const;

  /// Samples a callable f(x, y) -> R^dim on the grid.
  static DiskMap sample(int n, int dim, const std::function<std::vector<double>(double, double)>& f);

private:
  int n_, dim_;
  std::vector<double> values_;
};

/// Newton solve for the unique point z_v in the open half-disk with
/// v(z_v) in H; H is spanned by the given (column) basis vectors.
/// Throws "transversality lost" when Newton fails in 50 iterations or exits
/// the half-disk.
std::array<double, 2> transversal_constraint(const DiskMap& v,
                                             const std::vector<std::vector<double>>& H_basis,
                                             double tol = 1e-10);

}  // namespace polyglue
