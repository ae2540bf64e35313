#include "polyglue/cauchy_riemann.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <random>
#include <stdexcept>

#include "polyglue/norms.hpp"

namespace polyglue {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

std::size_t idx(const Grid& g, int dim, int i, int j, int k) {
  return (static_cast<std::size_t>(i) * g.n_t + j) * dim + k;
}

}  // namespace

ComplexStructureField::ComplexStructureField(Evaluator eval, int dim, bool is_constant)
    : eval_(std::move(eval)), dim_(dim), constant_(is_constant) {
  if (dim_ < 2 || dim_ % 2 != 0)
    throw std::invalid_argument("ComplexStructureField: dimension must be even and >= 2");
}

ComplexStructureField ComplexStructureField::constant(std::vector<double> J0, int dim) {
  if (static_cast<int>(J0.size()) != dim * dim)
    throw std::invalid_argument("ComplexStructureField: matrix size mismatch");
  return ComplexStructureField([J0](const std::vector<double>&) { return J0; }, dim, true);
}

std::vector<double> ComplexStructureField::standard_matrix(int dim) {
  std::vector<double> J(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int b = 0; b < dim / 2; ++b) {
    J[(2 * b) * dim + (2 * b + 1)] = -1.0;
    J[(2 * b + 1) * dim + (2 * b)] = 1.0;
  }
  return J;
}

ComplexStructureField ComplexStructureField::bump_conjugated(int dim, double eps,
                                                             std::vector<double> center) {
  auto J0 = standard_matrix(dim);
  auto eval = [dim, eps, J0, center](const std::vector<double>& p) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = p[k] - center[k];
      r2 += d * d;
    }
    const double rho = std::exp(-r2);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) A(k, k + 1) += eps * rho * (k % 2 ? -0.5 : 1.0);
    Eigen::MatrixXd Jm(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) Jm(r, c) = J0[r * dim + c];
    const Eigen::MatrixXd out = A * Jm * A.inverse();
    std::vector<double> res(static_cast<std::size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) res[r * dim + c] = out(r, c);
    return res;
  };
  return ComplexStructureField(eval, dim, false);
}

double ComplexStructureField::square_defect(const std::vector<std::vector<double>>& samples) const {
  double worst = 0.0;
  for (const auto& p : samples) {
    const auto J = eval_(p);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) {
        double acc = 0.0;
        for (int m = 0; m < dim_; ++m) acc += J[r * dim_ + m] * J[m * dim_ + c];
        if (r == c) acc += 1.0;
        worst = std::max(worst, std::abs(acc));
      }
  }
  return worst;
}

namespace {

// d_s u + M(u or J0) d_t u with optional 1/2 factor; t-derivatives spectral.
CylinderMap first_order_apply(const CylinderMap& u, const ComplexStructureField* J,
                              const std::vector<double>* J0, double factor) {
  const int d = u.dim();
  const auto us = derivative_grid(u, 1, 0, DerivScheme::fd2);
  const auto ut = derivative_grid(u, 0, 1, DerivScheme::spectral);
  CylinderMap out(u.grid(), d);
  const Grid& g = u.grid();
  std::vector<double> p(d);
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_t; ++j) {
      const std::vector<double>* M = J0;
      std::vector<double> Mbuf;
      if (J) {
        for (int k = 0; k < d; ++k) p[k] = u.at(i, j, k);
        Mbuf = (*J)(p);
        M = &Mbuf;
      }
      for (int k = 0; k < d; ++k) {
        double acc = us[idx(g, d, i, j, k)];
        for (int m = 0; m < d; ++m) acc += (*M)[k * d + m] * ut[idx(g, d, i, j, m)];
        out.at(i, j, k) = factor * acc;
      }
    }
  return out;
}

}  // namespace

CylinderMap dbar0(const CylinderMap& u, const std::vector<double>& J0) {
  if (static_cast<int>(J0.size()) != u.dim() * u.dim())
    throw std::invalid_argument("dbar0: J0 size mismatch");
  return first_order_apply(u, nullptr, &J0, 1.0);
}

CylinderMap cr_apply(const CylinderMap& u, const ComplexStructureField& J) {
  if (J.dim() != u.dim()) throw std::invalid_argument("cr_apply: dimension mismatch");
  return first_order_apply(u, &J, nullptr, 0.5);
}

FilledResult filled_section(const SpliceContext& ctx, const MapPair& u, const MapPair& h,
                            const ComplexStructureField& J) {
  if (u.dim() != h.dim() || J.dim() != u.dim())
    throw std::invalid_argument("filled_section: dimension mismatch");
  if (u.space != PairSpace::E || h.space != PairSpace::E)
    throw std::invalid_argument("filled_section: base and field must be E-pairs");

  const int d = u.dim();
  auto sum_pair = [&](const MapPair& a, const MapPair& b) {
    CylinderMap p = a.plus;
    CylinderMap m = a.minus;
    for (std::size_t n = 0; n < p.raw().size(); ++n) p.raw()[n] += b.plus.raw()[n];
    for (std::size_t n = 0; n < m.raw().size(); ++n) m.raw()[n] += b.minus.raw()[n];
    std::vector<double> c(d);
    for (int k = 0; k < d; ++k) c[k] = a.constant()[k] + b.constant()[k];
    p.set_constant(Asympt::constant, c);
    m.set_constant(Asympt::constant, c);
    return MapPair(std::move(p), std::move(m), PairSpace::E);
  };

  FilledResult res;
  if (ctx.is_zero()) {
    const MapPair g = sum_pair(u, h);
    CylinderMap xp = cr_apply(g.plus, J);
    CylinderMap xm = cr_apply(g.minus, J);
    res.xi = MapPair(std::move(xp), std::move(xm), PairSpace::F);
    return res;
  }

  // First equation on Z_a: (1/2)[ d_s g + J(g) d_t g ] for g = glue(u + h).
  const MapPair total = sum_pair(u, h);
  NeckMap glued = plus_glue(ctx, total);
  CylinderMap rhs1 = cr_apply(glued.map(), J);
  res.rhs_neck.a = ctx.parameter();
  res.rhs_neck.R = ctx.R();
  res.rhs_neck.values = std::move(rhs1);

  // Second equation on C_a: dbar0 of the anti-glued field, with the constant
  // structure frozen at the nodal image of the base map.
  const auto J_node = J(u.constant());
  NeckMap anti = minus_glue(ctx, h);
  CylinderMap rhs2 = dbar0(anti.map(), J_node);
  res.rhs_cyl.a = ctx.parameter();
  res.rhs_cyl.R = ctx.R();
  res.rhs_cyl.values = std::move(rhs2);

  res.xi = hat_total_unglue(ctx, res.rhs_neck, res.rhs_cyl);
  return res;
}

long long fredholm_index(int two_n, long long genus, long long marked, long long c1) {
  if (two_n < 2 || two_n % 2 != 0)
    throw std::invalid_argument("fredholm_index: dim Q must be even and >= 2");
  if (genus < 0 || marked < 0) throw std::invalid_argument("fredholm_index: g, k must be >= 0");
  const long long n2 = two_n;
  const long long form_a = 2 * c1 + (n2 - 6) * (1 - genus) + 2 * marked;
  const long long form_b = n2 * (1 - genus) + 2 * c1 + 6 * genus - 6 + 2 * marked;
  if (form_a != form_b) throw std::logic_error("fredholm_index: the two closed forms disagree");
  return form_a;
}

// ---------------------------------------------------------------------------
// Weighted least-squares solve of dbar0 u = rhs with the antipodal ansatz.
// ---------------------------------------------------------------------------

namespace {

struct StencilRow {
  std::vector<int> offsets;    // node index references (may be ghost)
  std::vector<double> weights;
};

// First-derivative s-stencil for a (possibly ghost) row index on n_s nodes:
// centered in the interior and at ghost rows, one-sided at the edge nodes
// (exactly the dbar0 convention).
StencilRow s_stencil(int i, int n_s, double ds) {
  auto mk = [&](std::vector<int> off) {
    std::vector<double> pos(off.size());
    for (std::size_t q = 0; q < off.size(); ++q) pos[q] = off[q] - i;
    return StencilRow{off, fd_weights(1, pos, ds)};
  };
  if (i == 0) return mk({0, 1, 2});
  if (i == n_s - 1) return mk({n_s - 3, n_s - 2, n_s - 1});
  return mk({i - 1, i + 1});
}

}  // namespace

NeckMap apply_solver_operator(const SpliceContext& ctx, const std::vector<double>& J0,
                              const NeckMap& u) {
  (void)ctx;
  NeckMap out = u;
  out.values = dbar0(u.map(), J0);
  out.values->set_constant(Asympt::none, {});
  return out;
}

CRSolveResult linear_cr_solve(const SpliceContext& ctx, const std::vector<double>& J0,
                              const NeckMap& rhs, double delta, bool condition_probe) {
  if (ctx.is_zero()) throw std::invalid_argument("linear_cr_solve: needs a != 0");
  if (!(delta > 0.0)) throw std::invalid_argument("linear_cr_solve: delta must be positive");
  const CylinderMap& b_map = rhs.map();
  const Grid g = b_map.grid();
  const int d = b_map.dim();
  if (static_cast<int>(J0.size()) != d * d) throw std::invalid_argument("linear_cr_solve: J0 size");

  const double R = ctx.R();
  const double ds = g.ds(), dt = g.dt();
  const double mu = std::sqrt(ds * dt);
  const int N = g.n_s * g.n_t * d;
  const int NC = d + N;
  const int NR = (g.n_s + 2) * g.n_t * d;

  auto phi = [&](double s) { return std::abs(s - 0.5 * R); };
  auto s_of = [&](int i) { return g.s_min + i * ds; };  // valid for ghost i too
  auto profile = [&](double s) { return 1.0 - 2.0 * ctx.beta(s); };

  const auto Dt = spectral_diff_matrix(g.n_t);

  std::vector<Trip> trips;
  trips.reserve(static_cast<std::size_t>(NR) * (6 + g.n_t));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(NR);

  int row = 0;
  for (int i = -1; i <= g.n_s; ++i) {
    const bool ghost = (i < 0 || i >= g.n_s);
    const double s_row = s_of(i);
    const double w_row = std::exp(delta * phi(s_row)) * mu;
    const auto st = ghost ? StencilRow{{i - 1, i, i + 1}, fd_weights(1, {-1.0, 0.0, 1.0}, ds)}
                          : s_stencil(i, g.n_s, ds);
    // discrete derivative of the antipodal profile along this row's stencil
    double dp = 0.0;
    for (std::size_t q = 0; q < st.offsets.size(); ++q) dp += st.weights[q] * profile(s_of(st.offsets[q]));

    for (int j = 0; j < g.n_t; ++j) {
      for (int k = 0; k < d; ++k, ++row) {
        if (dp != 0.0) trips.emplace_back(row, k, w_row * dp);
        for (std::size_t q = 0; q < st.offsets.size(); ++q) {
          const int ir = st.offsets[q];
          if (ir < 0 || ir >= g.n_s) continue;  // remainder vanishes beyond the grid
          const double coeff = w_row * st.weights[q] * std::exp(-delta * phi(s_of(ir)));
          trips.emplace_back(row, d + static_cast<int>(idx(g, d, ir, j, k)), coeff);
        }
        if (!ghost) {
          const double damp = w_row * std::exp(-delta * phi(s_row));
          for (int l = 0; l < g.n_t; ++l) {
            const double Djl = Dt[static_cast<std::size_t>(j) * g.n_t + l];
            if (Djl == 0.0) continue;
            for (int m = 0; m < d; ++m) {
              const double Jkm = J0[k * d + m];
              if (Jkm == 0.0) continue;
              trips.emplace_back(row, d + static_cast<int>(idx(g, d, i, l, m)), damp * Jkm * Djl);
            }
          }
          b(row) = w_row * b_map.at(i, j, k);
        }
      }
    }
  }

  SpMat A(NR, NC);
  A.setFromTriplets(trips.begin(), trips.end());
  SpMat At = A.transpose();
  SpMat normal = At * A;
  Eigen::SimplicialLDLT<SpMat> ldlt(normal);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("linear_cr_solve: singular system");
  Eigen::VectorXd x = ldlt.solve(At * b);

  CRSolveResult res;
  res.residual = (A * x - b).norm() / std::max(1.0, b.norm());

  CylinderMap sol(g, d);
  std::vector<double> c(d);
  for (int k = 0; k < d; ++k) c[k] = x(k);
  for (int i = 0; i < g.n_s; ++i) {
    const double pr = profile(g.s(i));
    const double damp = std::exp(-delta * phi(g.s(i)));
    for (int j = 0; j < g.n_t; ++j)
      for (int k = 0; k < d; ++k)
        sol.at(i, j, k) = pr * c[k] + damp * x(d + static_cast<int>(idx(g, d, i, j, k)));
  }
  sol.set_constant(Asympt::antipodal, c);
  res.solution.a = ctx.parameter();
  res.solution.R = R;
  res.solution.values = std::move(sol);

  if (condition_probe) {
    Eigen::VectorXd v = Eigen::VectorXd::Random(NC).normalized();
    for (int it = 0; it < 30; ++it) v = (At * (A * v)).normalized();
    res.sigma_max = std::sqrt(v.dot(At * (A * v)));
    Eigen::VectorXd w = Eigen::VectorXd::Random(NC).normalized();
    for (int it = 0; it < 30; ++it) w = ldlt.solve(w).normalized();
    const double lam = w.dot(At * (A * w));
    res.sigma_min = std::sqrt(std::max(lam, 0.0));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Kernel diagnostic on the extended-cylinder truncation.
// ---------------------------------------------------------------------------

// Discrete realization of the extended-cylinder domain: u = c + r with the
// remainder r treated as zero beyond the truncation (the same far-field
// semantics as every other map in the artifact, and the way the extended
// cylinder is populated by zero-extended neck data). Constants are an exact
// d-dimensional kernel by construction; the local CR solutions of
// super-delta growth, which the infinite cylinder rejects through norm
// divergence, violate the zero-extension rows at order one and cannot hide.
KernelReport kernel_diagnostic(double R, const std::vector<double>& J0, double delta, int n_s,
                               int n_t, double s_margin, double threshold) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(J0.size()))));
  if (d * d != static_cast<int>(J0.size()))
    throw std::invalid_argument("kernel_diagnostic: J0 must be square");
  if (!(delta > 0.0)) throw std::invalid_argument("kernel_diagnostic: delta must be positive");
  const Grid g(-s_margin, R + s_margin, n_s, n_t);
  const int N = n_s * n_t * d;
  if (N > 6000) throw std::invalid_argument("kernel_diagnostic: grid too large for dense SVD budget");

  const double ds = g.ds(), dt = g.dt();
  const auto Dt = spectral_diff_matrix(n_t);

  // Analytic conjugation by e^{delta |s - R/2|}: the remainder block becomes
  //   T = d_s + delta sgn(s - R/2) + J0 d_t   on plain L^2,
  // with zero extension beyond the cut (exactly the sub-e^{delta phi} growth
  // admitted by the -delta space). In plain L^2 nothing hides under the
  // weight: lattice parasites are caught by the zeroth-order term and the
  // super-delta-growth CR solutions by the ghost rows. The constants form
  // the separate c-summand of the domain and are the exact kernel.
  const int NR = (n_s + 2) * n_t * d;
  const double mu = std::sqrt(ds * dt);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(NR, N);
  int row = 0;
  for (int i = -1; i <= n_s; ++i) {
    const bool ghost = (i < 0 || i >= n_s);
    const double s_row = g.s_min + i * ds;
    const auto st = ghost ? StencilRow{{i - 1, i, i + 1}, fd_weights(1, {-1.0, 0.0, 1.0}, ds)}
                          : s_stencil(i, n_s, ds);
    const double sgn = (s_row > 0.5 * R) ? 1.0 : (s_row < 0.5 * R ? -1.0 : 0.0);
    for (int j = 0; j < n_t; ++j)
      for (int k = 0; k < d; ++k, ++row) {
        for (std::size_t q = 0; q < st.offsets.size(); ++q) {
          const int ir = st.offsets[q];
          if (ir < 0 || ir >= n_s) continue;  // zero extension beyond the cut
          A(row, idx(g, d, ir, j, k)) += mu * st.weights[q];
        }
        if (ghost) continue;
        A(row, idx(g, d, i, j, k)) += mu * delta * sgn;
        for (int l = 0; l < n_t; ++l) {
          const double Djl = Dt[static_cast<std::size_t>(j) * n_t + l];
          if (Djl == 0.0) continue;
          for (int m = 0; m < d; ++m) {
            const double Jkm = J0[k * d + m];
            if (Jkm == 0.0) continue;
            A(row, idx(g, d, i, l, m)) += mu * Jkm * Djl;
          }
        }
      }
  }

  const Eigen::MatrixXd M = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);

  KernelReport rep;
  rep.threshold = threshold;
  // full-space spectrum: d exact zeros (the constant directions of the
  // c-summand) followed by the remainder-block spectrum
  rep.singular_values.assign(d, 0.0);
  for (int i = 0; i < N; ++i)
    rep.singular_values.push_back(std::sqrt(std::max(eig.eigenvalues()(i), 0.0)));
  rep.sigma_max = rep.singular_values.back();
  for (double s : rep.singular_values) {
    if (s < threshold * rep.sigma_max) {
      ++rep.near_zero;
    } else {
      rep.smallest_nonzero = s;
      break;
    }
  }

  // poltereq1 concerns u - [u]_a: remainder data with the middle-circle mean
  // removed. Project out the d mean functionals and read past them.
  int i_mid = static_cast<int>(std::lround((0.5 * R - g.s_min) / ds));
  i_mid = std::clamp(i_mid, 0, n_s - 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, N);
  for (int j = 0; j < n_t; ++j)
    for (int k = 0; k < d; ++k) C(k, idx(g, d, i_mid, j, k)) = dt;
  const Eigen::MatrixXd CCt = C * C.transpose();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(N, N) - C.transpose() * CCt.ldlt().solve(C);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(P * M * P);
  rep.sigma_min_meanzero = std::sqrt(std::max(eig2.eigenvalues()(d), 0.0));
  return rep;
}

// ---------------------------------------------------------------------------
// Contraction-germ modulus estimation.
// ---------------------------------------------------------------------------

namespace {

struct PairCodec {
  Grid gp, gm;
  int d;
  std::size_t np, nm;

  explicit PairCodec(const MapPair& model)
      : gp(model.plus.grid()), gm(model.minus.grid()), d(model.dim()),
        np(gp.nodes()), nm(gm.nodes()) {}

  int dom_size() const { return static_cast<int>(d + (np + nm) * d); }
  int ran_size() const { return static_cast<int>((np + nm) * d); }

  MapPair decode_E(const Eigen::VectorXd& x) const {
    std::vector<double> c(d);
    for (int k = 0; k < d; ++k) c[k] = x(k);
    CylinderMap p(gp, d, Asympt::constant, c);
    CylinderMap m(gm, d, Asympt::constant, c);
    for (std::size_t n = 0; n < np * d; ++n) p.raw()[n] = c[n % d] + x(d + static_cast<int>(n));
    for (std::size_t n = 0; n < nm * d; ++n)
      m.raw()[n] = c[n % d] + x(d + static_cast<int>(np * d + n));
    return MapPair(std::move(p), std::move(m), PairSpace::E);
  }

  Eigen::VectorXd encode_F(const MapPair& xi) const {
    if (xi.plus.grid().nodes() != np || xi.minus.grid().nodes() != nm)
      throw std::runtime_error("contraction: output grids must match the base grids");
    Eigen::VectorXd y(ran_size());
    for (std::size_t n = 0; n < np * d; ++n) y(static_cast<int>(n)) = xi.plus.raw()[n];
    for (std::size_t n = 0; n < nm * d; ++n)
      y(static_cast<int>(np * d + n)) = xi.minus.raw()[n];
    return y;
  }
};

}  // namespace

ContractionReport contraction_modulus(const SpliceContext& ctx, const MapPair& base,
                                      const ComplexStructureField& J, double rho, int n_pairs,
                                      unsigned seed) {
  if (base.space != PairSpace::E) throw std::invalid_argument("contraction_modulus: E-pair base");
  const PairCodec codec(base);
  const int ND = codec.dom_size(), NRn = codec.ran_size();
  const ScScale scale;

  auto f_at = [&](const SpliceContext& c, const Eigen::VectorXd& x) {
    return codec.encode_F(filled_section(c, base, codec.decode_E(x), J).xi);
  };

  const SpliceContext ctx0;  // a = 0
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ND);
  const Eigen::VectorXd f0 = f_at(ctx0, zero);

  auto jacobian = [&](const SpliceContext& c) {
    Eigen::MatrixXd T(NRn, ND);
    const double hstep = 1e-5;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(ND);
    for (int col = 0; col < ND; ++col) {
      e(col) = hstep;
      const Eigen::VectorXd fp = f_at(c, e);
      e(col) = -hstep;
      const Eigen::VectorXd fm = f_at(c, e);
      e(col) = 0.0;
      T.col(col) = (fp - fm) / (2.0 * hstep);
    }
    return T;
  };

  const Eigen::MatrixXd T0 = jacobian(ctx0);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(T0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  int kdim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < 1e-8 * smax) ++kdim;
  const int nx = static_cast<int>(sv.size()) - kdim;
  // ordered descending: leading nx columns span X (complement of the kernel)
  const Eigen::MatrixXd Vx = svd.matrixV().leftCols(nx);
  const Eigen::MatrixXd Uy = svd.matrixU().leftCols(nx);

  const Eigen::MatrixXd Ta = ctx.is_zero() ? T0 : jacobian(ctx);
  const Eigen::MatrixXd L = Uy.transpose() * Ta * Vx;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  if (!lu.isInvertible()) throw std::runtime_error("contraction_modulus: linearization SVD failure");

  auto B = [&](const Eigen::VectorXd& xcoord) -> Eigen::VectorXd {
    const Eigen::VectorXd fv = f_at(ctx, Vx * xcoord);
    return xcoord - lu.solve(Uy.transpose() * (fv - f0));
  };
  auto e0_norm = [&](const Eigen::VectorXd& xcoord) {
    return pair_norm_E(codec.decode_E(Vx * xcoord), 0, scale);
  };

  // Smooth random directions, projected to X and normalized to E_0-size rho.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto smooth_sample = [&]() {
    CylinderMap p(codec.gp, codec.d, Asympt::constant, std::vector<double>(codec.d, 0.0));
    CylinderMap m(codec.gm, codec.d, Asympt::constant, std::vector<double>(codec.d, 0.0));
    const double a1 = unif(rng), b1 = unif(rng), a2 = unif(rng), b2 = unif(rng);
    const double kappa = 1.0 + 0.5 * (unif(rng) + 1.0);
    for (auto* cm : {&p, &m}) {
      const Grid& g = cm->grid();
      for (int i = 0; i < g.n_s; ++i)
        for (int j = 0; j < g.n_t; ++j) {
          const double s = g.s(i), t = g.t(j);
          const double env = std::exp(-kappa * std::abs(s));
          for (int k = 0; k < codec.d; ++k) {
            const double ph = 0.4 * k;
            cm->at(i, j, k) = env * (a1 * std::cos(2 * std::numbers::pi * t + ph) +
                                     b1 * std::sin(2 * std::numbers::pi * t) +
                                     a2 * std::cos(4 * std::numbers::pi * t - ph) + b2 * 0.5);
          }
        }
    }
    MapPair pair(std::move(p), std::move(m), PairSpace::E);
    Eigen::VectorXd gvec = Eigen::VectorXd::Zero(ND);
    for (std::size_t n = 0; n < codec.np * codec.d; ++n)
      gvec(codec.d + static_cast<int>(n)) = pair.plus.raw()[n];
    for (std::size_t n = 0; n < codec.nm * codec.d; ++n)
      gvec(codec.d + static_cast<int>(codec.np * codec.d + n)) = pair.minus.raw()[n];
    Eigen::VectorXd x = Vx.transpose() * gvec;
    const double nrm = e0_norm(x);
    if (nrm < 1e-12) return Eigen::VectorXd(Eigen::VectorXd::Zero(nx));
    return Eigen::VectorXd((rho / nrm) * x);
  };

  ContractionReport rep;
  rep.kernel_dim = kdim;
  double worst = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    const Eigen::VectorXd w1 = smooth_sample() * (0.3 + 0.7 * 0.5 * (unif(rng) + 1.0));
    const Eigen::VectorXd w2 = smooth_sample() * (0.3 + 0.7 * 0.5 * (unif(rng) + 1.0));
    const double denom = e0_norm(w1 - w2);
    if (denom < 1e-12) continue;  // w = w', ratio undefined
    const Eigen::VectorXd d1 = B(w1) - B(w2);
    worst = std::max(worst, e0_norm(d1) / denom);
    ++rep.pairs_used;
  }
  rep.modulus = worst;
  return rep;
}

// ---------------------------------------------------------------------------
// Transversal constraint.
// ---------------------------------------------------------------------------

DiskMap::DiskMap(int n, int dim) : n_(n), dim_(dim) {
  if (n < 4) throw std::invalid_argument("DiskMap: need n >= 4");
  values_.assign(static_cast<std::size_t>(n) * n * dim, 0.0);
}

double& DiskMap::at(int i, int j, int k) {
  return values_[(static_cast<std::size_t>(i) * n_ + j) * dim_ + k];
}

double DiskMap::at(int i, int j, int k) const {
  return values_[(static_cast<std::size_t>(i) * n_ + j) * dim_ + k];
}

DiskMap DiskMap::sample(int n, int dim, const std::function<std::vector<double>(double, double)>& f) {
  DiskMap m(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto v = f(m.x(i), m.x(j));
      for (int k = 0; k < dim; ++k) m.at(i, j, k) = v[k];
    }
  return m;
}

namespace {

// Catmull-Rom kernel weights for the 4 nodes around local coordinate u in [0,1].
std::array<double, 4> catmull_rom(double u) {
  const double u2 = u * u, u3 = u2 * u;
  return {-0.5 * u3 + u2 - 0.5 * u, 1.5 * u3 - 2.5 * u2 + 1.0, -1.5 * u3 + 2.0 * u2 + 0.5 * u,
          0.5 * u3 - 0.5 * u2};
}

}  // namespace

std::vector<double> DiskMap::evaluate(double x, double y) const {
  const double h = 2.0 / (n_ - 1);
  auto locate = [&](double v) {
    double u = (v + 1.0) / h;
    int cell = static_cast<int>(std::floor(u));
    cell = std::clamp(cell, 0, n_ - 2);
    return std::pair<int, double>(cell, u - cell);
  };
  const auto [ci, ux] = locate(x);
  const auto [cj, uy] = locate(y);
  const auto wx = catmull_rom(ux);
  const auto wy = catmull_rom(uy);
  std::vector<double> out(dim_, 0.0);
  for (int a = -1; a <= 2; ++a) {
    const int i = std::clamp(ci + a, 0, n_ - 1);
    for (int b = -1; b <= 2; ++b) {
      const int j = std::clamp(cj + b, 0, n_ - 1);
      const double w = wx[a + 1] * wy[b + 1];
      for (int k = 0; k < dim_; ++k) out[k] += w * at(i, j, k);
    }
  }
  return out;
}

std::array<double, 2> transversal_constraint(const DiskMap& v,
                                             const std::vector<std::vector<double>>& H_basis,
                                             double tol) {
  const int d = v.dim();
  if (H_basis.empty()) throw std::invalid_argument("transversal_constraint: empty H basis");
  Eigen::MatrixXd H(d, static_cast<int>(H_basis.size()));
  for (std::size_t c = 0; c < H_basis.size(); ++c) {
    if (static_cast<int>(H_basis[c].size()) != d)
      throw std::invalid_argument("transversal_constraint: basis dimension mismatch");
    for (int r = 0; r < d; ++r) H(r, static_cast<int>(c)) = H_basis[c][r];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU);
  const int rank = static_cast<int>(svd.rank());
  if (d - rank != 2)
    throw std::invalid_argument("transversal_constraint: H must have codimension 2");
  const Eigen::MatrixXd B = svd.matrixU().rightCols(2);  // orthonormal basis of H-perp

  auto G = [&](double x, double y) {
    const auto val = v.evaluate(x, y);
    Eigen::Vector2d g;
    for (int c = 0; c < 2; ++c) {
      double acc = 0.0;
      for (int r = 0; r < d; ++r) acc += B(r, c) * val[r];
      g(c) = acc;
    }
    return g;
  };

  Eigen::Vector2d z(0.0, 0.0);
  const double fd = 1e-6;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d g = G(z(0), z(1));
    if (g.norm() <= tol) {
      if (z.norm() >= 0.5) throw std::runtime_error("transversality lost");
      return {z(0), z(1)};
    }
    Eigen::Matrix2d Jm;
    Jm.col(0) = (G(z(0) + fd, z(1)) - G(z(0) - fd, z(1))) / (2 * fd);
    Jm.col(1) = (G(z(0), z(1) + fd) - G(z(0), z(1) - fd)) / (2 * fd);
    const Eigen::Vector2d step = Jm.fullPivLu().solve(g);
    if (!step.allFinite()) throw std::runtime_error("transversality lost");
    z -= step;
    if (z.norm() > 1.0) throw std::runtime_error("transversality lost");
  }
  throw std::runtime_error("transversality lost");
}

}  // namespace polyglue
