#pragma once

// Index-with-constraint decision procedures: the inhomogeneous Robin solves,
// Fredholm-obstruction detection, the sign condition on the solution's mean,
// and the resulting {0, -1} criticality offsets per constraint type.
//
// The right-hand sides of the offset problems (interior -1, boundary 1) are
// invariant under the symmetry group of each model surface, so the solves are
// performed on the lowest (rotation-invariant) mode.  A symmetric right-hand
// side has zero projection on every non-symmetric mode, so symmetric
// obstruction is obstruction on the whole surface.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "capindex/errors.hpp"
#include "capindex/spectral.hpp"
#include "capindex/surface.hpp"

namespace capindex {

enum class ConstraintType { TypeI, TypeII, ClosedWeak, FixedBoundary };

inline std::string to_string(ConstraintType c) {
  switch (c) {
    case ConstraintType::TypeI: return "typeI";
    case ConstraintType::TypeII: return "typeII";
    case ConstraintType::ClosedWeak: return "closedWeak";
    case ConstraintType::FixedBoundary: return "fixedBoundary";
  }
  return "?";
}

/// The rotation-invariant mode of a boundary surface together with the
/// geometric densities needed by inhomogeneous solves and mean integrals.
struct RadialProblem {
  ModeProblem mode;
  std::function<double(double)> conformal;     // omega(t): J = (1/omega)(d_t^2 + ...)
  std::function<double(double)> area_density;  // dmu/dt of the symmetric slice
  double boundary_density = 0.0;               // measure of one boundary circle/sphere
  double eta_scale = 1.0;                      // nabla_eta = eta_scale * d/dt
};

inline RadialProblem radial_problem(const SurfaceModel& surface) {
  RadialProblem rp;
  rp.mode = reduce_to_modes(surface, 0).front();
  rp.conformal = conformal_factor(surface);
  rp.area_density = radial_area_density(surface);
  rp.boundary_density = boundary_component_measure(surface);
  rp.eta_scale = eta_scale(surface);
  return rp;
}

struct SolveOptions {
  double eps_sing = 1e-8;     // singularity threshold (relative, h^2-aware)
  double compat_tol = 1e-6;   // |compatibility| above this is an obstruction
  double residual_tol = 1e-10;
};

/// Discrete solution of Ju = f, nabla_eta u - qu = g on the radial mode.
struct RobinSolution {
  std::vector<double> t;       // fine-grid nodes
  std::vector<double> u;       // fine-grid values
  std::vector<double> u_extrap;  // Richardson values on the coarse nodes
  std::vector<double> t_coarse;
  double value_minus = 0.0;    // extrapolated u(-T)
  double value_plus = 0.0;     // extrapolated u(+T)
  double integral = 0.0;       // extrapolated  int u dmu
  double boundary_integral = 0.0;  // int_{boundary} u ds
  double residual = 0.0;       // ||Au - b|| / (1 + ||b||) on the fine grid
  double sigma_min = 0.0;      // smallest |pencil eigenvalue|
  bool used_min_norm = false;
  bool kernel_has_mean = false;  // a kernel vector carries nonzero mean
  std::array<int, 2> grid_sizes{0, 0};
};

struct FredholmObstruction {
  std::vector<std::vector<double>> null_basis;  // max-normalized kernel functions
  std::vector<double> compatibility;            // (f,v) - (g,v)_boundary per vector
  double sigma_min = 0.0;
};

using SolveOutcome = std::variant<RobinSolution, FredholmObstruction>;

namespace detail {

struct GridSolve {
  std::vector<double> t;
  std::vector<double> u;
  double integral = 0.0;
  double residual = 0.0;
  double sigma_min = 0.0;
  bool singular = false;
  bool min_norm = false;
  bool kernel_has_mean = false;
  std::vector<std::vector<double>> kernel;
  std::vector<double> compat;
};

inline GridSolve solve_robin_grid(const RadialProblem& rp, const std::function<double(double)>& f,
                                  double g, int N, const SolveOptions& opt, bool dirichlet_rows) {
  const ModeProblem& m = rp.mode;
  const auto tfull = mode_grid(m, N);
  const auto wfull = trapezoid_weights(m.half_length, N);
  const Tridiagonal A = dirichlet_rows ? dirichlet_form(m, N) : robin_form(m, N);
  const auto B = mass_diag(m, N, nullptr, dirichlet_rows);
  const int dim = static_cast<int>(A.diag.size());
  const int off0 = dirichlet_rows ? 1 : 0;

  // weak right-hand side: -(f, v) interior plus boundary data at the ends
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    const double ti = tfull[i + off0];
    b(i) = -wfull[i + off0] * rp.conformal(ti) * f(ti);
  }
  if (!dirichlet_rows) {
    const double ghat = g / rp.eta_scale;
    b(0) += ghat;
    b(dim - 1) += ghat;
  }

  Eigen::VectorXd dh(dim);
  for (int i = 0; i < dim; ++i) dh(i) = 1.0 / std::sqrt(B[i]);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) M(i, i) = A.diag[i] * dh(i) * dh(i);
  for (int i = 0; i + 1 < dim; ++i) {
    const double v = A.off[i] * dh(i) * dh(i + 1);
    M(i, i + 1) = v;
    M(i + 1, i) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd& lam = es.eigenvalues();

  CountOptions copt;
  copt.eps_sing = opt.eps_sing;
  const double band = singular_band(m, N, copt);

  GridSolve out;
  out.t.assign(tfull.begin() + off0, tfull.end() - off0);
  out.sigma_min = lam.cwiseAbs().minCoeff();
  out.singular = out.sigma_min <= band;

  const Eigen::VectorXd bt = dh.asDiagonal() * b;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    if (std::abs(lam(j)) <= band) continue;
    y += (es.eigenvectors().col(j).dot(bt) / lam(j)) * es.eigenvectors().col(j);
  }
  Eigen::VectorXd u = dh.asDiagonal() * y;

  if (out.singular) {
    for (int j = 0; j < dim; ++j) {
      if (std::abs(lam(j)) > band) continue;
      Eigen::VectorXd v = dh.asDiagonal() * es.eigenvectors().col(j);
      int imax = 0;
      for (int i = 1; i < dim; ++i)
        if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
      v /= v(imax);  // max-normalized, deterministic sign
      // the reduced kernel vector is the kernel function itself, so the
      // compatibility pairing is taken in the true L2(dmu) products
      double compat = 0.0, mean = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double ti = tfull[i + off0];
        compat += wfull[i + off0] * rp.area_density(ti) * f(ti) * v(i);
        mean += wfull[i + off0] * rp.area_density(ti) * v(i);
      }
      if (!dirichlet_rows) compat -= g * rp.boundary_density * (v(0) + v(dim - 1));
      out.kernel.push_back(std::vector<double>(v.data(), v.data() + dim));
      out.compat.push_back(compat);
      out.kernel_has_mean = out.kernel_has_mean || std::abs(mean) > 1e-8 * (1.0 + std::abs(mean));
      out.min_norm = true;
    }
  }

  // assess and polish the algebraic residual on the tridiagonal system
  auto apply_A = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(dim);
    for (int i = 0; i < dim; ++i) {
      double s = A.diag[i] * x(i);
      if (i > 0) s += A.off[i - 1] * x(i - 1);
      if (i + 1 < dim) s += A.off[i] * x(i + 1);
      r(i) = s;
    }
    return r;
  };
  for (int pass = 0; pass < 3 && !out.singular; ++pass) {
    Eigen::VectorXd r = b - apply_A(u);
    out.residual = r.norm() / (1.0 + b.norm());
    if (out.residual <= opt.residual_tol) break;
    Eigen::VectorXd rt = dh.asDiagonal() * r;
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < dim; ++j) {
      if (std::abs(lam(j)) <= band) continue;
      dy += (es.eigenvectors().col(j).dot(rt) / lam(j)) * es.eigenvectors().col(j);
    }
    u += dh.asDiagonal() * dy;
  }
  if (out.singular) out.residual = (b - apply_A(u)).norm() / (1.0 + b.norm());

  out.u.assign(u.data(), u.data() + dim);
  double integral = 0.0;
  for (int i = 0; i < dim; ++i) integral += wfull[i + off0] * rp.area_density(tfull[i + off0]) * u(i);
  out.integral = integral;
  return out;
}

}  // namespace detail

/// Solve Ju = f on the surface, nabla_eta u - qu = g on the boundary, reduced
/// to the radial mode.  Returns the solution with Richardson-extrapolated
/// certificate values, or the obstruction with its compatibility pairings.
/// dirichlet_rows replaces the Robin rows by u = 0 (fixed-boundary problem).
inline SolveOutcome solve_inhomogeneous(const RadialProblem& rp,
                                        const std::function<double(double)>& f_interior,
                                        double g_boundary, int grid_n,
                                        const SolveOptions& opt = {},
                                        bool dirichlet_rows = false) {
  detail::require_grid(grid_n);
  auto run = [&](int N) {
    return detail::solve_robin_grid(rp, f_interior, g_boundary, N, opt, dirichlet_rows);
  };
  int n_fine = grid_n;
  detail::GridSolve fine = run(n_fine);
  detail::GridSolve coarse;
  int n_coarse = grid_n;
  const bool pair = grid_n >= 128;
  if (pair) {
    n_coarse = grid_n / 2;
    coarse = run(n_coarse);
    if (fine.singular != coarse.singular) {
      // the threshold was straddled between resolutions: refine once
      coarse = fine;
      n_coarse = n_fine;
      n_fine = 2 * grid_n;
      fine = run(n_fine);
      if (fine.singular != coarse.singular)
        throw IllConditioned("solve_inhomogeneous: singular values straddle the threshold");
    }
  }

  if (fine.singular) {
    double worst = 0.0;
    for (double c : fine.compat) worst = std::max(worst, std::abs(c));
    double fscale = 0.0;
    for (std::size_t i = 0; i < fine.t.size(); ++i)
      fscale += std::abs(f_interior(fine.t[i])) * rp.area_density(fine.t[i]);
    fscale = fscale * (2.0 * rp.mode.half_length / fine.t.size()) +
             std::abs(g_boundary) * rp.boundary_density * 2.0 + 1e-300;
    if (worst > opt.compat_tol * fscale) {
      FredholmObstruction ob;
      ob.null_basis = fine.kernel;
      ob.compatibility = fine.compat;
      ob.sigma_min = fine.sigma_min;
      return ob;
    }
  }

  RobinSolution sol;
  sol.t = fine.t;
  sol.u = fine.u;
  sol.residual = fine.residual;
  sol.sigma_min = fine.sigma_min;
  sol.used_min_norm = fine.min_norm;
  sol.kernel_has_mean = fine.kernel_has_mean;
  sol.grid_sizes = {n_coarse, n_fine};
  if (pair && !fine.singular) {
    // Richardson on the shared (coarse) nodes; valid since the nodal error of
    // the second-order scheme has a smooth h^2 expansion
    sol.t_coarse = coarse.t;
    sol.u_extrap.resize(coarse.u.size());
    for (std::size_t j = 0; j < coarse.u.size(); ++j) {
      const std::size_t jf = dirichlet_rows ? (2 * (j + 1) - 1) : 2 * j;
      sol.u_extrap[j] = (4.0 * fine.u[jf] - coarse.u[j]) / 3.0;
    }
    sol.value_minus = dirichlet_rows ? 0.0 : sol.u_extrap.front();
    sol.value_plus = dirichlet_rows ? 0.0 : sol.u_extrap.back();
    sol.integral = (4.0 * fine.integral - coarse.integral) / 3.0;
  } else {
    sol.t_coarse = fine.t;
    sol.u_extrap = fine.u;
    sol.value_minus = dirichlet_rows ? 0.0 : fine.u.front();
    sol.value_plus = dirichlet_rows ? 0.0 : fine.u.back();
    sol.integral = fine.integral;
  }
  sol.boundary_integral = dirichlet_rows ? 0.0 : rp.boundary_density * (sol.value_minus + sol.value_plus);
  return sol;
}

// ---------------------------------------------------------------------------
// criticality offsets

struct Certificate {
  double residual = 0.0;
  double value_minus = 0.0;
  double value_plus = 0.0;
  double integral = 0.0;
  double boundary_integral = 0.0;
  double sigma_min = 0.0;
  double max_abs_compatibility = 0.0;
  bool used_min_norm = false;
  bool integral_in_band = false;  // |int u| <= eps_int: "<= 0" taken non-strictly
  std::array<int, 2> grid_sizes{0, 0};
};

struct OffsetResult {
  int c = 0;  // 0 or -1
  bool fredholm_obstructed = false;
  Certificate certificate;
};

struct OffsetOptions {
  int grid_n = 256;
  double eps_int_rel = 1e-8;  // eps_int = eps_int_rel * Area
  SolveOptions solve;
};

/// The {0,-1} correction of the constrained index: c = -1 iff the
/// inhomogeneous problem is solvable and the solution mean is <= 0.
inline OffsetResult criticality_offset(const SurfaceModel& surface, ConstraintType constraint,
                                       const OffsetOptions& opt = {}) {
  OffsetResult res;
  const double area = surface_area(surface);
  const double eps_int = opt.eps_int_rel * area;

  if (constraint == ConstraintType::ClosedWeak) {
    if (surface.has_boundary)
      throw ParamOutOfRange("closedWeak: constraint applies to closed surfaces only");
    // constant p: u = -1/p solves (Delta+p)u = -1 and any kernel element is
    // L2-orthogonal to constants, so the mean -Area/p is unambiguous
    const double p = surface.p_const;
    if (!(p > 0.0)) throw ParamOutOfRange("closedWeak: requires p > 0");
    res.c = -1;
    res.certificate.integral = -area / p;
    res.certificate.value_minus = res.certificate.value_plus = -1.0 / p;
    res.certificate.integral_in_band = std::abs(res.certificate.integral) <= eps_int;
    return res;
  }

  if (!surface.has_boundary)
    throw ParamOutOfRange("criticality_offset: constraint requires a boundary surface");
  if (constraint == ConstraintType::TypeII && surface.mean_curvature != 0.0)
    throw ParamOutOfRange("typeII: stationary surfaces of type II are minimal (H = 0)");

  const RadialProblem rp = radial_problem(surface);
  const double f_val = (constraint == ConstraintType::TypeII) ? 0.0 : -1.0;
  const double g_val = (constraint == ConstraintType::TypeII) ? 1.0 : 0.0;
  const bool dirichlet = (constraint == ConstraintType::FixedBoundary);
  const auto outcome = solve_inhomogeneous(
      rp, [f_val](double) { return f_val; }, g_val, opt.grid_n, opt.solve, dirichlet);

  if (const auto* ob = std::get_if<FredholmObstruction>(&outcome)) {
    res.c = 0;
    res.fredholm_obstructed = true;
    res.certificate.sigma_min = ob->sigma_min;
    res.certificate.grid_sizes = {opt.grid_n, opt.grid_n};
    for (double c : ob->compatibility)
      res.certificate.max_abs_compatibility = std::max(res.certificate.max_abs_compatibility, std::abs(c));
    return res;
  }

  const auto& sol = std::get<RobinSolution>(outcome);
  res.certificate.residual = sol.residual;
  res.certificate.value_minus = sol.value_minus;
  res.certificate.value_plus = sol.value_plus;
  res.certificate.integral = sol.integral;
  res.certificate.boundary_integral = sol.boundary_integral;
  res.certificate.sigma_min = sol.sigma_min;
  res.certificate.used_min_norm = sol.used_min_norm;
  res.certificate.grid_sizes = sol.grid_sizes;
  res.certificate.integral_in_band = std::abs(sol.integral) <= eps_int;
  if (sol.used_min_norm && sol.kernel_has_mean) {
    // the kernel carries mean: the solution set reaches any mean value
    res.c = -1;
    return res;
  }
  res.c = (sol.integral <= eps_int) ? -1 : 0;
  return res;
}

// ---------------------------------------------------------------------------
// the cylinder's closed-form type-I trichotomy

enum class TypeIClass { Unchanged, Reduced };

inline std::string to_string(TypeIClass c) {
  return c == TypeIClass::Unchanged ? "unchanged" : "reduced";
}

struct TypeIClassification {
  TypeIClass cls = TypeIClass::Unchanged;
  bool fredholm = false;  // on the singular set cos x + x sin x = 0
  double x = 0.0;
};

inline TypeIClassification cylinder_typeI_closed_form(int n, double r, double singular_tol = 1e-10) {
  if (!(r > 0.0 && r < 1.0)) throw ParamOutOfRange("cylinder_typeI_closed_form: r in (0,1)");
  TypeIClassification out;
  const double T = std::sqrt(1.0 - r * r);
  const double x = T * std::sqrt(n - 1.0) / r;
  out.x = x;
  for (double root : enumerate_roots(RootSpec{Equation::FredholmCyl, x + 4.0})) {
    if (std::abs(x - root) <= singular_tol) {
      out.fredholm = true;
      out.cls = TypeIClass::Unchanged;
      return out;
    }
  }
  const double denom = std::cos(x) + x * std::sin(x);
  out.cls = (x < std::sin(x) / denom) ? TypeIClass::Unchanged : TypeIClass::Reduced;
  return out;
}

// ---------------------------------------------------------------------------
// assembled indices

struct Decomposition {
  int a = 0;  // nonpositive fixed-boundary eigenvalues
  int b = 0;  // Steklov eigenvalues below one
  int c = 0;  // criticality offset
  int mi_q = 0;
  bool kernel_flag = false;
};

/// The (a, b, c) decomposition of a constrained index; checks a + b = MI(Q) and
/// retries once on a doubled grid before reporting a mismatch.
inline Decomposition decomposition_abc(const SurfaceModel& surface, ConstraintType constraint,
                                       const OffsetOptions& opt = {}) {
  if (!surface.has_boundary || surface.kind == SurfaceKind::GeodesicDisk)
    throw NoBoundary("decomposition_abc: needs a mode-reducible boundary surface");
  const auto modes = reduce_to_modes(surface, mode_truncation_bound(surface));
  auto accumulate = [&](int grid_n) {
    Decomposition d;
    CountOptions copt;
    copt.eps_sing = opt.solve.eps_sing;
    long long a = 0, b = 0, mi = 0;
    for (const auto& m : modes) {
      const auto s = count_mode_spectrum(m, grid_n, copt);
      a += m.multiplicity * s.nonpositive_dirichlet;
      b += m.multiplicity * s.steklov_below_one;
      mi += m.multiplicity * s.negative_robin;
      d.kernel_flag = d.kernel_flag || s.kernel_flag;
    }
    d.a = static_cast<int>(a);
    d.b = static_cast<int>(b);
    d.mi_q = static_cast<int>(mi);
    return d;
  };
  Decomposition d = accumulate(opt.grid_n);
  if (d.a + d.b != d.mi_q) {
    d = accumulate(2 * opt.grid_n);
    if (d.a + d.b != d.mi_q)
      throw DecompositionMismatch("decomposition_abc: a + b != MI(Q) after refinement");
  }
  d.c = criticality_offset(surface, constraint, opt).c;
  return d;
}

/// Constrained Morse index: MI(Q) + offset.
inline int constrained_index(const SurfaceModel& surface, ConstraintType constraint,
                             const OffsetOptions& opt = {}) {
  const auto total = morse_index_total(surface, opt.grid_n);
  return total.mi_q + criticality_offset(surface, constraint, opt).c;
}

}  // namespace capindex
