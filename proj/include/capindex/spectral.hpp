#pragma once

// Eigenvalue counting for the reduced 1-D problems.  The production path is
// inertia counting (Sturm / LDL^T sign count) on the symmetric tridiagonal
// quadratic-form matrix; a dense symmetric eigensolver is exposed as the
// brute-force oracle for tests.
//
// Counting semantics follow the index decomposition MI = a + b: Robin
// eigenvalues are counted strictly negative, Dirichlet eigenvalues
// nonpositive, Steklov eigenvalues strictly below one.  Eigenvalues inside
// the resolution band of the discretization are reported through kernel_flag
// instead of being silently classified; the three model coincidences (the
// translation mode lambda = 0, the support-function Dirichlet kernel, the
// coordinate Steklov eigenvalue mu = 1) all land in that band by
// construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "capindex/errors.hpp"
#include "capindex/surface.hpp"

namespace capindex {

struct CountOptions {
  double eps_count = 1e-9;  // user counting threshold (relative to mode scale)
  double eps_sing = 1e-8;   // solver singularity threshold (relative)
};

struct CountResult {
  int count = 0;
  bool kernel_flag = false;
  std::array<int, 2> grid_sizes{0, 0};
};

struct SpectralCount {
  int negative_robin = 0;
  int nonpositive_dirichlet = 0;
  int steklov_below_one = 0;
  std::array<int, 2> grid_sizes{0, 0};
  bool kernel_flag = false;
};

namespace detail {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size = diag.size() - 1
};

inline std::vector<double> mode_grid(const ModeProblem& m, int N) {
  std::vector<double> t(N + 1);
  const double h = 2.0 * m.half_length / N;
  for (int i = 0; i <= N; ++i) t[i] = -m.half_length + i * h;
  t[N] = m.half_length;
  return t;
}

inline std::vector<double> trapezoid_weights(double T, int N) {
  const double h = 2.0 * T / N;
  std::vector<double> w(N + 1, h);
  w[0] = w[N] = 0.5 * h;
  return w;
}

// quadratic form  int(f'^2 + V f^2) - qhat (f(T)^2 + f(-T)^2)  on the grid
inline Tridiagonal robin_form(const ModeProblem& m, int N) {
  const double h = 2.0 * m.half_length / N;
  const auto t = mode_grid(m, N);
  const auto w = trapezoid_weights(m.half_length, N);
  Tridiagonal A;
  A.diag.assign(N + 1, 0.0);
  A.off.assign(N, -1.0 / h);
  for (int i = 0; i < N; ++i) {
    A.diag[i] += 1.0 / h;
    A.diag[i + 1] += 1.0 / h;
  }
  for (int i = 0; i <= N; ++i) A.diag[i] += w[i] * m.potential(t[i]);
  A.diag[0] -= m.robin_coeff;
  A.diag[N] -= m.robin_coeff;
  return A;
}

// same form restricted to functions vanishing at +-T (rows/cols removed)
inline Tridiagonal dirichlet_form(const ModeProblem& m, int N) {
  Tridiagonal A = robin_form(m, N);
  A.diag[0] += m.robin_coeff;  // undo the boundary term before trimming
  A.diag[N] += m.robin_coeff;
  A.diag.erase(A.diag.begin());
  A.diag.pop_back();
  A.off.erase(A.off.begin());
  A.off.pop_back();
  return A;
}

inline std::vector<double> mass_diag(const ModeProblem& m, int N,
                                     const std::function<double(double)>& weight,
                                     bool dirichlet) {
  const auto t = mode_grid(m, N);
  auto w = trapezoid_weights(m.half_length, N);
  for (int i = 0; i <= N; ++i) w[i] *= weight ? weight(t[i]) : m.weight(t[i]);
  if (dirichlet) {
    w.erase(w.begin());
    w.pop_back();
  }
  return w;
}

// #{pencil eigenvalues of (A, B) below sigma} by the Sturm sequence of
// A - sigma B; B diagonal positive.
inline int count_pencil_below(const Tridiagonal& A, const std::vector<double>& B, double sigma) {
  const std::size_t n = A.diag.size();
  int neg = 0;
  double d = A.diag[0] - sigma * B[0];
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  if (d < 0.0) ++neg;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(d) < tiny) d = -tiny;
    d = (A.diag[i] - sigma * B[i]) - A.off[i - 1] * A.off[i - 1] / d;
    if (d < 0.0) ++neg;
  }
  return neg;
}

inline double potential_sup(const ModeProblem& m, int N) {
  const auto t = mode_grid(m, N);
  double s = 0.0;
  for (double ti : t) s = std::max(s, std::abs(m.potential(ti)));
  return s;
}

// eigenvalue scale of the mode: bounds |V| and the boundary contribution
inline double mode_scale(const ModeProblem& m, int N) {
  return 1.0 + potential_sup(m, N) + 2.0 * m.robin_coeff;
}

// resolution band of the O(h^2) counting discretization
inline double count_band(const ModeProblem& m, int N, const CountOptions& opt) {
  const double h = 2.0 * m.half_length / N;
  const double scale = mode_scale(m, N);
  return std::max(opt.eps_count * scale, 2.0 * h * h * scale);
}

// wider band used when deciding whether the discretized Robin operator has a
// kernel: a kernel eigenfunction oscillates at frequency ~ sqrt(|V|), so its
// discrete eigenvalue carries the dispersion error ~ h^2 V^2 / 8; the band is
// twice that, which keeps a >= 2x margin against genuine eigenvalues at the
// 1e-3 exclusion distance used by the classification sweeps
inline double singular_band(const ModeProblem& m, int N, const CountOptions& opt) {
  const double h = 2.0 * m.half_length / N;
  const double scale = mode_scale(m, N);
  return std::max(opt.eps_sing * scale, 0.25 * h * h * scale * scale);
}

inline void require_grid(int grid_n) {
  if (grid_n < 64) throw GridTooCoarse("grid_n must be >= 64");
}

struct BandedCount {
  int below_lo = 0;  // eigenvalues < sigma - band
  int below_hi = 0;  // eigenvalues < sigma + band
};

inline BandedCount banded_count(const Tridiagonal& A, const std::vector<double>& B, double sigma,
                                double band) {
  return BandedCount{count_pencil_below(A, B, sigma - band), count_pencil_below(A, B, sigma + band)};
}

}  // namespace detail

/// The resolution band used by the counters at this grid: eigenvalues closer
/// to the counting threshold than this cannot be classified by the O(h^2)
/// discretization and are reported through kernel_flag.
inline double counting_band(const ModeProblem& mode, int grid_n, const CountOptions& opt = {}) {
  return detail::count_band(mode, grid_n, opt);
}

/// Negative inertia of a custom symmetric tridiagonal pencil (A, diag-B):
/// #{eigenvalues < sigma}.
inline int pencil_count_below(const std::vector<double>& diag, const std::vector<double>& off,
                              const std::vector<double>& mass, double sigma) {
  detail::Tridiagonal A{diag, off};
  return detail::count_pencil_below(A, mass, sigma);
}

/// Negative Robin eigenvalues of the mode (lambda < 0 strictly; eigenvalues
/// inside the resolution band set kernel_flag and are not counted).
inline CountResult count_negative_robin(const ModeProblem& mode, int grid_n,
                                        const CountOptions& opt = {}) {
  detail::require_grid(grid_n);
  CountResult out;
  int prev = -1;
  for (int pass = 0; pass < 2; ++pass) {
    const int N = grid_n << pass;
    const auto A = detail::robin_form(mode, N);
    const auto B = detail::mass_diag(mode, N, nullptr, false);
    const auto c = detail::banded_count(A, B, 0.0, detail::count_band(mode, N, opt));
    out.count = c.below_lo;
    out.kernel_flag = out.kernel_flag || (c.below_hi != c.below_lo);
    out.grid_sizes[pass] = N;
    if (pass == 1 && out.count != prev)
      throw IndeterminateMode("count_negative_robin: counts disagree under grid refinement");
    prev = out.count;
  }
  return out;
}

/// Nonpositive Dirichlet eigenvalues (delta <= 0; the delta = 0 case is
/// counted and flagged).
inline CountResult count_dirichlet_nonpositive(const ModeProblem& mode, int grid_n,
                                               const CountOptions& opt = {}) {
  detail::require_grid(grid_n);
  CountResult out;
  int prev = -1;
  for (int pass = 0; pass < 2; ++pass) {
    const int N = grid_n << pass;
    const auto A = detail::dirichlet_form(mode, N);
    const auto B = detail::mass_diag(mode, N, nullptr, true);
    const auto c = detail::banded_count(A, B, 0.0, detail::count_band(mode, N, opt));
    out.count = c.below_hi;  // nonpositive: include the kernel band
    out.kernel_flag = out.kernel_flag || (c.below_hi != c.below_lo);
    out.grid_sizes[pass] = N;
    if (pass == 1 && out.count != prev)
      throw IndeterminateMode("count_dirichlet_nonpositive: counts disagree under grid refinement");
    prev = out.count;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steklov via the 2x2 Dirichlet-to-Neumann map

namespace detail {

struct Shooting {
  double u = 0.0;   // value at T
  double du = 0.0;  // derivative at T
  double amax = 0.0;
};

// integrate u'' = (V - shift) u from 0 to T by classical RK4, rescaling to
// dodge overflow (only the ratio du/u is consumed)
inline Shooting integrate_halfline(const ModeProblem& m, double u0, double du0, int steps,
                                   double shift) {
  const double T = m.half_length;
  const double h = T / steps;
  double u = u0, v = du0, amax = std::max(std::abs(u0), std::abs(du0));
  auto f = [&](double t, double uu) { return (m.potential(t) - shift) * uu; };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const double k1u = v, k1v = f(t, u);
    const double k2u = v + 0.5 * h * k1v, k2v = f(t + 0.5 * h, u + 0.5 * h * k1u);
    const double k3u = v + 0.5 * h * k2v, k3v = f(t + 0.5 * h, u + 0.5 * h * k2u);
    const double k4u = v + h * k3v, k4v = f(t + h, u + h * k3u);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double a = std::max(std::abs(u), std::abs(v));
    amax = std::max(amax, a);
    if (a > 1e100) {
      u *= 1e-100;
      v *= 1e-100;
      amax = std::max(std::abs(u), std::abs(v));
    }
  }
  return Shooting{u, v, amax};
}

struct SteklovFamily {
  bool finite = true;      // family contributes a finite Steklov eigenvalue
  bool dirichlet_kernel = false;
  double mu = 0.0;
};

// One symmetry family (even or odd) of the mode's Steklov problem.  When the
// family's solution vanishes at the boundary the Dirichlet problem has a
// kernel and the family's DtN eigenvalue sits at a pole; the recount at a
// +-1e-7 spectral shift must then show the pole (opposite huge values).  On
// the convention that the Dirichlet zero is counted in the nonpositive count
// a, the matching Steklov side is the downshifted one, where the pole has
// escaped to +infinity and contributes nothing below one.
inline SteklovFamily steklov_family(const ModeProblem& m, bool even, int steps) {
  const double u0 = even ? 1.0 : 0.0;
  const double du0 = even ? 0.0 : 1.0;
  SteklovFamily fam;
  const auto sh = integrate_halfline(m, u0, du0, steps, 0.0);
  if (std::abs(sh.u) > 1e-7 * sh.amax) {
    fam.mu = sh.du / (m.robin_coeff * sh.u);
    return fam;
  }
  fam.dirichlet_kernel = true;
  const double s = 1e-7 * mode_scale(m, steps);
  const auto lo = integrate_halfline(m, u0, du0, steps, s);    // operator L - s
  const auto hi = integrate_halfline(m, u0, du0, steps, -s);   // operator L + s
  const double mu_lo = lo.du / (m.robin_coeff * lo.u);
  const double mu_hi = hi.du / (m.robin_coeff * hi.u);
  const bool pole = (std::abs(mu_lo) > 1e3 && std::abs(mu_hi) > 1e3 && (mu_lo > 0.0) != (mu_hi > 0.0));
  if (!pole)
    throw IndeterminateMode("steklov: Dirichlet kernel without a DtN pole; mode indeterminate");
  // downshifted side: delta - s < 0 joins the nonpositive Dirichlet count and
  // the pole reappears at +infinity, so no finite eigenvalue remains here
  fam.finite = false;
  fam.mu = (mu_lo > 0.0) ? mu_lo : mu_hi;
  return fam;
}

}  // namespace detail

struct SteklovResult {
  std::vector<double> mu;  // finite Steklov eigenvalues (even/odd families)
  int count = 0;           // #{mu < 1}
  bool kernel_flag = false;
  bool dirichlet_kernel = false;
  std::array<int, 2> grid_sizes{0, 0};
};

/// Steklov eigenvalues below one via the even/odd fundamental-solution DtN.
inline SteklovResult count_steklov_below_one(const ModeProblem& mode, int grid_n,
                                             const CountOptions& opt = {}) {
  detail::require_grid(grid_n);
  if (!(mode.robin_coeff > 0.0))
    throw ParamOutOfRange("steklov: requires qhat > 0 (q >= 0, q not identically 0)");
  SteklovResult out;
  int prev = -1;
  for (int pass = 0; pass < 2; ++pass) {
    const int steps = grid_n << pass;
    const double h = mode.half_length / steps;
    const double scale = detail::mode_scale(mode, steps);
    const double band = std::max(opt.eps_count * scale, 50.0 * h * h * h * h * (1.0 + scale * scale));
    int cnt = 0;
    bool flag = false;
    std::vector<double> mus;
    bool dk = false;
    for (bool even : {true, false}) {
      const auto fam = detail::steklov_family(mode, even, steps);
      dk = dk || fam.dirichlet_kernel;
      if (!fam.finite) continue;
      mus.push_back(fam.mu);
      if (fam.mu < 1.0 - band) {
        ++cnt;
      } else if (fam.mu <= 1.0 + band) {
        flag = true;  // at the counting threshold; not counted (strictly below one)
      }
    }
    out.count = cnt;
    out.kernel_flag = out.kernel_flag || flag || dk;
    out.dirichlet_kernel = out.dirichlet_kernel || dk;
    out.grid_sizes[pass] = steps;
    if (pass == 0) out.mu = mus;
    if (pass == 1 && cnt != prev)
      throw IndeterminateMode("count_steklov_below_one: counts disagree under grid refinement");
    prev = cnt;
  }
  return out;
}

/// The full count triple of one mode.
inline SpectralCount count_mode_spectrum(const ModeProblem& mode, int grid_n,
                                         const CountOptions& opt = {}) {
  SpectralCount s;
  const auto rob = count_negative_robin(mode, grid_n, opt);
  const auto dir = count_dirichlet_nonpositive(mode, grid_n, opt);
  const auto ste = count_steklov_below_one(mode, grid_n, opt);
  s.negative_robin = rob.count;
  s.nonpositive_dirichlet = dir.count;
  s.steklov_below_one = ste.count;
  s.grid_sizes = rob.grid_sizes;
  s.kernel_flag = rob.kernel_flag || dir.kernel_flag || ste.kernel_flag;
  return s;
}

// ---------------------------------------------------------------------------
// dense brute-force oracle (test validation only)

/// Full sorted eigenvalue list of the mode's pencil; weight_override replaces
/// the mode's L^2 weight (e.g. to check Sylvester weight-independence).
inline std::vector<double> dense_oracle(const ModeProblem& mode, int grid_n,
                                        const std::function<double(double)>& weight_override = nullptr,
                                        bool dirichlet = false) {
  detail::require_grid(grid_n);
  const auto A = dirichlet ? detail::dirichlet_form(mode, grid_n) : detail::robin_form(mode, grid_n);
  const auto B = detail::mass_diag(mode, grid_n, weight_override, dirichlet);
  const int n = static_cast<int>(A.diag.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = A.diag[i] / B[i];
  for (int i = 0; i + 1 < n; ++i) {
    const double v = A.off[i] / std::sqrt(B[i] * B[i + 1]);
    M(i, i + 1) = v;
    M(i + 1, i) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Dense 2x2 DtN oracle via the Schur complement of the interior block.
inline std::vector<double> dense_steklov_oracle(const ModeProblem& mode, int grid_n) {
  detail::require_grid(grid_n);
  auto A = detail::robin_form(mode, grid_n);
  A.diag[0] += mode.robin_coeff;  // Neumann-form matrix (no boundary term)
  A.diag[grid_n] += mode.robin_coeff;
  const int n = static_cast<int>(A.diag.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = A.diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    M(i, i + 1) = A.off[i];
    M(i + 1, i) = A.off[i];
  }
  Eigen::MatrixXd Aii = M.block(1, 1, n - 2, n - 2);
  Eigen::MatrixXd Aib(n - 2, 2);
  Aib.col(0) = M.block(1, 0, n - 2, 1);
  Aib.col(1) = M.block(1, n - 1, n - 2, 1);
  Eigen::Matrix2d Abb;
  Abb << M(0, 0), M(0, n - 1), M(n - 1, 0), M(n - 1, n - 1);
  // partial-pivot LU: the interior block may be indefinite
  const Eigen::Matrix2d S = Abb - Aib.transpose() * Aii.partialPivLu().solve(Aib);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
  return {es.eigenvalues()(0) / mode.robin_coeff, es.eigenvalues()(1) / mode.robin_coeff};
}

// ---------------------------------------------------------------------------
// totals

/// Smallest mode id from which the reduced form is provably positive: the
/// worst Robin eigenvalue over all modes is -T0^2/T^2 (the coth branch), so
/// min V above that level certifies positivity.
inline int mode_truncation_bound(const SurfaceModel& surface) {
  const double t0 = coth_fixed_point();
  const double T = surface.half_length;
  const double worst = t0 * t0 / (T * T);
  switch (surface.kind) {
    case SurfaceKind::Cylinder: {
      int k = 2;
      while ((k - 1.0) * (k + surface.n - 1.0) / (surface.r * surface.r) <= worst) ++k;
      return k;
    }
    case SurfaceKind::CriticalCatenoid: {
      int m = 1;
      while (m * m - 2.0 <= worst) ++m;
      return m + 1;  // one mode past the certified cutoff, kept as a tail check
    }
    default:
      throw NoBoundary("mode_truncation_bound: surface has no mode reduction");
  }
}

struct ModeCountRow {
  int mode_id = 0;
  std::int64_t multiplicity = 1;
  CountResult robin;
};

struct IndexTotal {
  int mi_q = 0;
  std::vector<ModeCountRow> modes;  // empty for the closed torus
  std::array<int, 2> grid_sizes{0, 0};
  bool kernel_flag = false;
  int torus_kernel_multiplicity = 0;
};

/// MI(Q) as the multiplicity-weighted sum of per-mode negative Robin counts
/// (lattice count for the closed torus).
inline IndexTotal morse_index_total(const SurfaceModel& surface, int grid_n,
                                    const CountOptions& opt = {}, int k_max_override = -1) {
  IndexTotal out;
  if (surface.kind == SurfaceKind::CmcTorusS3) {
    const auto spec = torus_spectrum(surface.a, surface.p_const);
    out.mi_q = spec.below;
    out.kernel_flag = spec.at_threshold > 0;
    out.torus_kernel_multiplicity = spec.at_threshold;
    return out;
  }
  if (surface.kind == SurfaceKind::GeodesicDisk)
    throw NoBoundary("morse_index_total: surface must be cylinder, catenoid, or torus");
  const int k_max = k_max_override >= 0 ? k_max_override : mode_truncation_bound(surface);
  const auto modes = reduce_to_modes(surface, k_max);
  long long mi = 0;
  for (const auto& m : modes) {
    ModeCountRow row;
    row.mode_id = m.mode_id;
    row.multiplicity = m.multiplicity;
    row.robin = count_negative_robin(m, grid_n, opt);
    mi += row.multiplicity * row.robin.count;
    out.kernel_flag = out.kernel_flag || row.robin.kernel_flag;
    out.grid_sizes = row.robin.grid_sizes;
    out.modes.push_back(std::move(row));
  }
  out.mi_q = static_cast<int>(mi);
  return out;
}

// ---------------------------------------------------------------------------
// closed-form cylinder index (no discretization)

namespace detail {

inline std::vector<double> cylinder_betas(int n, double r, double x_cap) {
  const double T = std::sqrt(1.0 - r * r);
  const double t0 = coth_fixed_point();
  std::vector<double> betas{-t0 * t0 / (T * T), 0.0};
  for (Equation eq : {Equation::TanEq, Equation::CotEq}) {
    for (double x : enumerate_roots(RootSpec{eq, x_cap})) betas.push_back((x / T) * (x / T));
  }
  std::sort(betas.begin(), betas.end());
  return betas;
}

}  // namespace detail

/// MI(Q) of the cylinder from the explicit beta-spectrum.
inline int cylinder_index_analytic(int n, double r) {
  if (n < 2) throw ParamOutOfRange("cylinder_index_analytic: n must be >= 2");
  if (!(r > 0.0 && r < 1.0)) throw ParamOutOfRange("cylinder_index_analytic: r must lie in (0,1)");
  const double T = std::sqrt(1.0 - r * r);
  const double x_star = T * std::sqrt(n - 1.0) / r;
  const auto betas = detail::cylinder_betas(n, r, x_star + 1.0);
  long long mi = 0;
  for (int k = 0;; ++k) {
    const double shift = (k - 1.0) * (k + n - 1.0) / (r * r);
    long long cnt = 0;
    for (double b : betas)
      if (b + shift < 0.0) ++cnt;
    mi += cnt * sphere_harmonic_multiplicity(n, k);
    if (k >= 2 && cnt == 0) break;
  }
  return static_cast<int>(mi);
}

/// Distance from zero of the nearest nonzero analytic eigenvalue; a sweep
/// point is resolvable by the O(h^2) counting path only when this clearance
/// dominates the dispersion error.
inline double cylinder_spectral_clearance(int n, double r) {
  const double T = std::sqrt(1.0 - r * r);
  const double x_star = T * std::sqrt(n - 1.0) / r;
  const auto betas = detail::cylinder_betas(n, r, x_star + 6.0);
  const int k_top = mode_truncation_bound(make_cylinder(n, r)) + 3;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_top; ++k) {
    const double shift = (k - 1.0) * (k + n - 1.0) / (r * r);
    for (double b : betas) {
      const double lam = std::abs(b + shift);
      if (lam > 1e-9) best = std::min(best, lam);
    }
  }
  return best;
}

}  // namespace capindex
