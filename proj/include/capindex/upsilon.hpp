#pragma once

// The (n+1)x(n+1) matrix Upsilon of weighted second moments of the immersion
// against n|Å|^2 X, its nonnegative-eigenvalue count ell, the trace identity,
// and the index lower bounds it certifies.
//
//   Upsilon_ij = int_Sigma n|Å|^2 [ <(n - H<X,nu>)X
//                + (n cos(theta) + (H/2)(|X|^2+1)) nu, e_i> <X, e_j> ]
//
// Entries are computed by Gauss-Legendre quadrature in the profile parameter;
// the sphere directions enter through the exact moment identities
// int_{S^{n-1}} z_i z_j = vol(S^{n-1}) delta_ij / n (cylinder, any n) or a
// periodic trapezoid rule (surfaces with circle symmetry, exact for the
// trigonometric integrands).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capindex/errors.hpp"
#include "capindex/surface.hpp"

namespace capindex {

namespace detail {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

inline GaussLegendre gauss_legendre(int m) {
  GaussLegendre gl;
  gl.x.resize(m);
  gl.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.x[i] = -x;
    gl.x[m - 1 - i] = x;
    gl.w[i] = gl.w[m - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return gl;
}

// one quadrature node of a parametrized surface in R^{n+1}
struct QuadPoint {
  Eigen::VectorXd X;
  Eigen::VectorXd nu;
  double abar2 = 0.0;   // |Å|^2
  double a2 = 0.0;      // |A|^2
  double w = 0.0;       // quadrature weight including the area element
  double XT2 = 0.0;     // |X^T|^2
  double AoXT2 = 0.0;   // |Å(X^T)|^2
};

// Pointwise grid over the surface.  The cylinder's cross-sphere directions
// are sampled at the 2n axis points +-e_i with weight vol(S^{n-1})/(2n): a
// cubature that is exact for the (at most quadratic) direction dependence of
// every integrand used here.
inline std::vector<QuadPoint> product_grid(const SurfaceModel& s, int quad_n) {
  std::vector<QuadPoint> pts;
  const GaussLegendre gl = gauss_legendre(quad_n);
  const int n_tau = quad_n;
  const double dtau = 2.0 * M_PI / n_tau;
  switch (s.kind) {
    case SurfaceKind::Cylinder: {
      const double T = s.half_length, r = s.r;
      const double wz = unit_sphere_volume(s.n - 1) / (2.0 * s.n) * std::pow(r, s.n - 1);
      for (int i = 0; i < quad_n; ++i) {
        const double t = T * gl.x[i];
        for (int axis = 1; axis <= s.n; ++axis) {
          for (double sgn : {-1.0, 1.0}) {
            QuadPoint p;
            p.X = Eigen::VectorXd::Zero(s.n + 1);
            p.nu = Eigen::VectorXd::Zero(s.n + 1);
            p.X(0) = t;
            p.X(axis) = sgn * r;
            p.nu(axis) = sgn;
            p.a2 = s.second_form_sq();
            p.abar2 = s.traceless_form_sq();
            p.w = T * gl.w[i] * wz;
            p.XT2 = t * t;
            const double hn = s.mean_curvature / s.n;
            p.AoXT2 = hn * hn * t * t;  // X^T is the flat direction: S(X^T) = 0
            pts.push_back(std::move(p));
          }
        }
      }
      break;
    }
    case SurfaceKind::CriticalCatenoid: {
      const double T = s.half_length, c = s.conformal_c;
      for (int i = 0; i < quad_n; ++i) {
        const double t = T * gl.x[i];
        const double ch = std::cosh(t), sh = std::sinh(t);
        for (int j = 0; j < n_tau; ++j) {
          const double tau = j * dtau;
          QuadPoint p;
          p.X = Eigen::Vector3d(c * ch * std::cos(tau), c * ch * std::sin(tau), c * t);
          p.nu = Eigen::Vector3d(std::cos(tau) / ch, std::sin(tau) / ch, -sh / ch);
          p.a2 = s.second_form_sq(t);
          p.abar2 = p.a2;
          p.w = T * gl.w[i] * dtau * c * c * ch * ch;
          const double xe1 = c * (ch * sh + t) / ch;  // <X, E_1>, E_1 = X_t/(c ch)
          p.XT2 = xe1 * xe1;
          const double kappa = 1.0 / (c * ch * ch);   // principal curvature magnitude
          p.AoXT2 = kappa * kappa * p.XT2;
          pts.push_back(std::move(p));
        }
      }
      break;
    }
    case SurfaceKind::GeodesicDisk: {
      for (int i = 0; i < quad_n; ++i) {
        const double rho = 0.5 * (gl.x[i] + 1.0);
        for (int j = 0; j < n_tau; ++j) {
          const double tau = j * dtau;
          QuadPoint p;
          p.X = Eigen::Vector3d(rho * std::cos(tau), rho * std::sin(tau), 0.0);
          p.nu = Eigen::Vector3d(0.0, 0.0, 1.0);
          p.a2 = 0.0;
          p.abar2 = 0.0;
          p.w = 0.5 * gl.w[i] * dtau * rho;
          p.XT2 = rho * rho;
          p.AoXT2 = 0.0;
          pts.push_back(std::move(p));
        }
      }
      break;
    }
    default:
      throw ParamOutOfRange("product_grid: no parametrization for this surface");
  }
  return pts;
}

inline Eigen::MatrixXd upsilon_from_grid(const SurfaceModel& s, const std::vector<QuadPoint>& pts,
                                         const Eigen::MatrixXd& frame) {
  const int dim = s.n + 1;
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(dim, dim);
  const double H = s.mean_curvature;
  for (const auto& p : pts) {
    const double wX = p.X.dot(p.nu);
    const double phi = 0.5 * (p.X.squaredNorm() + 1.0);
    const Eigen::VectorXd avec =
        (s.n - H * wX) * p.X + (s.n * s.cos_theta + H * phi) * p.nu;
    const double common = s.n * p.abar2 * p.w;
    for (int i = 0; i < dim; ++i) {
      const double ai = avec.dot(frame.col(i));
      for (int j = 0; j < dim; ++j) U(i, j) += common * ai * p.X.dot(frame.col(j));
    }
  }
  return U;
}

// cylinder entries for arbitrary n in the coordinate frame: the sphere
// integrals reduce to vol(S^{n-1}) delta_ij / n
inline Eigen::MatrixXd upsilon_cylinder_moments(const SurfaceModel& s, int quad_n) {
  const int dim = s.n + 1;
  const double T = s.half_length, r = s.r;
  const double vol = unit_sphere_volume(s.n - 1);
  const double rho = std::pow(r, s.n - 1);  // dmu = rho vol dt x sphere average
  const GaussLegendre gl = gauss_legendre(quad_n);
  double I_t2 = 0.0, I_coef = 0.0;
  for (int i = 0; i < quad_n; ++i) {
    const double t = T * gl.x[i];
    const double wq = T * gl.w[i];
    I_t2 += wq * t * t;
    // sphere-direction diagonal integrand: r^2 + coef(t) * r, averaged z_i^2 = 1/n
    const double coef = ((s.n - 1.0) * (t * t + 1.0) - (s.n + 1.0) * r * r) / (2.0 * r);
    I_coef += wq * (r * r + coef * r);
  }
  const double nabar2 = s.n * s.traceless_form_sq();  // n |Å|^2 = (n-1)/r^2
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(dim, dim);
  U(0, 0) = nabar2 * rho * vol * I_t2;
  for (int j = 1; j < dim; ++j) U(j, j) = nabar2 * rho * vol / s.n * I_coef;
  return U;
}

}  // namespace detail

struct UpsilonMatrix {
  Eigen::MatrixXd entries;
  Eigen::MatrixXd symmetrized;
  double asymmetry_residual = 0.0;
  std::vector<double> eigenvalues;  // of the symmetrized matrix, ascending
  int ell = 0;                      // eigenvalues >= -eps
  bool eigenvalue_band = false;     // some eigenvalue within the +-eps band
  int quad_n = 0;
};

struct UpsilonOptions {
  double eps_rel = 1e-9;       // nonnegativity band, relative to ||Upsilon||
  double refine_tol = 1e-8;    // QuadTooCoarse when entries move more
  bool force_generic_path = false;  // product grid even for the cylinder
};

inline UpsilonMatrix compute_upsilon(const SurfaceModel& surface, int quad_n,
                                     const UpsilonOptions& opt = {},
                                     const Eigen::MatrixXd& frame = Eigen::MatrixXd()) {
  if (quad_n < 32) throw QuadTooCoarse("compute_upsilon: quad_n must be >= 32");
  if (surface.kind == SurfaceKind::CmcTorusS3)
    throw ParamOutOfRange("compute_upsilon: Upsilon is defined for surfaces in the unit ball");
  const int dim = surface.n + 1;
  Eigen::MatrixXd F = frame.size() ? frame : Eigen::MatrixXd::Identity(dim, dim);
  const bool identity_frame = F.isIdentity(1e-15);

  auto entries_at = [&](int m) {
    if (surface.kind == SurfaceKind::Cylinder && identity_frame && !opt.force_generic_path)
      return detail::upsilon_cylinder_moments(surface, m);
    return detail::upsilon_from_grid(surface, detail::product_grid(surface, m), F);
  };
  const Eigen::MatrixXd U = entries_at(quad_n);
  const Eigen::MatrixXd U2 = entries_at(2 * quad_n);
  const double scale = 1.0 + U.cwiseAbs().maxCoeff();
  if ((U - U2).cwiseAbs().maxCoeff() > opt.refine_tol * scale)
    throw QuadTooCoarse("compute_upsilon: entries move under quadrature refinement");

  UpsilonMatrix out;
  out.entries = U2;
  out.symmetrized = 0.5 * (U2 + U2.transpose());
  out.asymmetry_residual = (U2 - U2.transpose()).cwiseAbs().maxCoeff() / scale;
  out.quad_n = quad_n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.symmetrized);
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  const double nrm = std::max(std::abs(out.eigenvalues.front()), std::abs(out.eigenvalues.back()));
  const double eps = opt.eps_rel * nrm;
  for (double ev : out.eigenvalues) {
    if (ev >= -eps) ++out.ell;
    if (std::abs(ev) < eps) out.eigenvalue_band = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// trichotomy cases and the index lower bound

enum class UpsilonCase { Generic, HyperPlanar, Umbilical };

inline std::string to_string(UpsilonCase c) {
  switch (c) {
    case UpsilonCase::Generic: return "generic";
    case UpsilonCase::HyperPlanar: return "hyperPlanar";
    case UpsilonCase::Umbilical: return "umbilical";
  }
  return "?";
}

struct IndexLowerBound {
  int bound = 0;
  int ell = 0;
  UpsilonCase label = UpsilonCase::Generic;
};

/// Affine-dependence test: does |Å|^2 X lie on a hyperplane (not necessarily
/// through the origin)?  Smallest singular value of the node matrix
/// [ |Å|^2 X | 1 ], relative to the largest.  `affine = false` gives the
/// linear variant (hyperplane through the origin).
inline double hyperplanar_singular_ratio(const SurfaceModel& surface, int quad_n,
                                         bool affine = true) {
  const auto pts = detail::product_grid(surface, quad_n);
  const int dim = surface.n + 1 + (affine ? 1 : 0);
  Eigen::MatrixXd M(static_cast<int>(pts.size()), dim);
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    for (int j = 0; j <= surface.n; ++j) M(i, j) = pts[i].abar2 * pts[i].X(j);
    if (affine) M(i, surface.n + 1) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / (sv(0) + 1e-300);
}

/// The certified lower bound: ell in the generic case, ell - 1 in the
/// |Å|^2-scale hyper-planar case, suppressed for umbilical surfaces.
inline IndexLowerBound index_lower_bound(const SurfaceModel& surface, const UpsilonMatrix& upsilon,
                                         int quad_n = 64) {
  IndexLowerBound out;
  out.ell = upsilon.ell;
  const auto pts = detail::product_grid(surface, quad_n);
  double max_abar2 = 0.0;
  for (const auto& p : pts) max_abar2 = std::max(max_abar2, p.abar2);
  if (max_abar2 <= 1e-12) {
    out.label = UpsilonCase::Umbilical;
    out.bound = 0;  // the trichotomy's first case: stability forces umbilical
    return out;
  }
  if (hyperplanar_singular_ratio(surface, quad_n) < 1e-8) {
    out.label = UpsilonCase::HyperPlanar;
    out.bound = upsilon.ell - 1;
    return out;
  }
  out.label = UpsilonCase::Generic;
  out.bound = upsilon.ell;
  return out;
}

// ---------------------------------------------------------------------------
// trace identity

/// Relative residual between tr(Upsilon) and the independent quadrature of
/// int n^2 (|Å|^2 |X^T|^2 + |Å(X^T)|^2).
inline double trace_identity_residual(const SurfaceModel& surface, int quad_n,
                                      const UpsilonOptions& opt = {}) {
  const auto ups = compute_upsilon(surface, quad_n, opt);
  const double lhs = ups.entries.trace();
  const auto pts = detail::product_grid(surface, 2 * quad_n);
  double rhs = 0.0;
  const double n2 = static_cast<double>(surface.n) * surface.n;
  for (const auto& p : pts) rhs += p.w * n2 * (p.abar2 * p.XT2 + p.AoXT2);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

/// Max |Phi| over the boundary, Phi = H phi - n<X,nu> - n cos(theta) - H;
/// the trace identity rests on Phi vanishing there.
inline double boundary_phi_residual(const SurfaceModel& surface) {
  if (!surface.has_boundary) throw NoBoundary("boundary_phi_residual: closed surface");
  auto phi_at = [&](const Eigen::Vector3d& X, const Eigen::Vector3d& nu) {
    const double phi = 0.5 * (X.squaredNorm() + 1.0);
    return surface.mean_curvature * phi - surface.n * X.dot(nu) -
           surface.n * surface.cos_theta - surface.mean_curvature;
  };
  double worst = 0.0;
  for (double tau : {0.0, 0.9, 2.3, 4.1}) {
    for (double sgn : {-1.0, 1.0}) {
      Eigen::Vector3d X, nu;
      switch (surface.kind) {
        case SurfaceKind::Cylinder: {
          if (surface.n != 2) {
            // axis-aligned boundary point generalizes to any n
            Eigen::VectorXd Xg = Eigen::VectorXd::Zero(surface.n + 1);
            Eigen::VectorXd ng = Eigen::VectorXd::Zero(surface.n + 1);
            Xg(0) = sgn * surface.half_length;
            Xg(1) = surface.r;
            ng(1) = 1.0;
            const double phi = 0.5 * (Xg.squaredNorm() + 1.0);
            const double val = surface.mean_curvature * phi - surface.n * Xg.dot(ng) -
                               surface.n * surface.cos_theta - surface.mean_curvature;
            worst = std::max(worst, std::abs(val));
            continue;
          }
          X = Eigen::Vector3d(sgn * surface.half_length, surface.r * std::cos(tau),
                              surface.r * std::sin(tau));
          nu = Eigen::Vector3d(0.0, std::cos(tau), std::sin(tau));
          break;
        }
        case SurfaceKind::CriticalCatenoid: {
          const double T = surface.half_length, c = surface.conformal_c;
          const double ch = std::cosh(T), sh = std::sinh(T) * sgn;
          X = Eigen::Vector3d(c * ch * std::cos(tau), c * ch * std::sin(tau), c * T * sgn);
          nu = Eigen::Vector3d(std::cos(tau) / ch, std::sin(tau) / ch, -sh / ch);
          break;
        }
        case SurfaceKind::GeodesicDisk: {
          X = Eigen::Vector3d(std::cos(tau), std::sin(tau), 0.0);
          nu = Eigen::Vector3d(0.0, 0.0, 1.0);
          break;
        }
        default:
          throw NoBoundary("boundary_phi_residual: closed surface");
      }
      worst = std::max(worst, std::abs(phi_at(X, nu)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// boundary flux balance

/// Max component of the boundary balance int_{boundary}(n eta + H nu_bar),
/// which vanishes for every capillary hypersurface; evaluated by quadrature
/// over the boundary components.
inline double boundary_flux_residual(const SurfaceModel& s, int quad_n = 256) {
  if (!s.has_boundary) throw NoBoundary("boundary_flux_residual: closed surface");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(s.n + 1);
  const double H = s.mean_curvature;
  switch (s.kind) {
    case SurfaceKind::Cylinder: {
      // boundary spheres at t = +-T; eta = +-e_t, nu_bar = cos(theta) eta +
      // sin(theta) nu, and the nu part integrates to zero by symmetry (axis
      // cubature is exact for it)
      const double wz = unit_sphere_volume(s.n - 1) / (2.0 * s.n) * std::pow(s.r, s.n - 1);
      for (double sgn : {-1.0, 1.0}) {
        for (int axis = 1; axis <= s.n; ++axis) {
          for (double zs : {-1.0, 1.0}) {
            Eigen::VectorXd eta = Eigen::VectorXd::Zero(s.n + 1);
            eta(0) = sgn;
            Eigen::VectorXd nu = Eigen::VectorXd::Zero(s.n + 1);
            nu(axis) = zs;
            total += wz * (s.n * eta + H * (s.cos_theta * eta + s.sin_theta * nu));
          }
        }
      }
      break;
    }
    case SurfaceKind::CriticalCatenoid:
    case SurfaceKind::GeodesicDisk: {
      const double dtau = 2.0 * M_PI / quad_n;
      for (double sgn : {-1.0, 1.0}) {
        if (s.kind == SurfaceKind::GeodesicDisk && sgn < 0) continue;
        for (int j = 0; j < quad_n; ++j) {
          const double tau = j * dtau;
          Eigen::Vector3d eta, nu;
          double ds;
          if (s.kind == SurfaceKind::CriticalCatenoid) {
            const double T = s.half_length, ch = std::cosh(T), sh = std::sinh(T);
            eta = Eigen::Vector3d(sh * std::cos(tau), sh * std::sin(tau), sgn) / ch;
            nu = Eigen::Vector3d(std::cos(tau) / ch, std::sin(tau) / ch, -sgn * sh / ch);
            ds = s.conformal_c * ch * dtau;
          } else {
            eta = Eigen::Vector3d(std::cos(tau), std::sin(tau), 0.0);
            nu = Eigen::Vector3d(0.0, 0.0, 1.0);
            ds = dtau;
          }
          const Eigen::Vector3d nubar = s.cos_theta * eta + s.sin_theta * nu;
          total += ds * (s.n * eta + H * nubar);
        }
      }
      break;
    }
    default:
      throw NoBoundary("boundary_flux_residual: closed surface");
  }
  return total.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// minimal-capillary inequality

struct MinimalInequality {
  double lhs = 0.0;  // int |A|^2 <X, v>^2
  double rhs = 0.0;  // int |A|^2 cos^2(theta)
  bool holds = false;
  std::vector<double> lambda;  // H = 0 specialization of the diagonal values
};

inline MinimalInequality minimal_inequality_check(const SurfaceModel& surface,
                                                  const Eigen::Vector3d& v, int quad_n = 128) {
  if (surface.mean_curvature != 0.0)
    throw NotMinimal("minimal_inequality_check: surface must be minimal (H = 0)");
  const Eigen::Vector3d dir = v.normalized();
  const auto pts = detail::product_grid(surface, quad_n);
  MinimalInequality out;
  out.lambda.assign(surface.n + 1, 0.0);
  const double n = surface.n;
  for (const auto& p : pts) {
    const double xv = p.X.dot(dir);
    out.lhs += p.w * p.a2 * xv * xv;
    out.rhs += p.w * p.a2 * surface.cos_theta * surface.cos_theta;
    for (int i = 0; i <= surface.n; ++i)
      out.lambda[i] += p.w * (n * p.a2) * (n * p.X(i) * p.X(i) + n * surface.cos_theta * p.X(i) * p.nu(i));
  }
  out.holds = out.lhs >= out.rhs - 1e-12 * (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace capindex
