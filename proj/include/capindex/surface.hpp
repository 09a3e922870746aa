#pragma once

// The four model geometries and the separation-of-variables reduction of
// their Jacobi-Robin eigenproblems to one-dimensional mode problems on
// [-T, T].

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "capindex/errors.hpp"
#include "capindex/roots.hpp"

namespace capindex {

enum class SurfaceKind { Cylinder, CriticalCatenoid, CmcTorusS3, GeodesicDisk };

inline std::string to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Cylinder: return "cylinder";
    case SurfaceKind::CriticalCatenoid: return "catenoid";
    case SurfaceKind::CmcTorusS3: return "torus";
    case SurfaceKind::GeodesicDisk: return "disk";
  }
  return "?";
}

/// Volume of the unit sphere S^{d} in R^{d+1}.
inline double unit_sphere_volume(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

struct SurfaceModel {
  SurfaceKind kind;
  int n = 2;          // hypersurface dimension
  double r = 0.0;     // cylinder radius
  double a = 0.0;     // torus radius (second radius b = sqrt(1-a^2))
  double b = 0.0;

  double half_length = 0.0;  // T, boundary surfaces only
  double sin_theta = 1.0;
  double cos_theta = 0.0;
  double q = 0.0;            // boundary coefficient of the index form
  double mean_curvature = 0.0;
  double conformal_c = 0.0;  // catenoid scale c = 1/(T cosh T)
  double p_const = 0.0;      // torus: constant potential p = n + |A|^2
  bool has_boundary = false;

  /// |A|^2 at parameter t (constant except for the catenoid).
  double second_form_sq(double t = 0.0) const {
    switch (kind) {
      case SurfaceKind::Cylinder: return (n - 1) / (r * r);
      case SurfaceKind::CriticalCatenoid: {
        const double ch = std::cosh(t);
        return 2.0 / (conformal_c * conformal_c * ch * ch * ch * ch);
      }
      case SurfaceKind::CmcTorusS3: return (b / a) * (b / a) + (a / b) * (a / b);
      case SurfaceKind::GeodesicDisk: return 0.0;
    }
    return 0.0;
  }

  /// |Å|^2 = |A|^2 - H^2/n at parameter t.
  double traceless_form_sq(double t = 0.0) const {
    const double h = mean_curvature;
    return second_form_sq(t) - h * h / n;
  }
};

inline SurfaceModel make_cylinder(int n, double r) {
  if (n < 2) throw ParamOutOfRange("cylinder: n must be >= 2");
  if (!(r > 0.0 && r < 1.0)) throw ParamOutOfRange("cylinder: r must lie in (0,1)");
  SurfaceModel s;
  s.kind = SurfaceKind::Cylinder;
  s.n = n;
  s.r = r;
  s.half_length = std::sqrt(1.0 - r * r);
  s.sin_theta = s.half_length;
  s.cos_theta = -r;
  s.q = 1.0 / s.half_length;
  s.mean_curvature = (n - 1) / r;
  s.has_boundary = true;
  return s;
}

inline SurfaceModel make_critical_catenoid() {
  SurfaceModel s;
  s.kind = SurfaceKind::CriticalCatenoid;
  s.n = 2;
  s.half_length = first_root(Equation::CatenoidBdry, 10.0);
  s.sin_theta = 1.0;
  s.cos_theta = 0.0;
  s.q = 1.0;
  s.mean_curvature = 0.0;
  s.conformal_c = 1.0 / (s.half_length * std::cosh(s.half_length));
  s.has_boundary = true;
  return s;
}

inline SurfaceModel make_cmc_torus_s3(double a) {
  if (!(a > 0.0 && a < 1.0)) throw ParamOutOfRange("torus: a must lie in (0,1)");
  SurfaceModel s;
  s.kind = SurfaceKind::CmcTorusS3;
  s.n = 2;
  s.a = a;
  s.b = std::sqrt(1.0 - a * a);
  s.mean_curvature = s.b / a - a / s.b;
  s.p_const = 2.0 + (s.b / a) * (s.b / a) + (a / s.b) * (a / s.b);
  s.has_boundary = false;
  return s;
}

inline SurfaceModel make_geodesic_disk() {
  SurfaceModel s;
  s.kind = SurfaceKind::GeodesicDisk;
  s.n = 2;
  s.sin_theta = 1.0;
  s.cos_theta = 0.0;
  s.q = 1.0;
  s.mean_curvature = 0.0;
  s.has_boundary = true;
  return s;
}

struct SurfaceParams {
  int n = 2;
  double r = 0.0;
  double a = 0.0;
};

inline SurfaceModel make_surface(SurfaceKind kind, const SurfaceParams& params = {}) {
  switch (kind) {
    case SurfaceKind::Cylinder: return make_cylinder(params.n, params.r);
    case SurfaceKind::CriticalCatenoid: return make_critical_catenoid();
    case SurfaceKind::CmcTorusS3: return make_cmc_torus_s3(params.a);
    case SurfaceKind::GeodesicDisk: return make_geodesic_disk();
  }
  throw ParamOutOfRange("make_surface: unknown kind");
}

// ---------------------------------------------------------------------------
// mode reduction

struct ModeProblem {
  double half_length = 0.0;                   // domain is [-T, T]
  std::function<double(double)> potential;    // V(t), includes the mode shift
  std::function<double(double)> weight;       // L^2 weight (== 1 after reduction)
  double robin_coeff = 0.0;                   // qhat in f'(+-T)(+-1) = qhat f(+-T)
  std::int64_t multiplicity = 1;
  int mode_id = 0;
};

/// Multiplicity of the degree-k spherical harmonics on S^{n-1}:
/// dim P_k(R^n) - dim P_{k-2}(R^n).
inline std::int64_t sphere_harmonic_multiplicity(int n, int k) {
  auto binom = [](std::int64_t top, std::int64_t kk) -> std::int64_t {
    if (kk < 0 || kk > top) return 0;
    std::int64_t v = 1;
    for (std::int64_t i = 1; i <= kk; ++i) v = v * (top - kk + i) / i;
    return v;
  };
  if (k == 0) return 1;
  if (k == 1) return n;
  return binom(n + k - 1, k) - binom(n + k - 3, k - 2);
}

inline std::vector<ModeProblem> reduce_to_modes(const SurfaceModel& surface, int k_max) {
  if (k_max < 0) throw ParamOutOfRange("reduce_to_modes: k_max must be >= 0");
  std::vector<ModeProblem> modes;
  const double T = surface.half_length;
  switch (surface.kind) {
    case SurfaceKind::Cylinder: {
      const int n = surface.n;
      const double r2 = surface.r * surface.r;
      for (int k = 0; k <= k_max; ++k) {
        const double alpha = static_cast<double>(k) * (k + n - 2);
        const double shift = (alpha - (n - 1)) / r2;
        ModeProblem m;
        m.half_length = T;
        m.potential = [shift](double) { return shift; };
        m.weight = [](double) { return 1.0; };
        m.robin_coeff = 1.0 / T;
        m.multiplicity = sphere_harmonic_multiplicity(n, k);
        m.mode_id = k;
        modes.push_back(std::move(m));
      }
      break;
    }
    case SurfaceKind::CriticalCatenoid: {
      for (int k = 0; k <= k_max; ++k) {
        ModeProblem m;
        m.half_length = T;
        const double msq = static_cast<double>(k) * k;
        m.potential = [msq](double t) {
          const double c = std::cosh(t);
          return msq - 2.0 / (c * c);
        };
        m.weight = [](double) { return 1.0; };
        m.robin_coeff = 1.0 / T;
        m.multiplicity = (k == 0) ? 1 : 2;
        m.mode_id = k;
        modes.push_back(std::move(m));
      }
      break;
    }
    default:
      throw NoBoundary("reduce_to_modes: surface does not reduce to [-T,T] modes");
  }
  return modes;
}

// ---------------------------------------------------------------------------
// flat-torus spectrum

struct TorusSpectrum {
  int below = 0;         // #{(j,k) : (j/a)^2 + (k/b)^2 < threshold}
  int at_threshold = 0;  // lattice points exactly on the threshold (kernel)
};

inline TorusSpectrum torus_spectrum(double a, double threshold, double kernel_tol = 1e-9) {
  if (!(a > 0.0 && a < 1.0)) throw ParamOutOfRange("torus_spectrum: a must lie in (0,1)");
  TorusSpectrum out;
  if (threshold <= 0.0 && kernel_tol <= 0.0) return out;
  const double bb = std::sqrt(1.0 - a * a);
  const double lim = std::max(threshold, 0.0);
  const int jmax = static_cast<int>(std::ceil(a * std::sqrt(lim))) + 1;
  const int kmax = static_cast<int>(std::ceil(bb * std::sqrt(lim))) + 1;
  const double band = kernel_tol * std::max(1.0, std::abs(threshold));
  for (int j = -jmax; j <= jmax; ++j) {
    for (int k = -kmax; k <= kmax; ++k) {
      const double ev = (j / a) * (j / a) + (k / bb) * (k / bb);
      if (ev < threshold - band) {
        ++out.below;
      } else if (ev <= threshold + band) {
        ++out.at_threshold;
      }
    }
  }
  return out;
}

inline int torus_spectrum_counts(double a, double threshold) {
  return torus_spectrum(a, threshold).below;
}

// ---------------------------------------------------------------------------
// geometric densities of the rotation-invariant (lowest) mode, used by the
// inhomogeneous solves and the integral certificates

/// dmu/dt of the symmetric mode: the measure of the t-slice.
inline std::function<double(double)> radial_area_density(const SurfaceModel& s) {
  switch (s.kind) {
    case SurfaceKind::Cylinder: {
      const double c = std::pow(s.r, s.n - 1) * unit_sphere_volume(s.n - 1);
      return [c](double) { return c; };
    }
    case SurfaceKind::CriticalCatenoid: {
      const double cc = s.conformal_c * s.conformal_c;
      return [cc](double t) {
        const double ch = std::cosh(t);
        return 2.0 * M_PI * cc * ch * ch;
      };
    }
    default:
      throw NoBoundary("radial_area_density: no [-T,T] reduction for this surface");
  }
}

/// Measure of one boundary component.
inline double boundary_component_measure(const SurfaceModel& s) {
  switch (s.kind) {
    case SurfaceKind::Cylinder:
      return std::pow(s.r, s.n - 1) * unit_sphere_volume(s.n - 1);
    case SurfaceKind::CriticalCatenoid:
      return 2.0 * M_PI * s.conformal_c * std::cosh(s.half_length);
    default:
      throw NoBoundary("boundary_component_measure: surface has no boundary modes");
  }
}

/// nabla_eta = eta_scale * d/dt at t = +-T.
inline double eta_scale(const SurfaceModel& s) {
  switch (s.kind) {
    case SurfaceKind::Cylinder: return 1.0;
    case SurfaceKind::CriticalCatenoid: return s.half_length;
    default: throw NoBoundary("eta_scale: surface has no boundary modes");
  }
}

/// Factor omega(t) with J = (1/omega)(d^2/dt^2 + ...) on the symmetric mode:
/// the interior right-hand side of Ju = f reduces to -u'' + V u = -omega f.
inline std::function<double(double)> conformal_factor(const SurfaceModel& s) {
  switch (s.kind) {
    case SurfaceKind::Cylinder:
      return [](double) { return 1.0; };
    case SurfaceKind::CriticalCatenoid: {
      const double cc = s.conformal_c * s.conformal_c;
      return [cc](double t) {
        const double ch = std::cosh(t);
        return cc * ch * ch;
      };
    }
    default:
      throw NoBoundary("conformal_factor: surface has no boundary modes");
  }
}

inline double surface_area(const SurfaceModel& s) {
  switch (s.kind) {
    case SurfaceKind::Cylinder:
      return 2.0 * s.half_length * std::pow(s.r, s.n - 1) * unit_sphere_volume(s.n - 1);
    case SurfaceKind::CriticalCatenoid:
      return 2.0 * M_PI / s.half_length;
    case SurfaceKind::CmcTorusS3:
      return 4.0 * M_PI * M_PI * s.a * s.b;
    case SurfaceKind::GeodesicDisk:
      return M_PI;
  }
  return 0.0;
}

}  // namespace capindex
