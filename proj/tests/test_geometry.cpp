#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "capindex/surface.hpp"

using namespace capindex;

namespace {

// independent multiplicity oracle: dimensions of homogeneous polynomial
// spaces by explicit recursive enumeration of exponent multi-indices
long long monomial_count(int vars, int degree) {
  if (degree < 0) return 0;
  if (vars == 1) return 1;
  long long total = 0;
  for (int d = 0; d <= degree; ++d) total += monomial_count(vars - 1, degree - d);
  return total;
}

// independent torus lattice oracle with an explicit scan bound
int lattice_below(double a, double threshold, int extra) {
  const double b = std::sqrt(1.0 - a * a);
  const int jm = static_cast<int>(std::ceil(a * std::sqrt(std::max(threshold, 0.0)))) + 1 + extra;
  const int km = static_cast<int>(std::ceil(b * std::sqrt(std::max(threshold, 0.0)))) + 1 + extra;
  int count = 0;
  for (int j = -jm; j <= jm; ++j)
    for (int k = -km; k <= km; ++k)
      if ((j / a) * (j / a) + (k / b) * (k / b) < threshold - 1e-9 * std::max(1.0, threshold))
        ++count;
  return count;
}

}  // namespace

TEST_CASE("cylinder invariants") {
  const auto s = make_cylinder(2, 0.6);
  CHECK(s.half_length == Catch::Approx(0.8).margin(1e-15));
  CHECK(s.q == Catch::Approx(1.25).margin(1e-14));
  CHECK(s.mean_curvature == Catch::Approx(1.0 / 0.6).margin(1e-14));
  for (int n : {2, 3, 4, 5}) {
    for (double r : {0.1, 0.35, 0.6, 0.85}) {
      const auto c = make_cylinder(n, r);
      CHECK(c.sin_theta * c.sin_theta + c.cos_theta * c.cos_theta == Catch::Approx(1.0).margin(1e-15));
      const double want = c.second_form_sq() - c.mean_curvature * c.mean_curvature / n;
      CHECK(c.traceless_form_sq() == Catch::Approx(want).margin(1e-13 * (1.0 + std::abs(want))));
      CHECK(c.traceless_form_sq() ==
            Catch::Approx((n - 1.0) / (n * r * r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("catenoid invariants") {
  const auto s = make_critical_catenoid();
  const double T = s.half_length;
  CHECK(std::abs(std::cosh(T) - T * std::sinh(T)) <= 1e-12);
  CHECK(std::abs(s.conformal_c * T * std::cosh(T) - 1.0) <= 1e-12);
  CHECK(T == Catch::Approx(1.19968).margin(1e-4));
  CHECK(s.q == 1.0);
  CHECK(s.mean_curvature == 0.0);
  CHECK(surface_area(s) == Catch::Approx(2.0 * M_PI / T).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_cylinder(2, 1.2), ParamOutOfRange);
  CHECK_THROWS_AS(make_cylinder(2, 0.0), ParamOutOfRange);
  CHECK_THROWS_AS(make_cylinder(1, 0.5), ParamOutOfRange);
  CHECK_THROWS_AS(make_cmc_torus_s3(1.0), ParamOutOfRange);
  CHECK_THROWS_AS(make_cmc_torus_s3(-0.2), ParamOutOfRange);
  CHECK_THROWS_AS(make_surface(SurfaceKind::Cylinder, {.n = 2, .r = 1.5}), ParamOutOfRange);
}

TEST_CASE("spherical harmonic multiplicities against the polynomial oracle") {
  for (int n = 2; n <= 5; ++n) {
    for (int k = 0; k <= 6; ++k) {
      const long long dim_k = monomial_count(n, k);
      const long long dim_km2 = k >= 2 ? monomial_count(n, k - 2) : 0;
      CHECK(sphere_harmonic_multiplicity(n, k) == dim_k - dim_km2);
    }
  }
  CHECK(sphere_harmonic_multiplicity(2, 1) == 2);
  CHECK(sphere_harmonic_multiplicity(3, 2) == 5);
}

TEST_CASE("cylinder mode reduction") {
  const auto s = make_cylinder(2, 0.6);
  const auto modes = reduce_to_modes(s, 3);
  REQUIRE(modes.size() == 4);
  // k = 1: alpha = n-1 cancels the shift
  CHECK(modes[1].potential(0.3) == Catch::Approx(0.0).margin(1e-14));
  CHECK(modes[1].multiplicity == 2);
  CHECK(modes[1].robin_coeff == Catch::Approx(1.25).margin(1e-14));
  // k = 2, n = 3: V = (k(k+n-2) - (n-1))/r^2
  const auto s3 = make_cylinder(3, 0.5);
  const auto m3 = reduce_to_modes(s3, 2);
  CHECK(m3[2].potential(0.1) == Catch::Approx((2.0 * 3.0 - 2.0) / 0.25).margin(1e-12));
  CHECK(m3[2].multiplicity == 5);
}

TEST_CASE("catenoid mode reduction") {
  const auto s = make_critical_catenoid();
  const auto modes = reduce_to_modes(s, 2);
  const double T = s.half_length;
  CHECK(modes[0].potential(0.0) == Catch::Approx(-2.0).margin(1e-14));
  CHECK(modes[0].potential(0.7) ==
        Catch::Approx(-2.0 / (std::cosh(0.7) * std::cosh(0.7))).margin(1e-14));
  CHECK(modes[0].robin_coeff == Catch::Approx(1.0 / T).margin(1e-14));
  CHECK(modes[0].multiplicity == 1);
  CHECK(modes[1].multiplicity == 2);
  CHECK(modes[1].potential(0.0) == Catch::Approx(-1.0).margin(1e-14));
  CHECK(modes[0].weight(0.4) == 1.0);
}

TEST_CASE("mode reduction is a pure function of the mode id") {
  const auto s = make_cylinder(3, 0.45);
  const auto a = reduce_to_modes(s, 3);
  const auto b = reduce_to_modes(s, 4);
  REQUIRE(b.size() == a.size() + 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].multiplicity == b[i].multiplicity);
    for (double t : {-0.5, 0.0, 0.31}) CHECK(a[i].potential(t) == b[i].potential(t));
  }
}

TEST_CASE("torus and disk do not reduce to interval modes") {
  CHECK_THROWS_AS(reduce_to_modes(make_cmc_torus_s3(0.5), 2), NoBoundary);
  CHECK_THROWS_AS(reduce_to_modes(make_geodesic_disk(), 2), NoBoundary);
}

TEST_CASE("torus spectrum counts") {
  const double a = 1.0 / std::sqrt(2.0);
  CHECK(torus_spectrum_counts(a, 4.0) == 5);
  CHECK(torus_spectrum_counts(a, 0.0) == 0);

  // p = 1/(a b)^2 exactly; the (+-1, +-1) lattice points always sit on it
  for (double aa : {0.3, 0.45, a, 0.6, 0.65, 0.8}) {
    const auto s = make_cmc_torus_s3(aa);
    CHECK(s.p_const ==
          Catch::Approx(1.0 / (aa * aa * (1.0 - aa * aa))).epsilon(1e-12));
    const auto spec = torus_spectrum(aa, s.p_const);
    CHECK(spec.at_threshold == 4);
    // lattice oracle cross-checked at two scan bounds
    CHECK(spec.below == lattice_below(aa, s.p_const, 0));
    CHECK(spec.below == lattice_below(aa, s.p_const, 3));
  }
  CHECK(torus_spectrum(0.6, make_cmc_torus_s3(0.6).p_const).below == 5);
  CHECK_THROWS_AS(torus_spectrum(1.2, 4.0), ParamOutOfRange);
}

TEST_CASE("radial densities") {
  const auto cat = make_critical_catenoid();
  const auto rho = radial_area_density(cat);
  const double T = cat.half_length, c = cat.conformal_c;
  CHECK(rho(0.3) == Catch::Approx(2.0 * M_PI * c * c * std::cosh(0.3) * std::cosh(0.3)).epsilon(1e-13));
  CHECK(boundary_component_measure(cat) == Catch::Approx(2.0 * M_PI / T).epsilon(1e-12));
  CHECK(eta_scale(cat) == Catch::Approx(T));
  const auto cyl = make_cylinder(3, 0.5);
  CHECK(radial_area_density(cyl)(0.1) == Catch::Approx(0.25 * unit_sphere_volume(2)).epsilon(1e-13));
  CHECK(eta_scale(cyl) == 1.0);
  CHECK(conformal_factor(cyl)(0.2) == 1.0);
  CHECK_THROWS_AS(radial_area_density(make_cmc_torus_s3(0.5)), NoBoundary);
}
