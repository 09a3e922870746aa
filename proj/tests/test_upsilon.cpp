#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "capindex/upsilon.hpp"

using namespace capindex;

namespace {

Eigen::Matrix3d rotation(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

// closed forms of the cylinder diagonal entries
double cyl_u11(int n, double r) {
  const double T = std::sqrt(1.0 - r * r);
  return (n - 1.0) / (r * r) * std::pow(r, n - 1) * unit_sphere_volume(n - 1) * (2.0 * T * T * T / 3.0);
}
double cyl_ujj(int n, double r) {
  const double T = std::sqrt(1.0 - r * r);
  return (n - 1.0) * (n - 1.0) / (2.0 * r * r) * std::pow(r, n - 1) * unit_sphere_volume(n - 1) / n *
         (2.0 * T * T * T / 3.0 + 2.0 * T * (1.0 - r * r));
}

}  // namespace

TEST_CASE("cylinder upsilon: diagonal closed forms, zero off-diagonals") {
  for (auto [n, r] : {std::pair{2, 0.6}, std::pair{3, 0.5}, std::pair{4, 0.7}}) {
    const auto s = make_cylinder(n, r);
    const auto u = compute_upsilon(s, 64);
    const double scale = 1.0 + u.entries.cwiseAbs().maxCoeff();
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        if (i != j) CHECK(std::abs(u.entries(i, j)) <= 1e-12 * scale);
    CHECK(u.entries(0, 0) == Catch::Approx(cyl_u11(n, r)).epsilon(1e-10));
    for (int j = 1; j <= n; ++j) CHECK(u.entries(j, j) == Catch::Approx(cyl_ujj(n, r)).epsilon(1e-10));
    CHECK(u.ell == n + 1);
    CHECK(u.asymmetry_residual <= 1e-12);
  }
  // frozen spot value: n=2, r=0.6 has all three diagonals equal
  const auto u = compute_upsilon(make_cylinder(2, 0.6), 64);
  for (int i = 0; i < 3; ++i)
    CHECK(u.entries(i, i) == Catch::Approx(3.57443430808439).epsilon(1e-10));
}

TEST_CASE("generic quadrature path agrees with the moment path") {
  UpsilonOptions generic;
  generic.force_generic_path = true;
  const auto s = make_cylinder(2, 0.6);
  const auto um = compute_upsilon(s, 64);
  const auto ug = compute_upsilon(s, 64, generic);
  CHECK((um.entries - ug.entries).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + um.entries.cwiseAbs().maxCoeff()));
}

TEST_CASE("catenoid upsilon") {
  const auto s = make_critical_catenoid();
  const auto u = compute_upsilon(s, 64);
  CHECK(u.entries(0, 0) == Catch::Approx(12.7869192948714).epsilon(1e-10));
  CHECK(u.entries(1, 1) == Catch::Approx(12.7869192948714).epsilon(1e-10));
  CHECK(u.entries(2, 2) == Catch::Approx(6.08910536481569).epsilon(1e-10));
  CHECK(u.asymmetry_residual <= 1e-10);
  CHECK(u.ell == 3);
  const auto lb = index_lower_bound(s, u);
  CHECK(lb.label == UpsilonCase::Generic);
  CHECK(lb.bound == 3);
}

TEST_CASE("cylinder lower bound is n + 1") {
  for (auto [n, r] : {std::pair{2, 0.6}, std::pair{3, 0.4}}) {
    const auto s = make_cylinder(n, r);
    const auto u = compute_upsilon(s, 64);
    const auto lb = index_lower_bound(s, u, n == 2 ? 64 : 48);
    CHECK(lb.label == UpsilonCase::Generic);
    CHECK(lb.bound == n + 1);
  }
}

TEST_CASE("trace identity") {
  CHECK(trace_identity_residual(make_cylinder(2, 0.6), 64) <= 1e-10);
  CHECK(trace_identity_residual(make_cylinder(2, 0.3), 64) <= 1e-10);
  CHECK(trace_identity_residual(make_critical_catenoid(), 64) <= 1e-10);
  // umbilical: both sides vanish
  CHECK(trace_identity_residual(make_geodesic_disk(), 64) <= 1e-14);
}

TEST_CASE("boundary value of Phi vanishes") {
  CHECK(boundary_phi_residual(make_cylinder(2, 0.6)) <= 1e-10);
  CHECK(boundary_phi_residual(make_cylinder(3, 0.5)) <= 1e-10);
  CHECK(boundary_phi_residual(make_critical_catenoid()) <= 1e-10);
  CHECK_THROWS_AS(boundary_phi_residual(make_cmc_torus_s3(0.5)), NoBoundary);
}

TEST_CASE("boundary flux balance vanishes") {
  CHECK(boundary_flux_residual(make_cylinder(2, 0.6)) <= 1e-12);
  CHECK(boundary_flux_residual(make_cylinder(3, 0.5)) <= 1e-12);
  CHECK(boundary_flux_residual(make_cylinder(4, 0.8)) <= 1e-12);
  CHECK(boundary_flux_residual(make_critical_catenoid()) <= 1e-12);
  CHECK(boundary_flux_residual(make_geodesic_disk()) <= 1e-12);
  CHECK_THROWS_AS(boundary_flux_residual(make_cmc_torus_s3(0.5)), NoBoundary);
}

TEST_CASE("umbilical disk") {
  const auto s = make_geodesic_disk();
  const auto u = compute_upsilon(s, 64);
  CHECK(u.entries.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(u.ell == 3);  // all zero eigenvalues count as nonnegative
  const auto lb = index_lower_bound(s, u);
  CHECK(lb.label == UpsilonCase::Umbilical);
  CHECK(lb.bound == 0);  // bound suppressed: the stability case of the trichotomy
}

TEST_CASE("ell is invariant under frame rotations") {
  const auto cyl = make_cylinder(2, 0.6);
  const auto cat = make_critical_catenoid();
  const auto u_cyl = compute_upsilon(cyl, 64);
  const auto u_cat = compute_upsilon(cat, 64);
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::Matrix3d R = rotation(seed);
    const auto ur = compute_upsilon(cyl, 64, {}, R);
    CHECK(ur.ell == u_cyl.ell);
    // quadrature in the rotated frame equals the algebraic conjugation
    const Eigen::Matrix3d want = R.transpose() * u_cyl.entries * R;
    CHECK((ur.entries - want).cwiseAbs().maxCoeff() <=
          1e-8 * (1.0 + want.cwiseAbs().maxCoeff()));
    const auto uc = compute_upsilon(cat, 64, {}, R);
    CHECK(uc.ell == u_cat.ell);
  }
}

TEST_CASE("hyper-planar test rejects the model surfaces") {
  CHECK(hyperplanar_singular_ratio(make_cylinder(2, 0.6), 48) > 1e-3);
  CHECK(hyperplanar_singular_ratio(make_critical_catenoid(), 48) > 1e-3);
  // linear variant is also exposed and also full-rank here
  CHECK(hyperplanar_singular_ratio(make_critical_catenoid(), 48, false) > 1e-3);
}

TEST_CASE("minimal inequality on the catenoid") {
  const auto s = make_critical_catenoid();
  const auto axis = minimal_inequality_check(s, Eigen::Vector3d(0, 0, 1));
  CHECK(axis.rhs == Catch::Approx(0.0).margin(1e-14));  // cos(theta) = 0
  CHECK(axis.holds);
  CHECK(axis.lhs > 0.0);
  const auto side = minimal_inequality_check(s, Eigen::Vector3d(1, 0, 0));
  CHECK(side.holds);
  // H = 0 specialization: lambda_i equals the Upsilon diagonal
  const auto u = compute_upsilon(s, 64);
  for (int i = 0; i < 3; ++i)
    CHECK(side.lambda[i] == Catch::Approx(u.entries(i, i)).epsilon(1e-8));
  CHECK_THROWS_AS(minimal_inequality_check(make_cylinder(2, 0.6), Eigen::Vector3d(1, 0, 0)),
                  NotMinimal);
}

TEST_CASE("quadrature guards") {
  CHECK_THROWS_AS(compute_upsilon(make_critical_catenoid(), 8), QuadTooCoarse);
  CHECK_THROWS_AS(compute_upsilon(make_cmc_torus_s3(0.5), 64), ParamOutOfRange);
  // refinement stability at the default order
  const auto a = compute_upsilon(make_critical_catenoid(), 32);
  const auto b = compute_upsilon(make_critical_catenoid(), 64);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() <=
        1e-9 * (1.0 + b.entries.cwiseAbs().maxCoeff()));
}
