#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "capindex/roots.hpp"

using namespace capindex;

namespace {

// independent oracle: plain sign-change scan at a fixed step plus bisection
std::vector<double> scan_bisect(const std::function<double(double)>& f, double lo, double hi,
                                double step = 1e-3) {
  std::vector<double> out;
  double a = lo, fa = f(a);
  while (a < hi) {
    double b = std::min(a + step, hi);
    double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-14; ++it) {
        const double m = 0.5 * (x0 + x1), fm = f(m);
        if ((f0 < 0.0) != (fm < 0.0)) {
          x1 = m;
        } else {
          x0 = m;
          f0 = fm;
        }
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace

TEST_CASE("coth fixed point and catenoid boundary equation") {
  const double t0 = first_root(Equation::CothEq, 10.0);
  CHECK(t0 == Catch::Approx(1.1996786402577337).margin(1e-10));
  CHECK(enumerate_roots({Equation::CothEq, 10.0}).size() == 1);

  // cosh x = x sinh x is a different reformulation of the same equation; the
  // roots must agree to 1e-10
  const double tc = first_root(Equation::CatenoidBdry, 10.0);
  CHECK(std::abs(tc - t0) < 1e-10);
}

TEST_CASE("first cot and tan roots") {
  CHECK(first_root(Equation::CotEq, 10.0) == Catch::Approx(2.798386045783887).margin(1e-10));
  CHECK(first_root(Equation::TanEq, 10.0) == Catch::Approx(4.493409457909064).margin(1e-10));
  CHECK(enumerate_roots({Equation::TanEq, 1.0}).empty());
}

TEST_CASE("residual invariant and ordering") {
  for (Equation eq : {Equation::TanEq, Equation::CotEq, Equation::CothEq, Equation::FredholmCyl,
                      Equation::CatenoidBdry}) {
    const auto roots = enumerate_roots({eq, 30.0});
    double prev = 0.0;
    for (double x : roots) {
      CHECK(root_residual(eq, x) <= 1e-12);
      CHECK(x - prev >= 1e-8);
      prev = x;
    }
  }
}

TEST_CASE("fredholm equation roots against the scan oracle") {
  const auto lib = enumerate_roots({Equation::FredholmCyl, 20.0});
  const auto oracle =
      scan_bisect([](double x) { return std::cos(x) + x * std::sin(x); }, 1e-3, 20.0);
  REQUIRE(lib.size() == oracle.size());
  for (std::size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == Catch::Approx(oracle[i]).margin(1e-10));
  REQUIRE(lib.size() >= 2);
  CHECK(lib[0] == Catch::Approx(2.798386045784).margin(1e-9));
  CHECK(lib[1] == Catch::Approx(6.121250466898).margin(1e-9));
}

TEST_CASE("cot x = -x and cos x + x sin x = 0 have identical root lists") {
  const auto a = enumerate_roots({Equation::CotEq, 25.0});
  const auto b = enumerate_roots({Equation::FredholmCyl, 25.0});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Catch::Approx(b[i]).margin(1e-12));
}

TEST_CASE("one root per pi-window past the first") {
  for (Equation eq : {Equation::TanEq, Equation::CotEq}) {
    std::size_t prev = enumerate_roots({eq, M_PI}).size();
    for (int k = 2; k <= 10; ++k) {
      const std::size_t cur = enumerate_roots({eq, k * M_PI}).size();
      CHECK(cur == prev + 1);
      prev = cur;
    }
  }
}

TEST_CASE("range errors") {
  CHECK_THROWS_AS(enumerate_roots({Equation::TanEq, 0.0}), EmptyRange);
  CHECK_THROWS_AS(enumerate_roots({Equation::TanEq, -3.0}), EmptyRange);
  CHECK_THROWS_AS(first_root(Equation::TanEq, 1.0), NoRootInRange);
}
