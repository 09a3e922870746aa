#pragma once

// The built-in verification suite: one entry per acceptance criterion, each
// returning pass/fail plus a one-line detail.  Used by the `verify` CLI
// subcommand and by the acceptance test binary.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "capindex/capindex.hpp"

namespace capindex {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

namespace verify_detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// reference solutions of the catenoid offset problems on the radial mode;
// coefficients follow from the boundary condition via tanh T = 1/T and
// cosh^2 T + T^2 = T^2 cosh^2 T
struct CatenoidReference {
  double T, c, a1, b1, a2;
  double type_i(double t) const {
    return -a1 * std::cosh(t) * std::cosh(t) + b1 * (1.0 - t * std::tanh(t));
  }
  double type_ii(double t) const { return a2 * (1.0 - t * std::tanh(t)); }
};

inline CatenoidReference catenoid_reference(const SurfaceModel& cat) {
  CatenoidReference ref;
  ref.T = cat.half_length;
  ref.c = cat.conformal_c;
  ref.a1 = ref.c * ref.c / 4.0;
  const double sh = std::sinh(ref.T);
  ref.b1 = -ref.a1 * sh * sh;
  ref.a2 = -1.0 / (ref.T * ref.T);
  return ref;
}

inline Eigen::Matrix3d random_rotation(unsigned seed) {
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

}  // namespace verify_detail

inline std::vector<CriterionResult> run_acceptance(const ReportConfig& cfg = {}) {
  using namespace verify_detail;
  std::vector<CriterionResult> results;
  auto push = [&](const std::string& id, std::function<std::pair<bool, std::string>()> body) {
    CriterionResult r;
    r.id = id;
    try {
      auto [ok, detail] = body();
      r.pass = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  };
  CountOptions copt;
  copt.eps_count = cfg.eps_count;
  OffsetOptions oopt;
  oopt.grid_n = cfg.grid_n;
  oopt.eps_int_rel = cfg.eps_int_rel;

  // 1. catenoid MI(Q) = 4, stable at grid 128 and 256, under 5 s
  push("1-catenoid-mi", [&]() -> std::pair<bool, std::string> {
    const auto cat = make_critical_catenoid();
    const auto t0 = std::chrono::steady_clock::now();
    const int mi128 = morse_index_total(cat, 128, copt).mi_q;
    const int mi256 = morse_index_total(cat, 256, copt).mi_q;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = mi128 == 4 && mi256 == 4 && secs < 5.0;
    return {ok, "MI@128=" + std::to_string(mi128) + " MI@256=" + std::to_string(mi256) +
                    " time=" + fmt(secs) + "s"};
  });

  // 2. catenoid constrained indices 3/3 with matching certificates; type I+II
  //    pinned to 3 by the sandwich
  push("2-catenoid-constrained", [&]() -> std::pair<bool, std::string> {
    const auto cat = make_critical_catenoid();
    const auto ref = catenoid_reference(cat);
    const auto rep = build_index_report(cat, {ConstraintType::TypeI, ConstraintType::TypeII}, cfg);
    bool ok = rep.total.mi_q == 4;
    std::string note;
    double worst = 0.0;
    const auto rp = radial_problem(cat);
    for (const auto& [ct, off] : rep.offsets) {
      ok = ok && off.c == -1 && rep.total.mi_q + off.c == 3;
      const double f_val = (ct == ConstraintType::TypeII) ? 0.0 : -1.0;
      const double g_val = (ct == ConstraintType::TypeII) ? 1.0 : 0.0;
      const auto out = solve_inhomogeneous(rp, [f_val](double) { return f_val; }, g_val, 256);
      const auto* sol = std::get_if<RobinSolution>(&out);
      if (!sol) return {false, "offset solve unexpectedly obstructed"};
      double err = 0.0;
      for (std::size_t i = 0; i < sol->t_coarse.size(); ++i) {
        const double exact = (ct == ConstraintType::TypeII) ? ref.type_ii(sol->t_coarse[i])
                                                            : ref.type_i(sol->t_coarse[i]);
        err = std::max(err, std::abs(sol->u_extrap[i] - exact));
      }
      const double exact_b = (ct == ConstraintType::TypeII) ? ref.type_ii(ref.T) : ref.type_i(ref.T);
      err = std::max(err, std::abs(sol->value_plus - exact_b));
      worst = std::max(worst, err);
      ok = ok && err <= 1e-6;
    }
    ok = ok && rep.type_i_ii_interval && (*rep.type_i_ii_interval)[0] == 3 &&
         (*rep.type_i_ii_interval)[1] == 3;
    note = "typeI=typeII=3 cert_err=" + fmt(worst) + " interval=[" +
           std::to_string(rep.type_i_ii_interval ? (*rep.type_i_ii_interval)[0] : -1) + "," +
           std::to_string(rep.type_i_ii_interval ? (*rep.type_i_ii_interval)[1] : -1) + "]";
    return {ok, note};
  });

  // 3. transcendental anchors
  push("3-root-anchors", [&]() -> std::pair<bool, std::string> {
    const double t0 = coth_fixed_point();
    const double t1 = first_cot_root();
    const double tc = first_root(Equation::CatenoidBdry, 10.0);
    const bool ok = std::abs(t0 - 1.19968) <= 1e-4 && std::abs(t1 - 2.79838) <= 1e-4 &&
                    std::abs(tc - t0) <= 1e-10;
    return {ok, "T0=" + fmt(t0) + " T1=" + fmt(t1) + " |catenoid-coth|=" + fmt(std::abs(tc - t0))};
  });

  // 4. cylinder window (n = 2)
  push("4-cylinder-window", [&]() -> std::pair<bool, std::string> {
    const double t0 = coth_fixed_point(), t1 = first_cot_root();
    const double lo = std::sqrt(1.0 / (1.0 + t1 * t1));
    const double hi = std::sqrt(1.0 / (1.0 + t0 * t0 / 3.0));
    const double mid = 0.5 * (lo + hi);
    const int mi_an = cylinder_index_analytic(2, mid);
    const int mi_fd = morse_index_total(make_cylinder(2, mid), cfg.grid_n, copt).mi_q;
    bool ok = mi_an == 4 && mi_fd == 4;
    int sweep_min = 1 << 20;
    for (int i = 0; i < 19; ++i) {
      const double r = 0.05 + 0.90 * i / 18.0;
      sweep_min = std::min(sweep_min, cylinder_index_analytic(2, r));
    }
    ok = ok && sweep_min >= 4;
    const int mi005 = cylinder_index_analytic(2, 0.05);
    const int mi095 = cylinder_index_analytic(2, 0.95);
    ok = ok && mi005 >= 10 && mi095 >= 10;
    return {ok, "MI(mid)=" + std::to_string(mi_an) + "/" + std::to_string(mi_fd) +
                    " sweep_min=" + std::to_string(sweep_min) + " MI(0.05)=" + std::to_string(mi005) +
                    " MI(0.95)=" + std::to_string(mi095) + " (>=10 required at both)"};
  });

  // 5. inertia counts equal the dense oracle; weight doubling changes nothing
  push("5-oracle-equivalence", [&]() -> std::pair<bool, std::string> {
    int checked = 0;
    auto check_mode = [&](const ModeProblem& m) {
      for (int N : {128, 256}) {
        const auto cnt = count_negative_robin(m, N, copt);
        const double band = counting_band(m, N, copt);
        for (auto weight : {std::function<double(double)>{},
                            std::function<double(double)>{[](double) { return 2.0; }}}) {
          const auto ev = dense_oracle(m, N, weight);
          int neg = 0;
          for (double e : ev)
            if (e < -band) ++neg;
          if (neg != cnt.count) return false;
        }
        ++checked;
      }
      return true;
    };
    for (int n : {2, 3}) {
      const std::vector<double> radii =
          (n == 2) ? std::vector<double>{0.3, 0.45, 0.6, 0.75, 0.9}
                   : std::vector<double>{0.35, 0.5, 0.6, 0.75, 0.9};
      for (double r : radii) {
        const auto cyl = make_cylinder(n, r);
        for (const auto& m : reduce_to_modes(cyl, mode_truncation_bound(cyl)))
          if (!check_mode(m)) return {false, "mismatch: cylinder n=" + std::to_string(n) +
                                                 " r=" + fmt(r) + " k=" + std::to_string(m.mode_id)};
      }
    }
    const auto cat = make_critical_catenoid();
    for (const auto& m : reduce_to_modes(cat, 3))
      if (!check_mode(m)) return {false, "mismatch: catenoid m=" + std::to_string(m.mode_id)};
    return {true, std::to_string(checked) + " mode/grid/weight checks agree"};
  });

  // 6. decomposition identity, per-mode and summed
  push("6-decomposition", [&]() -> std::pair<bool, std::string> {
    const double t0 = coth_fixed_point(), t1 = first_cot_root();
    const double mid = 0.5 * (std::sqrt(1.0 / (1.0 + t1 * t1)) + std::sqrt(1.0 / (1.0 + t0 * t0 / 3.0)));
    int per_mode_checked = 0;
    auto check_surface = [&](const SurfaceModel& s) {
      for (const auto& m : reduce_to_modes(s, mode_truncation_bound(s))) {
        const auto sc = count_mode_spectrum(m, cfg.grid_n, copt);
        if (sc.kernel_flag) continue;
        if (sc.negative_robin != sc.nonpositive_dirichlet + sc.steklov_below_one) return false;
        ++per_mode_checked;
      }
      return true;
    };
    const auto cat = make_critical_catenoid();
    const auto cylmid = make_cylinder(2, mid);
    bool ok = check_surface(cat) && check_surface(cylmid);
    for (double r : {0.3, 0.45, 0.6, 0.75, 0.9}) ok = ok && check_surface(make_cylinder(2, r));
    const auto dcat = decomposition_abc(cat, ConstraintType::TypeI, oopt);
    const auto dcyl = decomposition_abc(cylmid, ConstraintType::TypeI, oopt);
    ok = ok && dcat.a + dcat.b == 4 && dcat.mi_q == 4 && dcyl.a + dcyl.b == 4 && dcyl.mi_q == 4;
    return {ok, "per-mode checks=" + std::to_string(per_mode_checked) + " catenoid a+b=" +
                    std::to_string(dcat.a + dcat.b) + " cylinder(mid) a+b=" + std::to_string(dcyl.a + dcyl.b)};
  });

  // 7. Fredholm obstruction at the tuned radius
  push("7-fredholm", [&]() -> std::pair<bool, std::string> {
    const double t1 = first_cot_root();  // x = T sqrt(n-1)/r hits cos x + x sin x = 0
    const double r0 = std::sqrt(1.0 / (1.0 + t1 * t1));
    const auto rp = radial_problem(make_cylinder(2, r0));
    const auto out = solve_inhomogeneous(rp, [](double) { return -1.0; }, 0.0, cfg.grid_n);
    const auto* ob = std::get_if<FredholmObstruction>(&out);
    if (!ob) return {false, "no obstruction detected at r0=" + fmt(r0)};
    double comp = 0.0;
    for (double c : ob->compatibility) comp = std::max(comp, std::abs(c));
    const auto cls = cylinder_typeI_closed_form(2, r0);
    const bool ok = comp >= 1e-6 && cls.cls == TypeIClass::Unchanged && cls.fredholm;
    return {ok, "|compat|=" + fmt(comp) + " classification=" + to_string(cls.cls)};
  });

  // 8. closed form vs numerics on a 50-point sweep (1e-3 exclusion band
  //    around the singular set)
  push("8-closed-form-sweep", [&]() -> std::pair<bool, std::string> {
    const auto singular = enumerate_roots(RootSpec{Equation::FredholmCyl, 140.0});
    auto near_singular = [&](double r) {
      for (double x : singular) {
        const double rs = std::sqrt(1.0 / (1.0 + x * x));
        if (std::abs(r - rs) < 1e-3) return true;
      }
      return false;
    };
    int compared = 0;
    for (int i = 0; i < 50; ++i) {
      const double r = 0.01 + 0.98 * i / 49.0;
      if (near_singular(r)) continue;
      const auto cls = cylinder_typeI_closed_form(2, r);
      const auto off = criticality_offset(make_cylinder(2, r), ConstraintType::TypeI, oopt);
      const bool reduced_numeric = (off.c == -1);
      const bool reduced_closed = (cls.cls == TypeIClass::Reduced);
      if (reduced_numeric != reduced_closed)
        return {false, "disagreement at r=" + fmt(r) + " closed=" + to_string(cls.cls) +
                           " numeric c=" + std::to_string(off.c)};
      ++compared;
    }
    return {true, std::to_string(compared) + " sweep points agree"};
  });

  // 9. Upsilon checks
  push("9-upsilon", [&]() -> std::pair<bool, std::string> {
    UpsilonOptions uopt;
    uopt.eps_rel = cfg.eps_upsilon;
    const auto cyl = make_cylinder(2, 0.6);
    const auto u = compute_upsilon(cyl, cfg.quad_n, uopt);
    const double scale = 1.0 + u.entries.cwiseAbs().maxCoeff();
    double offdiag = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(u.entries(i, j)));
    // closed forms of the diagonal entries
    const double T = cyl.half_length, r = cyl.r;
    const double vol = unit_sphere_volume(1);
    const double u11 = 1.0 / (r * r) * r * vol * (2.0 * T * T * T / 3.0);
    const double ujj = 1.0 / (2.0 * r * r) * r * (vol / 2.0) *
                       (2.0 * T * T * T / 3.0 + 2.0 * T * (1.0 - r * r));
    bool ok = offdiag <= 1e-8 * scale;
    ok = ok && u.entries(0, 0) > 0 && std::abs(u.entries(0, 0) - u11) <= 1e-8 * scale;
    for (int j = 1; j < 3; ++j)
      ok = ok && u.entries(j, j) > 0 && std::abs(u.entries(j, j) - ujj) <= 1e-8 * scale;
    const double res_cyl = trace_identity_residual(cyl, cfg.quad_n, uopt);
    const auto cat = make_critical_catenoid();
    const double res_cat = trace_identity_residual(cat, cfg.quad_n, uopt);
    ok = ok && res_cyl <= 1e-8 && res_cat <= 1e-8;
    const auto lb = index_lower_bound(cyl, u);
    ok = ok && u.ell == 3 && lb.bound == 3 && lb.label == UpsilonCase::Generic;
    for (unsigned seed : {11u, 12u, 13u}) {
      const Eigen::Matrix3d R = random_rotation(seed);
      const auto ur = compute_upsilon(cyl, cfg.quad_n, uopt, R);
      const auto uc = compute_upsilon(cat, cfg.quad_n, uopt, R);
      ok = ok && ur.ell == u.ell && uc.ell == 3;
    }
    return {ok, "offdiag=" + fmt(offdiag / scale) + " trace_res=" + fmt(res_cyl) + "/" +
                    fmt(res_cat) + " ell=" + std::to_string(u.ell) + " bound=" +
                    std::to_string(lb.bound)};
  });

  // 10. closed CMC torus
  push("10-torus", [&]() -> std::pair<bool, std::string> {
    const auto tor = make_cmc_torus_s3(1.0 / std::sqrt(2.0));
    const auto total = morse_index_total(tor, cfg.grid_n, copt);
    const int weak = total.mi_q + criticality_offset(tor, ConstraintType::ClosedWeak, oopt).c;
    bool ok = total.mi_q == 5 && weak == 4;
    for (double a : {0.3, 0.45, 1.0 / std::sqrt(2.0), 0.65, 0.8}) {
      const auto t = make_cmc_torus_s3(a);
      const auto tt = morse_index_total(t, cfg.grid_n, copt);
      const int w = tt.mi_q + criticality_offset(t, ConstraintType::ClosedWeak, oopt).c;
      ok = ok && (w == tt.mi_q - 1);
    }
    return {ok, "MI=" + std::to_string(total.mi_q) + " weak=" + std::to_string(weak) +
                    " (weak = MI-1 at 5 radii)"};
  });

  // 11. sharp endpoint: type I = n+1 = 3 inside the window off the singular
  //     set, and the type I+II interval collapses
  push("11-sharp-endpoint", [&]() -> std::pair<bool, std::string> {
    const double t0 = coth_fixed_point(), t1 = first_cot_root();
    const double mid = 0.5 * (std::sqrt(1.0 / (1.0 + t1 * t1)) + std::sqrt(1.0 / (1.0 + t0 * t0 / 3.0)));
    const auto cls = cylinder_typeI_closed_form(2, mid);
    const double x = cls.x;
    const double denom = std::cos(x) + x * std::sin(x);
    if (cls.fredholm || !(x > std::sin(x) / denom))
      return {false, "midpoint fails the hypothesis x > sin x/(x sin x + cos x)"};
    const auto rep = build_index_report(make_cylinder(2, mid), {ConstraintType::TypeI}, cfg);
    const int type_i = rep.total.mi_q + rep.offsets.front().second.c;
    const bool ok = type_i == 3 && rep.type_i_ii_interval &&
                    (*rep.type_i_ii_interval)[0] == 3 && (*rep.type_i_ii_interval)[1] == 3;
    return {ok, "typeI=" + std::to_string(type_i) + " interval=[" +
                    std::to_string((*rep.type_i_ii_interval)[0]) + "," +
                    std::to_string((*rep.type_i_ii_interval)[1]) + "]"};
  });

  return results;
}

}  // namespace capindex
