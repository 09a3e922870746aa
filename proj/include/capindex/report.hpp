#pragma once

// Report assembly and serialization.  Reports are deterministic: fixed field
// order, floats rounded to 12 significant digits before encoding, integer
// indices encoded as integers.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "capindex/constraint.hpp"
#include "capindex/spectral.hpp"
#include "capindex/surface.hpp"
#include "capindex/upsilon.hpp"

namespace capindex {

inline double round12(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format12(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct ReportConfig {
  int grid_n = 256;
  int quad_n = 128;
  int k_max = -1;  // override; negative -> certified truncation bound
  double eps_count = 1e-9;
  double eps_int_rel = 1e-8;
  double eps_upsilon = 1e-9;
};

struct IndexReport {
  SurfaceModel surface;
  ReportConfig config;
  IndexTotal total;
  std::vector<std::pair<ConstraintType, OffsetResult>> offsets;
  std::optional<Decomposition> decomposition;         // boundary surfaces
  std::optional<TypeIClassification> classification;  // cylinder
  std::optional<UpsilonMatrix> upsilon;               // surfaces in the ball
  std::optional<IndexLowerBound> upsilon_bound;
  std::optional<std::array<int, 2>> type_i_ii_interval;
};

namespace detail {

inline OffsetOptions offset_options(const ReportConfig& cfg) {
  OffsetOptions o;
  o.grid_n = cfg.grid_n;
  o.eps_int_rel = cfg.eps_int_rel;
  return o;
}

}  // namespace detail

inline IndexReport build_index_report(const SurfaceModel& surface,
                                      const std::vector<ConstraintType>& constraints,
                                      const ReportConfig& cfg = {}) {
  IndexReport rep;
  rep.surface = surface;
  rep.config = cfg;
  CountOptions copt;
  copt.eps_count = cfg.eps_count;
  rep.total = morse_index_total(surface, cfg.grid_n, copt, cfg.k_max);
  const auto oopt = detail::offset_options(cfg);
  for (ConstraintType c : constraints)
    rep.offsets.emplace_back(c, criticality_offset(surface, c, oopt));

  if (surface.kind == SurfaceKind::Cylinder || surface.kind == SurfaceKind::CriticalCatenoid) {
    Decomposition d;
    // a, b from the mode sums; the offset slot is filled per constraint
    const auto modes = reduce_to_modes(surface, cfg.k_max >= 0 ? cfg.k_max : mode_truncation_bound(surface));
    long long a = 0, b = 0, mi = 0;
    bool flag = false;
    for (const auto& m : modes) {
      const auto s = count_mode_spectrum(m, cfg.grid_n, copt);
      a += m.multiplicity * s.nonpositive_dirichlet;
      b += m.multiplicity * s.steklov_below_one;
      mi += m.multiplicity * s.negative_robin;
      flag = flag || s.kernel_flag;
    }
    d.a = static_cast<int>(a);
    d.b = static_cast<int>(b);
    d.mi_q = static_cast<int>(mi);
    d.kernel_flag = flag;
    if (d.a + d.b != d.mi_q)
      throw DecompositionMismatch("index report: a + b != MI(Q)");
    rep.decomposition = d;

    UpsilonOptions uopt;
    uopt.eps_rel = cfg.eps_upsilon;
    rep.upsilon = compute_upsilon(surface, cfg.quad_n, uopt);
    rep.upsilon_bound = index_lower_bound(surface, *rep.upsilon);

    int upper = -1;
    for (const auto& [c, off] : rep.offsets) {
      if (c != ConstraintType::TypeI && c != ConstraintType::TypeII) continue;
      const int total = rep.total.mi_q + off.c;
      upper = upper < 0 ? total : std::min(upper, total);
    }
    if (upper >= 0) rep.type_i_ii_interval = std::array<int, 2>{rep.upsilon_bound->bound, upper};
  }
  if (surface.kind == SurfaceKind::Cylinder)
    rep.classification = cylinder_typeI_closed_form(surface.n, surface.r);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON encoding

inline nlohmann::ordered_json certificate_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["residual"] = round12(c.residual);
  j["boundary_values"] = {round12(c.value_minus), round12(c.value_plus)};
  j["integral"] = round12(c.integral);
  j["boundary_integral"] = round12(c.boundary_integral);
  j["sigma_min"] = round12(c.sigma_min);
  j["max_abs_compatibility"] = round12(c.max_abs_compatibility);
  j["used_min_norm"] = c.used_min_norm;
  j["integral_in_band"] = c.integral_in_band;
  j["grid_sizes"] = {c.grid_sizes[0], c.grid_sizes[1]};
  return j;
}

inline nlohmann::ordered_json report_json(const IndexReport& rep) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  {
    nlohmann::ordered_json s;
    s["kind"] = to_string(rep.surface.kind);
    s["n"] = rep.surface.n;
    if (rep.surface.kind == SurfaceKind::Cylinder) s["r"] = round12(rep.surface.r);
    if (rep.surface.kind == SurfaceKind::CmcTorusS3) {
      s["a"] = round12(rep.surface.a);
      s["b"] = round12(rep.surface.b);
      s["p"] = round12(rep.surface.p_const);
    }
    if (rep.surface.has_boundary) {
      s["half_length"] = round12(rep.surface.half_length);
      s["q"] = round12(rep.surface.q);
    }
    s["mean_curvature"] = round12(rep.surface.mean_curvature);
    j["surface"] = s;
  }
  j["grid_n"] = rep.config.grid_n;
  j["quad_n"] = rep.config.quad_n;
  j["mi_q"] = rep.total.mi_q;
  j["kernel_flag"] = rep.total.kernel_flag;
  if (rep.surface.kind == SurfaceKind::CmcTorusS3)
    j["torus_kernel_multiplicity"] = rep.total.torus_kernel_multiplicity;
  if (!rep.total.modes.empty()) {
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& m : rep.total.modes) {
      nlohmann::ordered_json row;
      row["mode"] = m.mode_id;
      row["multiplicity"] = static_cast<std::int64_t>(m.multiplicity);
      row["negative_robin"] = m.robin.count;
      row["kernel_flag"] = m.robin.kernel_flag;
      table.push_back(row);
    }
    j["mode_table"] = table;
  }
  {
    nlohmann::ordered_json cs;
    for (const auto& [c, off] : rep.offsets) {
      nlohmann::ordered_json o;
      o["offset"] = off.c;
      o["constrained_index"] = rep.total.mi_q + off.c;
      o["fredholm_obstructed"] = off.fredholm_obstructed;
      o["certificate"] = certificate_json(off.certificate);
      cs[to_string(c)] = o;
    }
    j["constraints"] = cs;
  }
  if (rep.decomposition) {
    j["decomposition"] = {{"a", rep.decomposition->a},
                          {"b", rep.decomposition->b},
                          {"kernel_flag", rep.decomposition->kernel_flag}};
  }
  if (rep.classification) {
    j["classification"] = to_string(rep.classification->cls);
    j["classification_fredholm"] = rep.classification->fredholm;
  }
  if (rep.upsilon && rep.upsilon_bound) {
    nlohmann::ordered_json u;
    u["ell"] = rep.upsilon->ell;
    u["case"] = to_string(rep.upsilon_bound->label);
    u["lower_bound"] = rep.upsilon_bound->bound;
    u["asymmetry_residual"] = round12(rep.upsilon->asymmetry_residual);
    nlohmann::ordered_json ev = nlohmann::ordered_json::array();
    for (double e : rep.upsilon->eigenvalues) ev.push_back(round12(e));
    u["eigenvalues"] = ev;
    j["upsilon"] = u;
  }
  if (rep.type_i_ii_interval)
    j["type_i_ii_interval"] = {(*rep.type_i_ii_interval)[0], (*rep.type_i_ii_interval)[1]};
  return j;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double r = 0.0;
  int mi_q = 0;
  int type_i = 0;
  TypeIClassification classification;
  int a = 0;
  int b = 0;
  int c = 0;
};

inline std::vector<SweepRow> run_sweep(int n, double r_min, double r_max, int steps,
                                       const ReportConfig& cfg = {}) {
  if (!(0.0 < r_min && r_min <= r_max && r_max < 1.0))
    throw ConfigError("sweep: need 0 < r_min <= r_max < 1");
  if (steps < 1) throw ConfigError("sweep: need at least one step");
  std::vector<SweepRow> rows;
  for (int i = 0; i < steps; ++i) {
    const double r = (steps == 1) ? r_min : r_min + (r_max - r_min) * i / (steps - 1.0);
    const auto surface = make_cylinder(n, r);
    SweepRow row;
    row.r = r;
    const auto d = decomposition_abc(surface, ConstraintType::TypeI, detail::offset_options(cfg));
    row.mi_q = d.mi_q;
    row.a = d.a;
    row.b = d.b;
    row.c = d.c;
    row.type_i = d.mi_q + d.c;
    row.classification = cylinder_typeI_closed_form(n, r);
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "r,mi_q,typeI,classification,a,b,c\n";
  for (const auto& row : rows) {
    out += format12(round12(row.r));
    out += ',' + std::to_string(row.mi_q);
    out += ',' + std::to_string(row.type_i);
    out += ',' + to_string(row.classification.cls);
    out += ',' + std::to_string(row.a);
    out += ',' + std::to_string(row.b);
    out += ',' + std::to_string(row.c);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["r"] = round12(row.r);
    r["mi_q"] = row.mi_q;
    r["typeI"] = row.type_i;
    r["classification"] = to_string(row.classification.cls);
    r["a"] = row.a;
    r["b"] = row.b;
    r["c"] = row.c;
    arr.push_back(r);
  }
  return arr;
}

}  // namespace capindex
