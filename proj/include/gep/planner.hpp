#pragma once

#include <chrono>
#include <queue>

#include "gep/clearing.hpp"

namespace gep {

// ---------------------------------------------------------------------------
// Binary decision space: one u_{asset,bus,year} per candidate asset, allowed
// bus and horizon year. Flat assets are candidate units first, then wind.
// ---------------------------------------------------------------------------

enum class AssetKind : uint8_t { unit, wind };

struct BinVar {
  AssetKind kind;
  int asset;  // flat asset index
  int cand_pos;
  int bus;
  int bus_slot;  // position within the asset's candidate_buses
  int year;
};

struct CandidateSpace {
  std::vector<BinVar> vars;
  int num_unit_assets = 0;
  int num_wind_assets = 0;
  std::vector<int> asset_var_begin;  // per flat asset, index into vars (+ sentinel)

  int num_assets() const { return num_unit_assets + num_wind_assets; }

  static CandidateSpace build(const SystemModel& m) {
    CandidateSpace sp;
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    sp.num_unit_assets = int(cu.size());
    sp.num_wind_assets = int(cw.size());
    int asset = 0;
    auto add_asset = [&](AssetKind kind, int cand_pos, const std::vector<int>& buses) {
      sp.asset_var_begin.push_back(int(sp.vars.size()));
      for (int y = 1; y <= m.config.years; ++y)
        for (size_t slot = 0; slot < buses.size(); ++slot)
          sp.vars.push_back({kind, asset, cand_pos, buses[slot], int(slot), y});
      ++asset;
    };
    for (size_t i = 0; i < cu.size(); ++i)
      add_asset(AssetKind::unit, int(i), m.units[cu[i]].candidate_buses);
    for (size_t i = 0; i < cw.size(); ++i)
      add_asset(AssetKind::wind, int(i), m.wind_farms[cw[i]].candidate_buses);
    sp.asset_var_begin.push_back(int(sp.vars.size()));
    return sp;
  }

  InvestmentPlan plan_from_assignment(const SystemModel& m,
                                      const std::vector<int8_t>& u) const {
    InvestmentPlan p = InvestmentPlan::none(m);
    for (size_t i = 0; i < vars.size(); ++i) {
      if (u[i] != 1) continue;
      const BinVar& v = vars[i];
      if (v.kind == AssetKind::unit)
        p.unit_builds[v.cand_pos] = BuildDecision{v.bus, v.year};
      else
        p.wind_builds[v.cand_pos] = BuildDecision{v.bus, v.year};
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Big-M bookkeeping: every artificial bound is registered and certified
// inactive after the solve; a binding artificial bound is a modeling error
// (bound too tight), not a warning.
// ---------------------------------------------------------------------------

struct BigMReport {
  double min_artificial_slack = std::numeric_limits<double>::infinity();
  long bounds_checked = 0;
  std::vector<std::string> flagged;

  bool clean() const { return flagged.empty(); }
  void merge(const BigMReport& o) {
    min_artificial_slack = std::min(min_artificial_slack, o.min_artificial_slack);
    bounds_checked += o.bounds_checked;
    for (auto& f : o.flagged)
      if (flagged.size() < 32) flagged.push_back(f);
  }
};

struct BigMRegistry {
  struct Entry {
    int col;
    double lo, hi;
    bool artificial_lo, artificial_hi;
    std::string what;
  };
  std::vector<Entry> entries;

  void add(int col, double lo, double hi, bool art_lo, bool art_hi, std::string what) {
    entries.push_back({col, lo, hi, art_lo, art_hi, std::move(what)});
  }

  void check_into(const lp::LpSolution& sol, BigMReport& rep, double tol = 1e-6) const {
    for (auto& e : entries) {
      const double x = sol.x[e.col];
      if (e.artificial_lo) {
        double slack = (x - e.lo) / std::max(1.0, std::fabs(e.lo));
        rep.min_artificial_slack = std::min(rep.min_artificial_slack, slack);
        ++rep.bounds_checked;
        if (slack <= tol)
          rep.flagged.push_back(e.what + " at artificial lower bound " + fmt_double(e.lo));
      }
      if (e.artificial_hi) {
        double slack = (e.hi - x) / std::max(1.0, std::fabs(e.hi));
        rep.min_artificial_slack = std::min(rep.min_artificial_slack, slack);
        ++rep.bounds_checked;
        if (slack <= tol)
          rep.flagged.push_back(e.what + " at artificial upper bound " + fmt_double(e.hi));
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Binary-continuous product block: z = chi * p via the
// auxiliary r = (1 - chi) * p and four box rows.
// ---------------------------------------------------------------------------

struct ProductColumns {
  int z = -1;
  int r = -1;
};

inline ProductColumns linearize_binary_continuous(lp::LinearProgram& lp, int chi_col, int p_col,
                                                  double p_min, double p_max,
                                                  const std::string& tag) {
  require(std::isfinite(p_min) && std::isfinite(p_max) && p_min <= p_max, ErrorKind::validation,
          "product '" + tag + "': continuous factor needs finite bounds");
  ProductColumns out;
  const double lo = std::min(p_min, 0.0), hi = std::max(p_max, 0.0);
  out.z = lp.add_column("z_" + tag, lo, hi, 0.0);
  out.r = lp.add_column("r_" + tag, lo, hi, 0.0);
  int eq = lp.add_row(lp::Relation::eq, 0.0, "zdef_" + tag);  // z + r - p = 0
  lp.add_entry(eq, out.z, 1.0);
  lp.add_entry(eq, out.r, 1.0);
  lp.add_entry(eq, p_col, -1.0);
  int zu = lp.add_row(lp::Relation::le, 0.0, "zub_" + tag);  // z <= chi p_max
  lp.add_entry(zu, out.z, 1.0);
  lp.add_entry(zu, chi_col, -p_max);
  int zl = lp.add_row(lp::Relation::ge, 0.0, "zlb_" + tag);  // z >= chi p_min
  lp.add_entry(zl, out.z, 1.0);
  lp.add_entry(zl, chi_col, -p_min);
  int ru = lp.add_row(lp::Relation::le, p_max, "rub_" + tag);  // r <= (1-chi) p_max
  lp.add_entry(ru, out.r, 1.0);
  lp.add_entry(ru, chi_col, p_max);
  int rl = lp.add_row(lp::Relation::ge, p_min, "rlb_" + tag);  // r >= (1-chi) p_min
  lp.add_entry(rl, out.r, 1.0);
  lp.add_entry(rl, chi_col, p_min);
  return out;
}

// rows/cols added per product block, for structural accounting
constexpr int kProductRows = 5;
constexpr int kProductCols = 2;

// ---------------------------------------------------------------------------
// Dual-variable bound policy (all certified post-solve via the registry).
// ---------------------------------------------------------------------------

struct DualBounds {
  double lambda = 0, beta = 0, gamma = 0, theta = 0, xi = 0;
  double phi(double cost) const { return std::fabs(cost) + lambda; }

  static DualBounds from(const SystemModel& m) {
    DualBounds b{};
    b.lambda = 2.0 * m.config.voll;
    b.beta = 3.0 * m.config.voll;
    b.gamma = 2.0 * m.config.voll;
    b.theta = 4.0 * m.config.voll;
    double bsum = 0.0;
    std::vector<double> per_bus(m.num_buses(), 0.0);
    for (auto& l : m.lines) {
      per_bus[l.from] += l.susceptance;
      per_bus[l.to] += l.susceptance;
    }
    for (double v : per_bus) bsum = std::max(bsum, v);
    b.xi = std::max(1.0, bsum) * (2.0 * b.lambda + 2.0 * b.theta);
    return b;
  }
};

}  // namespace gep

#include "gep/planner_blocks.hpp"
#include "gep/planner_search.hpp"
#include "gep/planner_studies.hpp"
