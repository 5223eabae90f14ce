#pragma once

#include "gep/investment.hpp"
#include "gep/lp.hpp"
#include "gep/scenario.hpp"

namespace gep {

// ---------------------------------------------------------------------------
// Hourly market clearing for one (scenario, block, year) under a fixed
// investment plan: DC power flow, shed-load slack, LMPs from balance duals.
// ---------------------------------------------------------------------------

struct ClearingProblem {
  const SystemModel* model = nullptr;
  const ScenarioSet* scenarios = nullptr;
  int scenario = 0;
  int block = 0;
  int year = 1;
  const InvestmentPlan* plan = nullptr;  // null -> no candidates built
};

struct ClearingLp {
  lp::LinearProgram lp;
  std::vector<int> col_unit;   // per model unit; -1 when absent (failed candidate, unbuilt)
  std::vector<int> col_wind;   // per model farm; -1 when absent
  std::vector<int> col_shed;   // per bus
  std::vector<int> col_angle;  // per bus
  std::vector<int> row_balance;             // per bus
  std::vector<std::array<int, 2>> row_flow;  // per line: forward, reverse
  std::vector<int> component;               // per bus
  std::vector<int> pin_row;                 // per component
  std::vector<int> pin_bus;                 // per component
  std::vector<double> unit_cap;             // resolved upper bound per unit
  std::vector<double> wind_cap;             // resolved P_bar per farm
  std::vector<int> unit_bus;                // operating bus per unit; -1 when absent
  std::vector<int> wind_bus;                // operating bus per farm; -1 when absent
};

namespace detail {

inline std::vector<int> connected_components(const SystemModel& m, const Scenario& s) {
  std::vector<int> parent(m.num_buses());
  for (int i = 0; i < m.num_buses(); ++i) parent[i] = i;
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (size_t l = 0; l < m.lines.size(); ++l)
    if (s.line_available(int(l))) parent[find(m.lines[l].from)] = find(m.lines[l].to);
  // slack bus' component is numbered 0, the rest follow bus order
  int slack_root = find(m.slack_bus_index());
  std::vector<int> out(m.num_buses());
  std::vector<int> map(m.num_buses(), -1);
  map[slack_root] = 0;
  int count = 1;
  for (int i = 0; i < m.num_buses(); ++i) {
    int r = find(i);
    if (map[r] < 0) map[r] = count++;
    out[i] = map[r];
  }
  return out;
}

}  // namespace detail

// Lower-level LP: cost minimization over dispatch, shed and angles.
inline ClearingLp build_clearing_lp(const ClearingProblem& pr) {
  const SystemModel& m = *pr.model;
  const ScenarioSet& ss = *pr.scenarios;
  require(pr.scenario >= 0 && pr.scenario < ss.size(), ErrorKind::validation, "bad scenario");
  require(pr.block >= 0 && pr.block < int(m.blocks.size()), ErrorKind::validation, "bad block");
  require(pr.year >= 1 && pr.year <= m.config.years, ErrorKind::validation, "bad year");
  const Scenario& sc = ss.scenarios[pr.scenario];

  InvestmentPlan no_plan;
  const InvestmentPlan* plan = pr.plan;
  if (!plan) {
    no_plan = InvestmentPlan::none(m);
    plan = &no_plan;
  }
  plan->validate(m);

  ClearingLp out;
  lp::LinearProgram& lp = out.lp;
  const int nb = m.num_buses();

  // operating bus and capacity per unit
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  out.col_unit.assign(m.units.size(), -1);
  out.col_wind.assign(m.wind_farms.size(), -1);
  out.unit_cap.assign(m.units.size(), 0.0);
  out.wind_cap.assign(m.wind_farms.size(), 0.0);
  out.unit_bus.assign(m.units.size(), -1);
  out.wind_bus.assign(m.wind_farms.size(), -1);

  for (size_t g = 0; g < m.units.size(); ++g) {
    const auto& u = m.units[g];
    if (u.is_candidate()) continue;
    out.unit_bus[g] = *u.bus;
    out.unit_cap[g] = sc.unit_available(int(g)) ? u.capacity_mw : 0.0;
  }
  for (size_t i = 0; i < cu.size(); ++i) {
    int g = cu[i];
    if (auto bus = plan->unit_bus(int(i), pr.year)) {
      out.unit_bus[g] = *bus;
      out.unit_cap[g] = sc.unit_available(g) ? m.units[g].capacity_mw : 0.0;
    }
  }
  auto farm_cap = [&](const WindFarm& w, int bus) {
    if (sc.site_speed.empty())
      raise(ErrorKind::validation,
            "wind farm " + w.id + " present but the scenario set has no wind data");
    int site = ss.site_index(m.buses[bus].id);
    require(site >= 0, ErrorKind::validation,
            "no wind data for bus " + m.buses[bus].id + " (farm " + w.id + ")");
    return wind_power(w, ss.speed(pr.scenario, site));
  };
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    const auto& f = m.wind_farms[w];
    if (f.is_candidate()) continue;
    out.wind_bus[w] = *f.bus;
    out.wind_cap[w] = farm_cap(f, *f.bus);
  }
  for (size_t i = 0; i < cw.size(); ++i) {
    int w = cw[i];
    if (auto bus = plan->wind_bus(int(i), pr.year)) {
      out.wind_bus[w] = *bus;
      out.wind_cap[w] = farm_cap(m.wind_farms[w], *bus);
    }
  }

  // columns
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (out.unit_bus[g] < 0) continue;
    out.col_unit[g] =
        lp.add_column("P_" + m.units[g].id, 0.0, out.unit_cap[g], m.units[g].marginal_cost);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (out.wind_bus[w] < 0) continue;
    out.col_wind[w] = lp.add_column("W_" + m.wind_farms[w].id, 0.0, out.wind_cap[w], 0.0);
  }
  out.col_shed.resize(nb);
  out.col_angle.resize(nb);
  for (int n = 0; n < nb; ++n) {
    const double load = m.block_load(n, pr.block, pr.year);
    out.col_shed[n] =
        lp.add_column("S_" + m.buses[n].id, 0.0, load, m.config.voll);
    out.col_angle[n] = lp.add_column("d_" + m.buses[n].id, -lp::kInf, lp::kInf, 0.0);
  }

  // balance rows: gen + wind + shed - sum_m B k (d_n - d_m) = load
  out.row_balance.resize(nb);
  for (int n = 0; n < nb; ++n)
    out.row_balance[n] =
        lp.add_row(lp::Relation::eq, m.block_load(n, pr.block, pr.year), "bal_" + m.buses[n].id);
  for (size_t g = 0; g < m.units.size(); ++g)
    if (out.col_unit[g] >= 0) lp.add_entry(out.row_balance[out.unit_bus[g]], out.col_unit[g], 1.0);
  for (size_t w = 0; w < m.wind_farms.size(); ++w)
    if (out.col_wind[w] >= 0) lp.add_entry(out.row_balance[out.wind_bus[w]], out.col_wind[w], 1.0);
  for (int n = 0; n < nb; ++n) lp.add_entry(out.row_balance[n], out.col_shed[n], 1.0);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    const auto& ln = m.lines[l];
    const double bk = sc.line_available(int(l)) ? ln.susceptance : 0.0;
    if (bk == 0.0) continue;
    lp.add_entry(out.row_balance[ln.from], out.col_angle[ln.from], -bk);
    lp.add_entry(out.row_balance[ln.from], out.col_angle[ln.to], bk);
    lp.add_entry(out.row_balance[ln.to], out.col_angle[ln.to], -bk);
    lp.add_entry(out.row_balance[ln.to], out.col_angle[ln.from], bk);
  }

  // directed flow caps: B k (d_n - d_m) <= k P_bar, both orientations
  out.row_flow.resize(m.lines.size());
  for (size_t l = 0; l < m.lines.size(); ++l) {
    const auto& ln = m.lines[l];
    const double k = sc.line_available(int(l)) ? 1.0 : 0.0;
    const std::string tag =
        m.buses[ln.from].id + "_" + m.buses[ln.to].id + "#" + std::to_string(l);
    int fwd = lp.add_row(lp::Relation::le, k * ln.capacity_mw, "flow_" + tag);
    int rev = lp.add_row(lp::Relation::le, k * ln.capacity_mw, "wolf_" + tag);
    if (k != 0.0) {
      lp.add_entry(fwd, out.col_angle[ln.from], ln.susceptance);
      lp.add_entry(fwd, out.col_angle[ln.to], -ln.susceptance);
      lp.add_entry(rev, out.col_angle[ln.from], -ln.susceptance);
      lp.add_entry(rev, out.col_angle[ln.to], ln.susceptance);
    }
    out.row_flow[l] = {fwd, rev};
  }

  // one angle pin per connected component (slack bus for its own component)
  out.component = detail::connected_components(m, sc);
  int ncomp = *std::max_element(out.component.begin(), out.component.end()) + 1;
  out.pin_bus.assign(ncomp, -1);
  out.pin_bus[0] = m.slack_bus_index();
  for (int n = 0; n < nb; ++n) {
    int c = out.component[n];
    if (c > 0 && out.pin_bus[c] < 0) out.pin_bus[c] = n;  // lowest index in bus order
  }
  out.pin_row.resize(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    out.pin_row[c] = lp.add_row(lp::Relation::eq, 0.0, "pin_" + m.buses[out.pin_bus[c]].id);
    lp.add_entry(out.pin_row[c], out.col_angle[out.pin_bus[c]], 1.0);
  }
  return out;
}

struct ClearingResult {
  int scenario = 0, block = 0, year = 1;
  double system_cost = 0.0;
  double dual_objective = 0.0;
  std::vector<double> unit_dispatch;  // per model unit
  std::vector<double> wind_dispatch;  // per model farm
  std::vector<double> shed;           // per bus
  std::vector<double> angle;          // per bus
  std::vector<double> flow;           // per line, signed from->to
  std::vector<double> lmp;            // per bus
  std::vector<double> phi_min, phi_max;      // per unit
  std::vector<double> beta_min, beta_max;    // per bus
  std::vector<double> gamma_min, gamma_max;  // per farm
  std::vector<double> theta_fwd, theta_rev;  // per line
  double xi = 0.0;
  lp::KktReport kkt;
  double total_load = 0.0;
  double total_shed = 0.0;
};

inline ClearingResult clear_market(const ClearingProblem& pr) {
  const SystemModel& m = *pr.model;
  auto built = build_clearing_lp(pr);
  lp::SolveOptions opts;
  opts.feas_tol = m.config.feas_tol;
  auto sol = lp::solve_lp(built.lp, opts);
  require(sol.status == lp::SolveStatus::optimal, ErrorKind::internal,
          "market clearing LP must be feasible by construction (shed slack)");

  ClearingResult r;
  r.scenario = pr.scenario;
  r.block = pr.block;
  r.year = pr.year;
  r.system_cost = sol.objective;
  r.dual_objective = sol.dual_objective;
  const int nb = m.num_buses();
  r.unit_dispatch.assign(m.units.size(), 0.0);
  r.phi_min.assign(m.units.size(), 0.0);
  r.phi_max.assign(m.units.size(), 0.0);
  for (size_t g = 0; g < m.units.size(); ++g) {
    int j = built.col_unit[g];
    if (j < 0) continue;
    r.unit_dispatch[g] = sol.x[j];
    r.phi_min[g] = std::max(sol.reduced_cost[j], 0.0);
    r.phi_max[g] = std::min(sol.reduced_cost[j], 0.0);
  }
  r.wind_dispatch.assign(m.wind_farms.size(), 0.0);
  r.gamma_min.assign(m.wind_farms.size(), 0.0);
  r.gamma_max.assign(m.wind_farms.size(), 0.0);
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    int j = built.col_wind[w];
    if (j < 0) continue;
    r.wind_dispatch[w] = sol.x[j];
    r.gamma_min[w] = std::max(sol.reduced_cost[j], 0.0);
    r.gamma_max[w] = std::min(sol.reduced_cost[j], 0.0);
  }
  r.shed.resize(nb);
  r.angle.resize(nb);
  r.lmp.resize(nb);
  r.beta_min.resize(nb);
  r.beta_max.resize(nb);
  for (int n = 0; n < nb; ++n) {
    r.shed[n] = sol.x[built.col_shed[n]];
    r.angle[n] = sol.x[built.col_angle[n]];
    r.lmp[n] = sol.row_dual[built.row_balance[n]];
    r.beta_min[n] = std::max(sol.reduced_cost[built.col_shed[n]], 0.0);
    r.beta_max[n] = std::min(sol.reduced_cost[built.col_shed[n]], 0.0);
    r.total_load += m.block_load(n, pr.block, pr.year);
    r.total_shed += r.shed[n];
  }
  const Scenario& sc = pr.scenarios->scenarios[pr.scenario];
  r.flow.resize(m.lines.size());
  r.theta_fwd.resize(m.lines.size());
  r.theta_rev.resize(m.lines.size());
  for (size_t l = 0; l < m.lines.size(); ++l) {
    const auto& ln = m.lines[l];
    const double bk = sc.line_available(int(l)) ? ln.susceptance : 0.0;
    r.flow[l] = bk * (r.angle[ln.from] - r.angle[ln.to]);
    r.theta_fwd[l] = sol.row_dual[built.row_flow[l][0]];
    r.theta_rev[l] = sol.row_dual[built.row_flow[l][1]];
  }
  r.xi = sol.row_dual[built.pin_row[0]];

  // contract checks: primal feasibility of 4g-4n, strong duality, shed bounds
  r.kkt = lp::check_kkt(built.lp, sol);
  const auto& c = m.config;
  require(r.kkt.max_primal_residual <= c.feas_tol, ErrorKind::numerical,
          strf("clearing primal residual %.3e exceeds feas_tol", r.kkt.max_primal_residual));
  require(r.kkt.duality_gap <= c.duality_tol, ErrorKind::numerical,
          strf("clearing duality gap %.3e exceeds duality_tol", r.kkt.duality_gap));
  require(r.kkt.max_complementarity <= c.comp_tol, ErrorKind::numerical,
          strf("clearing complementarity %.3e exceeds comp_tol", r.kkt.max_complementarity));
  for (int n = 0; n < nb; ++n) {
    double load = m.block_load(n, pr.block, pr.year);
    require(r.shed[n] >= -c.feas_tol && r.shed[n] <= load + c.feas_tol, ErrorKind::numerical,
            "shed outside [0, load]");
  }
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) {
      require(r.flow[l] == 0.0, ErrorKind::numerical, "flow on a failed line");
      continue;
    }
    require(std::fabs(r.flow[l]) <= m.lines[l].capacity_mw + 1e-6 * m.lines[l].capacity_mw +
                                        c.feas_tol,
            ErrorKind::numerical, "flow exceeds capacity");
  }
  return r;
}

// GENCO pool profit for one cleared hour: price-cost rents of
// owned existing assets plus all candidate assets at their built buses.
inline double scenario_profit(const ClearingResult& r, const SystemModel& m,
                              const InvestmentPlan& plan) {
  double pi = 0.0;
  for (size_t g = 0; g < m.units.size(); ++g) {
    const auto& u = m.units[g];
    if (u.is_candidate() || !u.owned_by_genco) continue;
    pi += (r.lmp[*u.bus] - u.marginal_cost) * r.unit_dispatch[g];
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    const auto& f = m.wind_farms[w];
    if (f.is_candidate() || !f.owned_by_genco) continue;
    pi += r.lmp[*f.bus] * r.wind_dispatch[w];
  }
  auto cu = m.candidate_unit_indices();
  for (size_t i = 0; i < cu.size(); ++i)
    if (auto bus = plan.unit_bus(int(i), r.year))
      pi += (r.lmp[*bus] - m.units[cu[i]].marginal_cost) * r.unit_dispatch[cu[i]];
  auto cw = m.candidate_wind_indices();
  for (size_t i = 0; i < cw.size(); ++i)
    if (auto bus = plan.wind_bus(int(i), r.year)) pi += r.lmp[*bus] * r.wind_dispatch[cw[i]];
  return pi;
}

// ---------------------------------------------------------------------------
// Full (scenario, block, year) grid and the discounted expected profit.
// ---------------------------------------------------------------------------

struct ProfitGrid {
  int S = 0, B = 0, Y = 0;
  std::vector<double> profit;  // $/h per (s,b,y)
  std::vector<uint8_t> present;

  void init(int s, int b, int y) {
    S = s;
    B = b;
    Y = y;
    profit.assign(size_t(s) * b * y, 0.0);
    present.assign(size_t(s) * b * y, 0);
  }
  size_t idx(int s, int b, int y) const { return (size_t(y - 1) * S + s) * B + b; }
  void set(int s, int b, int y, double v) {
    profit[idx(s, b, y)] = v;
    present[idx(s, b, y)] = 1;
  }
  double at(int s, int b, int y) const {
    require(present[idx(s, b, y)], ErrorKind::validation,
            strf("profit grid missing cell (s=%d, b=%d, y=%d)", s, b, y));
    return profit[idx(s, b, y)];
  }
};

inline ProfitGrid compute_profit_grid(const SystemModel& m, const ScenarioSet& ss,
                                      const InvestmentPlan& plan, int threads = 1) {
  ProfitGrid grid;
  grid.init(ss.size(), int(m.blocks.size()), m.config.years);
  const size_t cells = grid.profit.size();
  parallel_for(cells, threads, [&](size_t cell) {
    int y = int(cell / (size_t(grid.S) * grid.B)) + 1;
    size_t rem = cell % (size_t(grid.S) * grid.B);
    int s = int(rem / grid.B);
    int b = int(rem % grid.B);
    ClearingProblem pr{&m, &ss, s, b, y, &plan};
    auto r = clear_market(pr);
    grid.profit[cell] = scenario_profit(r, m, plan);
    grid.present[cell] = 1;
  });
  return grid;
}

// sum_y (1+r)^-y ( sum_{s,b} pi_s T_b Pi_sby - invest_y )
inline double expected_discounted_profit(const ProfitGrid& grid, const SystemModel& m,
                                         const ScenarioSet& ss, const InvestmentPlan& plan) {
  require(grid.S == ss.size() && grid.B == int(m.blocks.size()) && grid.Y == m.config.years,
          ErrorKind::validation, "profit grid shape disagrees with model/scenarios");
  double total = 0.0;
  for (int y = 1; y <= grid.Y; ++y) {
    double year_sum = 0.0;
    for (int s = 0; s < grid.S; ++s)
      for (int b = 0; b < grid.B; ++b)
        year_sum +=
            ss.scenarios[s].probability * m.blocks[b].duration_h * grid.at(s, b, y);
    total += m.discount(y) * year_sum;
  }
  return total - plan.invest_cost_discounted(m);
}

}  // namespace gep
