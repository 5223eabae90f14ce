#pragma once

// per-(scenario, block, year) profit LPs. Two routes build them:
//   - the oracle route extends the market-clearing LP of a fixed plan with
//     dual rows and the strong-duality equality;
//   - the MILP route carries relaxable chi columns (cumulative build
//     indicators) and replaces every binary-continuous product by its
//     auxiliary block, which is what branch-and-bound relaxes.
// Both maximize the GENCO profit rewritten in dual-linear form.

namespace gep {

struct BlockOutcome {
  double profit_per_hour = 0.0;  // optimistic Pi_sby
  double raw_profit_per_hour = 0.0;  // recomputed from lambda*P products of the same solution
  std::vector<double> chi;       // boxed route: chosen relaxed build levels
  BigMReport bigm;
  long iterations = 0;
};

namespace detail {

struct DualSection {
  std::vector<int> col_lambda;    // per bus
  std::vector<int> col_phi_min, col_phi_max;      // per model unit (-1 if absent)
  std::vector<int> col_beta_min, col_beta_max;    // per bus
  std::vector<int> col_gamma_min, col_gamma_max;  // per farm (-1 if absent)
  std::vector<std::array<int, 2>> col_theta;      // per line (-1 when out)
  std::vector<int> col_xi;                        // per component
  int sd_row = -1;
};

// duals shared by both routes: lambda, phi/beta/gamma pairs, theta, xi,
// the delta stationarity rows and the strong-duality row skeleton.
inline DualSection add_dual_columns(lp::LinearProgram& lp, const SystemModel& m,
                                    const Scenario& sc, const DualBounds& db,
                                    const std::vector<int>& present_unit,
                                    const std::vector<int>& present_wind, int ncomp,
                                    BigMRegistry& reg) {
  DualSection d;
  const int nb = m.num_buses();
  d.col_lambda.resize(nb);
  for (int n = 0; n < nb; ++n) {
    d.col_lambda[n] = lp.add_column("lmp_" + m.buses[n].id, -db.lambda, db.lambda, 0.0);
    reg.add(d.col_lambda[n], -db.lambda, db.lambda, true, true, "lambda@" + m.buses[n].id);
  }
  d.col_phi_min.assign(m.units.size(), -1);
  d.col_phi_max.assign(m.units.size(), -1);
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (!present_unit[g]) continue;
    const double cap = db.phi(m.units[g].marginal_cost);
    d.col_phi_min[g] = lp.add_column("phmin_" + m.units[g].id, 0.0, cap, 0.0);
    d.col_phi_max[g] = lp.add_column("phmax_" + m.units[g].id, -cap, 0.0, 0.0);
    reg.add(d.col_phi_min[g], 0.0, cap, false, true, "phi_min@" + m.units[g].id);
    reg.add(d.col_phi_max[g], -cap, 0.0, true, false, "phi_max@" + m.units[g].id);
  }
  d.col_beta_min.resize(nb);
  d.col_beta_max.resize(nb);
  for (int n = 0; n < nb; ++n) {
    d.col_beta_min[n] = lp.add_column("btmin_" + m.buses[n].id, 0.0, db.beta, 0.0);
    d.col_beta_max[n] = lp.add_column("btmax_" + m.buses[n].id, -db.beta, 0.0, 0.0);
    reg.add(d.col_beta_min[n], 0.0, db.beta, false, true, "beta_min@" + m.buses[n].id);
    reg.add(d.col_beta_max[n], -db.beta, 0.0, true, false, "beta_max@" + m.buses[n].id);
  }
  d.col_gamma_min.assign(m.wind_farms.size(), -1);
  d.col_gamma_max.assign(m.wind_farms.size(), -1);
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (!present_wind[w]) continue;
    d.col_gamma_min[w] = lp.add_column("gmin_" + m.wind_farms[w].id, 0.0, db.gamma, 0.0);
    d.col_gamma_max[w] = lp.add_column("gmax_" + m.wind_farms[w].id, -db.gamma, 0.0, 0.0);
    reg.add(d.col_gamma_min[w], 0.0, db.gamma, false, true, "gamma_min@" + m.wind_farms[w].id);
    reg.add(d.col_gamma_max[w], -db.gamma, 0.0, true, false, "gamma_max@" + m.wind_farms[w].id);
  }
  d.col_theta.assign(m.lines.size(), {-1, -1});
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    const std::string tag = std::to_string(l);
    d.col_theta[l][0] = lp.add_column("thf_" + tag, -db.theta, 0.0, 0.0);
    d.col_theta[l][1] = lp.add_column("thr_" + tag, -db.theta, 0.0, 0.0);
    reg.add(d.col_theta[l][0], -db.theta, 0.0, true, false, "theta_fwd@line" + tag);
    reg.add(d.col_theta[l][1], -db.theta, 0.0, true, false, "theta_rev@line" + tag);
  }
  d.col_xi.resize(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    d.col_xi[c] = lp.add_column("xi_" + std::to_string(c), -db.xi, db.xi, 0.0);
    reg.add(d.col_xi[c], -db.xi, db.xi, true, true, "xi@comp" + std::to_string(c));
  }
  return d;
}

// stationarity of the angles: per bus, sum of B k (lambda_m - lambda_n
// + theta_nm - theta_mn) plus xi on the component's pinned bus equals zero
inline void add_angle_dual_rows(lp::LinearProgram& lp, const SystemModel& m, const Scenario& sc,
                                const DualSection& d, const std::vector<int>& component,
                                const std::vector<int>& pin_bus) {
  const bool xi_everywhere = m.config.xi_in_every_row;
  const int nb = m.num_buses();
  std::vector<int> rows(nb);
  for (int n = 0; n < nb; ++n)
    rows[n] = lp.add_row(lp::Relation::eq, 0.0, "ddel_" + m.buses[n].id);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    const auto& ln = m.lines[l];
    const double B = ln.susceptance;
    // from-side
    lp.add_entry(rows[ln.from], d.col_lambda[ln.from], -B);
    lp.add_entry(rows[ln.from], d.col_lambda[ln.to], B);
    lp.add_entry(rows[ln.from], d.col_theta[l][0], B);
    lp.add_entry(rows[ln.from], d.col_theta[l][1], -B);
    // to-side
    lp.add_entry(rows[ln.to], d.col_lambda[ln.to], -B);
    lp.add_entry(rows[ln.to], d.col_lambda[ln.from], B);
    lp.add_entry(rows[ln.to], d.col_theta[l][0], -B);
    lp.add_entry(rows[ln.to], d.col_theta[l][1], B);
  }
  if (xi_everywhere) {
    // conformance variant: the pin dual rides on every bus of its component
    for (int n = 0; n < nb; ++n) lp.add_entry(rows[n], d.col_xi[component[n]], 1.0);
  } else {
    for (size_t c = 0; c < pin_bus.size(); ++c) lp.add_entry(rows[pin_bus[c]], d.col_xi[c], 1.0);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Oracle route: market-clearing LP of the fixed plan + duals + strong duality,
// profit objective over the optimal face (optimistic dual selection).
// ---------------------------------------------------------------------------

struct OracleBlockLp {
  lp::LinearProgram lp;  // moved out of the clearing builder
  ClearingLp clearing;   // column maps for the primal section (lp member unused)
  detail::DualSection dual;
  BigMRegistry registry;
};

inline OracleBlockLp build_oracle_block(const SystemModel& m, const ScenarioSet& ss, int s,
                                        int b, int y, const InvestmentPlan& plan) {
  OracleBlockLp out;
  ClearingProblem pr{&m, &ss, s, b, y, &plan};
  out.clearing = build_clearing_lp(pr);
  lp::LinearProgram& lp = out.lp = std::move(out.clearing.lp);
  // the clearing objective moves into the strong-duality row; the profit
  // terms below are the only objective of this LP
  for (int j = 0; j < lp.num_cols(); ++j) lp.cost[j] = 0.0;
  const Scenario& sc = ss.scenarios[s];
  const DualBounds db = DualBounds::from(m);

  std::vector<int> present_unit(m.units.size(), 0), present_wind(m.wind_farms.size(), 0);
  for (size_t g = 0; g < m.units.size(); ++g) present_unit[g] = out.clearing.col_unit[g] >= 0;
  for (size_t w = 0; w < m.wind_farms.size(); ++w) present_wind[w] = out.clearing.col_wind[w] >= 0;
  const int ncomp = int(out.clearing.pin_bus.size());

  out.dual = detail::add_dual_columns(lp, m, sc, db, present_unit, present_wind, ncomp,
                                      out.registry);
  const auto& d = out.dual;

  // dual rows of the bounded primal variables
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (!present_unit[g]) continue;
    int r = lp.add_row(lp::Relation::eq, m.units[g].marginal_cost, "dP_" + m.units[g].id);
    lp.add_entry(r, d.col_lambda[out.clearing.unit_bus[g]], 1.0);
    lp.add_entry(r, d.col_phi_min[g], 1.0);
    lp.add_entry(r, d.col_phi_max[g], 1.0);
  }
  for (int n = 0; n < m.num_buses(); ++n) {
    int r = lp.add_row(lp::Relation::eq, m.config.voll, "dS_" + m.buses[n].id);
    lp.add_entry(r, d.col_lambda[n], 1.0);
    lp.add_entry(r, d.col_beta_min[n], 1.0);
    lp.add_entry(r, d.col_beta_max[n], 1.0);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (!present_wind[w]) continue;
    int r = lp.add_row(lp::Relation::eq, 0.0, "dW_" + m.wind_farms[w].id);
    lp.add_entry(r, d.col_lambda[out.clearing.wind_bus[w]], 1.0);
    lp.add_entry(r, d.col_gamma_min[w], 1.0);
    lp.add_entry(r, d.col_gamma_max[w], 1.0);
  }
  detail::add_angle_dual_rows(lp, m, sc, d, out.clearing.component, out.clearing.pin_bus);

  // strong duality: primal cost - dual objective = 0
  int sd = lp.add_row(lp::Relation::eq, 0.0, "strong_duality");
  out.dual.sd_row = sd;
  for (size_t g = 0; g < m.units.size(); ++g)
    if (present_unit[g]) {
      lp.add_entry(sd, out.clearing.col_unit[g], m.units[g].marginal_cost);
      lp.add_entry(sd, d.col_phi_max[g], -out.clearing.unit_cap[g]);
    }
  for (int n = 0; n < m.num_buses(); ++n) {
    const double load = m.block_load(n, b, y);
    lp.add_entry(sd, out.clearing.col_shed[n], m.config.voll);
    lp.add_entry(sd, d.col_lambda[n], -load);
    lp.add_entry(sd, d.col_beta_max[n], -load);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w)
    if (present_wind[w]) lp.add_entry(sd, d.col_gamma_max[w], -out.clearing.wind_cap[w]);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    lp.add_entry(sd, d.col_theta[l][0], -m.lines[l].capacity_mw);
    lp.add_entry(sd, d.col_theta[l][1], -m.lines[l].capacity_mw);
  }

  // profit objective in dual-linear form: owned existing assets plus every
  // operating candidate
  lp.sense = lp::Sense::maximize;
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (!present_unit[g]) continue;
    const auto& u = m.units[g];
    const bool earns = u.is_candidate() || u.owned_by_genco;
    if (earns) lp.set_objective(d.col_phi_max[g], -out.clearing.unit_cap[g]);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (!present_wind[w]) continue;
    const auto& f = m.wind_farms[w];
    const bool earns = f.is_candidate() || f.owned_by_genco;
    if (earns) lp.set_objective(d.col_gamma_max[w], -out.clearing.wind_cap[w]);
  }
  return out;
}

// profit recomputed from raw lambda*P products of a solved oracle block
inline double raw_profit_from_solution(const SystemModel& m, const OracleBlockLp& blk,
                                       const lp::LpSolution& sol) {
  double pi = 0.0;
  for (size_t g = 0; g < m.units.size(); ++g) {
    int pj = blk.clearing.col_unit[g];
    if (pj < 0) continue;
    const auto& u = m.units[g];
    if (!u.is_candidate() && !u.owned_by_genco) continue;
    const double lambda = sol.x[blk.dual.col_lambda[blk.clearing.unit_bus[g]]];
    pi += (lambda - u.marginal_cost) * sol.x[pj];
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    int pj = blk.clearing.col_wind[w];
    if (pj < 0) continue;
    const auto& f = m.wind_farms[w];
    if (!f.is_candidate() && !f.owned_by_genco) continue;
    const double lambda = sol.x[blk.dual.col_lambda[blk.clearing.wind_bus[w]]];
    pi += lambda * sol.x[pj];
  }
  return pi;
}

inline BlockOutcome solve_oracle_block_monolithic(const SystemModel& m, const ScenarioSet& ss,
                                                  int s, int b, int y,
                                                  const InvestmentPlan& plan,
                                                  bool want_bigm = false) {
  auto blk = build_oracle_block(m, ss, s, b, y, plan);
  lp::SolveOptions opt;
  opt.feas_tol = m.config.feas_tol;
  auto sol = lp::solve_lp(blk.lp, opt);
  require(sol.status == lp::SolveStatus::optimal, ErrorKind::numerical,
          "profit block LP not optimal (oracle route)");
  BlockOutcome out;
  out.profit_per_hour = sol.objective;
  out.raw_profit_per_hour = raw_profit_from_solution(m, blk, sol);
  out.iterations = sol.iterations;
  if (want_bigm) blk.registry.check_into(sol, out.bigm);
  return out;
}

// Equivalent two-stage evaluation: the profit objective involves only dual
// variables, so the block splits into the clearing LP and a dual-side LP
// whose dual objective is pinned to the clearing optimum. By strong duality
// the feasible duals are exactly the optimal ones, so the maximized profit
// coincides with the monolithic LP's (cross-checked in the test suite).
inline BlockOutcome solve_oracle_block(const SystemModel& m, const ScenarioSet& ss, int s, int b,
                                       int y, const InvestmentPlan& plan,
                                       bool want_bigm = false) {
  ClearingProblem pr{&m, &ss, s, b, y, &plan};
  auto built = build_clearing_lp(pr);
  lp::SolveOptions opt;
  opt.feas_tol = m.config.feas_tol;
  auto psol = lp::solve_lp(built.lp, opt);
  require(psol.status == lp::SolveStatus::optimal, ErrorKind::internal,
          "clearing stage must be feasible");
  const double vstar = psol.objective;

  const Scenario& sc = ss.scenarios[s];
  const DualBounds db = DualBounds::from(m);
  lp::LinearProgram lp;
  BigMRegistry registry;
  std::vector<int> present_unit(m.units.size(), 0), present_wind(m.wind_farms.size(), 0);
  for (size_t g = 0; g < m.units.size(); ++g) present_unit[g] = built.col_unit[g] >= 0;
  for (size_t w = 0; w < m.wind_farms.size(); ++w) present_wind[w] = built.col_wind[w] >= 0;
  auto d = detail::add_dual_columns(lp, m, sc, db, present_unit, present_wind,
                                    int(built.pin_bus.size()), registry);
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (!present_unit[g]) continue;
    int r = lp.add_row(lp::Relation::eq, m.units[g].marginal_cost, "dP_" + m.units[g].id);
    lp.add_entry(r, d.col_lambda[built.unit_bus[g]], 1.0);
    lp.add_entry(r, d.col_phi_min[g], 1.0);
    lp.add_entry(r, d.col_phi_max[g], 1.0);
  }
  for (int n = 0; n < m.num_buses(); ++n) {
    int r = lp.add_row(lp::Relation::eq, m.config.voll, "dS_" + m.buses[n].id);
    lp.add_entry(r, d.col_lambda[n], 1.0);
    lp.add_entry(r, d.col_beta_min[n], 1.0);
    lp.add_entry(r, d.col_beta_max[n], 1.0);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (!present_wind[w]) continue;
    int r = lp.add_row(lp::Relation::eq, 0.0, "dW_" + m.wind_farms[w].id);
    lp.add_entry(r, d.col_lambda[built.wind_bus[w]], 1.0);
    lp.add_entry(r, d.col_gamma_min[w], 1.0);
    lp.add_entry(r, d.col_gamma_max[w], 1.0);
  }
  detail::add_angle_dual_rows(lp, m, sc, d, built.component, built.pin_bus);

  // dual objective pinned to the primal optimum; weak duality caps it from
  // above, so the >= row carves out exactly the optimal dual face
  int pin = lp.add_row(lp::Relation::ge, vstar, "dual_obj_floor");
  for (int n = 0; n < m.num_buses(); ++n) {
    const double load = m.block_load(n, b, y);
    if (load != 0.0) {
      lp.add_entry(pin, d.col_lambda[n], load);
      lp.add_entry(pin, d.col_beta_max[n], load);
    }
  }
  for (size_t g = 0; g < m.units.size(); ++g)
    if (present_unit[g] && built.unit_cap[g] != 0.0)
      lp.add_entry(pin, d.col_phi_max[g], built.unit_cap[g]);
  for (size_t w = 0; w < m.wind_farms.size(); ++w)
    if (present_wind[w] && built.wind_cap[w] != 0.0)
      lp.add_entry(pin, d.col_gamma_max[w], built.wind_cap[w]);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    lp.add_entry(pin, d.col_theta[l][0], m.lines[l].capacity_mw);
    lp.add_entry(pin, d.col_theta[l][1], m.lines[l].capacity_mw);
  }

  lp.sense = lp::Sense::maximize;
  for (size_t g = 0; g < m.units.size(); ++g) {
    if (!present_unit[g]) continue;
    const auto& u = m.units[g];
    if (u.is_candidate() || u.owned_by_genco)
      lp.set_objective(d.col_phi_max[g], -built.unit_cap[g]);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    if (!present_wind[w]) continue;
    const auto& f = m.wind_farms[w];
    if (f.is_candidate() || f.owned_by_genco)
      lp.set_objective(d.col_gamma_max[w], -built.wind_cap[w]);
  }
  auto dsol = lp::solve_lp(lp, opt);
  if (dsol.status == lp::SolveStatus::infeasible) {
    // the exact floor can sit a rounding error above the attainable dual
    // optimum; retry with a relative hair of slack before giving up
    lp.rhs[pin] = vstar - 1e-9 * (1.0 + std::fabs(vstar));
    dsol = lp::solve_lp(lp, opt);
  }
  require(dsol.status == lp::SolveStatus::optimal, ErrorKind::numerical,
          "dual stage of the profit block not optimal");

  BlockOutcome out;
  out.profit_per_hour = dsol.objective;
  out.iterations = psol.iterations + dsol.iterations;
  // raw lambda*P products from the joint primal-dual optimal pair
  for (size_t g = 0; g < m.units.size(); ++g) {
    int pj = built.col_unit[g];
    if (pj < 0) continue;
    const auto& u = m.units[g];
    if (!u.is_candidate() && !u.owned_by_genco) continue;
    out.raw_profit_per_hour +=
        (dsol.x[d.col_lambda[built.unit_bus[g]]] - u.marginal_cost) * psol.x[pj];
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    int pj = built.col_wind[w];
    if (pj < 0) continue;
    const auto& f = m.wind_farms[w];
    if (!f.is_candidate() && !f.owned_by_genco) continue;
    out.raw_profit_per_hour += dsol.x[d.col_lambda[built.wind_bus[w]]] * psol.x[pj];
  }
  if (want_bigm) registry.check_into(dsol, out.bigm);
  return out;
}

// ---------------------------------------------------------------------------
// MILP route: relaxable chi columns for cumulative builds, every
// binary-continuous product through its auxiliary block.
// ---------------------------------------------------------------------------

struct MilpBlockLp {
  lp::LinearProgram lp;
  int s = 0, b = 0, y = 1;
  std::vector<int> chi_col;  // per (asset, bus-slot) pair, see pair maps below
  struct CandRef {
    AssetKind kind;
    int cand_pos;   // within candidate list
    int model_idx;  // into units / wind_farms
    int first_pair; // index into pair arrays
    int n_buses;
    int col_p = -1; // dispatch column
  };
  std::vector<CandRef> cands;
  std::vector<int> pair_bus;           // bus per (asset, slot) pair
  std::vector<double> pair_cap;        // capacity behind the product (k P_bar or wind P_bar)
  std::vector<ProductColumns> z_disp;  // chi * dispatch
  std::vector<ProductColumns> z_lmp;   // chi * lambda
  std::vector<ProductColumns> z_dual;  // chi * phi_max (units) or chi * gamma_max (wind)
  detail::DualSection dual;
  BigMRegistry registry;
  // objective bookkeeping for linearize_profit_terms
  std::vector<int> owned_unit_phi_cols, owned_wind_gamma_cols;
  std::vector<double> owned_unit_caps, owned_wind_caps;
};

// chi bounds per CandidateSpace var are translated by the caller into
// per-(asset,bus) cumulative bounds for this block's year.
inline MilpBlockLp build_milp_block(const SystemModel& m, const ScenarioSet& ss, int s, int b,
                                    int y, const std::vector<double>& chi_lb,
                                    const std::vector<double>& chi_ub) {
  MilpBlockLp out;
  out.s = s;
  out.b = b;
  out.y = y;
  const Scenario& sc = ss.scenarios[s];
  lp::LinearProgram& lp = out.lp;
  const int nb = m.num_buses();
  const DualBounds db = DualBounds::from(m);
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();

  // --- primal columns ---
  std::vector<int> col_unit(m.units.size(), -1), col_wind(m.wind_farms.size(), -1);
  std::vector<int> unit_bus(m.units.size(), -1), wind_bus(m.wind_farms.size(), -1);
  std::vector<double> unit_cap(m.units.size(), 0.0), wind_cap(m.wind_farms.size(), 0.0);
  for (size_t g = 0; g < m.units.size(); ++g) {
    const auto& u = m.units[g];
    if (u.is_candidate()) continue;
    unit_bus[g] = *u.bus;
    unit_cap[g] = sc.unit_available(int(g)) ? u.capacity_mw : 0.0;
    col_unit[g] = lp.add_column("P_" + u.id, 0.0, unit_cap[g], 0.0);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    const auto& f = m.wind_farms[w];
    if (f.is_candidate()) continue;
    wind_bus[w] = *f.bus;
    int site = ss.site_index(m.buses[*f.bus].id);
    require(site >= 0, ErrorKind::validation, "no wind data for farm " + f.id);
    wind_cap[w] = wind_power(f, ss.speed(s, site));
    col_wind[w] = lp.add_column("W_" + f.id, 0.0, wind_cap[w], 0.0);
  }
  std::vector<int> col_shed(nb), col_angle(nb);
  for (int n = 0; n < nb; ++n) {
    col_shed[n] = lp.add_column("S_" + m.buses[n].id, 0.0, m.block_load(n, b, y), 0.0);
    col_angle[n] = lp.add_column("d_" + m.buses[n].id, -lp::kInf, lp::kInf, 0.0);
  }

  // candidate dispatch columns and chi columns
  int pair_count = 0;
  auto add_cand = [&](AssetKind kind, int cand_pos, int model_idx,
                      const std::vector<int>& buses, double cap_all, const std::string& id) {
    MilpBlockLp::CandRef ref;
    ref.kind = kind;
    ref.cand_pos = cand_pos;
    ref.model_idx = model_idx;
    ref.first_pair = pair_count;
    ref.n_buses = int(buses.size());
    ref.col_p = lp.add_column("P_" + id, 0.0, cap_all, 0.0);
    for (size_t slot = 0; slot < buses.size(); ++slot) {
      out.pair_bus.push_back(buses[slot]);
      const size_t flat = out.chi_col.size();
      require(flat < chi_lb.size() && flat < chi_ub.size(), ErrorKind::internal,
              "chi bound vector too short");
      out.chi_col.push_back(lp.add_column("u_" + id + "_" + m.buses[buses[slot]].id,
                                          chi_lb[flat], chi_ub[flat], 0.0));
      ++pair_count;
    }
    out.cands.push_back(ref);
    return ref;
  };
  for (size_t i = 0; i < cu.size(); ++i) {
    const auto& u = m.units[cu[i]];
    const double kcap = sc.unit_available(cu[i]) ? u.capacity_mw : 0.0;
    auto ref = add_cand(AssetKind::unit, int(i), cu[i], u.candidate_buses, kcap, u.id);
    for (int sl = 0; sl < ref.n_buses; ++sl) out.pair_cap.push_back(kcap);
  }
  for (size_t i = 0; i < cw.size(); ++i) {
    const auto& f = m.wind_farms[cw[i]];
    double cap_max = 0.0;
    std::vector<double> site_cap(f.candidate_buses.size(), 0.0);
    for (size_t sl = 0; sl < f.candidate_buses.size(); ++sl) {
      int site = ss.site_index(m.buses[f.candidate_buses[sl]].id);
      require(site >= 0, ErrorKind::validation, "no wind data for farm " + f.id);
      site_cap[sl] = wind_power(f, ss.speed(s, site));
      cap_max = std::max(cap_max, site_cap[sl]);
    }
    add_cand(AssetKind::wind, int(i), cw[i], f.candidate_buses, cap_max, f.id);
    for (double c : site_cap) out.pair_cap.push_back(c);
  }

  // --- primal rows ---
  std::vector<int> row_balance(nb);
  for (int n = 0; n < nb; ++n)
    row_balance[n] = lp.add_row(lp::Relation::eq, m.block_load(n, b, y), "bal_" + m.buses[n].id);
  for (size_t g = 0; g < m.units.size(); ++g)
    if (col_unit[g] >= 0) lp.add_entry(row_balance[unit_bus[g]], col_unit[g], 1.0);
  for (size_t w = 0; w < m.wind_farms.size(); ++w)
    if (col_wind[w] >= 0) lp.add_entry(row_balance[wind_bus[w]], col_wind[w], 1.0);
  for (int n = 0; n < nb; ++n) lp.add_entry(row_balance[n], col_shed[n], 1.0);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    const auto& ln = m.lines[l];
    lp.add_entry(row_balance[ln.from], col_angle[ln.from], -ln.susceptance);
    lp.add_entry(row_balance[ln.from], col_angle[ln.to], ln.susceptance);
    lp.add_entry(row_balance[ln.to], col_angle[ln.to], -ln.susceptance);
    lp.add_entry(row_balance[ln.to], col_angle[ln.from], ln.susceptance);
  }
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    const auto& ln = m.lines[l];
    const std::string tag = std::to_string(l);
    int fwd = lp.add_row(lp::Relation::le, ln.capacity_mw, "flow_" + tag);
    int rev = lp.add_row(lp::Relation::le, ln.capacity_mw, "wolf_" + tag);
    lp.add_entry(fwd, col_angle[ln.from], ln.susceptance);
    lp.add_entry(fwd, col_angle[ln.to], -ln.susceptance);
    lp.add_entry(rev, col_angle[ln.from], -ln.susceptance);
    lp.add_entry(rev, col_angle[ln.to], ln.susceptance);
  }
  auto component = detail::connected_components(m, sc);
  int ncomp = *std::max_element(component.begin(), component.end()) + 1;
  std::vector<int> pin_bus(ncomp, -1);
  pin_bus[0] = m.slack_bus_index();
  for (int n = 0; n < nb; ++n)
    if (component[n] > 0 && pin_bus[component[n]] < 0) pin_bus[component[n]] = n;
  for (int c = 0; c < ncomp; ++c) {
    int r = lp.add_row(lp::Relation::eq, 0.0, "pin_" + m.buses[pin_bus[c]].id);
    lp.add_entry(r, col_angle[pin_bus[c]], 1.0);
  }

  // candidate capacity coupling and the one-bus row
  for (auto& ref : out.cands) {
    int cap_row = lp.add_row(lp::Relation::le, 0.0, "cap_" + lp.col_names[ref.col_p]);
    lp.add_entry(cap_row, ref.col_p, 1.0);
    for (int sl = 0; sl < ref.n_buses; ++sl)
      lp.add_entry(cap_row, out.chi_col[ref.first_pair + sl],
                   -out.pair_cap[ref.first_pair + sl]);
    int one = lp.add_row(lp::Relation::le, 1.0, "one_" + lp.col_names[ref.col_p]);
    for (int sl = 0; sl < ref.n_buses; ++sl)
      lp.add_entry(one, out.chi_col[ref.first_pair + sl], 1.0);
  }

  // --- dual columns and rows ---
  std::vector<int> present_unit(m.units.size(), 0), present_wind(m.wind_farms.size(), 0);
  for (size_t g = 0; g < m.units.size(); ++g) present_unit[g] = 1;  // candidates included
  for (size_t w = 0; w < m.wind_farms.size(); ++w) present_wind[w] = 1;
  out.dual = detail::add_dual_columns(lp, m, sc, db, present_unit, present_wind, ncomp,
                                      out.registry);
  const auto& d = out.dual;

  // products: chi * dispatch into the balance rows, chi * lambda into the
  // candidate dual rows, chi * (phi_max | gamma_max) into strong duality
  out.z_disp.resize(pair_count);
  out.z_lmp.resize(pair_count);
  out.z_dual.resize(pair_count);
  for (auto& ref : out.cands) {
    const bool is_unit = ref.kind == AssetKind::unit;
    const std::string id = is_unit ? m.units[ref.model_idx].id : m.wind_farms[ref.model_idx].id;
    const double pmax_disp = lp.upper[ref.col_p];
    const int dual_col =
        is_unit ? d.col_phi_max[ref.model_idx] : d.col_gamma_max[ref.model_idx];
    const double dual_lo = lp.lower[dual_col];
    for (int sl = 0; sl < ref.n_buses; ++sl) {
      const int pair = ref.first_pair + sl;
      const int chi = out.chi_col[pair];
      const std::string tag = id + "_" + m.buses[out.pair_bus[pair]].id;
      out.z_disp[pair] = linearize_binary_continuous(lp, chi, ref.col_p, 0.0, pmax_disp,
                                                     "disp_" + tag);
      out.z_lmp[pair] = linearize_binary_continuous(lp, chi, d.col_lambda[out.pair_bus[pair]],
                                                    -db.lambda, db.lambda, "lmp_" + tag);
      out.z_dual[pair] =
          linearize_binary_continuous(lp, chi, dual_col, dual_lo, 0.0, "dmax_" + tag);
      lp.add_entry(row_balance[out.pair_bus[pair]], out.z_disp[pair].z, 1.0);
      // registry: lambda and dual-max products ride on artificial boxes
      out.registry.add(out.z_lmp[pair].z, -db.lambda, db.lambda, true, true, "z_lmp@" + tag);
      out.registry.add(out.z_dual[pair].z, dual_lo, 0.0, true, false, "z_dual@" + tag);
    }
  }

  // dual rows for existing units / shed / existing wind
  for (size_t g = 0; g < m.units.size(); ++g) {
    const auto& u = m.units[g];
    int r = lp.add_row(lp::Relation::eq, u.marginal_cost, "dP_" + u.id);
    if (!u.is_candidate()) lp.add_entry(r, d.col_lambda[unit_bus[g]], 1.0);
    lp.add_entry(r, d.col_phi_min[g], 1.0);
    lp.add_entry(r, d.col_phi_max[g], 1.0);
    if (u.is_candidate()) {
      // candidate: sum_n z(chi, lambda_n) replaces the lambda term
      for (auto& ref : out.cands)
        if (ref.kind == AssetKind::unit && ref.model_idx == int(g))
          for (int sl = 0; sl < ref.n_buses; ++sl)
            lp.add_entry(r, out.z_lmp[ref.first_pair + sl].z, 1.0);
    }
  }
  for (int n = 0; n < nb; ++n) {
    int r = lp.add_row(lp::Relation::eq, m.config.voll, "dS_" + m.buses[n].id);
    lp.add_entry(r, d.col_lambda[n], 1.0);
    lp.add_entry(r, d.col_beta_min[n], 1.0);
    lp.add_entry(r, d.col_beta_max[n], 1.0);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    const auto& f = m.wind_farms[w];
    int r = lp.add_row(lp::Relation::eq, 0.0, "dW_" + f.id);
    if (!f.is_candidate()) lp.add_entry(r, d.col_lambda[wind_bus[w]], 1.0);
    lp.add_entry(r, d.col_gamma_min[w], 1.0);
    lp.add_entry(r, d.col_gamma_max[w], 1.0);
    if (f.is_candidate()) {
      for (auto& ref : out.cands)
        if (ref.kind == AssetKind::wind && ref.model_idx == int(w))
          for (int sl = 0; sl < ref.n_buses; ++sl)
            lp.add_entry(r, out.z_lmp[ref.first_pair + sl].z, 1.0);
    }
  }
  detail::add_angle_dual_rows(lp, m, sc, d, component, pin_bus);

  // strong duality with the product substitutions
  int sd = lp.add_row(lp::Relation::eq, 0.0, "strong_duality");
  out.dual.sd_row = sd;
  for (size_t g = 0; g < m.units.size(); ++g)
    if (col_unit[g] >= 0) {
      lp.add_entry(sd, col_unit[g], m.units[g].marginal_cost);
      lp.add_entry(sd, d.col_phi_max[g], -unit_cap[g]);
    }
  for (int n = 0; n < nb; ++n) {
    const double load = m.block_load(n, b, y);
    lp.add_entry(sd, col_shed[n], m.config.voll);
    lp.add_entry(sd, d.col_lambda[n], -load);
    lp.add_entry(sd, d.col_beta_max[n], -load);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w)
    if (col_wind[w] >= 0) lp.add_entry(sd, d.col_gamma_max[w], -wind_cap[w]);
  for (size_t l = 0; l < m.lines.size(); ++l) {
    if (!sc.line_available(int(l))) continue;
    lp.add_entry(sd, d.col_theta[l][0], -m.lines[l].capacity_mw);
    lp.add_entry(sd, d.col_theta[l][1], -m.lines[l].capacity_mw);
  }
  for (auto& ref : out.cands) {
    lp.add_entry(sd, ref.col_p, ref.kind == AssetKind::unit
                                    ? m.units[ref.model_idx].marginal_cost
                                    : 0.0);
    for (int sl = 0; sl < ref.n_buses; ++sl)
      lp.add_entry(sd, out.z_dual[ref.first_pair + sl].z, -out.pair_cap[ref.first_pair + sl]);
  }

  // bookkeeping for the profit objective
  for (size_t g = 0; g < m.units.size(); ++g) {
    const auto& u = m.units[g];
    if (u.is_candidate() || !u.owned_by_genco || col_unit[g] < 0) continue;
    out.owned_unit_phi_cols.push_back(d.col_phi_max[g]);
    out.owned_unit_caps.push_back(unit_cap[g]);
  }
  for (size_t w = 0; w < m.wind_farms.size(); ++w) {
    const auto& f = m.wind_farms[w];
    if (f.is_candidate() || !f.owned_by_genco || col_wind[w] < 0) continue;
    out.owned_wind_gamma_cols.push_back(d.col_gamma_max[w]);
    out.owned_wind_caps.push_back(wind_cap[w]);
  }
  return out;
}

// Objective substitution: every bilinear price-quantity profit term becomes
// its dual-linear equivalent; candidate terms flow through the product
// blocks built above.
inline void linearize_profit_terms(MilpBlockLp& blk) {
  lp::LinearProgram& lp = blk.lp;
  lp.sense = lp::Sense::maximize;
  for (size_t i = 0; i < blk.owned_unit_phi_cols.size(); ++i)
    lp.set_objective(blk.owned_unit_phi_cols[i], -blk.owned_unit_caps[i]);
  for (size_t i = 0; i < blk.owned_wind_gamma_cols.size(); ++i)
    lp.set_objective(blk.owned_wind_gamma_cols[i], -blk.owned_wind_caps[i]);
  for (auto& ref : blk.cands) {
    // production cost of candidates enters the profit with a minus sign:
    // (sum_n u lambda - C) P  ->  -sum_n k u_hat P_bar phi_max  (units)
    for (int sl = 0; sl < ref.n_buses; ++sl) {
      const int pair = ref.first_pair + sl;
      lp.set_objective(blk.z_dual[pair].z, -blk.pair_cap[pair]);
    }
  }
}

inline BlockOutcome solve_milp_block(const SystemModel& m, const ScenarioSet& ss, int s, int b,
                                     int y, const std::vector<double>& chi_lb,
                                     const std::vector<double>& chi_ub, bool want_bigm = false) {
  auto blk = build_milp_block(m, ss, s, b, y, chi_lb, chi_ub);
  linearize_profit_terms(blk);
  lp::SolveOptions opt;
  opt.feas_tol = m.config.feas_tol;
  auto sol = lp::solve_lp(blk.lp, opt);
  require(sol.status == lp::SolveStatus::optimal, ErrorKind::numerical,
          "profit block LP not optimal (milp route)");
  BlockOutcome out;
  out.profit_per_hour = sol.objective;
  out.iterations = sol.iterations;
  out.chi.resize(blk.chi_col.size());
  for (size_t i = 0; i < blk.chi_col.size(); ++i) out.chi[i] = sol.x[blk.chi_col[i]];
  if (want_bigm) blk.registry.check_into(sol, out.bigm);
  return out;
}

}  // namespace gep
