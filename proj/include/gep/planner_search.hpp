#pragma once

// plan evaluation, exhaustive enumeration oracle, branch-and-bound over the
// investment binaries, and the assembled single-level MILP.

namespace gep {

enum class PlanRoute { oracle, milp };

struct PlanEvaluation {
  double objective = 0.0;      // discounted expected profit
  double raw_objective = 0.0;  // lambda*P reconstruction (oracle route)
  std::vector<double> scenario_contrib;  // per scenario: discounted expected pool profit
  BigMReport bigm;
};

namespace detail {

// (asset, bus-slot) pair indexing shared with MilpBlockLp's chi layout
struct PairSpace {
  std::vector<int> asset_first;  // per flat asset + sentinel
  std::vector<int> n_buses;      // per flat asset
  int total = 0;

  static PairSpace build(const SystemModel& m) {
    PairSpace ps;
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    for (int g : cu) {
      ps.asset_first.push_back(ps.total);
      ps.n_buses.push_back(int(m.units[g].candidate_buses.size()));
      ps.total += ps.n_buses.back();
    }
    for (int w : cw) {
      ps.asset_first.push_back(ps.total);
      ps.n_buses.push_back(int(m.wind_farms[w].candidate_buses.size()));
      ps.total += ps.n_buses.back();
    }
    ps.asset_first.push_back(ps.total);
    return ps;
  }
};

// cumulative chi bounds for one year from a plan (pinned evaluation)
inline void chi_from_plan(const SystemModel& m, const PairSpace& ps, const InvestmentPlan& plan,
                          int year, std::vector<double>& lb, std::vector<double>& ub) {
  lb.assign(ps.total, 0.0);
  ub.assign(ps.total, 0.0);
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  int asset = 0;
  auto pin = [&](const std::optional<BuildDecision>& d, const std::vector<int>& buses) {
    if (d && d->year <= year) {
      int slot = int(std::find(buses.begin(), buses.end(), d->bus) - buses.begin());
      lb[ps.asset_first[asset] + slot] = 1.0;
      ub[ps.asset_first[asset] + slot] = 1.0;
    }
    ++asset;
  };
  for (size_t i = 0; i < cu.size(); ++i) pin(plan.unit_builds[i], m.units[cu[i]].candidate_buses);
  for (size_t i = 0; i < cw.size(); ++i)
    pin(plan.wind_builds[i], m.wind_farms[cw[i]].candidate_buses);
}

struct BlockGrid {
  int S = 0, B = 0, Y = 1;
  size_t cells() const { return size_t(S) * B * Y; }
  void split(size_t cell, int& s, int& b, int& y) const {
    y = int(cell / (size_t(S) * B)) + 1;
    size_t rem = cell % (size_t(S) * B);
    s = int(rem / B);
    b = int(rem % B);
  }
  double weight(const SystemModel& m, const ScenarioSet& ss, int s, int b, int y) const {
    return ss.scenarios[s].probability * m.blocks[b].duration_h * m.discount(y);
  }
};

}  // namespace detail

inline PlanEvaluation evaluate_plan(const SystemModel& m, const ScenarioSet& ss,
                                    const InvestmentPlan& plan, PlanRoute route, int threads,
                                    bool want_bigm = false) {
  plan.validate(m);
  detail::BlockGrid grid{ss.size(), int(m.blocks.size()), m.config.years};
  const auto ps = detail::PairSpace::build(m);
  std::vector<BlockOutcome> outcomes(grid.cells());
  parallel_for(grid.cells(), threads, [&](size_t cell) {
    int s, b, y;
    grid.split(cell, s, b, y);
    if (route == PlanRoute::oracle) {
      outcomes[cell] = solve_oracle_block(m, ss, s, b, y, plan, want_bigm);
    } else {
      std::vector<double> lb, ub;
      detail::chi_from_plan(m, ps, plan, y, lb, ub);
      outcomes[cell] = solve_milp_block(m, ss, s, b, y, lb, ub, want_bigm);
    }
  });
  PlanEvaluation ev;
  ev.scenario_contrib.assign(ss.size(), 0.0);
  for (size_t cell = 0; cell < grid.cells(); ++cell) {
    int s, b, y;
    grid.split(cell, s, b, y);
    const double w = grid.weight(m, ss, s, b, y);
    ev.objective += w * outcomes[cell].profit_per_hour;
    ev.raw_objective += w * outcomes[cell].raw_profit_per_hour;
    ev.scenario_contrib[s] += w * outcomes[cell].profit_per_hour;
    if (want_bigm) ev.bigm.merge(outcomes[cell].bigm);
  }
  const double invest = plan.invest_cost_discounted(m);
  ev.objective -= invest;
  ev.raw_objective -= invest;
  return ev;
}

// ---------------------------------------------------------------------------
// Oracle: exhaustive enumeration over feasible binary vectors.
// ---------------------------------------------------------------------------

struct PlannerOptions {
  double gap = 0.0;
  double time_limit_s = 0.0;
  int threads = 1;
  long plan_cap = 2000000;
  bool want_bigm = true;
};

struct PlannerResult {
  InvestmentPlan plan;
  double objective = 0.0;
  double bound_gap = 0.0;
  long nodes = 0;  // oracle: plans evaluated; bnb: nodes expanded
  std::vector<double> scenario_profit;  // expected discounted pool profit per scenario
  BigMReport bigm;
};

namespace detail {

inline double tie_tol(double v) { return 1e-9 * (1.0 + std::fabs(v)); }

// identical candidate assets admit a canonical nondecreasing option order
inline std::vector<int> symmetry_groups(const SystemModel& m) {
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  std::vector<std::string> sig;
  for (int g : cu) {
    const auto& u = m.units[g];
    std::string s = "u|" + fmt_double(u.capacity_mw) + "|" + fmt_double(u.marginal_cost) + "|" +
                    fmt_double(u.for_rate) + "|" + fmt_double(u.invest_cost_per_year.value_or(0));
    for (int b : u.candidate_buses) s += ";" + std::to_string(b);
    sig.push_back(s);
  }
  for (int w : cw) {
    const auto& f = m.wind_farms[w];
    std::string s = "w|" + std::to_string(f.n_turbines) + "|" +
                    fmt_double(f.invest_cost_per_year.value_or(0));
    for (int b : f.candidate_buses) s += ";" + std::to_string(b);
    sig.push_back(s);
  }
  std::vector<int> group(sig.size());
  for (size_t i = 0; i < sig.size(); ++i) {
    group[i] = int(i);
    for (size_t j = 0; j < i; ++j)
      if (sig[j] == sig[i]) {
        group[i] = group[j];
        break;
      }
  }
  return group;
}

inline std::vector<InvestmentPlan> enumerate_plans(const SystemModel& m, long cap) {
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  const int n_assets = int(cu.size() + cw.size());
  std::vector<int> options(n_assets);
  for (size_t i = 0; i < cu.size(); ++i)
    options[i] = 1 + m.config.years * int(m.units[cu[i]].candidate_buses.size());
  for (size_t i = 0; i < cw.size(); ++i)
    options[cu.size() + i] = 1 + m.config.years * int(m.wind_farms[cw[i]].candidate_buses.size());
  auto group = symmetry_groups(m);

  std::vector<InvestmentPlan> plans;
  std::vector<int> choice(n_assets, 0);
  std::function<void(int)> rec = [&](int a) {
    if (a == n_assets) {
      InvestmentPlan p = InvestmentPlan::none(m);
      for (int i = 0; i < n_assets; ++i) {
        if (choice[i] == 0) continue;
        const bool is_unit = i < int(cu.size());
        const auto& buses = is_unit ? m.units[cu[i]].candidate_buses
                                    : m.wind_farms[cw[i - cu.size()]].candidate_buses;
        int o = choice[i] - 1;
        BuildDecision d{buses[o % buses.size()], 1 + o / int(buses.size())};
        if (is_unit)
          p.unit_builds[i] = d;
        else
          p.wind_builds[i - cu.size()] = d;
      }
      plans.push_back(std::move(p));
      require(long(plans.size()) <= cap, ErrorKind::cap_exceeded,
              strf("candidate plan count exceeds cap %ld", cap));
      return;
    }
    // canonical order within a symmetry group: options nondecreasing
    int start = 0;
    for (int j = 0; j < a; ++j)
      if (group[j] == group[a]) start = std::max(start, choice[j]);
    for (int o = start; o < options[a]; ++o) {
      choice[a] = o;
      rec(a + 1);
    }
    choice[a] = 0;
  };
  rec(0);
  return plans;
}

}  // namespace detail

// Exact cross-validation oracle: for every feasible binary vector, fix the
// cumulative indicators and solve the per-block primal/dual/strong-duality
// profit LPs; returns the argmax (lexicographically smallest on ties).
inline PlannerResult enumerate_oracle(const SystemModel& m, const ScenarioSet& ss,
                                      const PlannerOptions& opts = {}) {
  ss.validate();
  auto plans = detail::enumerate_plans(m, opts.plan_cap);
  require(!plans.empty(), ErrorKind::internal, "plan enumeration produced nothing");

  std::vector<double> value(plans.size());
  parallel_for(plans.size(), opts.threads, [&](size_t i) {
    value[i] = evaluate_plan(m, ss, plans[i], PlanRoute::oracle, 1).objective;
  });
  size_t best = 0;
  for (size_t i = 1; i < plans.size(); ++i)
    if (value[i] > value[best] + detail::tie_tol(value[best])) best = i;
  // plans are generated in ascending lexicographic order, so the first
  // index within tolerance of the max is the canonical tie-break winner

  PlannerResult r;
  r.plan = plans[best];
  r.nodes = long(plans.size());
  auto ev = evaluate_plan(m, ss, r.plan, PlanRoute::oracle, opts.threads, opts.want_bigm);
  r.objective = ev.objective;
  r.scenario_profit = ev.scenario_contrib;
  r.bigm = ev.bigm;
  return r;
}

// ---------------------------------------------------------------------------
// Branch-and-bound on the binary columns. Node bounds decompose over the
// (s,b,y) blocks: each block maximizes profit over the node's chi box, and
// only committed builds pay investment, which upper-bounds the true optimum.
// ---------------------------------------------------------------------------

struct MilpModel {
  const SystemModel* model = nullptr;
  const ScenarioSet* scenarios = nullptr;
  CandidateSpace space;
  detail::PairSpace pairs;
  detail::BlockGrid grid;
  std::vector<double> var_invest;  // per binary: discounted annualized stream
  long est_rows = 0, est_cols = 0, est_nnz = 0;  // monolithic estimate

  lp::LinearProgram assemble_monolithic(std::vector<int>* binary_cols = nullptr,
                                        BigMRegistry* registry = nullptr) const;
};

inline MilpModel build_milp(const SystemModel& m, const ScenarioSet& ss) {
  ss.validate();
  MilpModel mm;
  mm.model = &m;
  mm.scenarios = &ss;
  mm.space = CandidateSpace::build(m);
  mm.pairs = detail::PairSpace::build(m);
  mm.grid = {ss.size(), int(m.blocks.size()), m.config.years};
  mm.var_invest.resize(mm.space.vars.size());
  for (size_t i = 0; i < mm.space.vars.size(); ++i) {
    const BinVar& v = mm.space.vars[i];
    double stream = 0.0;
    for (int y = v.year; y <= m.config.years; ++y)
      stream += m.discount(y) * (v.kind == AssetKind::unit
                                     ? m.units[m.candidate_unit_indices()[v.cand_pos]]
                                           .invest_cost(v.bus, y)
                                     : m.wind_farms[m.candidate_wind_indices()[v.cand_pos]]
                                           .invest_cost(v.bus, y));
    mm.var_invest[i] = stream;
  }
  // size estimate from one sample block
  std::vector<double> lb(mm.pairs.total, 0.0), ub(mm.pairs.total, 1.0);
  auto sample = build_milp_block(m, ss, 0, 0, 1, lb, ub);
  long nnz = 0;
  for (auto& row : sample.lp.rows) nnz += long(row.size());
  mm.est_rows = long(sample.lp.num_rows()) * long(mm.grid.cells());
  mm.est_cols = long(sample.lp.num_cols()) * long(mm.grid.cells());
  mm.est_nnz = nnz * long(mm.grid.cells());
  const double est_mb =
      (mm.est_nnz * 16.0 + mm.est_cols * 80.0 + mm.est_rows * 80.0) / (1024.0 * 1024.0);
  require(est_mb <= m.config.milp_memory_mb, ErrorKind::cap_exceeded,
          strf("assembled MILP would need ~%.0f MB, budget %.0f MB", est_mb,
               m.config.milp_memory_mb));
  return mm;
}

inline lp::LinearProgram MilpModel::assemble_monolithic(std::vector<int>* binary_cols,
                                                        BigMRegistry* registry) const {
  const SystemModel& m = *model;
  lp::LinearProgram big;
  // global binaries u and cumulative indicators u_hat
  std::vector<int> col_u(space.vars.size());
  for (size_t i = 0; i < space.vars.size(); ++i) {
    const BinVar& v = space.vars[i];
    col_u[i] = big.add_column(strf("u_a%d_%s_y%d", v.asset, m.buses[v.bus].id.c_str(), v.year),
                              0.0, 1.0, 0.0);
  }
  if (binary_cols) *binary_cols = col_u;
  std::vector<int> col_uhat(space.vars.size());
  for (size_t i = 0; i < space.vars.size(); ++i) {
    const BinVar& v = space.vars[i];
    col_uhat[i] = big.add_column(
        strf("uhat_a%d_%s_y%d", v.asset, m.buses[v.bus].id.c_str(), v.year), 0.0, 1.0, 0.0);
  }
  // one placement per asset over all buses and years
  for (int a = 0; a < space.num_assets(); ++a) {
    int r = big.add_row(lp::Relation::le, 1.0, strf("one_asset_%d", a));
    for (int i = space.asset_var_begin[a]; i < space.asset_var_begin[a + 1]; ++i)
      big.add_entry(r, col_u[i], 1.0);
  }
  // cumulative linkage u_hat_{n,y} = sum_{y'<=y} u_{n,y'}
  for (size_t i = 0; i < space.vars.size(); ++i) {
    const BinVar& v = space.vars[i];
    int r = big.add_row(lp::Relation::eq, 0.0, "cum_" + big.col_names[col_u[i]]);
    big.add_entry(r, col_uhat[i], 1.0);
    for (size_t j = space.asset_var_begin[v.asset]; j < size_t(space.asset_var_begin[v.asset + 1]);
         ++j) {
      const BinVar& w = space.vars[j];
      if (w.bus == v.bus && w.year <= v.year) big.add_entry(r, col_u[j], -1.0);
    }
  }
  // investment: u_hat pays its year's annualized cost (discounted)
  for (size_t i = 0; i < space.vars.size(); ++i) {
    const BinVar& v = space.vars[i];
    const double cost_y =
        m.discount(v.year) *
        (v.kind == AssetKind::unit
             ? m.units[m.candidate_unit_indices()[v.cand_pos]].invest_cost(v.bus, v.year)
             : m.wind_farms[m.candidate_wind_indices()[v.cand_pos]].invest_cost(v.bus, v.year));
    big.set_objective(col_uhat[i], -cost_y);
  }
  big.sense = lp::Sense::maximize;

  // splice every block, remapping its chi columns onto the global u_hat
  std::vector<double> lb(pairs.total, 0.0), ub(pairs.total, 1.0);
  for (size_t cell = 0; cell < grid.cells(); ++cell) {
    int s, b, y;
    grid.split(cell, s, b, y);
    auto blk = build_milp_block(m, *scenarios, s, b, y, lb, ub);
    linearize_profit_terms(blk);
    const double w = grid.weight(m, *scenarios, s, b, y);
    const std::string prefix = strf("s%db%dy%d_", s, b, y);
    // chi(pair) -> uhat var of (pair, y)
    std::vector<int> chi_to_global(blk.chi_col.size(), -1);
    {
      int pair = 0;
      for (int a = 0; a < space.num_assets(); ++a)
        for (int slot = 0; slot < pairs.n_buses[a]; ++slot, ++pair)
          for (int i = space.asset_var_begin[a]; i < space.asset_var_begin[a + 1]; ++i)
            if (space.vars[i].bus_slot == slot && space.vars[i].year == y)
              chi_to_global[pair] = col_uhat[i];
    }
    std::vector<int> col_map(blk.lp.num_cols(), -1);
    for (size_t pair = 0; pair < blk.chi_col.size(); ++pair)
      col_map[blk.chi_col[pair]] = chi_to_global[pair];
    for (int j = 0; j < blk.lp.num_cols(); ++j) {
      if (col_map[j] >= 0) continue;
      col_map[j] = big.add_column(prefix + blk.lp.col_names[j], blk.lp.lower[j], blk.lp.upper[j],
                                  w * blk.lp.cost[j]);
      if (registry) {
        for (auto& e : blk.registry.entries)
          if (e.col == j)
            registry->add(col_map[j], e.lo, e.hi, e.artificial_lo, e.artificial_hi,
                          prefix + e.what);
      }
    }
    for (size_t pair = 0; pair < blk.chi_col.size(); ++pair)
      if (blk.lp.cost[blk.chi_col[pair]] != 0.0)
        raise(ErrorKind::internal, "chi columns must not carry objective");
    for (int ri = 0; ri < blk.lp.num_rows(); ++ri) {
      int r = big.add_row(blk.lp.row_rel[ri], blk.lp.rhs[ri], prefix + blk.lp.row_names[ri]);
      for (auto& e : blk.lp.rows[ri]) big.add_entry(r, col_map[e.col], e.coef);
    }
  }
  return big;
}

// Best-first branch-and-bound; identical tie-break to the oracle.
inline PlannerResult solve_bnb(const MilpModel& mm, const PlannerOptions& opts = {}) {
  const SystemModel& m = *mm.model;
  const ScenarioSet& ss = *mm.scenarios;
  const int nvars = int(mm.space.vars.size());
  const auto start_time = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  };

  struct Node {
    std::vector<int8_t> fix;  // -1 free / 0 / 1
    double bound = 0.0;
    int depth = 0;
    long id = 0;
  };
  struct Order {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
      if (a.depth != b.depth) return a.depth < b.depth;  // dive on ties
      return a.id > b.id;
    }
  };

  // chi box for one year from the fixings
  auto chi_box = [&](const std::vector<int8_t>& fix, int year, std::vector<double>& lb,
                     std::vector<double>& ub) {
    lb.assign(mm.pairs.total, 0.0);
    ub.assign(mm.pairs.total, 0.0);
    for (int i = 0; i < nvars; ++i) {
      const BinVar& v = mm.space.vars[i];
      if (v.year > year) continue;
      const int pair = mm.pairs.asset_first[v.asset] + v.bus_slot;
      if (fix[i] == 1) lb[pair] = 1.0;
      if (fix[i] != 0) ub[pair] = 1.0;
    }
    for (int p = 0; p < mm.pairs.total; ++p) ub[p] = std::max(ub[p], lb[p]);
  };

  // node evaluation: decomposed relaxation bound; chi averages for branching
  struct NodeEval {
    double bound;
    std::vector<double> chi_mean;  // per (pair, year): weighted mean of block choices
  };
  auto eval_node = [&](const std::vector<int8_t>& fix) {
    NodeEval ev;
    ev.chi_mean.assign(size_t(mm.pairs.total) * m.config.years, 0.0);
    std::vector<double> wsum(m.config.years, 0.0);
    std::vector<BlockOutcome> outs(mm.grid.cells());
    std::vector<std::vector<double>> lbs(m.config.years), ubs(m.config.years);
    for (int y = 1; y <= m.config.years; ++y) chi_box(fix, y, lbs[y - 1], ubs[y - 1]);
    parallel_for(mm.grid.cells(), opts.threads, [&](size_t cell) {
      int s, b, y;
      mm.grid.split(cell, s, b, y);
      outs[cell] = solve_milp_block(m, ss, s, b, y, lbs[y - 1], ubs[y - 1]);
    });
    double invest_lb = 0.0;
    for (int i = 0; i < nvars; ++i)
      if (fix[i] == 1) invest_lb += mm.var_invest[i];
    ev.bound = -invest_lb;
    for (size_t cell = 0; cell < mm.grid.cells(); ++cell) {
      int s, b, y;
      mm.grid.split(cell, s, b, y);
      const double w = mm.grid.weight(m, ss, s, b, y);
      ev.bound += w * outs[cell].profit_per_hour;
      wsum[y - 1] += w;
      for (int p = 0; p < mm.pairs.total; ++p)
        ev.chi_mean[size_t(y - 1) * mm.pairs.total + p] += w * outs[cell].chi[p];
    }
    for (int y = 0; y < m.config.years; ++y)
      for (int p = 0; p < mm.pairs.total; ++p)
        if (wsum[y] > 0) ev.chi_mean[size_t(y) * mm.pairs.total + p] /= wsum[y];
    return ev;
  };

  // exact value of a fully specified assignment, through the MILP route
  auto eval_leaf = [&](const std::vector<int8_t>& fix) {
    std::vector<int8_t> u(fix);
    for (auto& v : u)
      if (v < 0) v = 0;
    InvestmentPlan plan = mm.space.plan_from_assignment(m, u);
    double value = evaluate_plan(m, ss, plan, PlanRoute::milp, opts.threads).objective;
    return std::pair<InvestmentPlan, double>(std::move(plan), value);
  };

  // incumbent bookkeeping with the lexicographic tie rule
  InvestmentPlan best_plan = InvestmentPlan::none(m);
  double best_value = evaluate_plan(m, ss, best_plan, PlanRoute::milp, opts.threads).objective;
  auto offer = [&](const InvestmentPlan& p, double v) {
    const double tol = detail::tie_tol(std::max(std::fabs(v), std::fabs(best_value)));
    if (v > best_value + tol) {
      best_plan = p;
      best_value = v;
    } else if (v >= best_value - tol && p.lex_less(best_plan, m)) {
      best_plan = p;
      best_value = std::max(best_value, v);
    }
  };

  std::priority_queue<Node, std::vector<Node>, Order> open;
  long next_id = 0, expanded = 0;
  {
    Node root;
    root.fix.assign(nvars, -1);
    root.bound = nvars == 0 ? best_value : eval_node(root.fix).bound;
    root.id = next_id++;
    open.push(std::move(root));
  }
  double final_gap = 0.0;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    const double tol = detail::tie_tol(std::max(std::fabs(best_value), std::fabs(node.bound)));
    if (node.bound < best_value - tol) continue;  // pruned; equal bounds still explored
    if (opts.gap > 0 &&
        node.bound - best_value <= opts.gap * std::max(1.0, std::fabs(best_value))) {
      final_gap = std::max(0.0, (node.bound - best_value) / std::max(1.0, std::fabs(best_value)));
      break;
    }
    if (opts.time_limit_s > 0 && elapsed() > opts.time_limit_s) {
      final_gap = std::max(0.0, (node.bound - best_value) / std::max(1.0, std::fabs(best_value)));
      break;
    }
    ++expanded;

    const bool all_fixed =
        std::none_of(node.fix.begin(), node.fix.end(), [](int8_t v) { return v < 0; });
    if (all_fixed) {
      auto [plan, value] = eval_leaf(node.fix);
      offer(plan, value);
      continue;
    }

    NodeEval ev = eval_node(node.fix);
    if (ev.bound < best_value - detail::tie_tol(best_value)) continue;

    // implied fractional u per free variable
    int branch_var = -1;
    double best_frac = -1.0;
    for (int i = 0; i < nvars; ++i) {
      if (node.fix[i] != -1) continue;
      const BinVar& v = mm.space.vars[i];
      const int pair = mm.pairs.asset_first[v.asset] + v.bus_slot;
      const double cum_y = ev.chi_mean[size_t(v.year - 1) * mm.pairs.total + pair];
      const double cum_prev =
          v.year >= 2 ? ev.chi_mean[size_t(v.year - 2) * mm.pairs.total + pair] : 0.0;
      const double u_implied = std::clamp(cum_y - cum_prev, 0.0, 1.0);
      const double frac = std::fabs(u_implied - std::round(u_implied));
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch_var = i;
      }
    }
    if (best_frac < 1e-6) {
      // consensus is integral: evaluate the implied plan exactly
      std::vector<int8_t> u(node.fix);
      for (int i = 0; i < nvars; ++i) {
        if (u[i] != -1) continue;
        const BinVar& v = mm.space.vars[i];
        const int pair = mm.pairs.asset_first[v.asset] + v.bus_slot;
        const double cum_y = ev.chi_mean[size_t(v.year - 1) * mm.pairs.total + pair];
        const double cum_prev =
            v.year >= 2 ? ev.chi_mean[size_t(v.year - 2) * mm.pairs.total + pair] : 0.0;
        u[i] = std::round(std::clamp(cum_y - cum_prev, 0.0, 1.0)) >= 1 ? 1 : 0;
      }
      // repair double builds within an asset deterministically
      for (int a = 0; a < mm.space.num_assets(); ++a) {
        bool taken = false;
        for (int i = mm.space.asset_var_begin[a]; i < mm.space.asset_var_begin[a + 1]; ++i) {
          if (u[i] == 1) {
            if (taken) u[i] = 0;
            taken = true;
          }
        }
      }
      auto plan = mm.space.plan_from_assignment(m, std::vector<int8_t>(u));
      double value = evaluate_plan(m, ss, plan, PlanRoute::milp, opts.threads).objective;
      offer(plan, value);
      if (ev.bound - value <= detail::tie_tol(std::max(std::fabs(ev.bound), std::fabs(value))))
        continue;  // bound attained: close
      // otherwise force a decision on the first free implied-build variable
      branch_var = -1;
      for (int i = 0; i < nvars && branch_var < 0; ++i)
        if (node.fix[i] == -1 && u[i] == 1) branch_var = i;
      if (branch_var < 0)
        for (int i = 0; i < nvars && branch_var < 0; ++i)
          if (node.fix[i] == -1) branch_var = i;
    }

    // children: u = 1 (propagating the one-placement rule) and u = 0
    {
      Node on;
      on.fix = node.fix;
      on.fix[branch_var] = 1;
      const BinVar& v = mm.space.vars[branch_var];
      for (int i = mm.space.asset_var_begin[v.asset]; i < mm.space.asset_var_begin[v.asset + 1];
           ++i)
        if (i != branch_var) on.fix[i] = 0;
      on.depth = node.depth + 1;
      on.bound = node.bound;  // parent bound is valid; refined on expansion
      on.id = next_id++;
      open.push(std::move(on));
      Node off;
      off.fix = node.fix;
      off.fix[branch_var] = 0;
      off.depth = node.depth + 1;
      off.bound = node.bound;
      off.id = next_id++;
      open.push(std::move(off));
    }
  }
  PlannerResult r;
  r.plan = best_plan;
  r.nodes = expanded;
  r.bound_gap = final_gap;
  auto ev = evaluate_plan(m, ss, best_plan, PlanRoute::milp, opts.threads, opts.want_bigm);
  r.objective = ev.objective;
  r.scenario_profit = ev.scenario_contrib;
  r.bigm = ev.bigm;
  return r;
}

// criterion-3 style reconstruction: raw lambda*P profit at a fixed plan via
// fresh oracle-route solves
inline double reconstruct_raw_profit(const SystemModel& m, const ScenarioSet& ss,
                                     const InvestmentPlan& plan, int threads = 1) {
  return evaluate_plan(m, ss, plan, PlanRoute::oracle, threads).raw_objective;
}

}  // namespace gep
