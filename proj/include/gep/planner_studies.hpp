#pragma once

// Study procedures quantifying how much expected profit is lost when
// expansion is planned while ignoring equipment failures or wind
// correlation: plan on the reduced uncertainty set, then re-price that plan
// on the full one and compare with planning on the full set directly.

namespace gep {

enum class PlanMode { milp, oracle, both };

struct StudyOptions {
  PlanMode mode = PlanMode::oracle;
  PlannerOptions planner;
  uint64_t seed = 0;
  long scenario_cap = 200000;
};

namespace detail {

inline PlannerResult plan_argmax(const SystemModel& m, const ScenarioSet& ss,
                                 const StudyOptions& opts) {
  switch (opts.mode) {
    case PlanMode::oracle:
      return enumerate_oracle(m, ss, opts.planner);
    case PlanMode::milp: {
      auto mm = build_milp(m, ss);
      return solve_bnb(mm, opts.planner);
    }
    case PlanMode::both: {
      auto oracle = enumerate_oracle(m, ss, opts.planner);
      auto mm = build_milp(m, ss);
      auto bnb = solve_bnb(mm, opts.planner);
      require(std::fabs(oracle.objective - bnb.objective) <=
                      1e-6 * (1.0 + std::fabs(oracle.objective)) &&
                  !oracle.plan.lex_less(bnb.plan, m) && !bnb.plan.lex_less(oracle.plan, m),
              ErrorKind::numerical, "oracle and branch-and-bound disagree");
      return oracle;
    }
  }
  raise(ErrorKind::internal, "bad mode");
}

inline uint64_t decorrelation_stream(uint64_t seed) {
  return Rng(seed).fork(0x5eedULL).next_u64();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Failure impact: B/NF planned against the all-available scenario, priced on
// the full N-1 set; B/F planned on the full set.
// ---------------------------------------------------------------------------

struct FailureStudyRow {
  double candidate_cost = 0.0;             // $/MWh applied to every candidate unit
  InvestmentPlan plan_nf, plan_f;
  double profit_nf = 0.0, profit_f = 0.0;  // both priced on the full set
  std::optional<double> delta;             // (f - nf) / nf; empty when nf <= 0
};

struct FailureStudy {
  std::vector<FailureStudyRow> rows;
  SystemModel model_used;  // wind farms stripped, for labeling
};

inline FailureStudy run_failure_study(const SystemModel& model,
                                      const std::vector<double>& candidate_costs,
                                      const StudyOptions& opts = {}) {
  require(!candidate_costs.empty(), ErrorKind::validation, "empty cost sweep");
  FailureStudy study;
  study.model_used = model.without_wind();
  for (double cost : candidate_costs) {
    SystemModel m = study.model_used;
    for (int g : m.candidate_unit_indices()) m.units[g].marginal_cost = cost;
    m.validate();

    auto full = from_availability(enumerate_n_minus_1(m));
    auto base = from_availability(base_only_availability(m));

    FailureStudyRow row;
    row.candidate_cost = cost;
    // 1) plan as if nothing ever fails
    row.plan_nf = detail::plan_argmax(m, base, opts).plan;
    // 2) price that plan on the full availability set
    row.profit_nf =
        evaluate_plan(m, full, row.plan_nf, PlanRoute::oracle, opts.planner.threads).objective;
    // 3) plan against the full set
    auto f = detail::plan_argmax(m, full, opts);
    row.plan_f = f.plan;
    row.profit_f = f.objective;
    // 4) the dominance invariant must hold: plan_nf is feasible in step 3
    require(row.profit_f >= row.profit_nf - 1e-6 * (1.0 + std::fabs(row.profit_nf)),
            ErrorKind::numerical, "failure study dominance violated");
    if (row.profit_nf > 0) row.delta = (row.profit_f - row.profit_nf) / row.profit_nf;
    study.rows.push_back(std::move(row));
  }
  return study;
}

// ---------------------------------------------------------------------------
// Correlation impact: B/NC planned on the decorrelated wind set, priced on
// the correlated one; B/C planned on the correlated set. Failures off.
// ---------------------------------------------------------------------------

struct CorrelationStudyRow {
  int n_turbines = 0;
  double invest_musd_per_farm_pair = 0.0;  // reporting aid
  InvestmentPlan plan_nc, plan_c;
  double profit_nc = 0.0, profit_c = 0.0;
  std::optional<double> delta;
};

struct CorrelationStudy {
  std::vector<CorrelationStudyRow> rows;
  double max_abs_decorrelated_rho = 0.0;
};

inline CorrelationStudy run_correlation_study(const SystemModel& model,
                                              const WindSet& correlated,
                                              const std::vector<int>& turbine_counts,
                                              const StudyOptions& opts = {}) {
  require(!turbine_counts.empty(), ErrorKind::validation, "empty turbine sweep");
  require(!correlated.scenarios.empty(), ErrorKind::validation, "no wind scenarios");
  auto uncorrelated = decorrelate(correlated, detail::decorrelation_stream(opts.seed));

  CorrelationStudy study;
  if (correlated.num_sites() > 1)
    for (int i = 0; i < correlated.num_sites(); ++i)
      for (int j = i + 1; j < correlated.num_sites(); ++j)
        study.max_abs_decorrelated_rho =
            std::max(study.max_abs_decorrelated_rho,
                     std::fabs(estimate_correlation(uncorrelated, i, j)));

  for (int nt : turbine_counts) {
    SystemModel m = model;
    double invest_pair = 0.0;
    for (int w : m.candidate_wind_indices()) {
      m.wind_farms[w].n_turbines = nt;
      m.wind_farms[w].invest_cost_per_year = annualized_invest_cost(
          m.wind_farms[w].capacity_mw(), m.config.wind_invest_rate_usd_per_kw,
          m.config.payback_years);
      invest_pair += *m.wind_farms[w].invest_cost_per_year;
    }
    m.validate();
    auto base = base_only_availability(m);
    auto set_c = combine(base, correlated, opts.scenario_cap);
    auto set_nc = combine(base, uncorrelated, opts.scenario_cap);

    CorrelationStudyRow row;
    row.n_turbines = nt;
    row.invest_musd_per_farm_pair = invest_pair / 1e6;
    row.plan_nc = detail::plan_argmax(m, set_nc, opts).plan;
    row.profit_nc =
        evaluate_plan(m, set_c, row.plan_nc, PlanRoute::oracle, opts.planner.threads).objective;
    auto c = detail::plan_argmax(m, set_c, opts);
    row.plan_c = c.plan;
    row.profit_c = c.objective;
    require(row.profit_c >= row.profit_nc - 1e-6 * (1.0 + std::fabs(row.profit_nc)),
            ErrorKind::numerical, "correlation study dominance violated");
    if (row.profit_nc > 0) row.delta = (row.profit_c - row.profit_nc) / row.profit_nc;
    study.rows.push_back(std::move(row));
  }
  return study;
}

// ---------------------------------------------------------------------------
// CSV renderers (one row per sweep point; money in $M).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string money_musd(double usd) { return strf("%.2f", usd / 1e6); }

inline std::string delta_pct(const std::optional<double>& d) {
  return d ? strf("%.1f%%", *d * 100.0) : std::string("-");
}

}  // namespace detail

inline std::string failure_study_csv(const FailureStudy& st) {
  std::ostringstream out;
  out << "# profits in $M (discounted expected); voll and discounting per config\n";
  out << "candidate_cost_usd_per_mwh,plan_no_failures,profit_no_failures_musd,plan_failures,"
         "profit_failures_musd,delta_profit_pct\n";
  for (auto& r : st.rows) {
    const bool nf_built = !r.plan_nf.empty();
    out << strf("%g", r.candidate_cost) << "," << r.plan_nf.label(st.model_used) << ","
        << (nf_built || r.profit_nf != 0.0 ? detail::money_musd(r.profit_nf) : std::string("-"))
        << "," << r.plan_f.label(st.model_used) << "," << detail::money_musd(r.profit_f) << ","
        << detail::delta_pct(r.delta) << "\n";
  }
  return out.str();
}

inline std::string correlation_study_csv(const CorrelationStudy& st, const SystemModel& m) {
  std::ostringstream out;
  out << "# profits in $M (discounted expected); invest column covers all candidate farms\n";
  out << "n_turbines,invest_musd,plan_uncorrelated,profit_uncorrelated_musd,plan_correlated,"
         "profit_correlated_musd,delta_profit_pct\n";
  for (auto& r : st.rows)
    out << r.n_turbines << "," << strf("%.2f", r.invest_musd_per_farm_pair) << ","
        << r.plan_nc.label(m) << "," << detail::money_musd(r.profit_nc) << ","
        << r.plan_c.label(m) << "," << detail::money_musd(r.profit_c) << ","
        << detail::delta_pct(r.delta) << "\n";
  return out.str();
}

}  // namespace gep
