// command-line front end: validate, scenarios, clear, plan, study-failures,
// study-correlation. One --seed feeds every random stream; a manifest with
// input digests and per-phase timings lands next to the outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "gep/manifest.hpp"
#include "gep/mps.hpp"
#include "gep/planner.hpp"

using namespace gep;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return 2;
    case ErrorKind::missing_file: return 3;
    case ErrorKind::parse: return 4;
    case ErrorKind::validation: return 5;
    case ErrorKind::cap_exceeded: return 6;
    case ErrorKind::numerical: return 7;
    case ErrorKind::io: return 8;
    case ErrorKind::internal: return 9;
  }
  return 9;
}

struct GlobalArgs {
  std::string data_dir;
  std::string config_path;
  std::string out_dir = "gep-out";
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

SystemModel load_model(const GlobalArgs& g) {
  LoadOptions opt;
  if (!g.config_path.empty()) opt.config_override = g.config_path;
  auto m = load_system(g.data_dir, opt);
  if (g.seed_set) m.config.seed = g.seed;
  if (g.threads > 0) m.config.threads = g.threads;
  if (m.config.threads <= 0) m.config.threads = hardware_threads();
  return m;
}

std::filesystem::path ensure_out(const GlobalArgs& g) {
  std::filesystem::create_directories(g.out_dir);
  return g.out_dir;
}

void record_model_inputs(RunManifest& man, const GlobalArgs& g, const SystemModel& m) {
  man.record_input_dir(g.data_dir);
  if (!g.config_path.empty()) man.record_input(g.config_path);
  man.set_seed(m.config.seed);
  man.set_config_snapshot(serialize_system(m));
}

std::vector<double> parse_cost_sweep(const std::string& spec) {
  // "A..B" inclusive integer range or a comma list
  auto dots = spec.find("..");
  std::vector<double> out;
  if (dots != std::string::npos) {
    long a = parse_int(spec.substr(0, dots), "--costs");
    long b = parse_int(spec.substr(dots + 2), "--costs");
    require(a <= b, ErrorKind::usage, "--costs range is reversed");
    for (long c = a; c <= b; ++c) out.push_back(double(c));
  } else {
    for (auto& tok : split(spec, ',')) out.push_back(parse_double(tok, "--costs"));
  }
  require(!out.empty(), ErrorKind::usage, "empty --costs");
  return out;
}

WindSet synthetic_wind(const SystemModel& m, const GlobalArgs& g, int count) {
  auto sites_csv = read_csv(std::filesystem::path(g.data_dir) / "wind_sites.csv");
  std::vector<std::string> sites;
  std::vector<WeibullParams> marginals;
  int c_site = sites_csv.col("site"), c_k = sites_csv.col("weibull_shape"),
      c_l = sites_csv.col("weibull_scale");
  for (size_t r = 0; r < sites_csv.rows.size(); ++r) {
    sites.push_back(sites_csv.cell(r, c_site));
    marginals.push_back({parse_double(sites_csv.cell(r, c_k), sites_csv.where(r)),
                         parse_double(sites_csv.cell(r, c_l), sites_csv.where(r))});
  }
  auto corr_csv = read_csv(std::filesystem::path(g.data_dir) / "wind_correlation.csv");
  std::vector<std::vector<double>> corr(sites.size(), std::vector<double>(sites.size(), 0.0));
  for (size_t r = 0; r < corr_csv.rows.size(); ++r) {
    int row_site = -1;
    for (size_t i = 0; i < sites.size(); ++i)
      if (sites[i] == corr_csv.cell(r, 0)) row_site = int(i);
    require(row_site >= 0, ErrorKind::parse, "wind_correlation.csv: unknown site");
    for (size_t i = 0; i < sites.size(); ++i)
      corr[row_site][i] = parse_double(corr_csv.cell(r, corr_csv.col(sites[i])),
                                       corr_csv.where(r));
  }
  return synthesize_correlated_wind(sites, corr, marginals, count, m.config.seed);
}

InvestmentPlan plan_from_jsonl(const SystemModel& m, const std::filesystem::path& path) {
  auto plan = InvestmentPlan::none(m);
  std::istringstream in(read_text_file(path));
  std::string line;
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      raise(ErrorKind::parse, path.string() + ":" + std::to_string(ln) + ": " + e.what());
    }
    if (!j.value("built", false)) continue;
    const std::string id = j.at("asset");
    const std::string bus = j.at("bus");
    const int year = j.value("year", 1);
    bool found = false;
    for (size_t i = 0; i < cu.size(); ++i)
      if (m.units[cu[i]].id == id) {
        plan.unit_builds[i] = BuildDecision{m.bus_index(bus), year};
        found = true;
      }
    for (size_t i = 0; i < cw.size(); ++i)
      if (m.wind_farms[cw[i]].id == id) {
        plan.wind_builds[i] = BuildDecision{m.bus_index(bus), year};
        found = true;
      }
    require(found, ErrorKind::validation, "plan references unknown candidate '" + id + "'");
  }
  plan.validate(m);
  return plan;
}

std::string plan_to_jsonl(const SystemModel& m, const InvestmentPlan& plan) {
  std::ostringstream out;
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  auto row = [&](const std::string& id, const char* kind,
                 const std::optional<BuildDecision>& d) {
    nlohmann::json j;
    j["asset"] = id;
    j["kind"] = kind;
    j["built"] = d.has_value();
    if (d) {
      j["bus"] = m.buses[d->bus].id;
      j["year"] = d->year;
    }
    out << j.dump() << "\n";
  };
  for (size_t i = 0; i < cu.size(); ++i) row(m.units[cu[i]].id, "unit", plan.unit_builds[i]);
  for (size_t i = 0; i < cw.size(); ++i)
    row(m.wind_farms[cw[i]].id, "wind", plan.wind_builds[i]);
  return out.str();
}

// scenario set assembly shared by clear/plan
struct ScenarioArgs {
  bool base_only = false;
  bool no_wind = false;
  std::string wind_file;
  int synthetic = 0;
  long max_scenarios = 0;
  int max_outages = 1;
};

ScenarioSet assemble_scenarios(SystemModel& m, const GlobalArgs& g, const ScenarioArgs& a) {
  if (a.no_wind) m = m.without_wind();
  const long cap = a.max_scenarios > 0 ? a.max_scenarios : m.config.max_scenarios;
  AvailabilitySet avail =
      a.base_only ? base_only_availability(m) : enumerate_outages(m, a.max_outages);
  if (m.wind_farms.empty()) return from_availability(avail);
  WindSet wind;
  if (!a.wind_file.empty())
    wind = load_wind_csv(a.wind_file);
  else
    wind = synthetic_wind(m, g, a.synthetic > 0 ? a.synthetic : 50);
  return combine(avail, wind, cap);
}

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_flag("--base-only", a.base_only, "single all-available scenario (no outages)");
  cmd->add_flag("--no-wind", a.no_wind, "drop wind farms from the model");
  cmd->add_option("--wind-scenarios", a.wind_file, "wind speed scenario CSV (m/s per site)");
  cmd->add_option("--synthetic", a.synthetic,
                  "draw N synthetic correlated wind scenarios (default 50)");
  cmd->add_option("--max-scenarios", a.max_scenarios, "scenario product cap");
  cmd->add_option("--max-outages", a.max_outages,
                  "simultaneous-outage depth of the availability set (default 1)");
}

int cmd_validate(const GlobalArgs& g) {
  auto m = load_model(g);
  std::cout << "model ok: " << m.buses.size() << " buses, " << m.lines.size() << " lines, "
            << m.units.size() << " units (" << m.candidate_unit_indices().size()
            << " candidates), " << m.wind_farms.size() << " wind farms ("
            << m.candidate_wind_indices().size() << " candidates), " << m.blocks.size()
            << " load blocks\n";
  double peak = 0;
  for (auto& b : m.buses) peak += b.peak_load_mw;
  std::cout << "total peak load " << peak << " MW; horizon " << m.config.years
            << " year(s); voll " << m.config.voll << " $/MWh\n";
  return 0;
}

int cmd_scenarios(const GlobalArgs& g, const ScenarioArgs& sa, bool decorrelate_flag,
                  bool availability_flag) {
  auto m = load_model(g);
  RunManifest man("scenarios");
  record_model_inputs(man, g, m);
  auto out = ensure_out(g);

  if (availability_flag || m.wind_farms.empty()) {
    auto phase = man.phase("availability");
    auto avail = enumerate_outages(m, sa.max_outages);
    std::ostringstream csv;
    csv << "label,probability\n";
    for (auto& s : avail.scenarios) csv << s.label << "," << fmt_double(s.probability) << "\n";
    write_text_file(out / "availability.csv", csv.str());
    man.record_output("availability.csv");
  }
  if (!m.wind_farms.empty() || sa.synthetic > 0 || !sa.wind_file.empty()) {
    auto phase = man.phase("wind");
    WindSet wind = sa.wind_file.empty()
                       ? synthetic_wind(m, g, sa.synthetic > 0 ? sa.synthetic : 200)
                       : load_wind_csv(sa.wind_file);
    if (!sa.wind_file.empty()) man.record_input(sa.wind_file);
    write_text_file(out / "wind_scenarios.csv", wind_csv_text(wind));
    man.record_output("wind_scenarios.csv");
    if (decorrelate_flag) {
      auto un = decorrelate(wind, detail::decorrelation_stream(m.config.seed));
      write_text_file(out / "wind_scenarios_decorrelated.csv", wind_csv_text(un));
      man.record_output("wind_scenarios_decorrelated.csv");
      double worst = 0;
      for (int i = 0; i < un.num_sites(); ++i)
        for (int j = i + 1; j < un.num_sites(); ++j)
          worst = std::max(worst, std::fabs(estimate_correlation(un, i, j)));
      std::cout << "decorrelated max |rho| = " << strf("%.4f", worst) << "\n";
      require(worst <= m.config.decorrelate_rho_threshold, ErrorKind::numerical,
              "decorrelation failed to reach the configured |rho| threshold");
    }
  }
  man.write(out);
  return 0;
}

int cmd_clear(const GlobalArgs& g, ScenarioArgs sa, const std::string& plan_file,
              int coarse_blocks, const std::string& dump_lp) {
  auto m = load_model(g);
  if (coarse_blocks > 0) m = coarsen_blocks(m, coarse_blocks);
  RunManifest man("clear");
  record_model_inputs(man, g, m);
  auto out = ensure_out(g);
  auto ss = assemble_scenarios(m, g, sa);
  auto plan = plan_file.empty() ? InvestmentPlan::none(m) : plan_from_jsonl(m, plan_file);
  if (!plan_file.empty()) man.record_input(plan_file);

  auto phase = man.phase("clear");
  std::ostringstream csv;
  csv << "scenario,block,year,bus,lmp_usd_per_mwh,load_mw,shed_mw";
  for (auto& u : m.units) csv << "," << u.id << "_mw";
  for (auto& w : m.wind_farms) csv << "," << w.id << "_mw";
  csv << "\n";
  auto cu = m.candidate_unit_indices();
  auto cw = m.candidate_wind_indices();
  // operating bus per asset and year (fixed for existing, plan-dependent
  // for candidates; -1 when not built)
  auto asset_bus = [&](bool is_unit, size_t idx, int year) {
    if (is_unit) {
      if (!m.units[idx].is_candidate()) return *m.units[idx].bus;
      for (size_t i = 0; i < cu.size(); ++i)
        if (cu[i] == int(idx))
          if (auto b = plan.unit_bus(int(i), year)) return *b;
      return -1;
    }
    if (!m.wind_farms[idx].is_candidate()) return *m.wind_farms[idx].bus;
    for (size_t i = 0; i < cw.size(); ++i)
      if (cw[i] == int(idx))
        if (auto b = plan.wind_bus(int(i), year)) return *b;
    return -1;
  };
  const int B = int(m.blocks.size());
  std::vector<std::string> rows(size_t(ss.size()) * B * m.config.years);
  parallel_for(rows.size(), m.config.threads, [&](size_t cell) {
    const int y = int(cell / (size_t(ss.size()) * B)) + 1;
    const size_t rem = cell % (size_t(ss.size()) * B);
    const int s = int(rem / B), b = int(rem % B);
    ClearingProblem pr{&m, &ss, s, b, y, &plan};
    auto r = clear_market(pr);
    if (!dump_lp.empty()) {
      std::filesystem::create_directories(dump_lp);
      auto built = build_clearing_lp(pr);
      lp::write_mps(built.lp, std::filesystem::path(dump_lp) /
                                  strf("clear_s%d_b%d_y%d.mps", s, b, y));
    }
    std::ostringstream row;
    for (int n = 0; n < m.num_buses(); ++n) {
      row << s << "," << b + 1 << "," << y << "," << m.buses[n].id << ","
          << strf("%.4f", r.lmp[n]) << "," << strf("%.3f", m.block_load(n, b, y)) << ","
          << strf("%.3f", r.shed[n]);
      for (size_t u = 0; u < m.units.size(); ++u)
        row << "," << (asset_bus(true, u, y) == n ? strf("%.3f", r.unit_dispatch[u]) : "0");
      for (size_t w = 0; w < m.wind_farms.size(); ++w)
        row << "," << (asset_bus(false, w, y) == n ? strf("%.3f", r.wind_dispatch[w]) : "0");
      row << "\n";
    }
    rows[cell] = row.str();
  });
  for (auto& r : rows) csv << r;
  write_text_file(out / "results.csv", csv.str());
  man.record_output("results.csv");
  man.write(out);
  std::cout << "cleared " << rows.size() << " scenario-block-year cells over " << m.num_buses()
            << " buses -> " << (out / "results.csv").string() << "\n";
  return 0;
}

int cmd_plan(const GlobalArgs& g, ScenarioArgs sa, const std::string& mode_str, double gap,
             double time_limit, const std::string& candidates_file, int coarse_blocks,
             const std::string& dump_lp) {
  auto m = load_model(g);
  if (coarse_blocks > 0) m = coarsen_blocks(m, coarse_blocks);
  if (!candidates_file.empty()) {
    // replace the model's candidate set from a units.csv-shaped file
    auto t = read_csv(candidates_file);
    int c_id = t.col("id"), c_cap = t.col("capacity"), c_cost = t.col("cost"),
        c_for = t.col("for"), c_cand = t.col("candidate_buses");
    std::erase_if(m.units, [](const ConventionalUnit& u) { return u.is_candidate(); });
    for (size_t r = 0; r < t.rows.size(); ++r) {
      ConventionalUnit u;
      u.id = trim(t.cell(r, c_id));
      u.capacity_mw = parse_double(t.cell(r, c_cap), t.where(r));
      u.marginal_cost = parse_double(t.cell(r, c_cost), t.where(r));
      u.for_rate = parse_double(t.cell(r, c_for), t.where(r));
      u.owned_by_genco = true;
      u.candidate_buses = detail::parse_bus_list(m, t.cell(r, c_cand), t.where(r));
      u.invest_cost_per_year = annualized_invest_cost(
          u.capacity_mw, m.config.unit_invest_rate_usd_per_kw, m.config.payback_years);
      m.units.push_back(std::move(u));
    }
    m.validate();
  }
  RunManifest man("plan");
  record_model_inputs(man, g, m);
  if (!candidates_file.empty()) man.record_input(candidates_file);
  auto out = ensure_out(g);
  auto ss = assemble_scenarios(m, g, sa);

  PlannerOptions popt;
  popt.gap = gap > 0 ? gap : m.config.mip_gap;
  popt.time_limit_s = time_limit > 0 ? time_limit : m.config.time_limit_s;
  popt.threads = m.config.threads;

  std::optional<PlannerResult> milp_res, oracle_res;
  if (mode_str == "milp" || mode_str == "both") {
    auto phase = man.phase("milp");
    auto mm = build_milp(m, ss);
    if (!dump_lp.empty()) {
      std::filesystem::create_directories(dump_lp);
      lp::write_mps(mm.assemble_monolithic(), std::filesystem::path(dump_lp) / "milp.mps");
    }
    milp_res = solve_bnb(mm, popt);
  }
  if (mode_str == "oracle" || mode_str == "both") {
    auto phase = man.phase("oracle");
    oracle_res = enumerate_oracle(m, ss, popt);
  }
  if (milp_res && oracle_res) {
    require(std::fabs(milp_res->objective - oracle_res->objective) <=
                1e-6 * (1.0 + std::fabs(oracle_res->objective)),
            ErrorKind::numerical, "oracle and MILP objectives disagree");
    std::cout << "modes agree: |milp - oracle| = "
              << strf("%.3e", std::fabs(milp_res->objective - oracle_res->objective)) << "\n";
  }
  const PlannerResult& res = milp_res ? *milp_res : *oracle_res;

  write_text_file(out / "plan.jsonl", plan_to_jsonl(m, res.plan));
  man.record_output("plan.jsonl");
  std::ostringstream table;
  table << "plan: " << res.plan.label(m) << "\n";
  table << "expected discounted profit: " << strf("%.2f", res.objective / 1e6) << " $M\n";
  table << "bound gap: " << strf("%.3g", res.bound_gap) << "   nodes/plans: " << res.nodes
        << "\n";
  table << "big-M certificate: "
        << (res.bigm.clean() ? strf("clean (min slack %.3g over %ld bounds)",
                                    res.bigm.min_artificial_slack, res.bigm.bounds_checked)
                             : "BOUND FLAGGED")
        << "\n";
  std::cout << table.str();
  if (!res.bigm.clean()) {
    for (auto& f : res.bigm.flagged) std::cerr << "big-M: " << f << "\n";
    raise(ErrorKind::numerical, "a linearization bound is active at the optimum");
  }
  write_text_file(out / "plan.txt", table.str());
  man.record_output("plan.txt");
  man.write(out);
  return 0;
}

int cmd_study_failures(const GlobalArgs& g, const std::string& costs, int coarse_blocks,
                       const std::string& mode_str) {
  auto m = load_model(g);
  if (coarse_blocks > 0) m = coarsen_blocks(m, coarse_blocks);
  RunManifest man("study-failures");
  record_model_inputs(man, g, m);
  auto out = ensure_out(g);
  StudyOptions opts;
  opts.mode = mode_str == "milp" ? PlanMode::milp
              : mode_str == "both" ? PlanMode::both
                                   : PlanMode::oracle;
  opts.planner.threads = m.config.threads;
  opts.seed = m.config.seed;
  opts.scenario_cap = m.config.max_scenarios;
  auto phase = man.phase("study");
  auto study = run_failure_study(m, parse_cost_sweep(costs), opts);
  write_text_file(out / "failures.csv", failure_study_csv(study));
  man.record_output("failures.csv");
  man.write(out);
  std::cout << failure_study_csv(study);
  return 0;
}

int cmd_study_correlation(const GlobalArgs& g, ScenarioArgs sa, const std::string& turbines,
                          int coarse_blocks, const std::string& mode_str) {
  auto m = load_model(g);
  if (coarse_blocks > 0) m = coarsen_blocks(m, coarse_blocks);
  require(!m.candidate_wind_indices().empty(), ErrorKind::validation,
          "model has no candidate wind farms");
  RunManifest man("study-correlation");
  record_model_inputs(man, g, m);
  auto out = ensure_out(g);
  WindSet wind = sa.wind_file.empty()
                     ? synthetic_wind(m, g, sa.synthetic > 0 ? sa.synthetic : 200)
                     : load_wind_csv(sa.wind_file);
  if (!sa.wind_file.empty()) man.record_input(sa.wind_file);
  std::vector<int> counts;
  for (auto& tok : split(turbines, ',')) counts.push_back(int(parse_int(tok, "--turbines")));
  StudyOptions opts;
  opts.mode = mode_str == "milp" ? PlanMode::milp
              : mode_str == "both" ? PlanMode::both
                                   : PlanMode::oracle;
  opts.planner.threads = m.config.threads;
  opts.seed = m.config.seed;
  opts.scenario_cap = m.config.max_scenarios;
  auto phase = man.phase("study");
  auto study = run_correlation_study(m, wind, counts, opts);
  write_text_file(out / "correlation.csv", correlation_study_csv(study, m));
  man.record_output("correlation.csv");
  write_text_file(out / "wind_correlated.csv", wind_csv_text(wind));
  man.record_output("wind_correlated.csv");
  man.write(out);
  std::cout << correlation_study_csv(study, m);
  std::cout << "decorrelated max |rho| = " << strf("%.4f", study.max_abs_decorrelated_rho)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generation-expansion planning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalArgs g;
  app.add_option("--data", g.data_dir, "data directory")->required();
  app.add_option("--config", g.config_path, "study configuration file override");
  app.add_option("--out", g.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "root seed for every random stream");
  app.add_option("--threads", g.threads, "worker cap (0 = hardware)");

  auto* validate = app.add_subcommand("validate", "load and validate the dataset");

  ScenarioArgs sc_args;
  bool decorr = false, avail = false;
  auto* scen = app.add_subcommand("scenarios", "generate scenario files");
  scen->add_option("--scenarios,--synthetic", sc_args.synthetic,
                   "number of synthetic wind scenarios");
  scen->add_option("--wind-scenarios", sc_args.wind_file, "existing wind scenario CSV to echo");
  scen->add_flag("--decorrelate", decorr, "also write the per-site decorrelated set");
  scen->add_flag("--availability", avail, "also write the availability table");
  scen->add_option("--max-outages", sc_args.max_outages,
                   "simultaneous-outage depth of the availability set (default 1)");
  scen->add_option("--max-scenarios", sc_args.max_scenarios, "scenario cap");

  ScenarioArgs clear_args;
  std::string plan_file, dump_lp_clear;
  int clear_coarse = 0;
  auto* clear = app.add_subcommand("clear", "market clearing over the scenario grid");
  add_scenario_flags(clear, clear_args);
  clear->add_option("--plan", plan_file, "investment plan (JSON lines)");
  clear->add_option("--coarse-blocks", clear_coarse, "merge load blocks to this count");
  clear->add_option("--dump-lp", dump_lp_clear, "write each clearing LP as MPS here");

  ScenarioArgs plan_args;
  std::string mode = "milp", candidates_file, dump_lp_plan;
  double gap = 0, time_limit = 0;
  int plan_coarse = 0;
  auto* plan = app.add_subcommand("plan", "solve the expansion problem");
  add_scenario_flags(plan, plan_args);
  plan->add_option("--mode", mode, "milp | oracle | both")
      ->check(CLI::IsMember({"milp", "oracle", "both"}));
  plan->add_option("--gap", gap, "relative MIP gap");
  plan->add_option("--time-limit", time_limit, "seconds");
  plan->add_option("--candidates", candidates_file, "candidate units CSV replacing the bundled set");
  plan->add_option("--coarse-blocks", plan_coarse, "merge load blocks to this count");
  plan->add_option("--dump-lp", dump_lp_plan, "write the assembled MILP as MPS here");

  std::string costs = "15..24", sf_mode = "oracle";
  int sf_coarse = 0;
  auto* sfail = app.add_subcommand("study-failures", "failure-impact study");
  sfail->add_option("--costs", costs, "candidate marginal cost sweep, A..B or list");
  sfail->add_option("--coarse-blocks", sf_coarse, "merge load blocks to this count");
  sfail->add_option("--mode", sf_mode, "milp | oracle | both")
      ->check(CLI::IsMember({"milp", "oracle", "both"}));

  ScenarioArgs corr_args;
  std::string turbines = "100,110,120,130", sc_mode = "oracle";
  int sc_coarse = 0;
  auto* scorr = app.add_subcommand("study-correlation", "wind-correlation-impact study");
  scorr->add_option("--turbines", turbines, "comma list of turbine counts per farm");
  scorr->add_option("--wind-scenarios", corr_args.wind_file, "measured wind scenario CSV");
  scorr->add_option("--synthetic", corr_args.synthetic, "synthetic scenario count (default 200)");
  scorr->add_option("--coarse-blocks", sc_coarse, "merge load blocks to this count");
  scorr->add_option("--mode", sc_mode, "milp | oracle | both")
      ->check(CLI::IsMember({"milp", "oracle", "both"}));
  scorr->add_option("--max-scenarios", corr_args.max_scenarios, "scenario cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    g.seed_set = seed_opt->count() > 0;
    if (validate->parsed()) return cmd_validate(g);
    if (scen->parsed()) return cmd_scenarios(g, sc_args, decorr, avail);
    if (clear->parsed()) return cmd_clear(g, clear_args, plan_file, clear_coarse, dump_lp_clear);
    if (plan->parsed())
      return cmd_plan(g, plan_args, mode, gap, time_limit, candidates_file, plan_coarse,
                      dump_lp_plan);
    if (sfail->parsed()) return cmd_study_failures(g, costs, sf_coarse, sf_mode);
    if (scorr->parsed())
      return cmd_study_correlation(g, corr_args, turbines, sc_coarse, sc_mode);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 9;
  }
  return 2;
}
