#include <catch2/catch.hpp>

#include "gep/clearing.hpp"

using namespace gep;

static const std::filesystem::path kData = std::filesystem::path(GEP_DATA_DIR) / "rts24";

namespace {

SystemModel one_bus(double unit_cap, double unit_cost, double load) {
  SystemModel m;
  m.buses.push_back({"a", load});
  m.blocks.push_back({"b1", 1.0, 8760.0});
  ConventionalUnit u;
  u.id = "g1";
  u.bus = 0;
  u.capacity_mw = unit_cap;
  u.marginal_cost = unit_cost;
  u.owned_by_genco = true;
  m.units.push_back(u);
  m.config.slack_bus = "a";
  m.validate();
  return m;
}

SystemModel two_bus_congested() {
  SystemModel m;
  m.buses.push_back({"a", 0.0});
  m.buses.push_back({"b", 100.0});
  m.blocks.push_back({"b1", 1.0, 8760.0});
  m.lines.push_back({0, 1, 10.0, 50.0, 0.0});
  ConventionalUnit cheap;
  cheap.id = "cheap";
  cheap.bus = 0;
  cheap.capacity_mw = 100;
  cheap.marginal_cost = 10;
  m.units.push_back(cheap);
  ConventionalUnit dear;
  dear.id = "dear";
  dear.bus = 1;
  dear.capacity_mw = 100;
  dear.marginal_cost = 30;
  m.units.push_back(dear);
  m.config.slack_bus = "a";
  m.validate();
  return m;
}

ClearingResult clear_base(const SystemModel& m, const ScenarioSet& ss, int block = 0) {
  auto plan = InvestmentPlan::none(m);
  ClearingProblem pr{&m, &ss, 0, block, 1, &plan};
  return clear_market(pr);
}

}  // namespace

TEST_CASE("marginal unit sets the price", "[clearing]") {
  auto m = one_bus(100, 10, 50);
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss);
  CHECK(r.unit_dispatch[0] == Approx(50.0));
  CHECK(r.total_shed == Approx(0.0).margin(1e-9));
  CHECK(r.lmp[0] == Approx(10.0));
  CHECK(r.system_cost == Approx(500.0));
}

TEST_CASE("shedding prices at voll", "[clearing]") {
  auto m = one_bus(100, 10, 150);
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss);
  CHECK(r.unit_dispatch[0] == Approx(100.0));
  CHECK(r.shed[0] == Approx(50.0));
  CHECK(r.lmp[0] == Approx(1000.0));  // bundled default voll
}

TEST_CASE("two-bus congestion: hand-solved LMP split", "[clearing]") {
  auto m = two_bus_congested();
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss);
  CHECK(r.unit_dispatch[0] == Approx(50.0));  // cheap fills the line
  CHECK(r.unit_dispatch[1] == Approx(50.0));
  CHECK(r.flow[0] == Approx(50.0));
  CHECK(r.lmp[0] == Approx(10.0));
  CHECK(r.lmp[1] == Approx(30.0));
  CHECK(r.total_shed == Approx(0.0).margin(1e-9));
  CHECK(r.system_cost == Approx(50.0 * 10 + 50.0 * 30));
  // congestion rent sits on the forward flow row dual
  CHECK(r.theta_fwd[0] < -1e-9);

  SECTION("profit of each owned asset, against the hand solution") {
    auto plan = InvestmentPlan::none(m);
    auto own_cheap = m;
    own_cheap.units[0].owned_by_genco = true;
    CHECK(scenario_profit(r, own_cheap, plan) == Approx((10.0 - 10.0) * 50.0).margin(1e-9));
    auto own_dear = m;
    own_dear.units[1].owned_by_genco = true;
    CHECK(scenario_profit(r, own_dear, plan) == Approx((30.0 - 30.0) * 50.0).margin(1e-9));
  }
}

TEST_CASE("infra-marginal rent shows up in profit", "[clearing]") {
  auto m = one_bus(100, 10, 150);
  // second, pricier unit serves the remainder
  ConventionalUnit u2;
  u2.id = "g2";
  u2.bus = 0;
  u2.capacity_mw = 100;
  u2.marginal_cost = 30;
  m.units.push_back(u2);
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss);
  CHECK(r.lmp[0] == Approx(30.0));
  auto plan = InvestmentPlan::none(m);
  CHECK(scenario_profit(r, m, plan) == Approx((30.0 - 10.0) * 100.0));  // owns g1 only
}

TEST_CASE("genco owning nothing earns nothing", "[clearing]") {
  auto m = one_bus(100, 10, 50);
  m.units[0].owned_by_genco = false;
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss);
  auto plan = InvestmentPlan::none(m);
  CHECK(scenario_profit(r, m, plan) == 0.0);
}

TEST_CASE("failed line islands the system without shedding when local capacity suffices",
          "[clearing]") {
  auto m = two_bus_congested();
  m.buses[1].peak_load_mw = 80.0;  // strictly below local capacity: unique island price
  m.lines[0].for_rate = 0.02;
  auto avail = enumerate_n_minus_1(m);
  auto ss = from_availability(avail);
  REQUIRE(ss.size() == 2);  // base + line out
  auto plan = InvestmentPlan::none(m);
  ClearingProblem pr{&m, &ss, 1, 0, 1, &plan};
  auto r = clear_market(pr);
  CHECK(r.flow[0] == 0.0);          // out-of-service line carries nothing
  CHECK(r.total_shed == Approx(0.0).margin(1e-9));
  CHECK(r.unit_dispatch[1] == Approx(80.0));  // island self-supplies
  CHECK(r.lmp[1] == Approx(30.0));
}

TEST_CASE("candidate units dispatch only where the plan builds them", "[clearing]") {
  auto m = two_bus_congested();
  ConventionalUnit cand;
  cand.id = "new1";
  cand.capacity_mw = 40;
  cand.marginal_cost = 5.0;
  cand.candidate_buses = {0, 1};
  cand.invest_cost_per_year = 1e5;
  m.units.push_back(cand);
  m.validate();
  auto ss = from_availability(base_only_availability(m));

  SECTION("unbuilt: no dispatch") {
    auto plan = InvestmentPlan::none(m);
    ClearingProblem pr{&m, &ss, 0, 0, 1, &plan};
    auto r = clear_market(pr);
    CHECK(r.unit_dispatch[2] == 0.0);
  }
  SECTION("built at the load bus: displaces the expensive unit") {
    auto plan = InvestmentPlan::none(m);
    plan.unit_builds[0] = BuildDecision{1, 1};
    ClearingProblem pr{&m, &ss, 0, 0, 1, &plan};
    auto r = clear_market(pr);
    CHECK(r.unit_dispatch[2] == Approx(40.0));
    CHECK(r.unit_dispatch[1] == Approx(10.0));  // expensive unit backs off
    CHECK(scenario_profit(r, m, plan) == Approx((30.0 - 5.0) * 40.0));
  }
}

TEST_CASE("merit order holds in uncongested, no-shed optima", "[clearing]") {
  auto m = load_system(kData).without_wind();
  auto ss = from_availability(base_only_availability(m));
  auto r = clear_base(m, ss, 5);
  REQUIRE(r.total_shed == Approx(0.0).margin(1e-6));
  // no dispatched unit may be pricier than an undispatched available one,
  // unless congestion separates them; check bus-local violations only
  for (size_t a = 0; a < m.units.size(); ++a)
    for (size_t b = 0; b < m.units.size(); ++b) {
      if (m.units[a].is_candidate() || m.units[b].is_candidate()) continue;
      if (*m.units[a].bus != *m.units[b].bus) continue;
      if (r.unit_dispatch[a] > 1e-6 && r.unit_dispatch[b] < m.units[b].capacity_mw - 1e-6)
        CHECK(m.units[a].marginal_cost <= m.units[b].marginal_cost + 1e-9);
    }
}

TEST_CASE("dispatch plus shed balances load everywhere", "[clearing]") {
  auto m = load_system(kData).without_wind();
  auto avail = enumerate_n_minus_1(m);
  auto ss = from_availability(avail);
  // a heavy block and a couple of outage scenarios
  auto plan = InvestmentPlan::none(m);
  for (int s : {0, 5, 40}) {
    ClearingProblem pr{&m, &ss, s, 19, 1, &plan};
    auto built = build_clearing_lp(pr);
    auto r = clear_market(pr);
    double gen = 0, load = 0;
    for (double d : r.unit_dispatch) gen += d;
    for (int n = 0; n < m.num_buses(); ++n) load += m.block_load(n, 19, 1);
    CHECK(gen + r.total_shed == Approx(load).margin(1e-5));
    // with shed slack present (load > 0) and the network connected, no LMP
    // can exceed voll
    const bool connected = built.pin_row.size() == 1;
    if (connected)
      for (int n = 0; n < m.num_buses(); ++n)
        if (m.block_load(n, 19, 1) > 0) CHECK(r.lmp[n] <= m.config.voll + 1e-6);
  }
}

TEST_CASE("strong duality on every clearing solve", "[clearing]") {
  auto m = load_system(kData).without_wind();
  auto ss = from_availability(enumerate_n_minus_1(m));
  auto plan = InvestmentPlan::none(m);
  for (int s : {0, 1, 17, 36, 52}) {
    ClearingProblem pr{&m, &ss, s, 10, 1, &plan};
    auto r = clear_market(pr);
    CHECK(std::fabs(r.system_cost - r.dual_objective) <=
          1e-6 * (1.0 + std::fabs(r.system_cost)));
    CHECK(r.kkt.max_complementarity <= 1e-6);
  }
}

TEST_CASE("wind scenarios bound wind dispatch", "[clearing]") {
  auto m = two_bus_congested();
  WindFarm w;
  w.id = "w1";
  w.bus = 1;
  w.n_turbines = 20;
  w.owned_by_genco = true;
  w.curve.points = {{3, 0.0}, {10, 2.0}, {25, 2.0}};
  m.wind_farms.push_back(w);
  m.validate();
  WindSet ws;
  ws.site_ids = {"b"};
  ws.scenarios.push_back({{10.0}, 0.5});  // 40 MW available
  ws.scenarios.push_back({{3.0}, 0.5});   // calm
  auto ss = combine(base_only_availability(m), ws, 100);
  auto plan = InvestmentPlan::none(m);
  ClearingProblem windy{&m, &ss, 0, 0, 1, &plan};
  auto r = clear_market(windy);
  CHECK(r.wind_dispatch[0] == Approx(40.0));  // free energy displaces the dear unit
  CHECK(r.unit_dispatch[1] == Approx(10.0));
  ClearingProblem calm{&m, &ss, 1, 0, 1, &plan};
  auto r2 = clear_market(calm);
  CHECK(r2.wind_dispatch[0] == 0.0);
}

TEST_CASE("expected discounted profit compositions", "[clearing]") {
  SECTION("single year, single block, unit profit of 1 $/h") {
    auto m = one_bus(100, 10, 50);
    // add a pricier unit so the owned one earns (11-10)=1 per 50 MWh... use exact rent:
    ConventionalUnit u2;
    u2.id = "g2";
    u2.bus = 0;
    u2.capacity_mw = 100;
    u2.marginal_cost = 10.02;
    m.units.push_back(u2);
    m.buses[0].peak_load_mw = 100.5;  // forces 0.5 MW from g2, price 10.02
    m.validate();
    auto ss = from_availability(base_only_availability(m));
    auto plan = InvestmentPlan::none(m);
    auto grid = compute_profit_grid(m, ss, plan);
    // rent = (10.02-10)*100 = 2 $/h, 8760 h
    CHECK(expected_discounted_profit(grid, m, ss, plan) == Approx(2.0 * 8760).epsilon(1e-9));
  }
  SECTION("three years at 3% discount the same yearly net") {
    auto m = one_bus(100, 10, 150);
    ConventionalUnit u2;
    u2.id = "g2";
    u2.bus = 0;
    u2.capacity_mw = 100;
    u2.marginal_cost = 30;
    m.units.push_back(u2);
    m.config.years = 3;
    m.config.discount_rate = 0.03;
    m.validate();
    auto ss = from_availability(base_only_availability(m));
    auto plan = InvestmentPlan::none(m);
    auto grid = compute_profit_grid(m, ss, plan);
    const double x = (30.0 - 10.0) * 100.0 * 8760.0;  // yearly pool profit
    const double want = x * (std::pow(1.03, -1) + std::pow(1.03, -2) + std::pow(1.03, -3));
    CHECK(expected_discounted_profit(grid, m, ss, plan) == Approx(want).epsilon(1e-12));
  }
  SECTION("missing grid cell raises") {
    auto m = one_bus(100, 10, 50);
    auto ss = from_availability(base_only_availability(m));
    auto plan = InvestmentPlan::none(m);
    ProfitGrid g;
    g.init(1, 1, 1);
    CHECK_THROWS_AS(expected_discounted_profit(g, m, ss, plan), Error);
  }
}

TEST_CASE("rts24: no shedding in any single-device scenario at any block", "[clearing][rts]") {
  auto m = load_system(kData).without_wind();
  auto ss = from_availability(enumerate_n_minus_1(m));
  auto plan = InvestmentPlan::none(m);
  std::vector<double> worst(ss.size() * m.blocks.size(), 0.0);
  parallel_for(worst.size(), 2, [&](size_t i) {
    int s = int(i / m.blocks.size());
    int b = int(i % m.blocks.size());
    ClearingProblem pr{&m, &ss, s, b, 1, &plan};
    worst[i] = clear_market(pr).total_shed;
  });
  double peak = *std::max_element(worst.begin(), worst.end());
  CHECK(peak <= 1e-6);
}
