#pragma once

// deterministic small random instances for cross-validating the planner:
// <= 5 buses, <= 8 binary columns, <= 10 scenarios, <= 3 blocks

#include "gep/planner.hpp"

namespace gep::testing {

struct RandomInstance {
  SystemModel model;
  ScenarioSet scenarios;
};

inline RandomInstance random_instance(uint64_t seed) {
  Rng rng(seed);
  RandomInstance inst;
  SystemModel& m = inst.model;

  const int nb = 2 + int(rng.below(4));  // 2..5 buses
  for (int n = 0; n < nb; ++n)
    m.buses.push_back({"n" + std::to_string(n + 1), 20.0 + 110.0 * rng.uniform()});

  // spanning tree plus up to two extra lines
  for (int n = 1; n < nb; ++n) {
    int to = int(rng.below(uint64_t(n)));
    m.lines.push_back({n, to, 5.0 + 25.0 * rng.uniform(), 30.0 + 100.0 * rng.uniform(), 0.0});
  }
  for (int e = 0; e < 2 && nb > 2; ++e)
    if (rng.uniform() < 0.5) {
      int a = int(rng.below(uint64_t(nb))), b = int(rng.below(uint64_t(nb)));
      if (a != b)
        m.lines.push_back(
            {a, b, 5.0 + 25.0 * rng.uniform(), 30.0 + 100.0 * rng.uniform(), 0.0});
    }

  const int n_units = 2 + int(rng.below(3));
  for (int g = 0; g < n_units; ++g) {
    ConventionalUnit u;
    u.id = "g" + std::to_string(g + 1);
    u.bus = int(rng.below(uint64_t(nb)));
    u.capacity_mw = 40.0 + 100.0 * rng.uniform();
    u.marginal_cost = 5.0 + 35.0 * rng.uniform();
    u.for_rate = rng.uniform() < 0.5 ? 0.0 : 0.02 + 0.06 * rng.uniform();
    u.owned_by_genco = rng.uniform() < 0.4;
    m.units.push_back(u);
  }

  PowerCurve curve;
  curve.points = {{3.0, 0.0}, {8.0, 1.2}, {13.0, 2.5}, {25.0, 2.5}};
  const bool with_wind = rng.uniform() < 0.55;
  if (with_wind) {
    WindFarm w;
    w.id = "w1";
    w.bus = int(rng.below(uint64_t(nb)));
    w.n_turbines = 4 + int(rng.below(12));
    w.owned_by_genco = rng.uniform() < 0.6;
    w.curve = curve;
    m.wind_farms.push_back(w);
  }

  // candidates under the 8-binary-column budget
  int budget = 8;
  const int n_cand = 1 + int(rng.below(2));
  for (int c = 0; c < n_cand && budget > 0; ++c) {
    const int nbuses = 1 + int(rng.below(uint64_t(std::min(budget, std::min(nb, 3)))));
    std::vector<int> buses;
    for (int n = 0; n < nb && int(buses.size()) < nbuses; ++n)
      if (rng.uniform() < 0.6 || nb - n <= nbuses - int(buses.size())) buses.push_back(n);
    budget -= int(buses.size());
    if (with_wind && c == n_cand - 1 && rng.uniform() < 0.45) {
      WindFarm w;
      w.id = "wc" + std::to_string(c + 1);
      w.n_turbines = 4 + int(rng.below(12));
      w.owned_by_genco = true;
      w.curve = curve;
      w.candidate_buses = buses;
      w.invest_cost_per_year = (0.5 + 5.0 * rng.uniform()) * 1e5;
      m.wind_farms.push_back(w);
    } else {
      ConventionalUnit u;
      u.id = "gc" + std::to_string(c + 1);
      u.capacity_mw = 20.0 + 50.0 * rng.uniform();
      u.marginal_cost = 8.0 + 25.0 * rng.uniform();
      u.for_rate = rng.uniform() < 0.6 ? 0.0 : 0.05 * rng.uniform();
      u.owned_by_genco = true;
      u.candidate_buses = buses;
      u.invest_cost_per_year = (0.5 + 8.0 * rng.uniform()) * 1e5;
      m.units.push_back(u);
    }
  }

  const int n_blocks = 1 + int(rng.below(3));
  double level = 0.45 + 0.2 * rng.uniform();
  double remaining = 8760.0;
  for (int b = 0; b < n_blocks; ++b) {
    double dur = b + 1 == n_blocks ? remaining : remaining * (0.2 + 0.5 * rng.uniform());
    remaining -= dur;
    m.blocks.push_back({"b" + std::to_string(b + 1), std::min(level, 1.0), dur});
    level += 0.25;
  }

  m.config.voll = 1000.0;
  m.config.slack_bus = m.buses[0].id;
  m.validate();

  // scenario set: availability, wind, or the product with a base-only side
  const double style = rng.uniform();
  auto wind_sites = [&] {
    WindSet ws;
    for (auto& b : m.buses) ws.site_ids.push_back(b.id);
    const int n_sc = 2 + int(rng.below(3));
    for (int s = 0; s < n_sc; ++s) {
      WindScenario sc;
      for (int i = 0; i < nb; ++i) sc.speed_mps.push_back(3.0 + 15.0 * rng.uniform());
      sc.probability = 1.0 / n_sc;
      ws.scenarios.push_back(std::move(sc));
    }
    return ws;
  };
  if (!m.wind_farms.empty()) {
    if (style < 0.5) {
      // cap the availability side so the product stays within budget
      int failable = 0;
      for (auto& u : m.units)
        if (u.for_rate > 0 && ++failable > 1) u.for_rate = 0.0;
      for (auto& l : m.lines) l.for_rate = 0.0;
      inst.scenarios = combine(enumerate_n_minus_1(m), wind_sites(), 10000);
    } else {
      inst.scenarios = combine(base_only_availability(m), wind_sites(), 10000);
    }
  } else {
    int failable = 0;
    for (auto& u : m.units)
      if (u.for_rate > 0 && ++failable > 6) u.for_rate = 0.0;
    for (auto& l : m.lines)
      if (l.for_rate > 0 && ++failable > 9) l.for_rate = 0.0;
    inst.scenarios = from_availability(enumerate_n_minus_1(m));
  }
  require(inst.scenarios.size() <= 10, ErrorKind::internal, "instance scenario budget");
  return inst;
}

}  // namespace gep::testing
