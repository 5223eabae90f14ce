#pragma once

#include "gep/system.hpp"

namespace gep {

// Upper-level decision vector: at most one (bus, year) per candidate asset.
// Cumulative indicators follow from the build year.
struct BuildDecision {
  int bus = -1;
  int year = 1;
};

struct InvestmentPlan {
  // parallel to model.candidate_unit_indices() / candidate_wind_indices()
  std::vector<std::optional<BuildDecision>> unit_builds;
  std::vector<std::optional<BuildDecision>> wind_builds;

  static InvestmentPlan none(const SystemModel& m) {
    InvestmentPlan p;
    p.unit_builds.assign(m.candidate_unit_indices().size(), std::nullopt);
    p.wind_builds.assign(m.candidate_wind_indices().size(), std::nullopt);
    return p;
  }

  bool empty() const {
    for (auto& d : unit_builds)
      if (d) return false;
    for (auto& d : wind_builds)
      if (d) return false;
    return true;
  }

  // bus where the asset operates in `year` (built at or before), if any
  static std::optional<int> active_bus(const std::optional<BuildDecision>& d, int year) {
    if (d && d->year <= year) return d->bus;
    return std::nullopt;
  }
  std::optional<int> unit_bus(int cand_pos, int year) const {
    return active_bus(unit_builds[cand_pos], year);
  }
  std::optional<int> wind_bus(int cand_pos, int year) const {
    return active_bus(wind_builds[cand_pos], year);
  }

  void validate(const SystemModel& m) const {
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    require(unit_builds.size() == cu.size() && wind_builds.size() == cw.size(),
            ErrorKind::validation, "plan shape disagrees with the model's candidate sets");
    auto check = [&](const std::optional<BuildDecision>& d, const std::vector<int>& allowed,
                     const std::string& id) {
      if (!d) return;
      require(d->year >= 1 && d->year <= m.config.years, ErrorKind::validation,
              "plan builds " + id + " outside the horizon");
      require(std::find(allowed.begin(), allowed.end(), d->bus) != allowed.end(),
              ErrorKind::validation, "plan sites " + id + " at a non-candidate bus");
    };
    for (size_t i = 0; i < cu.size(); ++i)
      check(unit_builds[i], m.units[cu[i]].candidate_buses, m.units[cu[i]].id);
    for (size_t i = 0; i < cw.size(); ++i)
      check(wind_builds[i], m.wind_farms[cw[i]].candidate_buses, m.wind_farms[cw[i]].id);
  }

  // discounted annualized investment stream (paid every year once built)
  double invest_cost_discounted(const SystemModel& m) const {
    double total = 0.0;
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    for (size_t i = 0; i < cu.size(); ++i)
      if (unit_builds[i])
        for (int y = unit_builds[i]->year; y <= m.config.years; ++y)
          total += m.discount(y) * m.units[cu[i]].invest_cost(unit_builds[i]->bus, y);
    for (size_t i = 0; i < cw.size(); ++i)
      if (wind_builds[i])
        for (int y = wind_builds[i]->year; y <= m.config.years; ++y)
          total += m.discount(y) * m.wind_farms[cw[i]].invest_cost(wind_builds[i]->bus, y);
    return total;
  }

  // per-asset option index: 0 = not built, then (year, candidate-bus slot)
  // in ascending order; used for the deterministic lexicographic tie-break
  std::vector<int> option_key(const SystemModel& m) const {
    std::vector<int> key;
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    auto opt = [&](const std::optional<BuildDecision>& d, const std::vector<int>& buses) {
      if (!d) return 0;
      int slot = int(std::find(buses.begin(), buses.end(), d->bus) - buses.begin());
      return 1 + (d->year - 1) * int(buses.size()) + slot;
    };
    for (size_t i = 0; i < cu.size(); ++i)
      key.push_back(opt(unit_builds[i], m.units[cu[i]].candidate_buses));
    for (size_t i = 0; i < cw.size(); ++i)
      key.push_back(opt(wind_builds[i], m.wind_farms[cw[i]].candidate_buses));
    return key;
  }

  bool lex_less(const InvestmentPlan& other, const SystemModel& m) const {
    return option_key(m) < other.option_key(m);
  }

  // "n2,n7" for one year; "y1:n2 y3:n1" style when the horizon is longer
  std::string label(const SystemModel& m) const {
    auto cu = m.candidate_unit_indices();
    auto cw = m.candidate_wind_indices();
    std::vector<std::string> parts;
    auto add = [&](const std::optional<BuildDecision>& d) {
      if (!d) return;
      std::string s = m.buses[d->bus].id;
      if (m.config.years > 1) s = strf("y%d:", d->year) + s;
      parts.push_back(s);
    };
    for (auto& d : unit_builds) add(d);
    for (auto& d : wind_builds) add(d);
    if (parts.empty()) return "-";
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    return out;
  }
};

}  // namespace gep
