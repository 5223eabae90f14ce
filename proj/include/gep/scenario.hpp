#pragma once

#include "gep/system.hpp"

namespace gep {

// ---------------------------------------------------------------------------
// Availability scenarios: joint unit/line status vectors with probabilities
// from per-device forced outage rates, conditioned on the enumerated set.
// ---------------------------------------------------------------------------

struct AvailabilityScenario {
  std::string label;
  std::vector<uint8_t> unit_status;  // parallel to model.units
  std::vector<uint8_t> line_status;  // parallel to model.lines
  double probability = 0.0;

  int failures() const {
    int k = 0;
    for (auto s : unit_status) k += s == 0;
    for (auto s : line_status) k += s == 0;
    return k;
  }
};

struct AvailabilitySet {
  std::vector<AvailabilityScenario> scenarios;
};

namespace detail {

inline void normalize_probabilities(auto& scenarios) {
  double sum = 0.0, comp = 0.0;  // Kahan
  for (auto& s : scenarios) {
    double y = s.probability - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  require(sum > 0.0, ErrorKind::validation, "scenario probabilities sum to zero");
  for (auto& s : scenarios) s.probability /= sum;
}

}  // namespace detail

// Enumerates the all-available scenario plus every combination of up to
// max_simultaneous failed devices among those with a positive outage rate.
// Probabilities are the independent-failure products, normalized over the set.
inline AvailabilitySet enumerate_outages(const SystemModel& m, int max_simultaneous) {
  require(max_simultaneous >= 0, ErrorKind::validation, "negative outage count");
  struct Device {
    bool is_unit;
    int index;
    double for_rate;
    std::string label;
  };
  std::vector<Device> failable;
  for (size_t g = 0; g < m.units.size(); ++g) {
    require(m.units[g].for_rate < 1.0, ErrorKind::validation,
            "unit " + m.units[g].id + ": FOR = 1 degenerates the scenario set");
    if (m.units[g].for_rate > 0.0)
      failable.push_back({true, int(g), m.units[g].for_rate, "unit " + m.units[g].id});
  }
  for (size_t l = 0; l < m.lines.size(); ++l) {
    require(m.lines[l].for_rate < 1.0, ErrorKind::validation, "line FOR = 1 degenerates the set");
    if (m.lines[l].for_rate > 0.0)
      failable.push_back({false, int(l), m.lines[l].for_rate,
                          "line " + m.buses[m.lines[l].from].id + "-" + m.buses[m.lines[l].to].id});
  }

  double base_prob = 1.0;
  for (auto& d : failable) base_prob *= 1.0 - d.for_rate;

  AvailabilitySet set;
  auto push = [&](const std::vector<int>& failed) {
    AvailabilityScenario s;
    s.unit_status.assign(m.units.size(), 1);
    s.line_status.assign(m.lines.size(), 1);
    s.probability = base_prob;
    s.label = failed.empty() ? "base" : "";
    for (int fi : failed) {
      const Device& d = failable[fi];
      s.probability *= d.for_rate / (1.0 - d.for_rate);
      (d.is_unit ? s.unit_status[d.index] : s.line_status[d.index]) = 0;
      if (!s.label.empty()) s.label += " + ";
      s.label += d.label + " out";
    }
    set.scenarios.push_back(std::move(s));
  };

  // subsets of failable devices in order of increasing size
  push({});
  std::vector<int> chosen;
  std::function<void(int, int)> walk = [&](int start, int remaining) {
    if (remaining == 0) {
      push(chosen);
      return;
    }
    for (int i = start; i + remaining <= int(failable.size()); ++i) {
      chosen.push_back(i);
      walk(i + 1, remaining - 1);
      chosen.pop_back();
    }
  };
  for (int size = 1; size <= max_simultaneous && size <= int(failable.size()); ++size)
    walk(0, size);

  detail::normalize_probabilities(set.scenarios);
  return set;
}

inline AvailabilitySet enumerate_n_minus_1(const SystemModel& m) {
  return enumerate_outages(m, 1);
}

inline AvailabilitySet base_only_availability(const SystemModel& m) {
  AvailabilitySet set;
  AvailabilityScenario s;
  s.label = "base";
  s.unit_status.assign(m.units.size(), 1);
  s.line_status.assign(m.lines.size(), 1);
  s.probability = 1.0;
  set.scenarios.push_back(std::move(s));
  return set;
}

// farm output at a given wind speed: turbine count times the curve
inline double wind_power(const WindFarm& farm, double speed_mps) {
  require(speed_mps >= 0.0, ErrorKind::validation, "negative wind speed");
  return farm.n_turbines * farm.curve.power_at(speed_mps);
}

// ---------------------------------------------------------------------------
// Wind scenarios: per-site speeds, one row per scenario.
// ---------------------------------------------------------------------------

struct WindScenario {
  std::vector<double> speed_mps;  // parallel to WindSet::site_ids
  double probability = 0.0;
};

struct WindSet {
  std::vector<std::string> site_ids;  // bus ids
  std::vector<WindScenario> scenarios;

  int num_sites() const { return int(site_ids.size()); }

  int site_index(std::string_view bus_id) const {
    for (size_t i = 0; i < site_ids.size(); ++i)
      if (site_ids[i] == bus_id) return int(i);
    return -1;
  }

  bool equiprobable() const {
    if (scenarios.empty()) return true;
    const double p0 = scenarios.front().probability;
    for (auto& s : scenarios)
      if (std::fabs(s.probability - p0) > 1e-12) return false;
    return true;
  }
};

inline double estimate_correlation(const WindSet& w, int site_a, int site_b) {
  require(w.scenarios.size() >= 2, ErrorKind::validation, "need >= 2 scenarios");
  require(site_a >= 0 && site_a < w.num_sites() && site_b >= 0 && site_b < w.num_sites(),
          ErrorKind::validation, "site index out of range");
  const size_t n = w.scenarios.size();
  double ma = 0, mb = 0;
  for (auto& s : w.scenarios) {
    ma += s.speed_mps[site_a];
    mb += s.speed_mps[site_b];
  }
  ma /= double(n);
  mb /= double(n);
  double saa = 0, sbb = 0, sab = 0;
  for (auto& s : w.scenarios) {
    const double da = s.speed_mps[site_a] - ma, db = s.speed_mps[site_b] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  require(saa > 0.0 && sbb > 0.0, ErrorKind::validation,
          "zero variance: correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Destroys cross-site correlation while keeping every per-site marginal
// exactly: each site's column is re-ordered by an independent seeded
// permutation. A single-site set is returned unchanged.
inline WindSet decorrelate(const WindSet& w, uint64_t seed) {
  if (w.num_sites() <= 1) return w;
  require(w.scenarios.size() >= 2, ErrorKind::validation, "need >= 2 scenarios");
  require(w.equiprobable(), ErrorKind::validation,
          "decorrelate requires an equiprobable scenario set");
  WindSet out = w;
  Rng root(seed);
  for (int site = 0; site < w.num_sites(); ++site) {
    std::vector<double> col(w.scenarios.size());
    for (size_t s = 0; s < w.scenarios.size(); ++s) col[s] = w.scenarios[s].speed_mps[site];
    Rng r = root.fork(uint64_t(site) + 1);
    r.shuffle(col);
    for (size_t s = 0; s < w.scenarios.size(); ++s) out.scenarios[s].speed_mps[site] = col[s];
  }
  return out;
}

struct WeibullParams {
  double shape = 2.0;
  double scale = 8.0;
};

namespace detail {

inline std::vector<double> cholesky_psd(const std::vector<std::vector<double>>& a,
                                        const std::string& what) {
  const int n = int(a.size());
  require(n > 0, ErrorKind::validation, what + ": empty matrix");
  for (int i = 0; i < n; ++i) {
    require(int(a[i].size()) == n, ErrorKind::validation, what + ": matrix not square");
    require(std::fabs(a[i][i] - 1.0) <= 1e-9, ErrorKind::validation,
            what + ": diagonal must be 1");
    for (int j = 0; j < n; ++j)
      require(std::fabs(a[i][j] - a[j][i]) <= 1e-9, ErrorKind::validation,
              what + ": matrix not symmetric");
  }
  std::vector<double> L(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= L[size_t(i) * n + k] * L[size_t(j) * n + k];
      if (i == j) {
        require(s > -1e-10, ErrorKind::validation, what + ": not positive semidefinite");
        L[size_t(i) * n + i] = std::sqrt(std::max(s, 0.0));
      } else {
        const double d = L[size_t(j) * n + j];
        L[size_t(i) * n + j] = d > 1e-12 ? s / d : 0.0;
      }
    }
  }
  return L;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double weibull_quantile(double u, const WeibullParams& p) {
  u = std::clamp(u, 1e-12, 1.0 - 1e-12);
  return p.scale * std::pow(-std::log(1.0 - u), 1.0 / p.shape);
}

}  // namespace detail

// Gaussian-copula wind speeds: correlated standard normals mapped through
// per-site Weibull marginals. Equiprobable scenarios; synthetic stand-in for
// measured wind data.
inline WindSet synthesize_correlated_wind(const std::vector<std::string>& site_ids,
                                          const std::vector<std::vector<double>>& correlations,
                                          const std::vector<WeibullParams>& marginals,
                                          int n_scenarios, uint64_t seed) {
  const int k = int(site_ids.size());
  require(k >= 1, ErrorKind::validation, "no sites");
  require(int(correlations.size()) == k && int(marginals.size()) == k, ErrorKind::validation,
          "correlation/marginal dimensions disagree with sites");
  require(n_scenarios >= 2, ErrorKind::validation,
          "need at least 2 scenarios (variance undefined downstream)");
  for (auto& p : marginals)
    require(p.shape > 0 && p.scale > 0, ErrorKind::validation, "bad Weibull parameters");

  auto L = detail::cholesky_psd(correlations, "wind correlation");
  WindSet out;
  out.site_ids = site_ids;
  Rng rng(seed);
  std::vector<double> g(k);
  for (int s = 0; s < n_scenarios; ++s) {
    for (int i = 0; i < k; ++i) g[i] = rng.normal();
    WindScenario ws;
    ws.speed_mps.resize(k);
    for (int i = 0; i < k; ++i) {
      double z = 0.0;
      for (int j = 0; j <= i; ++j) z += L[size_t(i) * k + j] * g[j];
      ws.speed_mps[i] = detail::weibull_quantile(detail::normal_cdf(z), marginals[i]);
    }
    ws.probability = 1.0 / n_scenarios;
    out.scenarios.push_back(std::move(ws));
  }
  detail::normalize_probabilities(out.scenarios);
  return out;
}

inline WindSet load_wind_csv(const std::filesystem::path& path) {
  auto t = read_csv(path);
  WindSet w;
  w.site_ids = t.header;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    WindScenario s;
    for (size_t c = 0; c < w.site_ids.size(); ++c)
      s.speed_mps.push_back(parse_double(t.cell(r, int(c)), t.where(r)));
    s.probability = 1.0;
    w.scenarios.push_back(std::move(s));
  }
  require(!w.scenarios.empty(), ErrorKind::parse, path.string() + ": no scenarios");
  for (auto& s : w.scenarios) s.probability = 1.0 / double(w.scenarios.size());
  detail::normalize_probabilities(w.scenarios);
  return w;
}

inline std::string wind_csv_text(const WindSet& w) {
  std::ostringstream out;
  for (size_t i = 0; i < w.site_ids.size(); ++i) out << (i ? "," : "") << w.site_ids[i];
  out << "\n";
  for (auto& s : w.scenarios) {
    for (size_t i = 0; i < s.speed_mps.size(); ++i)
      out << (i ? "," : "") << fmt_double(s.speed_mps[i]);
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Joint scenarios: availability x wind.
// ---------------------------------------------------------------------------

struct Scenario {
  std::string label;
  std::vector<uint8_t> unit_status;  // empty -> all available
  std::vector<uint8_t> line_status;
  std::vector<double> site_speed;  // empty -> no wind data
  double probability = 0.0;

  bool unit_available(int g) const { return unit_status.empty() || unit_status[g]; }
  bool line_available(int l) const { return line_status.empty() || line_status[l]; }
};

struct ScenarioSet {
  std::vector<std::string> site_ids;
  std::vector<Scenario> scenarios;

  int size() const { return int(scenarios.size()); }

  int site_index(std::string_view bus_id) const {
    for (size_t i = 0; i < site_ids.size(); ++i)
      if (site_ids[i] == bus_id) return int(i);
    return -1;
  }

  double speed(int s, int site) const {
    require(site >= 0 && site < int(site_ids.size()), ErrorKind::validation, "bad site index");
    require(!scenarios[s].site_speed.empty(), ErrorKind::validation,
            "scenario carries no wind data");
    return scenarios[s].site_speed[site];
  }

  void validate() const {
    require(!scenarios.empty(), ErrorKind::validation, "empty scenario set");
    double sum = 0.0, comp = 0.0;
    for (auto& s : scenarios) {
      require(s.probability >= 0.0, ErrorKind::validation, "negative probability");
      double y = s.probability - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    require(std::fabs(sum - 1.0) <= 1e-12, ErrorKind::validation,
            strf("scenario probabilities sum to %.17g, not 1", sum));
  }
};

inline ScenarioSet from_availability(const AvailabilitySet& a) {
  ScenarioSet out;
  for (auto& s : a.scenarios) {
    Scenario j;
    j.label = s.label;
    j.unit_status = s.unit_status;
    j.line_status = s.line_status;
    j.probability = s.probability;
    out.scenarios.push_back(std::move(j));
  }
  detail::normalize_probabilities(out.scenarios);
  out.validate();
  return out;
}

inline ScenarioSet from_wind(const WindSet& w) {
  ScenarioSet out;
  out.site_ids = w.site_ids;
  int idx = 0;
  for (auto& s : w.scenarios) {
    Scenario j;
    j.label = "wind " + std::to_string(idx++);
    j.site_speed = s.speed_mps;
    j.probability = s.probability;
    out.scenarios.push_back(std::move(j));
  }
  detail::normalize_probabilities(out.scenarios);
  out.validate();
  return out;
}

// Cartesian product with product probabilities; availability and wind are
// treated as independent.
inline ScenarioSet combine(const AvailabilitySet& avail, const WindSet& wind, long size_cap) {
  require(!avail.scenarios.empty() && !wind.scenarios.empty(), ErrorKind::validation,
          "combine: both sets must be nonempty");
  const long total = long(avail.scenarios.size()) * long(wind.scenarios.size());
  require(total <= size_cap, ErrorKind::cap_exceeded,
          strf("scenario product %ld exceeds cap %ld", total, size_cap));
  ScenarioSet out;
  out.site_ids = wind.site_ids;
  int wi = 0;
  for (auto& a : avail.scenarios) {
    wi = 0;
    for (auto& w : wind.scenarios) {
      Scenario j;
      j.label = a.label + " / wind " + std::to_string(wi++);
      j.unit_status = a.unit_status;
      j.line_status = a.line_status;
      j.site_speed = w.speed_mps;
      j.probability = a.probability * w.probability;
      out.scenarios.push_back(std::move(j));
    }
  }
  detail::normalize_probabilities(out.scenarios);
  out.validate();
  return out;
}

}  // namespace gep
