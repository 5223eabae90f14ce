#pragma once

#include <map>
#include <optional>

#include "gep/common.hpp"

namespace gep {

// ---------------------------------------------------------------------------
// Static power-system data model: buses, lines, units, wind farms, load
// blocks and the study configuration. Immutable after load_system.
// ---------------------------------------------------------------------------

struct Bus {
  std::string id;
  double peak_load_mw = 0.0;  // base-year peak; growth applies per year
};

struct TransmissionLine {
  int from = -1, to = -1;  // bus indices
  double susceptance = 0.0;  // p.u.
  double capacity_mw = 0.0;
  double for_rate = 0.0;  // forced outage probability
};

struct PowerCurvePoint {
  double speed_mps = 0.0;
  double power_mw = 0.0;
};

// Piecewise-linear turbine curve. Zero below the first breakpoint and above
// the last one (cut-out shutdown), linear in between.
struct PowerCurve {
  std::vector<PowerCurvePoint> points;

  double power_at(double speed) const {
    if (points.empty() || speed < points.front().speed_mps || speed > points.back().speed_mps)
      return 0.0;
    for (size_t i = 1; i < points.size(); ++i) {
      if (speed <= points[i].speed_mps) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (b.speed_mps == a.speed_mps) return b.power_mw;
        double f = (speed - a.speed_mps) / (b.speed_mps - a.speed_mps);
        return a.power_mw + f * (b.power_mw - a.power_mw);
      }
    }
    return points.back().power_mw;
  }

  double rated_power() const {
    double r = 0.0;
    for (auto& p : points) r = std::max(r, p.power_mw);
    return r;
  }

  double cut_out_speed() const { return points.empty() ? 0.0 : points.back().speed_mps; }

  void validate(const std::string& what) const {
    require(points.size() >= 2, ErrorKind::validation, what + ": curve needs >= 2 points");
    require(points.front().speed_mps >= 0.0, ErrorKind::validation, what + ": negative speed");
    for (size_t i = 0; i < points.size(); ++i) {
      require(points[i].power_mw >= 0.0, ErrorKind::validation, what + ": negative power");
      if (i) require(points[i].speed_mps > points[i - 1].speed_mps, ErrorKind::validation,
                     what + ": speeds not increasing");
    }
  }
};

struct ConventionalUnit {
  std::string id;
  std::optional<int> bus;  // unset for candidates
  double capacity_mw = 0.0;
  double marginal_cost = 0.0;  // $/MWh
  double for_rate = 0.0;
  bool owned_by_genco = false;
  std::vector<int> candidate_buses;                   // candidates only
  std::optional<double> invest_cost_per_year;         // $/yr, uniform over (bus, year)
  std::map<std::pair<int, int>, double> invest_cost_overrides;

  bool is_candidate() const { return !bus.has_value(); }
  double invest_cost(int b, int year) const {
    auto it = invest_cost_overrides.find({b, year});
    if (it != invest_cost_overrides.end()) return it->second;
    return invest_cost_per_year.value_or(0.0);
  }
};

struct WindFarm {
  std::string id;
  std::optional<int> bus;
  int n_turbines = 0;
  bool owned_by_genco = false;
  std::vector<int> candidate_buses;
  PowerCurve curve;
  std::optional<double> invest_cost_per_year;
  std::map<std::pair<int, int>, double> invest_cost_overrides;

  bool is_candidate() const { return !bus.has_value(); }
  double capacity_mw() const { return n_turbines * curve.rated_power(); }
  double invest_cost(int b, int year) const {
    auto it = invest_cost_overrides.find({b, year});
    if (it != invest_cost_overrides.end()) return it->second;
    return invest_cost_per_year.value_or(0.0);
  }
};

struct LoadBlock {
  std::string id;
  double level = 1.0;      // fraction of peak
  double duration_h = 0.0;  // hours per year
};

struct StudyConfig {
  int years = 1;
  double demand_growth = 0.0;  // fraction per year from year 2 on
  double discount_rate = 0.0;
  double voll = 1000.0;  // $/MWh
  std::string slack_bus = "";  // empty -> first bus
  double line_for_default = 0.02;
  double feas_tol = 1e-7;
  double duality_tol = 1e-6;
  double comp_tol = 1e-6;
  double mip_gap = 0.0;
  double time_limit_s = 0.0;
  uint64_t seed = 0;
  long max_scenarios = 200000;
  double milp_memory_mb = 2048.0;
  double unit_invest_rate_usd_per_kw = 400.0;
  double wind_invest_rate_usd_per_kw = 1000.0;
  double payback_years = 40.0;
  double decorrelate_rho_threshold = 0.1;
  int threads = 0;  // 0 -> hardware
  // conformance variant: put the angle-pin dual in every bus row of its
  // component instead of only the pinned bus row (for comparison runs)
  bool xi_in_every_row = false;
};

struct SystemModel {
  std::vector<Bus> buses;
  std::vector<TransmissionLine> lines;
  std::vector<ConventionalUnit> units;  // existing and candidates
  std::vector<WindFarm> wind_farms;
  std::vector<LoadBlock> blocks;
  StudyConfig config;

  int num_buses() const { return int(buses.size()); }

  int bus_index(std::string_view id) const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == id) return int(i);
    raise(ErrorKind::validation, "unknown bus '" + std::string(id) + "'");
  }

  int slack_bus_index() const {
    return config.slack_bus.empty() ? 0 : bus_index(config.slack_bus);
  }

  double peak_load(int bus, int year) const {
    check_bus(bus);
    require(year >= 1 && year <= config.years, ErrorKind::validation,
            strf("year %d outside horizon", year));
    return buses[bus].peak_load_mw * std::pow(1.0 + config.demand_growth, year - 1);
  }

  double block_load(int bus, int block, int year) const {
    require(block >= 0 && block < int(blocks.size()), ErrorKind::validation, "bad block index");
    return blocks[block].level * peak_load(bus, year);
  }

  double discount(int year) const { return std::pow(1.0 + config.discount_rate, -year); }

  std::vector<int> existing_unit_indices() const { return filter_units(false); }
  std::vector<int> candidate_unit_indices() const { return filter_units(true); }
  std::vector<int> existing_wind_indices() const { return filter_wind(false); }
  std::vector<int> candidate_wind_indices() const { return filter_wind(true); }

  double max_marginal_cost() const {
    double m = 0.0;
    for (auto& u : units) m = std::max(m, u.marginal_cost);
    return m;
  }

  void check_bus(int b) const {
    require(b >= 0 && b < num_buses(), ErrorKind::validation, "bus index out of range");
  }

  // copy without wind farms (failure studies clear a wind-free market)
  SystemModel without_wind() const {
    SystemModel m = *this;
    m.wind_farms.clear();
    return m;
  }

  void validate() const;

 private:
  std::vector<int> filter_units(bool cand) const {
    std::vector<int> out;
    for (size_t i = 0; i < units.size(); ++i)
      if (units[i].is_candidate() == cand) out.push_back(int(i));
    return out;
  }
  std::vector<int> filter_wind(bool cand) const {
    std::vector<int> out;
    for (size_t i = 0; i < wind_farms.size(); ++i)
      if (wind_farms[i].is_candidate() == cand) out.push_back(int(i));
    return out;
  }
};

// Merge the load-duration blocks into k contiguous groups: duration-weighted
// mean level, summed duration (total hours preserved). Groups double in size
// away from the peak so scarcity pricing in the top blocks survives
// coarsening: with k = 5 over 20 blocks the peak block stays untouched.
inline SystemModel coarsen_blocks(const SystemModel& m, int k) {
  require(k >= 1, ErrorKind::validation, "need at least one block");
  if (k >= int(m.blocks.size())) return m;
  const int n = int(m.blocks.size());
  std::vector<int> sizes(k, 0);
  int remaining = n, width = 1;
  for (int g = k - 1; g >= 1; --g) {
    sizes[g] = std::min(width, remaining - g);  // leave one block per earlier group
    remaining -= sizes[g];
    width *= 2;
  }
  sizes[0] = remaining;
  SystemModel out = m;
  out.blocks.clear();
  int lo = 0;
  for (int g = 0; g < k; ++g) {
    double dur = 0.0, lvl = 0.0;
    for (int i = lo; i < lo + sizes[g]; ++i) {
      dur += m.blocks[i].duration_h;
      lvl += m.blocks[i].level * m.blocks[i].duration_h;
    }
    out.blocks.push_back({"c" + std::to_string(g + 1), lvl / dur, dur});
    lo += sizes[g];
  }
  out.validate();
  return out;
}

// $/yr for a capacity paid off linearly over the payback period
inline double annualized_invest_cost(double capacity_mw, double rate_per_kw,
                                     double payback_years) {
  require(capacity_mw > 0.0 && rate_per_kw > 0.0 && payback_years > 0.0, ErrorKind::validation,
          "annualized_invest_cost: inputs must be positive");
  return capacity_mw * 1000.0 * rate_per_kw / payback_years;
}

inline void SystemModel::validate() const {
  require(!buses.empty(), ErrorKind::validation, "no buses");
  for (size_t i = 0; i < buses.size(); ++i) {
    require(!buses[i].id.empty(), ErrorKind::validation, "bus with empty id");
    require(buses[i].peak_load_mw >= 0.0, ErrorKind::validation,
            "bus " + buses[i].id + ": negative peak load");
    for (size_t j = i + 1; j < buses.size(); ++j)
      require(buses[i].id != buses[j].id, ErrorKind::validation,
              "duplicate bus id " + buses[i].id);
  }
  for (auto& l : lines) {
    check_bus(l.from);
    check_bus(l.to);
    require(l.from != l.to, ErrorKind::validation, "line endpoints coincide");
    require(l.susceptance > 0.0, ErrorKind::validation, "line susceptance must be positive");
    require(l.capacity_mw > 0.0, ErrorKind::validation, "line capacity must be positive");
    require(l.for_rate >= 0.0 && l.for_rate < 1.0, ErrorKind::validation,
            "line FOR outside [0,1)");
  }
  auto check_ids_unique = [](const auto& v, const char* what) {
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        require(v[i].id != v[j].id, ErrorKind::validation,
                std::string("duplicate ") + what + " id " + v[i].id);
  };
  check_ids_unique(units, "unit");
  check_ids_unique(wind_farms, "wind farm");
  for (auto& u : units) {
    require(u.capacity_mw > 0.0, ErrorKind::validation, "unit " + u.id + ": capacity <= 0");
    require(u.marginal_cost >= 0.0, ErrorKind::validation, "unit " + u.id + ": negative cost");
    require(u.for_rate >= 0.0 && u.for_rate < 1.0, ErrorKind::validation,
            "unit " + u.id + ": FOR outside [0,1)");
    if (u.is_candidate()) {
      require(!u.candidate_buses.empty(), ErrorKind::validation,
              "candidate unit " + u.id + ": empty siting set");
      for (int b : u.candidate_buses) check_bus(b);
    } else {
      check_bus(*u.bus);
      require(u.candidate_buses.empty(), ErrorKind::validation,
              "existing unit " + u.id + ": has candidate buses");
    }
  }
  for (auto& w : wind_farms) {
    require(w.n_turbines >= 1, ErrorKind::validation, "wind farm " + w.id + ": no turbines");
    w.curve.validate("wind farm " + w.id);
    if (w.is_candidate()) {
      require(!w.candidate_buses.empty(), ErrorKind::validation,
              "candidate wind farm " + w.id + ": empty siting set");
      for (int b : w.candidate_buses) check_bus(b);
    } else {
      check_bus(*w.bus);
    }
  }
  require(!blocks.empty(), ErrorKind::validation, "no load blocks");
  for (size_t i = 0; i < blocks.size(); ++i) {
    require(blocks[i].level > 0.0 && blocks[i].level <= 1.0, ErrorKind::validation,
            "block " + blocks[i].id + ": level outside (0,1]");
    require(blocks[i].duration_h > 0.0, ErrorKind::validation,
            "block " + blocks[i].id + ": duration <= 0");
    if (i)
      require(blocks[i].level >= blocks[i - 1].level, ErrorKind::validation,
              "blocks not sorted by level");
  }
  require(config.years >= 1, ErrorKind::validation, "planning horizon must be >= 1 year");
  require(config.discount_rate >= 0.0, ErrorKind::validation, "negative discount rate");
  require(config.voll > max_marginal_cost(), ErrorKind::validation,
          "voll must exceed every marginal cost");
  if (!config.slack_bus.empty()) bus_index(config.slack_bus);

  // base network connectivity (all lines in service)
  if (num_buses() > 1) {
    std::vector<int> parent(num_buses());
    for (int i = 0; i < num_buses(); ++i) parent[i] = i;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (auto& l : lines) parent[find(l.from)] = find(l.to);
    for (int i = 1; i < num_buses(); ++i)
      require(find(i) == find(0), ErrorKind::validation,
              "base network is disconnected at bus " + buses[i].id);
  }
}

// ---------------------------------------------------------------------------
// CSV loading / canonical serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> parse_bus_list(const SystemModel& m, const std::string& cell,
                                       const std::string& where) {
  std::vector<int> out;
  if (trim(cell).empty()) return out;
  for (auto& tok : split(cell, ';')) {
    if (tok.empty()) continue;
    bool found = false;
    for (size_t i = 0; i < m.buses.size(); ++i)
      if (m.buses[i].id == tok) {
        out.push_back(int(i));
        found = true;
        break;
      }
    require(found, ErrorKind::validation, where + ": unknown bus '" + tok + "'");
  }
  return out;
}

inline void parse_config_line(StudyConfig& c, const std::string& key, const std::string& value,
                              const std::string& where) {
  auto d = [&] { return parse_double(value, where); };
  auto i = [&] { return parse_int(value, where); };
  if (key == "years") c.years = int(i());
  else if (key == "growth") c.demand_growth = d();
  else if (key == "discount_rate") c.discount_rate = d();
  else if (key == "voll") c.voll = d();
  else if (key == "slack_bus") c.slack_bus = trim(value);
  else if (key == "line_for_default") c.line_for_default = d();
  else if (key == "feas_tol") c.feas_tol = d();
  else if (key == "duality_tol") c.duality_tol = d();
  else if (key == "comp_tol") c.comp_tol = d();
  else if (key == "mip_gap") c.mip_gap = d();
  else if (key == "time_limit_s") c.time_limit_s = d();
  else if (key == "seed") c.seed = uint64_t(i());
  else if (key == "max_scenarios") c.max_scenarios = i();
  else if (key == "milp_memory_mb") c.milp_memory_mb = d();
  else if (key == "unit_invest_rate_usd_per_kw") c.unit_invest_rate_usd_per_kw = d();
  else if (key == "wind_invest_rate_usd_per_kw") c.wind_invest_rate_usd_per_kw = d();
  else if (key == "payback_years") c.payback_years = d();
  else if (key == "decorrelate_rho_threshold") c.decorrelate_rho_threshold = d();
  else if (key == "threads") c.threads = int(i());
  else if (key == "xi_in_every_row") c.xi_in_every_row = parse_bool(value, where);
  else raise(ErrorKind::parse, where + ": unknown config key '" + key + "'");
}

}  // namespace detail

inline StudyConfig load_config(const std::filesystem::path& path) {
  StudyConfig c;
  std::ifstream in(path);
  require(in.good(), ErrorKind::missing_file, "cannot open " + path.string());
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    require(eq != std::string::npos, ErrorKind::parse,
            path.string() + ":" + std::to_string(ln) + ": expected key = value");
    detail::parse_config_line(c, trim(s.substr(0, eq)), trim(s.substr(eq + 1)),
                              path.string() + ":" + std::to_string(ln));
  }
  return c;
}

struct LoadOptions {
  std::optional<std::filesystem::path> config_override;
};

inline SystemModel load_system(const std::filesystem::path& dir, const LoadOptions& opt = {}) {
  namespace fs = std::filesystem;
  require(fs::exists(dir), ErrorKind::missing_file, "data directory not found: " + dir.string());
  SystemModel m;

  auto buses = read_csv(dir / "buses.csv");
  {
    int c_id = buses.col("id"), c_peak = buses.col("peak_load");
    for (size_t r = 0; r < buses.rows.size(); ++r)
      m.buses.push_back(
          {trim(buses.cell(r, c_id)), parse_double(buses.cell(r, c_peak), buses.where(r))});
  }

  if (fs::exists(dir / "config.txt") || opt.config_override)
    m.config = load_config(opt.config_override.value_or(dir / "config.txt"));

  auto lines = read_csv(dir / "lines.csv");
  {
    int c_from = lines.col("from"), c_to = lines.col("to"), c_b = lines.col("susceptance"),
        c_cap = lines.col("capacity"), c_for = lines.col("for");
    for (size_t r = 0; r < lines.rows.size(); ++r) {
      TransmissionLine l;
      l.from = m.bus_index(trim(lines.cell(r, c_from)));
      l.to = m.bus_index(trim(lines.cell(r, c_to)));
      l.susceptance = parse_double(lines.cell(r, c_b), lines.where(r));
      l.capacity_mw = parse_double(lines.cell(r, c_cap), lines.where(r));
      const std::string f = trim(lines.cell(r, c_for));
      l.for_rate = f.empty() ? m.config.line_for_default : parse_double(f, lines.where(r));
      m.lines.push_back(l);
    }
  }

  auto units = read_csv(dir / "units.csv");
  {
    int c_id = units.col("id"), c_bus = units.col("bus"), c_cap = units.col("capacity"),
        c_cost = units.col("cost"), c_for = units.col("for"), c_own = units.col("owned"),
        c_cand = units.col("candidate_buses");
    for (size_t r = 0; r < units.rows.size(); ++r) {
      ConventionalUnit u;
      u.id = trim(units.cell(r, c_id));
      const std::string bus = trim(units.cell(r, c_bus));
      if (!bus.empty()) u.bus = m.bus_index(bus);
      u.capacity_mw = parse_double(units.cell(r, c_cap), units.where(r));
      u.marginal_cost = parse_double(units.cell(r, c_cost), units.where(r));
      u.for_rate = parse_double(units.cell(r, c_for), units.where(r));
      u.owned_by_genco = parse_bool(units.cell(r, c_own), units.where(r));
      u.candidate_buses = detail::parse_bus_list(m, units.cell(r, c_cand), units.where(r));
      if (u.is_candidate())
        u.invest_cost_per_year = annualized_invest_cost(
            u.capacity_mw, m.config.unit_invest_rate_usd_per_kw, m.config.payback_years);
      m.units.push_back(std::move(u));
    }
  }

  PowerCurve shared_curve;
  if (fs::exists(dir / "curve.csv")) {
    auto curve = read_csv(dir / "curve.csv");
    int c_s = curve.col("speed_mps"), c_p = curve.col("power_mw");
    for (size_t r = 0; r < curve.rows.size(); ++r)
      shared_curve.points.push_back({parse_double(curve.cell(r, c_s), curve.where(r)),
                                     parse_double(curve.cell(r, c_p), curve.where(r))});
  }

  if (fs::exists(dir / "wind.csv")) {
    auto wind = read_csv(dir / "wind.csv");
    int c_id = wind.col("id"), c_bus = wind.col("bus"), c_n = wind.col("n_turbines"),
        c_own = wind.col("owned"), c_cand = wind.col("candidate_buses");
    for (size_t r = 0; r < wind.rows.size(); ++r) {
      WindFarm w;
      w.id = trim(wind.cell(r, c_id));
      const std::string bus = trim(wind.cell(r, c_bus));
      if (!bus.empty()) w.bus = m.bus_index(bus);
      w.n_turbines = int(parse_int(wind.cell(r, c_n), wind.where(r)));
      w.owned_by_genco = parse_bool(wind.cell(r, c_own), wind.where(r));
      w.candidate_buses = detail::parse_bus_list(m, wind.cell(r, c_cand), wind.where(r));
      require(!shared_curve.points.empty(), ErrorKind::validation,
              "wind farms present but curve.csv missing in " + dir.string());
      w.curve = shared_curve;
      if (w.is_candidate())
        w.invest_cost_per_year = annualized_invest_cost(
            w.capacity_mw(), m.config.wind_invest_rate_usd_per_kw, m.config.payback_years);
      m.wind_farms.push_back(std::move(w));
    }
  }

  auto blocks = read_csv(dir / "blocks.csv");
  {
    int c_id = blocks.col("id"), c_l = blocks.col("level"), c_d = blocks.col("duration_h");
    for (size_t r = 0; r < blocks.rows.size(); ++r)
      m.blocks.push_back({trim(blocks.cell(r, c_id)),
                          parse_double(blocks.cell(r, c_l), blocks.where(r)),
                          parse_double(blocks.cell(r, c_d), blocks.where(r))});
  }

  m.validate();
  return m;
}

inline std::string serialize_system(const SystemModel& m) {
  std::ostringstream out;
  auto n = [&](double v) { return fmt_double(v); };
  out << "== buses.csv ==\nid,peak_load\n";
  for (auto& b : m.buses) out << b.id << "," << n(b.peak_load_mw) << "\n";
  out << "== lines.csv ==\nfrom,to,susceptance,capacity,for\n";
  for (auto& l : m.lines)
    out << m.buses[l.from].id << "," << m.buses[l.to].id << "," << n(l.susceptance) << ","
        << n(l.capacity_mw) << "," << n(l.for_rate) << "\n";
  out << "== units.csv ==\nid,bus,capacity,cost,for,owned,candidate_buses\n";
  for (auto& u : m.units) {
    out << u.id << "," << (u.bus ? m.buses[*u.bus].id : "") << "," << n(u.capacity_mw) << ","
        << n(u.marginal_cost) << "," << n(u.for_rate) << "," << (u.owned_by_genco ? 1 : 0) << ",";
    for (size_t i = 0; i < u.candidate_buses.size(); ++i)
      out << (i ? ";" : "") << m.buses[u.candidate_buses[i]].id;
    out << "\n";
  }
  out << "== wind.csv ==\nid,bus,n_turbines,owned,candidate_buses\n";
  for (auto& w : m.wind_farms) {
    out << w.id << "," << (w.bus ? m.buses[*w.bus].id : "") << "," << w.n_turbines << ","
        << (w.owned_by_genco ? 1 : 0) << ",";
    for (size_t i = 0; i < w.candidate_buses.size(); ++i)
      out << (i ? ";" : "") << m.buses[w.candidate_buses[i]].id;
    out << "\n";
  }
  if (!m.wind_farms.empty()) {
    out << "== curve.csv ==\nspeed_mps,power_mw\n";
    for (auto& p : m.wind_farms.front().curve.points)
      out << n(p.speed_mps) << "," << n(p.power_mw) << "\n";
  }
  out << "== blocks.csv ==\nid,level,duration_h\n";
  for (auto& b : m.blocks) out << b.id << "," << n(b.level) << "," << n(b.duration_h) << "\n";
  const StudyConfig& c = m.config;
  out << "== config.txt ==\n";
  out << "years = " << c.years << "\n";
  out << "growth = " << n(c.demand_growth) << "\n";
  out << "discount_rate = " << n(c.discount_rate) << "\n";
  out << "voll = " << n(c.voll) << "\n";
  if (!c.slack_bus.empty()) out << "slack_bus = " << c.slack_bus << "\n";
  out << "line_for_default = " << n(c.line_for_default) << "\n";
  out << "feas_tol = " << n(c.feas_tol) << "\n";
  out << "duality_tol = " << n(c.duality_tol) << "\n";
  out << "comp_tol = " << n(c.comp_tol) << "\n";
  out << "mip_gap = " << n(c.mip_gap) << "\n";
  out << "time_limit_s = " << n(c.time_limit_s) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "max_scenarios = " << c.max_scenarios << "\n";
  out << "milp_memory_mb = " << n(c.milp_memory_mb) << "\n";
  out << "unit_invest_rate_usd_per_kw = " << n(c.unit_invest_rate_usd_per_kw) << "\n";
  out << "wind_invest_rate_usd_per_kw = " << n(c.wind_invest_rate_usd_per_kw) << "\n";
  out << "payback_years = " << n(c.payback_years) << "\n";
  out << "decorrelate_rho_threshold = " << n(c.decorrelate_rho_threshold) << "\n";
  out << "threads = " << c.threads << "\n";
  out << "xi_in_every_row = " << (c.xi_in_every_row ? 1 : 0) << "\n";
  return out.str();
}

inline void save_system(const SystemModel& m, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string all = serialize_system(m);
  // split the canonical stream back into its files
  std::istringstream in(all);
  std::string line, current;
  std::ostringstream chunk;
  auto flush = [&] {
    if (!current.empty()) write_text_file(dir / current, chunk.str());
    chunk.str("");
  };
  while (std::getline(in, line)) {
    if (line.rfind("== ", 0) == 0) {
      flush();
      current = line.substr(3, line.size() - 6);
    } else {
      chunk << line << "\n";
    }
  }
  flush();
}

}  // namespace gep
