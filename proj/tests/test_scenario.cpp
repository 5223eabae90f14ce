#include <catch2/catch.hpp>

#include "gep/scenario.hpp"

using namespace gep;

static const std::filesystem::path kData = std::filesystem::path(GEP_DATA_DIR) / "rts24";

namespace {

// minimal single-bus model with the given unit/line outage rates
SystemModel toy_model(std::vector<double> unit_fors, std::vector<double> line_fors = {}) {
  SystemModel m;
  m.buses.push_back({"a", 100.0});
  if (!line_fors.empty()) m.buses.push_back({"b", 0.0});
  m.blocks.push_back({"b1", 1.0, 8760.0});
  int g = 0;
  for (double f : unit_fors) {
    ConventionalUnit u;
    u.id = "g" + std::to_string(++g);
    u.bus = 0;
    u.capacity_mw = 100;
    u.marginal_cost = 10;
    u.for_rate = f;
    m.units.push_back(u);
  }
  int l = 0;
  for (double f : line_fors) m.lines.push_back({0, 1, 10.0, 100.0, f}), ++l;
  return m;
}

}  // namespace

TEST_CASE("no uncertainty collapses to the base scenario", "[scenario]") {
  auto m = toy_model({0.0, 0.0});
  auto set = enumerate_n_minus_1(m);
  REQUIRE(set.scenarios.size() == 1);
  CHECK(set.scenarios[0].probability == Approx(1.0));
  CHECK(set.scenarios[0].failures() == 0);
}

TEST_CASE("single failable unit gives the binomial split", "[scenario]") {
  auto m = toy_model({0.1});
  auto set = enumerate_n_minus_1(m);
  REQUIRE(set.scenarios.size() == 2);
  CHECK(set.scenarios[0].probability == Approx(0.9));
  CHECK(set.scenarios[1].probability == Approx(0.1));
}

TEST_CASE("n-1 probabilities equal the joint distribution conditioned on <=1 failure",
          "[scenario]") {
  // oracle: enumerate the full 2^4 independent joint on a 4-device toy
  const std::vector<double> uf = {0.07, 0.15};
  const std::vector<double> lf = {0.02, 0.05};
  auto m = toy_model(uf, lf);
  std::vector<double> fors = {0.07, 0.15, 0.02, 0.05};

  std::vector<double> joint_le1(5, 0.0);  // index: 0 = none, 1..4 = device d failed
  double mass = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    double p = 1.0;
    int failed = -1, count = 0;
    for (int d = 0; d < 4; ++d) {
      if (mask & (1 << d)) {
        p *= fors[d];
        failed = d;
        ++count;
      } else {
        p *= 1.0 - fors[d];
      }
    }
    if (count <= 1) {
      joint_le1[count == 0 ? 0 : failed + 1] = p;
      mass += p;
    }
  }
  for (auto& p : joint_le1) p /= mass;

  auto set = enumerate_n_minus_1(m);
  REQUIRE(set.scenarios.size() == 5);
  CHECK(set.scenarios[0].probability == Approx(joint_le1[0]).epsilon(1e-12));
  for (int d = 0; d < 4; ++d)
    CHECK(set.scenarios[d + 1].probability == Approx(joint_le1[d + 1]).epsilon(1e-12));
}

TEST_CASE("rts24 n-1 set: counts, normalization, dominant base", "[scenario]") {
  auto m = load_system(kData);
  auto set = enumerate_n_minus_1(m);
  // base + one per failable device (all 36 units, all 38 lines fail here)
  CHECK(set.scenarios.size() == 1 + 36 + 38);
  double sum = 0.0;
  for (auto& s : set.scenarios) {
    sum += s.probability;
    CHECK(s.failures() <= 1);  // Hamming distance at most 1 from base
  }
  CHECK(std::fabs(sum - 1.0) <= 1e-12);
  for (size_t i = 1; i < set.scenarios.size(); ++i)
    CHECK(set.scenarios[0].probability > set.scenarios[i].probability);
}

TEST_CASE("multi-device mode enumerates pairs when asked", "[scenario]") {
  auto m = toy_model({0.1, 0.2});
  auto set = enumerate_outages(m, 2);
  REQUIRE(set.scenarios.size() == 4);  // base, two singles, one pair
  // conditional joint: full enumeration is the whole space here
  CHECK(set.scenarios[0].probability == Approx(0.9 * 0.8));
  CHECK(set.scenarios[3].probability == Approx(0.1 * 0.2));
  CHECK(set.scenarios[3].failures() == 2);
}

TEST_CASE("degenerate FOR = 1 is rejected", "[scenario]") {
  auto m = toy_model({0.5});
  m.units[0].for_rate = 1.0;
  REQUIRE_THROWS_AS(enumerate_n_minus_1(m), Error);
}

TEST_CASE("wind_power follows the turbine curve", "[scenario]") {
  auto m = load_system(kData);
  WindFarm farm = m.wind_farms[1];  // candidate, 100 turbines
  REQUIRE(farm.n_turbines == 100);
  CHECK(wind_power(farm, 19.0) == Approx(250.0));  // rated
  CHECK(wind_power(farm, 0.0) == 0.0);
  CHECK(wind_power(farm, 7.5) == Approx(100 * 0.5 * (0.580 + 0.865)));
  // nondecreasing between cut-in and rated speed
  double prev = 0.0;
  for (double v = 3.0; v <= 19.0; v += 0.25) {
    double p = wind_power(farm, v);
    CHECK(p >= prev - 1e-12);
    prev = p;
  }
  CHECK_THROWS_AS(wind_power(farm, -1.0), Error);
}

TEST_CASE("correlation estimate sanity", "[scenario]") {
  WindSet w;
  w.site_ids = {"a", "b"};
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    double x = rng.normal();
    w.scenarios.push_back({{x, x}, 1.0 / 400});
  }
  CHECK(estimate_correlation(w, 0, 0) == Approx(1.0));
  CHECK(estimate_correlation(w, 0, 1) == Approx(1.0));

  WindSet flat;
  flat.site_ids = {"a", "b"};
  flat.scenarios.push_back({{1.0, 2.0}, 0.5});
  flat.scenarios.push_back({{1.0, 3.0}, 0.5});
  CHECK_THROWS_AS(estimate_correlation(flat, 0, 1), Error);  // site a has zero variance
}

TEST_CASE("copula generator hits its correlation targets", "[scenario]") {
  SECTION("identity correlation gives near-zero cross terms") {
    std::vector<std::vector<double>> eye = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    auto w = synthesize_correlated_wind({"a", "b", "c"}, eye, {{2.0, 8.0}, {2.0, 8.0}, {2.0, 8.0}},
                                        5000, 11);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        CHECK(std::fabs(estimate_correlation(w, i, j)) < 0.05);
  }
  SECTION("rho = 0.8 estimated within +-0.05 at 5000 samples") {
    std::vector<std::vector<double>> c = {{1.0, 0.8}, {0.8, 1.0}};
    auto w = synthesize_correlated_wind({"a", "b"}, c, {{2.0, 8.0}, {2.2, 8.5}}, 5000, 17);
    CHECK(estimate_correlation(w, 0, 1) == Approx(0.8).margin(0.05));
  }
  SECTION("bundled five-site matrix within +-0.05 of every pairwise target") {
    auto t = read_csv(kData / "wind_correlation.csv");
    std::vector<std::vector<double>> corr;
    std::vector<std::string> sites;
    for (size_t r = 0; r < t.rows.size(); ++r) {
      sites.push_back(t.cell(r, 0));
      std::vector<double> row;
      for (size_t c = 1; c < t.header.size(); ++c)
        row.push_back(parse_double(t.cell(r, int(c)), t.where(r)));
      corr.push_back(row);
    }
    std::vector<WeibullParams> marg(sites.size(), WeibullParams{2.1, 8.5});
    auto w = synthesize_correlated_wind(sites, corr, marg, 5000, 23);
    for (size_t i = 0; i < sites.size(); ++i)
      for (size_t j = i + 1; j < sites.size(); ++j)
        CHECK(estimate_correlation(w, int(i), int(j)) == Approx(corr[i][j]).margin(0.05));
  }
  SECTION("a single requested scenario is rejected") {
    std::vector<std::vector<double>> c = {{1.0}};
    CHECK_THROWS_AS(synthesize_correlated_wind({"a"}, c, {{2.0, 8.0}}, 1, 3), Error);
  }
  SECTION("non-PSD matrix is rejected") {
    std::vector<std::vector<double>> c = {{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
    CHECK_THROWS_AS(synthesize_correlated_wind({"a", "b", "c"}, c,
                                               {{2.0, 8.0}, {2.0, 8.0}, {2.0, 8.0}}, 100, 3),
                    Error);
  }
}

TEST_CASE("decorrelate kills correlation and preserves marginals exactly", "[scenario]") {
  auto t = read_csv(kData / "wind_correlation.csv");
  std::vector<std::vector<double>> corr;
  std::vector<std::string> sites;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    sites.push_back(t.cell(r, 0));
    std::vector<double> row;
    for (size_t c = 1; c < t.header.size(); ++c)
      row.push_back(parse_double(t.cell(r, int(c)), t.where(r)));
    corr.push_back(row);
  }
  std::vector<WeibullParams> marg(sites.size(), WeibullParams{2.1, 8.5});
  auto w = synthesize_correlated_wind(sites, corr, marg, 200, 5);
  REQUIRE(estimate_correlation(w, 2, 4) > 0.9);  // (n5, n8) target 0.98

  const uint64_t decorr_stream = Rng(5).fork(0x5eedULL).next_u64();
  auto u = decorrelate(w, decorr_stream);
  REQUIRE(u.scenarios.size() == w.scenarios.size());
  for (size_t i = 0; i < sites.size(); ++i)
    for (size_t j = i + 1; j < sites.size(); ++j)
      CHECK(std::fabs(estimate_correlation(u, int(i), int(j))) <= 0.1);

  // per-site sorted value lists identical before/after
  for (int site = 0; site < int(sites.size()); ++site) {
    std::vector<double> a, b;
    for (auto& s : w.scenarios) a.push_back(s.speed_mps[site]);
    for (auto& s : u.scenarios) b.push_back(s.speed_mps[site]);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }

  // deterministic given the seed
  auto u2 = decorrelate(w, decorr_stream);
  CHECK(u2.scenarios[0].speed_mps == u.scenarios[0].speed_mps);

  // single site: documented no-op
  WindSet one;
  one.site_ids = {"a"};
  one.scenarios.push_back({{5.0}, 0.5});
  one.scenarios.push_back({{7.0}, 0.5});
  auto same = decorrelate(one, 3);
  CHECK(same.scenarios[0].speed_mps[0] == 5.0);
  CHECK(same.scenarios[1].speed_mps[0] == 7.0);
}

TEST_CASE("combine forms the product law and enforces the cap", "[scenario]") {
  auto m = toy_model({0.1});
  auto avail = enumerate_n_minus_1(m);  // (.9, .1)
  WindSet w;
  w.site_ids = {"a"};
  w.scenarios.push_back({{5.0}, 0.5});
  w.scenarios.push_back({{9.0}, 0.5});

  auto joint = combine(avail, w, 100);
  REQUIRE(joint.size() == 4);
  CHECK(joint.scenarios[0].probability == Approx(0.45));
  CHECK(joint.scenarios[1].probability == Approx(0.45));
  CHECK(joint.scenarios[2].probability == Approx(0.05));
  CHECK(joint.scenarios[3].probability == Approx(0.05));
  joint.validate();

  SECTION("base-only availability times 3 wind keeps wind probabilities") {
    auto base = base_only_availability(m);
    WindSet w3;
    w3.site_ids = {"a"};
    w3.scenarios.push_back({{3.0}, 0.2});
    w3.scenarios.push_back({{6.0}, 0.3});
    w3.scenarios.push_back({{9.0}, 0.5});
    auto j3 = combine(base, w3, 100);
    REQUIRE(j3.size() == 3);
    CHECK(j3.scenarios[0].probability == Approx(0.2));
    CHECK(j3.scenarios[2].probability == Approx(0.5));
  }

  SECTION("cap violation raises the dedicated error") {
    auto rts = load_system(kData);
    auto rts_avail = enumerate_n_minus_1(rts);
    WindSet big;
    big.site_ids = {"n1"};
    for (int i = 0; i < 200; ++i) big.scenarios.push_back({{double(i % 25)}, 1.0 / 200});
    try {
      combine(rts_avail, big, 100);
      FAIL("expected cap error");
    } catch (const Error& e) {
      CHECK(e.kind == ErrorKind::cap_exceeded);
    }
  }
}

TEST_CASE("every generated set sums to one within 1e-12", "[scenario]") {
  auto rts = load_system(kData);
  auto a = from_availability(enumerate_n_minus_1(rts));
  a.validate();
  auto w = synthesize_correlated_wind({"a", "b"}, {{1.0, 0.5}, {0.5, 1.0}},
                                      {{2.0, 8.0}, {2.0, 8.0}}, 333, 9);
  from_wind(w).validate();
  combine(base_only_availability(rts), w, 1000).validate();
}

TEST_CASE("wind csv round trip", "[scenario]") {
  WindSet w;
  w.site_ids = {"n1", "n5"};
  w.scenarios.push_back({{5.25, 7.5}, 0.5});
  w.scenarios.push_back({{3.125, 11.0}, 0.5});
  auto tmp = std::filesystem::temp_directory_path() / "gep_wind.csv";
  write_text_file(tmp, wind_csv_text(w));
  auto r = load_wind_csv(tmp);
  REQUIRE(r.site_ids == w.site_ids);
  REQUIRE(r.scenarios.size() == 2);
  CHECK(r.scenarios[1].speed_mps[0] == 3.125);
  CHECK(r.scenarios[0].probability == Approx(0.5));
}
