#include <catch2/catch.hpp>

#include "gep/lp.hpp"
#include "gep/mps.hpp"

using namespace gep;
using namespace gep::lp;

namespace {

// Brute-force oracle for two-variable LPs: enumerate intersections of all
// active-constraint pairs (rows and bounds), keep feasible points, take the
// best. Independent of the simplex path.
double two_var_vertex_opt(const LinearProgram& p) {
  REQUIRE(p.num_cols() == 2);
  struct Line {
    double a0, a1, rhs;
  };
  std::vector<Line> lines;
  for (int i = 0; i < p.num_rows(); ++i) {
    Line l{0, 0, p.rhs[i]};
    for (auto& e : p.rows[i]) (e.col == 0 ? l.a0 : l.a1) = e.coef;
    lines.push_back(l);
  }
  for (int j = 0; j < 2; ++j) {
    if (std::isfinite(p.lower[j])) lines.push_back({j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, p.lower[j]});
    if (std::isfinite(p.upper[j])) lines.push_back({j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, p.upper[j]});
  }
  auto feasible = [&](double x0, double x1) {
    const double tol = 1e-9;
    if (x0 < p.lower[0] - tol || x0 > p.upper[0] + tol) return false;
    if (x1 < p.lower[1] - tol || x1 > p.upper[1] + tol) return false;
    for (int i = 0; i < p.num_rows(); ++i) {
      double a = 0;
      for (auto& e : p.rows[i]) a += e.coef * (e.col == 0 ? x0 : x1);
      if (p.row_rel[i] == Relation::le && a > p.rhs[i] + tol) return false;
      if (p.row_rel[i] == Relation::ge && a < p.rhs[i] - tol) return false;
      if (p.row_rel[i] == Relation::eq && std::fabs(a - p.rhs[i]) > tol) return false;
    }
    return true;
  };
  double best = p.sense == Sense::minimize ? kInf : -kInf;
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      double det = lines[i].a0 * lines[j].a1 - lines[i].a1 * lines[j].a0;
      if (std::fabs(det) < 1e-12) continue;
      double x0 = (lines[i].rhs * lines[j].a1 - lines[i].a1 * lines[j].rhs) / det;
      double x1 = (lines[i].a0 * lines[j].rhs - lines[i].rhs * lines[j].a0) / det;
      if (!feasible(x0, x1)) continue;
      double v = p.cost[0] * x0 + p.cost[1] * x1;
      best = p.sense == Sense::minimize ? std::min(best, v) : std::max(best, v);
    }
  return best;
}

LinearProgram random_feasible_lp(Rng& rng, int m, int n, bool allow_free) {
  LinearProgram p;
  for (int j = 0; j < n; ++j) {
    double lo = -5.0 + 10.0 * rng.uniform();
    double hi = lo + 10.0 * rng.uniform();
    if (allow_free && rng.uniform() < 0.15) {
      lo = -kInf;
      hi = kInf;
    }
    p.add_column("x" + std::to_string(j), lo, hi, -2.0 + 4.0 * rng.uniform());
  }
  // interior point defining attainable right-hand sides
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    double lo = std::isfinite(p.lower[j]) ? p.lower[j] : -3.0;
    double hi = std::isfinite(p.upper[j]) ? p.upper[j] : 3.0;
    x0[j] = lo + (hi - lo) * rng.uniform();
  }
  for (int i = 0; i < m; ++i) {
    double act = 0.0;
    std::vector<std::pair<int, double>> ent;
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < 0.4) {
        double a = -3.0 + 6.0 * rng.uniform();
        if (a != 0.0) {
          ent.push_back({j, a});
          act += a * x0[j];
        }
      }
    if (ent.empty()) continue;
    double u = rng.uniform();
    Relation rel = u < 0.4 ? Relation::le : u < 0.8 ? Relation::ge : Relation::eq;
    double slackmag = rel == Relation::eq ? 0.0 : rng.uniform();
    double rhs = rel == Relation::le ? act + slackmag : rel == Relation::ge ? act - slackmag : act;
    int r = p.add_row(rel, rhs, "r" + std::to_string(i));
    for (auto& [c, v] : ent) p.add_entry(r, c, v);
  }
  return p;
}

}  // namespace

TEST_CASE("single bound-constrained variable", "[lp]") {
  LinearProgram p;
  p.add_column("x", -kInf, kInf, 1.0);
  int r = p.add_row(Relation::ge, 3.0, "floor");
  p.add_entry(r, 0, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[0] == Approx(3.0));
  CHECK(s.objective == Approx(3.0));
  // the >= row is active: its dual carries the whole objective
  CHECK(s.row_dual[0] == Approx(1.0));
  CHECK(s.dual_objective == Approx(3.0));
}

TEST_CASE("infeasible bound pair", "[lp]") {
  LinearProgram p;
  p.add_column("x", -kInf, kInf, 1.0);
  int r1 = p.add_row(Relation::ge, 1.0, "ge1");
  int r2 = p.add_row(Relation::le, 0.0, "le0");
  p.add_entry(r1, 0, 1.0);
  p.add_entry(r2, 0, 1.0);
  auto s = solve_lp(p);
  CHECK(s.status == SolveStatus::infeasible);
}

TEST_CASE("two-variable simplex against vertex enumeration", "[lp]") {
  LinearProgram p;
  p.sense = Sense::minimize;
  p.add_column("x", 0.0, 1.0, -1.0);
  p.add_column("y", 0.0, 1.0, -1.0);
  int r = p.add_row(Relation::le, 1.0, "cap");
  p.add_entry(r, 0, 1.0);
  p.add_entry(r, 1, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == Approx(-1.0));
  CHECK(s.objective == Approx(two_var_vertex_opt(p)));
  CHECK(s.dual_objective == Approx(s.objective).margin(1e-9));
  auto k = check_kkt(p, s);
  CHECK(k.within(1e-7, 1e-6, 1e-6));
}

TEST_CASE("unbounded detection", "[lp]") {
  LinearProgram p;
  p.add_column("x", 0.0, kInf, -1.0);
  auto s = solve_lp(p);
  CHECK(s.status == SolveStatus::unbounded);
}

TEST_CASE("maximize sense mirrors minimize", "[lp]") {
  LinearProgram p;
  p.sense = Sense::maximize;
  p.add_column("x", 0.0, 4.0, 3.0);
  p.add_column("y", 0.0, 4.0, 1.0);
  int r = p.add_row(Relation::le, 5.0, "cap");
  p.add_entry(r, 0, 1.0);
  p.add_entry(r, 1, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == Approx(13.0));  // x=4, y=1
  CHECK(s.x[0] == Approx(4.0));
  CHECK(s.dual_objective == Approx(13.0));
  CHECK(s.objective == Approx(two_var_vertex_opt(p)));
}

TEST_CASE("equality rows route through phase 1", "[lp]") {
  LinearProgram p;
  p.add_column("a", 0.0, 10.0, 2.0);
  p.add_column("b", 0.0, 10.0, 5.0);
  int r = p.add_row(Relation::eq, 7.0, "balance");
  p.add_entry(r, 0, 1.0);
  p.add_entry(r, 1, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == Approx(14.0));
  CHECK(s.x[0] == Approx(7.0));
  CHECK(s.row_dual[0] == Approx(2.0));  // marginal supplier prices the row
}

TEST_CASE("random LP battery: KKT, strong duality, determinism", "[lp]") {
  Rng rng(20240817);
  int optimal_count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int m = 1 + int(rng.below(12));
    int n = 2 + int(rng.below(14));
    auto p = random_feasible_lp(rng, m, n, trial % 3 == 0);
    auto s = solve_lp(p);
    if (s.status == SolveStatus::unbounded) {
      continue;  // possible when free columns slip through rows
    }
    REQUIRE(s.status == SolveStatus::optimal);  // constructed feasible
    ++optimal_count;
    auto k = check_kkt(p, s);
    INFO("trial " << trial << " primal " << k.max_primal_residual << " dual "
                  << k.max_dual_residual << " comp " << k.max_complementarity << " gap "
                  << k.duality_gap);
    CHECK(k.max_primal_residual <= 1e-7);
    CHECK(k.max_dual_residual <= 1e-6);
    CHECK(k.duality_gap <= 1e-6);
    // strong duality, spec form
    CHECK(std::fabs(s.objective - s.dual_objective) <=
          1e-6 * (1.0 + std::fabs(s.objective)));
    // determinism: bitwise identical re-solve
    auto s2 = solve_lp(p);
    REQUIRE(s2.status == SolveStatus::optimal);
    CHECK(std::memcmp(s.x.data(), s2.x.data(), s.x.size() * sizeof(double)) == 0);
  }
  CHECK(optimal_count >= 40);
}

TEST_CASE("objective scaling scales duals and objective", "[lp]") {
  Rng rng(7);
  auto p = random_feasible_lp(rng, 6, 8, false);
  auto s1 = solve_lp(p);
  REQUIRE(s1.status == SolveStatus::optimal);
  LinearProgram q = p;
  const double c = 3.5;
  for (int j = 0; j < q.num_cols(); ++j) q.cost[j] *= c;
  auto s2 = solve_lp(q);
  REQUIRE(s2.status == SolveStatus::optimal);
  CHECK(s2.objective == Approx(c * s1.objective).epsilon(1e-9));
  for (int i = 0; i < q.num_rows(); ++i)
    CHECK(s2.row_dual[i] == Approx(c * s1.row_dual[i]).margin(1e-7));
  for (int j = 0; j < q.num_cols(); ++j)
    CHECK(s2.x[j] == Approx(s1.x[j]).margin(1e-9));  // same argmin, fixed pivot rule
}

TEST_CASE("redundant constraint leaves the optimum unchanged", "[lp]") {
  Rng rng(99);
  auto p = random_feasible_lp(rng, 5, 6, false);
  auto s1 = solve_lp(p);
  REQUIRE(s1.status == SolveStatus::optimal);
  LinearProgram q = p;
  // x_0 <= upper + 1 is dominated by the bound
  int r = q.add_row(Relation::le, q.upper[0] + 1.0, "redundant");
  q.add_entry(r, 0, 1.0);
  auto s2 = solve_lp(q);
  REQUIRE(s2.status == SolveStatus::optimal);
  CHECK(std::fabs(s2.objective - s1.objective) <= 1e-6 * (1.0 + std::fabs(s1.objective)));
}

TEST_CASE("kkt flags a perturbed solution", "[lp]") {
  LinearProgram p;
  p.add_column("x", 0.0, 2.0, 1.0);
  int r = p.add_row(Relation::ge, 1.0, "floor");
  p.add_entry(r, 0, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  auto good = check_kkt(p, s);
  CHECK(good.max_primal_residual <= 1e-9);
  s.x[0] = 0.5;  // violates the row
  auto bad = check_kkt(p, s);
  CHECK(bad.max_primal_residual > 1e-3);
}

TEST_CASE("free variables in equality systems", "[lp]") {
  // min x + 2y  s.t. x - y = 1, x + y = 5  (unique point (3,2))
  LinearProgram p;
  p.add_column("x", -kInf, kInf, 1.0);
  p.add_column("y", -kInf, kInf, 2.0);
  int r1 = p.add_row(Relation::eq, 1.0, "d");
  p.add_entry(r1, 0, 1.0);
  p.add_entry(r1, 1, -1.0);
  int r2 = p.add_row(Relation::eq, 5.0, "s");
  p.add_entry(r2, 0, 1.0);
  p.add_entry(r2, 1, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.x[0] == Approx(3.0));
  CHECK(s.x[1] == Approx(2.0));
  CHECK(s.objective == Approx(7.0));
  CHECK(s.dual_objective == Approx(7.0));
}

TEST_CASE("mps export round-trips the structure textually", "[lp]") {
  LinearProgram p;
  p.add_column("gen", 0.0, 10.0, 4.0);
  p.add_column("shed", 0.0, 5.0, 1000.0);
  int r = p.add_row(Relation::eq, 8.0, "balance");
  p.add_entry(r, 0, 1.0);
  p.add_entry(r, 1, 1.0);
  auto text = to_mps(p, "TOY");
  CHECK(text.find("NAME          TOY") != std::string::npos);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find(" E  R1") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
  CHECK(text.find("C2 = shed") != std::string::npos);
}
