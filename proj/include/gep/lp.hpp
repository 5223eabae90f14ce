#pragma once

#include <cassert>
#include <cstring>
#include <span>

#include "gep/common.hpp"

namespace gep::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { le, eq, ge };
enum class SolveStatus { optimal, infeasible, unbounded };

// ---------------------------------------------------------------------------
// Problem container. Columns carry bounds (+-inf allowed) and an objective
// coefficient; rows are sparse with a relation and right-hand side.
// ---------------------------------------------------------------------------

struct LinearProgram {
  struct Entry {
    int col;
    double coef;
  };

  Sense sense = Sense::minimize;
  std::vector<double> cost, lower, upper;
  std::vector<std::string> col_names;
  std::vector<Relation> row_rel;
  std::vector<double> rhs;
  std::vector<std::string> row_names;
  std::vector<std::vector<Entry>> rows;

  int num_cols() const { return int(cost.size()); }
  int num_rows() const { return int(rhs.size()); }

  int add_column(std::string name, double lb, double ub, double obj = 0.0) {
    require(!(lb > ub), ErrorKind::validation, "column '" + name + "': lower > upper");
    require(std::isfinite(obj), ErrorKind::validation, "column '" + name + "': non-finite cost");
    cost.push_back(obj);
    lower.push_back(lb);
    upper.push_back(ub);
    col_names.push_back(std::move(name));
    return num_cols() - 1;
  }

  int add_row(Relation rel, double b, std::string name) {
    require(std::isfinite(b), ErrorKind::validation, "row '" + name + "': non-finite rhs");
    row_rel.push_back(rel);
    rhs.push_back(b);
    row_names.push_back(std::move(name));
    rows.emplace_back();
    return num_rows() - 1;
  }

  void add_entry(int row, int col, double coef) {
    assert(row >= 0 && row < num_rows() && col >= 0 && col < num_cols());
    require(std::isfinite(coef), ErrorKind::validation,
            "row '" + row_names[row] + "': non-finite coefficient");
    if (coef == 0.0) return;
    for (auto& e : rows[row])
      if (e.col == col) {
        e.coef += coef;
        return;
      }
    rows[row].push_back({col, coef});
  }

  void set_objective(int col, double obj) {
    require(std::isfinite(obj), ErrorKind::validation, "non-finite objective coefficient");
    cost[col] = obj;
  }

  void validate() const {
    for (int j = 0; j < num_cols(); ++j)
      require(!(lower[j] > upper[j]) && std::isfinite(cost[j]), ErrorKind::validation,
              "invalid column " + col_names[j]);
  }
};

struct LpSolution {
  SolveStatus status = SolveStatus::optimal;
  double objective = 0.0;
  double dual_objective = 0.0;
  std::vector<double> x;             // per column
  std::vector<double> reduced_cost;  // per column, d_j = c_j - y.a_j in problem sense
  std::vector<double> row_dual;      // per row, d(objective)/d(rhs)
  std::vector<double> row_activity;  // per row
  long iterations = 0;
  long phase1_iterations = 0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

struct SolveOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;     // reduced-cost threshold for entering columns
  double pivot_tol = 1e-9;   // minimum acceptable pivot magnitude
  int refactor_every = 100;  // pivots between dense refactorizations
  double cond_limit = 1e13;  // basis condition estimate triggering breakdown
  int stall_window = 300;    // degenerate pivots before Bland's rule kicks in
  long max_iterations = 0;   // 0 = automatic
};

// Running record of strong-duality gaps over every optimal solve in the
// process; the acceptance suite reads it after exercising the stack.
struct duality_audit {
  static std::atomic<long>& solves() {
    static std::atomic<long> v{0};
    return v;
  }
  static std::atomic<double>& worst() {
    static std::atomic<double> v{0.0};
    return v;
  }
  static void record(double rel_gap) {
    solves().fetch_add(1, std::memory_order_relaxed);
    double cur = worst().load(std::memory_order_relaxed);
    while (rel_gap > cur && !worst().compare_exchange_weak(cur, rel_gap)) {
    }
  }
  static void reset() {
    solves().store(0);
    worst().store(0.0);
  }
};

// ---------------------------------------------------------------------------
// Bounded-variable revised simplex with a dense basis inverse, explicit
// artificial phase 1, Dantzig pricing and a Bland fallback after stalls.
// ---------------------------------------------------------------------------

namespace detail {

enum class VStat : uint8_t { basic, at_lower, at_upper, free_zero };

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& p, const SolveOptions& o) : p_(p), o_(o) {
    m_ = p.num_rows();
    n_ = p.num_cols();
    build_columns();
  }

  LpSolution run() {
    init_bounds();
    init_basis();

    LpSolution sol;
    if (n_art_ > 0) {
      Phase r = loop(/*phase1=*/true);
      sol.phase1_iterations = iters_;
      if (r == Phase::iter_limit) raise(ErrorKind::numerical, "simplex iteration limit (phase 1)");
      if (r == Phase::unbounded) raise(ErrorKind::internal, "phase-1 objective unbounded");
      if (infeasibility() > std::max(o_.feas_tol, 1e-9 * bnorm_)) {
        sol.status = SolveStatus::infeasible;
        finalize(sol, /*with_duals=*/false);
        return sol;
      }
      // lock artificials at zero for phase 2
      for (int k = 0; k < n_art_; ++k) {
        int j = n_ + m_ + k;
        lb_[j] = ub_[j] = 0.0;
        if (stat_[j] != VStat::basic) {
          stat_[j] = VStat::at_lower;
          x_[j] = 0.0;
        }
      }
    }

    Phase r = loop(/*phase1=*/false);
    if (r == Phase::iter_limit) raise(ErrorKind::numerical, "simplex iteration limit (phase 2)");
    if (r == Phase::unbounded) {
      sol.status = SolveStatus::unbounded;
      finalize(sol, /*with_duals=*/false);
      return sol;
    }
    sol.status = SolveStatus::optimal;
    finalize(sol, /*with_duals=*/true);
    return sol;
  }

 private:
  enum class Phase { optimal, unbounded, iter_limit };

  const LinearProgram& p_;
  SolveOptions o_;
  int m_ = 0, n_ = 0, n_art_ = 0;
  int total_ = 0;

  // structural columns, CSC
  std::vector<int> cptr_, crow_;
  std::vector<double> cval_;
  std::vector<int> art_row_;  // artificial k -> row

  std::vector<double> lb_, ub_, cost_;  // augmented columns (sense-adjusted cost)
  std::vector<double> x_;
  std::vector<VStat> stat_;
  std::vector<int> basic_;     // basis position -> column
  std::vector<int> inbasis_;   // column -> basis position or -1
  std::vector<double> binv_;   // m x m row-major
  std::vector<double> y_, w_;  // work vectors
  std::vector<double> b_;
  double bnorm_ = 1.0;
  long iters_ = 0;
  long iter_cap_ = 0;
  int degen_run_ = 0;
  bool bland_ = false;

  static constexpr double kDegenStep = 1e-11;

  template <class Fn>
  void visit_col(int j, Fn&& f) const {
    if (j < n_) {
      for (int k = cptr_[j]; k < cptr_[j + 1]; ++k) f(crow_[k], cval_[k]);
    } else if (j < n_ + m_) {
      f(j - n_, 1.0);
    } else {
      f(art_row_[j - n_ - m_], 1.0);
    }
  }

  void build_columns() {
    std::vector<int> count(n_, 0);
    for (const auto& row : p_.rows)
      for (const auto& e : row) ++count[e.col];
    cptr_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) cptr_[j + 1] = cptr_[j] + count[j];
    crow_.resize(cptr_[n_]);
    cval_.resize(cptr_[n_]);
    std::vector<int> fill(cptr_.begin(), cptr_.end() - 1);
    for (int i = 0; i < m_; ++i)
      for (const auto& e : p_.rows[i]) {
        crow_[fill[e.col]] = i;
        cval_[fill[e.col]] = e.coef;
        ++fill[e.col];
      }
  }

  void init_bounds() {
    total_ = n_ + m_;
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
    const double sgn = p_.sense == Sense::minimize ? 1.0 : -1.0;
    for (int j = 0; j < n_; ++j) {
      lb_[j] = p_.lower[j];
      ub_[j] = p_.upper[j];
      cost_[j] = sgn * p_.cost[j];
    }
    for (int i = 0; i < m_; ++i) {
      int j = n_ + i;
      switch (p_.row_rel[i]) {
        case Relation::le:
          lb_[j] = 0.0;
          ub_[j] = kInf;
          break;
        case Relation::eq:
          lb_[j] = ub_[j] = 0.0;
          break;
        case Relation::ge:
          lb_[j] = -kInf;
          ub_[j] = 0.0;
          break;
      }
    }
    b_.assign(p_.rhs.begin(), p_.rhs.end());
    bnorm_ = 1.0;
    for (double v : b_) bnorm_ = std::max(bnorm_, std::fabs(v));
  }

  static double start_value(double lo, double hi) {
    if (std::isfinite(lo) && std::isfinite(hi)) return std::fabs(lo) <= std::fabs(hi) ? lo : hi;
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }

  void init_basis() {
    x_.assign(total_, 0.0);
    stat_.assign(total_, VStat::at_lower);
    for (int j = 0; j < n_; ++j) {
      x_[j] = start_value(lb_[j], ub_[j]);
      if (!std::isfinite(lb_[j]) && !std::isfinite(ub_[j]))
        stat_[j] = VStat::free_zero;
      else
        stat_[j] = (x_[j] == lb_[j]) ? VStat::at_lower : VStat::at_upper;
    }
    // residual slack values with all structurals at their start point
    std::vector<double> act(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (const auto& e : p_.rows[i])
        if (x_[e.col] != 0.0) act[i] += e.coef * x_[e.col];

    basic_.resize(m_);
    inbasis_.assign(total_, -1);
    art_row_.clear();
    std::vector<double> art_val;
    for (int i = 0; i < m_; ++i) {
      int sj = n_ + i;
      double s = b_[i] - act[i];
      if (s >= lb_[sj] - o_.feas_tol && s <= ub_[sj] + o_.feas_tol) {
        x_[sj] = s;
        stat_[sj] = VStat::basic;
        basic_[i] = sj;
      } else {
        // clamp slack to its nearest bound, absorb the residual in an artificial
        double clamped = s < lb_[sj] ? lb_[sj] : ub_[sj];
        x_[sj] = clamped;
        stat_[sj] = (clamped == lb_[sj]) ? VStat::at_lower : VStat::at_upper;
        art_row_.push_back(i);
        art_val.push_back(s - clamped);
        basic_[i] = -1;  // patched below
      }
    }
    n_art_ = int(art_row_.size());
    total_ += n_art_;
    lb_.resize(total_);
    ub_.resize(total_);
    cost_.resize(total_, 0.0);
    x_.resize(total_, 0.0);
    stat_.resize(total_, VStat::at_lower);
    inbasis_.resize(total_, -1);
    for (int k = 0; k < n_art_; ++k) {
      int j = n_ + m_ + k;
      double v = art_val[k];
      lb_[j] = v > 0 ? 0.0 : -kInf;
      ub_[j] = v > 0 ? kInf : 0.0;
      x_[j] = v;
      stat_[j] = VStat::basic;
      basic_[art_row_[k]] = j;
    }
    for (int i = 0; i < m_; ++i) inbasis_[basic_[i]] = i;
    binv_.assign(size_t(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[size_t(i) * m_ + i] = 1.0;

    iters_ = 0;
    degen_run_ = 0;
    bland_ = false;
    iter_cap_ = o_.max_iterations > 0 ? o_.max_iterations : 2000 + 200L * (m_ + n_);
    y_.assign(m_, 0.0);
    w_.assign(m_, 0.0);
  }

  double infeasibility() const {
    double s = 0.0;
    for (int k = 0; k < n_art_; ++k) s += std::fabs(x_[n_ + m_ + k]);
    return s;
  }

  // phase-1 cost: +-1 on artificials pushing them to zero
  double phase_cost(int j, bool phase1) const {
    if (phase1) {
      if (j < n_ + m_) return 0.0;
      return ub_[j] == 0.0 ? -1.0 : 1.0;  // negative artificials are maximized
    }
    return j < int(cost_.size()) ? cost_[j] : 0.0;
  }

  void refactor() {
    // dense B from basis columns, invert by Gauss-Jordan with partial pivoting
    std::vector<double> B(size_t(m_) * m_, 0.0);
    for (int pos = 0; pos < m_; ++pos)
      visit_col(basic_[pos], [&](int r, double v) { B[size_t(r) * m_ + pos] = v; });

    double bmax = 0.0;
    for (double v : B) bmax = std::max(bmax, std::fabs(v));
    if (bmax == 0.0) bmax = 1.0;

    std::vector<double>& inv = binv_;
    std::fill(inv.begin(), inv.end(), 0.0);
    for (int i = 0; i < m_; ++i) inv[size_t(i) * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 0.0;
      for (int r = c; r < m_; ++r) {
        double v = std::fabs(B[size_t(r) * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0 || best < 1e-12 * bmax)
        raise(ErrorKind::numerical, "singular basis during refactorization");
      if (piv != c) {
        for (int k = 0; k < m_; ++k) std::swap(B[size_t(piv) * m_ + k], B[size_t(c) * m_ + k]);
        for (int k = 0; k < m_; ++k) std::swap(inv[size_t(piv) * m_ + k], inv[size_t(c) * m_ + k]);
      }
      const double d = 1.0 / B[size_t(c) * m_ + c];
      for (int k = 0; k < m_; ++k) {
        B[size_t(c) * m_ + k] *= d;
        inv[size_t(c) * m_ + k] *= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = B[size_t(r) * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          B[size_t(r) * m_ + k] -= f * B[size_t(c) * m_ + k];
          inv[size_t(r) * m_ + k] -= f * inv[size_t(c) * m_ + k];
        }
      }
    }
    double inv_norm = 0.0;
    for (double v : inv) inv_norm = std::max(inv_norm, std::fabs(v));
    if (bmax * inv_norm * m_ > o_.cond_limit)
      raise(ErrorKind::numerical,
            strf("basis condition estimate %.3e exceeds limit", bmax * inv_norm * m_));
    recompute_basics();
  }

  void recompute_basics() {
    std::vector<double> v(b_);
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == VStat::basic || x_[j] == 0.0) continue;
      visit_col(j, [&](int r, double a) { v[r] -= a * x_[j]; });
    }
    for (int pos = 0; pos < m_; ++pos) {
      const double* row = &binv_[size_t(pos) * m_];
      double acc = 0.0;
      for (int i = 0; i < m_; ++i) acc += row[i] * v[i];
      x_[basic_[pos]] = acc;
    }
  }

  void compute_duals(bool phase1) {
    // y = c_B' * Binv
    std::fill(y_.begin(), y_.end(), 0.0);
    for (int pos = 0; pos < m_; ++pos) {
      double cb = phase_cost(basic_[pos], phase1);
      if (cb == 0.0) continue;
      const double* row = &binv_[size_t(pos) * m_];
      for (int i = 0; i < m_; ++i) y_[i] += cb * row[i];
    }
  }

  double reduced_cost(int j, bool phase1) const {
    double d = phase_cost(j, phase1);
    visit_col(j, [&](int r, double v) { d -= y_[r] * v; });
    return d;
  }

  // entering column choice; returns -1 when dual-feasible
  int price(bool phase1) {
    int best = -1;
    double best_v = o_.opt_tol;
    for (int j = 0; j < total_; ++j) {
      if (stat_[j] == VStat::basic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed (incl. retired artificials)
      double d = reduced_cost(j, phase1);
      double v = 0.0;
      if (stat_[j] == VStat::at_lower || stat_[j] == VStat::free_zero) v = std::max(v, -d);
      if (stat_[j] == VStat::at_upper || stat_[j] == VStat::free_zero) v = std::max(v, d);
      if (v > best_v) {
        if (bland_) return j;  // first eligible index
        best_v = v;
        best = j;
      }
    }
    return best;
  }

  Phase loop(bool phase1) {
    refactor();
    int since_refactor = 0;
    while (true) {
      if (++iters_ > iter_cap_) return Phase::iter_limit;
      if (since_refactor >= o_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
      compute_duals(phase1);
      int e = price(phase1);
      if (e < 0) return Phase::optimal;

      double d = reduced_cost(e, phase1);
      double t;  // direction of movement of entering variable
      if (stat_[e] == VStat::at_lower)
        t = 1.0;
      else if (stat_[e] == VStat::at_upper)
        t = -1.0;
      else
        t = d < 0 ? 1.0 : -1.0;  // free at zero

      // w = Binv * a_e
      std::fill(w_.begin(), w_.end(), 0.0);
      visit_col(e, [&](int r, double v) {
        for (int k = 0; k < m_; ++k) w_[k] += v * binv_[size_t(k) * m_ + r];
      });

      // ratio test over basics; the entering variable's own range competes at the end
      const double own = ub_[e] - lb_[e];  // may be inf
      double basic_step = kInf;
      int leave_pos = -1;
      double best_piv = 0.0;
      for (int pos = 0; pos < m_; ++pos) {
        double delta = -t * w_[pos];  // change of basic per unit step
        if (std::fabs(delta) <= o_.pivot_tol) continue;
        int bj = basic_[pos];
        double room;
        if (delta > 0)
          room = std::isfinite(ub_[bj]) ? ub_[bj] - x_[bj] : kInf;
        else
          room = std::isfinite(lb_[bj]) ? x_[bj] - lb_[bj] : kInf;
        if (!std::isfinite(room)) continue;
        double step = std::max(room, 0.0) / std::fabs(delta);
        const double tie = 1e-9 * (1.0 + std::min(step, basic_step));
        bool better;
        if (step < basic_step - tie)
          better = true;
        else if (step <= basic_step + tie && leave_pos >= 0)
          better = !bland_ && std::fabs(w_[pos]) > best_piv;  // stability on ties
        else
          better = leave_pos < 0 && step <= basic_step;
        if (better) {
          basic_step = std::min(step, basic_step);
          leave_pos = pos;
          best_piv = std::fabs(w_[pos]);
        }
      }

      if (leave_pos < 0 && !std::isfinite(own)) {
        if (phase1) raise(ErrorKind::internal, "unbounded ray in phase 1");
        return Phase::unbounded;
      }

      const bool flip = std::isfinite(own) && own <= basic_step;
      double step = flip ? own : basic_step;
      if (step < 0) step = 0;
      degen_run_ = (step <= kDegenStep) ? degen_run_ + 1 : 0;
      if (degen_run_ > o_.stall_window) bland_ = true;

      // move
      if (step != 0.0) {
        for (int pos = 0; pos < m_; ++pos)
          if (w_[pos] != 0.0) x_[basic_[pos]] -= t * step * w_[pos];
        x_[e] += t * step;
      }

      if (flip) {
        // bound flip: entering variable traverses its whole range
        stat_[e] = t > 0 ? VStat::at_upper : VStat::at_lower;
        x_[e] = t > 0 ? ub_[e] : lb_[e];
        continue;
      }

      int lj = basic_[leave_pos];
      double delta = -t * w_[leave_pos];
      stat_[lj] = delta > 0 ? VStat::at_upper : VStat::at_lower;
      x_[lj] = delta > 0 ? ub_[lj] : lb_[lj];
      inbasis_[lj] = -1;
      if (lj >= n_ + m_) {  // artificial leaves: retire it for good
        lb_[lj] = ub_[lj] = 0.0;
        x_[lj] = 0.0;
        stat_[lj] = VStat::at_lower;
      }
      basic_[leave_pos] = e;
      inbasis_[e] = leave_pos;
      stat_[e] = VStat::basic;

      // eta update of Binv
      const double piv = w_[leave_pos];
      double* prow = &binv_[size_t(leave_pos) * m_];
      const double ip = 1.0 / piv;
      for (int k = 0; k < m_; ++k) prow[k] *= ip;
      for (int pos = 0; pos < m_; ++pos) {
        if (pos == leave_pos) continue;
        double f = w_[pos];
        if (f == 0.0) continue;
        double* row = &binv_[size_t(pos) * m_];
        for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
      ++since_refactor;
    }
  }

  void finalize(LpSolution& sol, bool with_duals) {
    const double sgn = p_.sense == Sense::minimize ? 1.0 : -1.0;
    sol.iterations = iters_;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.row_activity.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (const auto& en : p_.rows[i]) sol.row_activity[i] += en.coef * x_[en.col];
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j)
      if (sol.x[j] != 0.0) sol.objective += p_.cost[j] * sol.x[j];
    if (!with_duals) return;

    compute_duals(/*phase1=*/false);
    sol.row_dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) sol.row_dual[i] = sgn * y_[i];
    sol.reduced_cost.assign(n_, 0.0);
    double dual_obj = 0.0;
    for (int i = 0; i < m_; ++i) dual_obj += y_[i] * b_[i];
    for (int j = 0; j < n_; ++j) {
      double d = reduced_cost(j, false);
      sol.reduced_cost[j] = sgn * d;
      // bound contribution to the internal (minimization) dual objective
      if (stat_[j] == VStat::basic) continue;
      if (d > 0 && std::isfinite(lb_[j]))
        dual_obj += d * lb_[j];
      else if (d < 0 && std::isfinite(ub_[j]))
        dual_obj += d * ub_[j];
    }
    sol.dual_objective = sgn * dual_obj;
    double rel = std::fabs(sol.objective - sol.dual_objective) / (1.0 + std::fabs(sol.objective));
    duality_audit::record(rel);
  }
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& p, const SolveOptions& o = {}) {
  p.validate();
  detail::BoundedSimplex s(p, o);
  return s.run();
}

// ---------------------------------------------------------------------------
// KKT residual report for a claimed-optimal solution.
// ---------------------------------------------------------------------------

struct KktReport {
  double max_primal_residual = 0.0;  // row + bound violations
  double max_dual_residual = 0.0;    // reduced-cost sign violations
  double max_complementarity = 0.0;  // d_j * slack-to-bound products (scaled)
  double duality_gap = 0.0;          // |primal - dual| / (1 + |primal|)

  bool within(double feas_tol, double duality_tol, double comp_tol) const {
    return max_primal_residual <= feas_tol && duality_gap <= duality_tol &&
           max_complementarity <= comp_tol && max_dual_residual <= duality_tol;
  }
};

inline KktReport check_kkt(const LinearProgram& p, const LpSolution& s) {
  require(s.optimal(), ErrorKind::validation, "check_kkt requires an optimal solution");
  KktReport r;
  const double sgn = p.sense == Sense::minimize ? 1.0 : -1.0;
  const int m = p.num_rows(), n = p.num_cols();
  double scale = 1.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::fabs(p.rhs[i]));

  std::vector<double> act(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (const auto& e : p.rows[i]) act[i] += e.coef * s.x[e.col];

  for (int i = 0; i < m; ++i) {
    double v = 0.0;
    switch (p.row_rel[i]) {
      case Relation::le: v = std::max(0.0, act[i] - p.rhs[i]); break;
      case Relation::ge: v = std::max(0.0, p.rhs[i] - act[i]); break;
      case Relation::eq: v = std::fabs(act[i] - p.rhs[i]); break;
    }
    r.max_primal_residual = std::max(r.max_primal_residual, v / std::max(1.0, std::fabs(p.rhs[i])));
    // inequality row complementarity: dual * slack
    if (p.row_rel[i] != Relation::eq) {
      double slack = p.row_rel[i] == Relation::le ? p.rhs[i] - act[i] : act[i] - p.rhs[i];
      r.max_complementarity =
          std::max(r.max_complementarity, std::fabs(s.row_dual[i] * slack) / scale);
    }
  }
  for (int j = 0; j < n; ++j) {
    double lo = p.lower[j], hi = p.upper[j], x = s.x[j];
    if (std::isfinite(lo))
      r.max_primal_residual =
          std::max(r.max_primal_residual, (lo - x) / std::max(1.0, std::fabs(lo)));
    if (std::isfinite(hi))
      r.max_primal_residual =
          std::max(r.max_primal_residual, (x - hi) / std::max(1.0, std::fabs(hi)));
    // stationarity / sign: internal minimization reduced cost
    double d = sgn * s.reduced_cost[j];
    const double tol_act = 1e-9 * std::max(1.0, std::fabs(x));
    bool at_lo = std::isfinite(lo) && x <= lo + tol_act;
    bool at_hi = std::isfinite(hi) && x >= hi - tol_act;
    double viol;
    if (at_lo && at_hi)
      viol = 0.0;
    else if (at_lo)
      viol = std::max(0.0, -d);
    else if (at_hi)
      viol = std::max(0.0, d);
    else
      viol = std::fabs(d);
    r.max_dual_residual = std::max(r.max_dual_residual, viol / std::max(1.0, std::fabs(p.cost[j])));
    if (std::isfinite(lo))
      r.max_complementarity =
          std::max(r.max_complementarity, std::max(d, 0.0) * (x - lo) / scale);
    if (std::isfinite(hi))
      r.max_complementarity =
          std::max(r.max_complementarity, std::max(-d, 0.0) * (hi - x) / scale);
  }
  r.duality_gap =
      std::fabs(s.objective - s.dual_objective) / (1.0 + std::fabs(s.objective));
  return r;
}

}  // namespace gep::lp
