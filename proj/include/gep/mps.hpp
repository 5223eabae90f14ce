#pragma once

#include "gep/lp.hpp"

namespace gep::lp {

// Fixed-format MPS writer for external cross-checking. Names are replaced by
// 8-character synthetic ids (C1.., R1..); a NAME-comment block maps them back.
inline std::string to_mps(const LinearProgram& p, const std::string& name = "GEPLP") {
  std::ostringstream out;
  auto rname = [](int i) { return strf("R%d", i + 1); };
  auto cname = [](int j) { return strf("C%d", j + 1); };
  auto num = [](double v) { return strf("%-12.9g", v); };

  out << "* rows: " << p.num_rows() << " cols: " << p.num_cols() << "\n";
  out << "NAME          " << name << "\n";
  if (p.sense == Sense::maximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  COST\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    char t = p.row_rel[i] == Relation::le ? 'L' : p.row_rel[i] == Relation::ge ? 'G' : 'E';
    out << " " << t << "  " << rname(i) << "\n";
  }
  out << "COLUMNS\n";
  // column-major walk
  std::vector<std::vector<std::pair<int, double>>> cols(p.num_cols());
  for (int i = 0; i < p.num_rows(); ++i)
    for (const auto& e : p.rows[i]) cols[e.col].push_back({i, e.coef});
  for (int j = 0; j < p.num_cols(); ++j) {
    if (p.cost[j] != 0.0)
      out << strf("    %-10s", cname(j).c_str()) << strf("%-10s", "COST") << num(p.cost[j])
          << "\n";
    for (auto& [i, v] : cols[j])
      out << strf("    %-10s", cname(j).c_str()) << strf("%-10s", rname(i).c_str()) << num(v)
          << "\n";
  }
  out << "RHS\n";
  for (int i = 0; i < p.num_rows(); ++i)
    if (p.rhs[i] != 0.0)
      out << strf("    %-10s", "RHS") << strf("%-10s", rname(i).c_str()) << num(p.rhs[i]) << "\n";
  out << "BOUNDS\n";
  for (int j = 0; j < p.num_cols(); ++j) {
    double lo = p.lower[j], hi = p.upper[j];
    if (lo == 0.0 && hi == kInf) continue;  // default bound
    const std::string c = cname(j);
    if (lo == hi) {
      out << strf(" FX %-10s%-10s", "BND", c.c_str()) << num(lo) << "\n";
    } else {
      if (!std::isfinite(lo) && !std::isfinite(hi)) {
        out << strf(" FR %-10s%-10s", "BND", c.c_str()) << "\n";
        continue;
      }
      if (std::isfinite(lo) && lo != 0.0)
        out << strf(" LO %-10s%-10s", "BND", c.c_str()) << num(lo) << "\n";
      else if (!std::isfinite(lo))
        out << strf(" MI %-10s%-10s", "BND", c.c_str()) << "\n";
      if (std::isfinite(hi))
        out << strf(" UP %-10s%-10s", "BND", c.c_str()) << num(hi) << "\n";
    }
  }
  out << "ENDATA\n";
  out << "* name map\n";
  for (int i = 0; i < p.num_rows(); ++i)
    out << "* " << rname(i) << " = " << p.row_names[i] << "\n";
  for (int j = 0; j < p.num_cols(); ++j)
    out << "* " << cname(j) << " = " << p.col_names[j] << "\n";
  return out.str();
}

inline void write_mps(const LinearProgram& p, const std::filesystem::path& path,
                      const std::string& name = "GEPLP") {
  write_text_file(path, to_mps(p, name));
}

}  // namespace gep::lp
