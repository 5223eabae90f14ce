#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace gep {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  usage,         // bad flag / argument
  missing_file,  // input file not found
  parse,         // malformed input, reported with file:line
  validation,    // model or argument fails an invariant
  cap_exceeded,  // scenario product / enumeration cap hit
  numerical,     // solver breakdown, tolerance violation
  io,            // filesystem write failure
  internal       // should-not-happen assertion
};

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void raise(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline void require(bool cond, ErrorKind k, const std::string& msg) {
  if (!cond) raise(k, msg);
}

// ---------------------------------------------------------------------------
// Small string / number helpers
// ---------------------------------------------------------------------------

inline std::string strf(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

// shortest round-trip decimal form; canonical across runs
inline std::string fmt_double(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, p - start)));
    start = p + 1;
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  require(!t.empty(), ErrorKind::parse, where + ": empty number");
  double v{};
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  require(r.ec == std::errc() && r.ptr == t.data() + t.size(), ErrorKind::parse,
          where + ": bad number '" + t + "'");
  return v;
}

inline long parse_int(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  require(!t.empty(), ErrorKind::parse, where + ": empty integer");
  long v{};
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  require(r.ec == std::errc() && r.ptr == t.data() + t.size(), ErrorKind::parse,
          where + ": bad integer '" + t + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t == "1" || t == "true" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "no" || t.empty()) return false;
  raise(ErrorKind::parse, where + ": bad flag '" + t + "'");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_no;  // per row, for error messages

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return int(i);
    raise(ErrorKind::parse, path + ": missing column '" + name + "'");
  }
  std::string where(size_t row) const { return path + ":" + std::to_string(line_no[row]); }
  const std::string& cell(size_t row, int c) const {
    static const std::string empty;
    return c < int(rows[row].size()) ? rows[row][c] : empty;
  }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::missing_file, "cannot open " + path.string());
  CsvTable t;
  t.path = path.string();
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto cells = split(s, ',');
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      t.rows.push_back(std::move(cells));
      t.line_no.push_back(ln);
    }
  }
  require(!t.header.empty(), ErrorKind::parse, path.string() + ": no header row");
  return t;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::missing_file, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << text;
  require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Hashing (manifest digests)
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(uint64_t v) { return strf("%016llx", (unsigned long long)v); }

// ---------------------------------------------------------------------------
// Deterministic RNG (xoshiro256**, splitmix64 seeding). std:: distributions
// are implementation-defined, so draws are made by hand here.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix(x);
    spare_valid_ = false;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, n)
  uint64_t below(uint64_t n) {
    uint64_t x = next_u64();
    __uint128_t m = __uint128_t(x) * n;
    uint64_t l = uint64_t(m);
    if (l < n) {
      uint64_t t = (0 - n) % n;
      while (l < t) {
        x = next_u64();
        m = __uint128_t(x) * n;
        l = uint64_t(m);
      }
    }
    return uint64_t(m >> 64);
  }

  // standard normal via Marsaglia polar method
  double normal() {
    if (spare_valid_) {
      spare_valid_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    spare_valid_ = true;
    return u * f;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  // independent substream (e.g. one per wind site)
  Rng fork(uint64_t stream) const {
    uint64_t x = s_[0] ^ (0x9e3779b97f4a7c15ull + stream);
    return Rng(splitmix(x));
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static uint64_t splitmix(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint64_t s_[4];
  double spare_ = 0;
  bool spare_valid_ = false;
};

// ---------------------------------------------------------------------------
// parallel_for: static work stealing over an index range; results must be
// written to disjoint slots so any schedule yields identical output.
// ---------------------------------------------------------------------------

inline int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? int(n) : 1;
}

template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads <= 0) threads = hardware_threads();
  if (threads == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  ErrorKind first_kind = ErrorKind::internal;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!failed.exchange(true)) {
          first_error = e.what();
          first_kind = e.kind;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  int k = std::min<size_t>(threads, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) raise(first_kind, first_error);
}

}  // namespace gep
