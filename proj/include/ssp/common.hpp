#pragma once

// Shared plumbing: error taxonomy, deterministic RNG, dense matrix,
// small vector math, and text formatting helpers used across the library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssp {

// ---------------------------------------------------------------------------
// Errors. Every failure the library raises derives from ssp::error so callers
// can catch one type at the CLI boundary; the subtypes keep tests precise.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad triple line, bad count, bad label row, ...).
struct parse_error : error { using error::error; };

/// Unknown symbol looked up in a frozen vocabulary.
struct vocab_error : error { using error::error; };

/// Dimension / shape mismatch between containers that must agree.
struct shape_error : error { using error::error; };

/// Invalid configuration value or key.
struct config_error : error { using error::error; };

/// Statistics requested for a relation absent from the training split.
struct stats_error : error { using error::error; };

/// Negative sampling exhausted its retry budget.
struct sampling_error : error { using error::error; };

/// Non-finite parameter detected during optimization.
struct training_error : error { using error::error; };

/// A caller-side precondition was violated (e.g. non-unit normal vector).
struct contract_error : error { using error::error; };

/// Degenerate input where the math is undefined (e.g. two zero vectors).
struct degenerate_input_error : error { using error::error; };

/// Inconsistent inputs handed to an evaluation routine.
struct input_error : error { using error::error; };

/// Feature construction impossible for an entity (unknown and undescribed).
struct feature_error : error { using error::error; };

/// Artifacts produced under incompatible configurations or vocabularies.
struct compat_error : error { using error::error; };

/// File could not be opened / read / written.
struct io_error : error { using error::error; };

// ---------------------------------------------------------------------------
// Deterministic RNG. xoshiro256** seeded via splitmix64. The standard
// library's distributions are implementation-defined, so shuffling and
// uniform draws are implemented here to keep artifacts byte-stable across
// platforms for a fixed seed.
// ---------------------------------------------------------------------------

class rng {
 public:
  explicit rng(std::uint64_t seed) {
    // splitmix64 expansion of the seed; cannot produce the all-zero state.
    for (auto& word : state_) {
      seed += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = seed;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw contract_error("rng::below requires n > 0");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return x % n;
  }

  /// In-place Fisher–Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// ---------------------------------------------------------------------------
// Dense row-major matrix of doubles.
// ---------------------------------------------------------------------------

class matrix {
 public:
  matrix() = default;
  matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Small vector math on spans.
// ---------------------------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw shape_error("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double sq_norm(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

inline double norm(std::span<const double> a) { return std::sqrt(sq_norm(a)); }

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Text helpers.
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form of a double (printf %.17g).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text, const std::string& what) {
  char* end = nullptr;
  const std::string tmp(text);
  const double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0')
    throw parse_error("invalid number '" + tmp + "' in " + what);
  return v;
}

inline long long parse_int(std::string_view text, const std::string& what) {
  char* end = nullptr;
  const std::string tmp(text);
  const long long v = std::strtoll(tmp.c_str(), &end, 10);
  if (end == tmp.c_str() || *end != '\0')
    throw parse_error("invalid integer '" + tmp + "' in " + what);
  return v;
}

/// Split on a single delimiter, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file for reading: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open file for writing: " + path);
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// FNV-1a 64-bit digest, rendered as fixed-width hex.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string digest_file(const std::string& path) {
  return hex64(fnv1a64(read_file(path)));
}

}  // namespace ssp
