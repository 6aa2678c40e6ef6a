#pragma once

// NMF topic model over entity descriptions: nonnegative semantic vectors for
// entities and topic vectors for words, trained by projected SGD on the
// squared reconstruction error of stored count cells. Also provides the
// semantic composition (simplex and unit-normal forms) and fold-in inference
// for entities that appear only with a description.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/kg_store.hpp"

namespace ssp {

/// Fold-in requested for a row with no in-vocabulary words.
struct fold_in_error : error {
  using error::error;
};

// ---------------------------------------------------------------------------
// Model.
// ---------------------------------------------------------------------------

class semantic_model {
 public:
  matrix entity_sem;   // |E| x d, elementwise >= 0
  matrix word_topics;  // |V| x d, elementwise >= 0

  semantic_model() = default;
  semantic_model(std::int32_t entities, std::int32_t words, std::int32_t dim)
      : entity_sem(static_cast<std::size_t>(entities),
                   static_cast<std::size_t>(dim)),
        word_topics(static_cast<std::size_t>(words),
                    static_cast<std::size_t>(dim)) {}

  std::int32_t dim() const {
    return static_cast<std::int32_t>(entity_sem.cols());
  }
  std::int32_t entity_count() const {
    return static_cast<std::int32_t>(entity_sem.rows());
  }
  std::int32_t word_count() const {
    return static_cast<std::int32_t>(word_topics.rows());
  }
  bool empty() const { return entity_sem.empty() && word_topics.empty(); }

  bool operator==(const semantic_model&) const = default;

  /// Header `dim entities words`, then one row per line, entity rows first,
  /// space-separated full-precision decimals.
  void save(const std::string& path) const {
    auto out = open_output(path);
    out << dim() << ' ' << entity_count() << ' ' << word_count() << '\n';
    write_rows(out, entity_sem);
    write_rows(out, word_topics);
    if (!out) throw io_error("failed writing semantic model: " + path);
  }

  static semantic_model load(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
      throw parse_error(path + ": missing header line");
    const auto fields = split(trim(line), ' ');
    if (fields.size() != 3)
      throw parse_error(path + ": header must be `dim entities words`");
    const auto d = parse_int(fields[0], path);
    const auto ne = parse_int(fields[1], path);
    const auto nw = parse_int(fields[2], path);
    if (d < 0 || ne < 0 || nw < 0)
      throw parse_error(path + ": negative header field");
    semantic_model m(static_cast<std::int32_t>(ne),
                     static_cast<std::int32_t>(nw),
                     static_cast<std::int32_t>(d));
    read_rows(in, m.entity_sem, path);
    read_rows(in, m.word_topics, path);
    return m;
  }

  static void write_rows(std::ofstream& out, const matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) out << ' ';
        out << format_double(r[j]);
      }
      out << '\n';
    }
  }

  static void read_rows(std::ifstream& in, matrix& m, const std::string& path) {
    std::string line;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!std::getline(in, line))
        throw parse_error(path + ": unexpected end of file");
      const auto fields = split(trim(line), ' ');
      if (fields.size() != m.cols())
        throw parse_error(path + ": row has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(m.cols()));
      auto r = m.row(i);
      for (std::size_t j = 0; j < fields.size(); ++j)
        r[j] = parse_double(fields[j], path);
    }
  }
};

// ---------------------------------------------------------------------------
// Reconstruction loss and its SGD step.
// ---------------------------------------------------------------------------

/// Sum over stored (nonzero) cells of (C_{e,w} − s_eᵀw)². Absent cells do
/// not contribute.
inline double topic_loss(const semantic_model& model,
                         const description_corpus& corpus) {
  if (model.entity_count() < corpus.entity_capacity() ||
      model.word_count() != corpus.words.size())
    throw shape_error("semantic model and corpus shapes disagree");
  double total = 0.0;
  for (const auto& c : corpus.cells()) {
    const double residual =
        static_cast<double>(c.count) -
        dot(model.entity_sem.row(static_cast<std::size_t>(c.entity)),
            model.word_topics.row(static_cast<std::size_t>(c.word)));
    total += residual * residual;
  }
  return total;
}

/// Reconstruction loss of a single entity's stored cells against an
/// arbitrary semantic vector (used by fold-in diagnostics).
inline double row_loss(std::span<const double> sem, const semantic_model& model,
                       std::span<const description_corpus::cell> row) {
  double total = 0.0;
  for (const auto& c : row) {
    const double residual =
        static_cast<double>(c.count) -
        dot(sem, model.word_topics.row(static_cast<std::size_t>(c.word)));
    total += residual * residual;
  }
  return total;
}

/// One projected-SGD step on one cell: both factors move along the gradient
/// of (C − s_eᵀw)² evaluated at the pre-update values, then are clamped
/// elementwise to >= 0.
inline void topic_sgd_step(semantic_model& model,
                           const description_corpus::cell& cell, double rate) {
  if (rate <= 0.0) throw config_error("topic SGD rate must be > 0");
  auto s = model.entity_sem.row(static_cast<std::size_t>(cell.entity));
  auto w = model.word_topics.row(static_cast<std::size_t>(cell.word));
  const double residual = static_cast<double>(cell.count) - dot(s, w);
  const double step = 2.0 * rate * residual;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double sj = s[j];
    const double wj = w[j];
    s[j] = std::max(0.0, sj + step * wj);
    w[j] = std::max(0.0, wj + step * sj);
  }
}

// ---------------------------------------------------------------------------
// NMF pretraining.
// ---------------------------------------------------------------------------

/// Factorizes the count matrix by projected SGD over stored cells, visited
/// in a freshly shuffled order each epoch. Entries are initialized uniform
/// in (0, 1/sqrt(d)]; entities without stored cells (undescribed, or
/// described by dropped words only) end up with the uniform simplex vector
/// (1/d, ..., 1/d). Deterministic for a fixed seed.
inline semantic_model pretrain_nmf(const description_corpus& corpus,
                                   std::int32_t dim, int epochs, double rate,
                                   std::uint64_t seed) {
  if (epochs < 1) throw config_error("NMF pretraining requires epochs >= 1");
  if (rate <= 0.0) throw config_error("NMF pretraining rate must be > 0");
  if (dim < 1) throw config_error("NMF rank must be >= 1");
  if (corpus.cells().empty())
    throw config_error("NMF pretraining requires a nonempty corpus");

  semantic_model model(corpus.entity_capacity(), corpus.words.size(), dim);
  rng gen(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  // (1 - u) maps the [0,1) draw onto (0, 1], keeping entries strictly positive.
  for (std::size_t i = 0; i < model.entity_sem.rows(); ++i)
    for (double& v : model.entity_sem.row(i)) v = (1.0 - gen.uniform()) * scale;
  for (std::size_t i = 0; i < model.word_topics.rows(); ++i)
    for (double& v : model.word_topics.row(i)) v = (1.0 - gen.uniform()) * scale;

  const auto& cells = corpus.cells();
  std::vector<std::uint32_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<std::uint32_t>(i);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    gen.shuffle(order);
    for (std::uint32_t idx : order) topic_sgd_step(model, cells[idx], rate);
  }

  // Entities with no stored cells were never updated; give them the
  // maximally uninformative simplex vector.
  const double uniform = 1.0 / static_cast<double>(dim);
  for (std::int32_t e = 0; e < corpus.entity_capacity(); ++e)
    if (corpus.row(e).empty())
      for (double& v : model.entity_sem.row(static_cast<std::size_t>(e)))
        v = uniform;
  return model;
}

// ---------------------------------------------------------------------------
// Semantic composition.
// ---------------------------------------------------------------------------

namespace detail {
inline void check_composable(std::span<const double> s_h,
                             std::span<const double> s_t) {
  if (s_h.size() != s_t.size())
    throw shape_error("semantic vectors differ in dimension");
  for (double v : s_h)
    if (v < 0.0) throw contract_error("semantic vector has negative entry");
  for (double v : s_t)
    if (v < 0.0) throw contract_error("semantic vector has negative entry");
}
}  // namespace detail

/// (s_h + s_t) rescaled so the components sum to 1.
inline std::vector<double> compose_topics(std::span<const double> s_h,
                                          std::span<const double> s_t) {
  detail::check_composable(s_h, s_t);
  std::vector<double> out(s_h.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = s_h[i] + s_t[i];
    sum += out[i];
  }
  if (sum <= 0.0)
    throw degenerate_input_error("cannot compose two all-zero semantic vectors");
  for (double& v : out) v /= sum;
  return out;
}

/// (s_h + s_t) rescaled to unit Euclidean length; the hyperplane normal used
/// by all projection arithmetic.
inline std::vector<double> normal_vector(std::span<const double> s_h,
                                         std::span<const double> s_t) {
  detail::check_composable(s_h, s_t);
  std::vector<double> out(s_h.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s_h[i] + s_t[i];
  const double len = norm(out);
  if (len <= 0.0)
    throw degenerate_input_error("cannot compose two all-zero semantic vectors");
  for (double& v : out) v /= len;
  return out;
}

/// Unit vector with equal components: the normal used when both entities'
/// semantic vectors are all-zero.
inline std::vector<double> uniform_unit(std::size_t dim) {
  return std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

/// Simplex vector with equal components: the semantic vector assigned to
/// entities with no usable description.
inline std::vector<double> uniform_simplex(std::size_t dim) {
  return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
}

// ---------------------------------------------------------------------------
// Fold-in.
// ---------------------------------------------------------------------------

/// Infers a semantic vector for a new row against FROZEN word topics by the
/// same projected SGD, starting from the uniform simplex vector and visiting
/// the row's cells in stored order (no randomness). epochs = 0 returns the
/// initialization unchanged. Word vectors are never modified.
inline std::vector<double> fold_in(std::span<const description_corpus::cell> row,
                                   const semantic_model& model, int epochs,
                                   double rate) {
  if (row.empty())
    throw fold_in_error("fold-in requires at least one in-vocabulary word");
  if (epochs < 0) throw config_error("fold-in epochs must be >= 0");
  if (rate <= 0.0) throw config_error("fold-in rate must be > 0");

  std::vector<double> s =
      uniform_simplex(static_cast<std::size_t>(model.dim()));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (const auto& c : row) {
      const auto w = model.word_topics.row(static_cast<std::size_t>(c.word));
      const double residual = static_cast<double>(c.count) - dot(s, w);
      const double step = 2.0 * rate * residual;
      for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = std::max(0.0, s[j] + step * w[j]);
    }
  }
  return s;
}

}  // namespace ssp
