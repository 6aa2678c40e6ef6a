#pragma once

// Knowledge-graph storage: triple splits with integer vocabularies, the
// filter index over all splits, per-relation corruption statistics for
// Bernoulli negative sampling, and the entity-description corpus
// (bag-of-words counts) that feeds the topic model.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ssp/common.hpp"

namespace ssp {

struct triple {
  std::int32_t head = 0;
  std::int32_t rel = 0;
  std::int32_t tail = 0;
  bool operator==(const triple&) const = default;
};

enum class split_kind { train, valid, test };
enum class vocab_mode { build, reuse };

// ---------------------------------------------------------------------------
// Vocabulary: name <-> dense id, first-seen order. Dumped as `id<TAB>name`.
// ---------------------------------------------------------------------------

class vocab {
 public:
  /// Returns the id of `name`, inserting it if absent.
  std::int32_t add(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::int32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::optional<std::int32_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(std::int32_t id) const {
    if (id < 0 || id >= size())
      throw vocab_error("vocabulary id out of range: " + std::to_string(id));
    return names_[static_cast<std::size_t>(id)];
  }

  std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }

  void save(const std::string& path) const {
    auto out = open_output(path);
    for (std::int32_t id = 0; id < size(); ++id)
      out << id << '\t' << names_[static_cast<std::size_t>(id)] << '\n';
    if (!out) throw io_error("failed writing vocabulary: " + path);
  }

  static vocab load(const std::string& path) {
    auto in = open_input(path);
    vocab v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split(trim_cr(line), '\t');
      if (fields.size() != 2)
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": expected `id<TAB>name`");
      const auto id = parse_int(fields[0], path);
      if (id != v.size())
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": ids must be dense and ascending");
      v.add(fields[1]);
    }
    return v;
  }

 private:
  static std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// ---------------------------------------------------------------------------
// Triple store.
// ---------------------------------------------------------------------------

/// Per-relation averages over the training split: tails per distinct head
/// and heads per distinct tail. Both are >= 1 for any trained relation.
struct relation_stats {
  double tails_per_head = 0.0;
  double heads_per_tail = 0.0;
};

class triple_store {
 public:
  vocab entities;
  vocab relations;

  const std::vector<triple>& split(split_kind k) const {
    return splits_[static_cast<std::size_t>(k)];
  }

  /// Appends a triple whose ids must already be in the vocabularies.
  void add_triple(split_kind k, const triple& t) {
    if (t.head < 0 || t.head >= entities.size() || t.tail < 0 ||
        t.tail >= entities.size() || t.rel < 0 || t.rel >= relations.size())
      throw shape_error("triple ids out of vocabulary bounds");
    if (t.head >= kMaxEntityId || t.tail >= kMaxEntityId ||
        t.rel >= kMaxRelationId)
      throw shape_error("id exceeds filter index capacity");
    splits_[static_cast<std::size_t>(k)].push_back(t);
    finalized_ = false;
  }

  /// Parses `head<TAB>relation<TAB>tail` lines into one split.
  /// Under `reuse` the vocabularies are frozen and unknown symbols fail.
  void load_split(const std::string& path, split_kind k, vocab_mode mode) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto fields = ssp::split(std::string_view(line), '\t');
      if (fields.size() != 3)
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": expected 3 tab-separated fields, got " +
                          std::to_string(fields.size()));
      triple t;
      t.head = resolve(entities, fields[0], mode, path, line_no);
      t.rel = resolve(relations, fields[1], mode, path, line_no);
      t.tail = resolve(entities, fields[2], mode, path, line_no);
      add_triple(k, t);
    }
  }

  /// Writes one split as integer-id TSV (`h<TAB>r<TAB>t`).
  void save_split_ids(const std::string& path, split_kind k) const {
    auto out = open_output(path);
    for (const triple& t : split(k))
      out << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
    if (!out) throw io_error("failed writing split: " + path);
  }

  /// Loads an integer-id TSV produced by save_split_ids.
  void load_split_ids(const std::string& path, split_kind k) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto fields = ssp::split(std::string_view(line), '\t');
      if (fields.size() != 3)
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": expected 3 tab-separated ids");
      triple t;
      t.head = static_cast<std::int32_t>(parse_int(fields[0], path));
      t.rel = static_cast<std::int32_t>(parse_int(fields[1], path));
      t.tail = static_cast<std::int32_t>(parse_int(fields[2], path));
      add_triple(k, t);
    }
  }

  /// Builds the filter index and per-relation statistics. Idempotent;
  /// must be called after the last split mutation.
  void finalize() {
    filter_.clear();
    for (const auto& sp : splits_)
      for (const triple& t : sp) filter_.insert(pack(t));

    const auto nrel = static_cast<std::size_t>(relations.size());
    stats_.assign(nrel, relation_stats{});
    trained_.assign(nrel, 0);
    std::vector<std::int64_t> count(nrel, 0);
    std::vector<std::unordered_set<std::int32_t>> heads(nrel), tails(nrel);
    for (const triple& t : split(split_kind::train)) {
      const auto r = static_cast<std::size_t>(t.rel);
      ++count[r];
      heads[r].insert(t.head);
      tails[r].insert(t.tail);
    }
    for (std::size_t r = 0; r < nrel; ++r) {
      if (count[r] == 0) continue;
      trained_[r] = 1;
      stats_[r].tails_per_head =
          static_cast<double>(count[r]) / static_cast<double>(heads[r].size());
      stats_[r].heads_per_tail =
          static_cast<double>(count[r]) / static_cast<double>(tails[r].size());
    }
    finalized_ = true;
  }

  bool finalized() const { return finalized_; }

  /// True iff the triple occurs in train ∪ valid ∪ test.
  bool in_filter(const triple& t) const {
    require_finalized();
    return filter_.count(pack(t)) != 0;
  }

  /// Statistics for a relation present in the training split.
  const relation_stats& stats(std::int32_t rel) const {
    require_finalized();
    if (rel < 0 || rel >= relations.size() ||
        !trained_[static_cast<std::size_t>(rel)])
      throw stats_error("relation has no training occurrences: " +
                        std::to_string(rel));
    return stats_[static_cast<std::size_t>(rel)];
  }

  /// Bernoulli head-corruption probability tph / (tph + hpt).
  double corruption_probability(std::int32_t rel) const {
    const relation_stats& s = stats(rel);
    return s.tails_per_head / (s.tails_per_head + s.heads_per_tail);
  }

 private:
  static constexpr std::int32_t kMaxEntityId = 1 << 24;
  static constexpr std::int32_t kMaxRelationId = 1 << 16;

  static std::uint64_t pack(const triple& t) {
    return (static_cast<std::uint64_t>(t.head) << 40) |
           (static_cast<std::uint64_t>(t.rel) << 24) |
           static_cast<std::uint64_t>(t.tail);
  }

  static std::int32_t resolve(vocab& v, std::string_view name, vocab_mode mode,
                              const std::string& path, std::size_t line_no) {
    if (mode == vocab_mode::build) return v.add(name);
    if (auto id = v.find(name)) return *id;
    throw vocab_error(path + ":" + std::to_string(line_no) +
                      ": unknown symbol '" + std::string(name) + "'");
  }

  void require_finalized() const {
    if (!finalized_)
      throw contract_error("triple_store::finalize() has not been called");
  }

  std::array<std::vector<triple>, 3> splits_;
  std::unordered_set<std::uint64_t> filter_;
  std::vector<relation_stats> stats_;
  std::vector<char> trained_;
  bool finalized_ = false;
};

// ---------------------------------------------------------------------------
// Tokenizer: lowercase, split on non-alphanumeric bytes, drop short tokens,
// optionally drop stop words.
// ---------------------------------------------------------------------------

struct tokenizer_options {
  bool strip_stopwords = false;
  std::size_t min_token_len = 2;
};

namespace detail {
inline const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a",      "about",   "above", "after",  "again",   "against", "all",
      "am",     "an",      "and",   "any",    "are",     "as",      "at",
      "be",     "because", "been",  "before", "being",   "below",   "between",
      "both",   "but",     "by",    "can",    "did",     "do",      "does",
      "doing",  "down",    "during", "each",  "few",     "for",     "from",
      "further", "had",    "has",   "have",   "having",  "he",      "her",
      "here",   "hers",    "him",   "his",    "how",     "if",      "in",
      "into",   "is",      "it",    "its",    "itself",  "just",    "me",
      "more",   "most",    "my",    "no",     "nor",     "not",     "now",
      "of",     "off",     "on",    "once",   "only",    "or",      "other",
      "our",    "out",     "over",  "own",    "same",    "she",     "should",
      "so",     "some",    "such",  "than",   "that",    "the",     "their",
      "them",   "then",    "there", "these",  "they",    "this",    "those",
      "through", "to",     "too",   "under",  "until",   "up",      "very",
      "was",    "we",      "were",  "what",   "when",    "where",   "which",
      "while",  "who",     "whom",  "why",    "will",    "with",    "you",
      "your"};
  return words;
}
}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view text,
                                         const tokenizer_options& opt = {}) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= opt.min_token_len &&
        (!opt.strip_stopwords || !detail::stopwords().count(cur)))
      out.push_back(cur);
    cur.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (c >= 'a' && c <= 'z')
      cur.push_back(raw);
    else if (c >= 'A' && c <= 'Z')
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    else if (c >= '0' && c <= '9')
      cur.push_back(raw);
    else
      flush();
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Description corpus: sparse nonnegative integer counts C_{e,w} over the
// entities that have descriptions. Zero cells are never stored.
// ---------------------------------------------------------------------------

class description_corpus {
 public:
  struct cell {
    std::int32_t entity = 0;
    std::int32_t word = 0;
    std::int32_t count = 0;
    bool operator==(const cell&) const = default;
  };

  vocab words;

  explicit description_corpus(std::int32_t entity_capacity = 0)
      : described_(static_cast<std::size_t>(entity_capacity), 0),
        rows_(static_cast<std::size_t>(entity_capacity)) {}

  std::int32_t entity_capacity() const {
    return static_cast<std::int32_t>(rows_.size());
  }

  /// Marks the entity described and stores its (word, count) cells.
  /// An empty row is allowed. Cells are kept sorted by word id.
  void add_row(std::int32_t entity,
               std::vector<std::pair<std::int32_t, std::int32_t>> word_counts) {
    check_entity(entity);
    auto& row = rows_[static_cast<std::size_t>(entity)];
    for (const auto& [w, c] : word_counts) {
      if (w < 0 || w >= words.size())
        throw shape_error("word id out of vocabulary bounds");
      if (c < 1) throw shape_error("stored cells must have count >= 1");
      row.emplace_back(w, c);
    }
    std::sort(row.begin(), row.end());
    described_[static_cast<std::size_t>(entity)] = 1;
    flat_dirty_ = true;
  }

  bool described(std::int32_t entity) const {
    check_entity(entity);
    return described_[static_cast<std::size_t>(entity)] != 0;
  }

  /// All stored cells, ordered by (entity, word).
  const std::vector<cell>& cells() const {
    refresh_flat();
    return cells_;
  }

  /// Stored cells of one entity. Empty for undescribed entities.
  std::span<const cell> row(std::int32_t entity) const {
    check_entity(entity);
    refresh_flat();
    const auto e = static_cast<std::size_t>(entity);
    return {cells_.data() + row_begin_[e], row_begin_[e + 1] - row_begin_[e]};
  }

  std::int64_t cell_count() const {
    refresh_flat();
    return static_cast<std::int64_t>(cells_.size());
  }

  std::int64_t described_count() const {
    std::int64_t n = 0;
    for (char d : described_) n += d;
    return n;
  }

  /// Persists counts (`entity<TAB>word<TAB>count`) and the described-entity
  /// list (one id per line; needed because a described row may be empty).
  void save(const std::string& counts_path,
            const std::string& described_path) const {
    auto out = open_output(counts_path);
    for (const cell& c : cells())
      out << c.entity << '\t' << c.word << '\t' << c.count << '\n';
    if (!out) throw io_error("failed writing counts: " + counts_path);
    auto dout = open_output(described_path);
    for (std::size_t e = 0; e < described_.size(); ++e)
      if (described_[e]) dout << e << '\n';
    if (!dout) throw io_error("failed writing described list: " + described_path);
  }

  static description_corpus load(const std::string& counts_path,
                                 const std::string& described_path, vocab words,
                                 std::int32_t entity_capacity) {
    description_corpus corpus(entity_capacity);
    corpus.words = std::move(words);

    std::map<std::int32_t, std::vector<std::pair<std::int32_t, std::int32_t>>>
        rows;
    {
      auto in = open_input(described_path);
      std::string line;
      while (std::getline(in, line)) {
        const auto e =
            static_cast<std::int32_t>(parse_int(trim(line), described_path));
        rows.emplace(e, std::vector<std::pair<std::int32_t, std::int32_t>>{});
      }
    }
    {
      auto in = open_input(counts_path);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split(trim(line), '\t');
        if (fields.size() != 3)
          throw parse_error(counts_path + ":" + std::to_string(line_no) +
                            ": expected `entity<TAB>word<TAB>count`");
        const auto e = static_cast<std::int32_t>(parse_int(fields[0], counts_path));
        const auto w = static_cast<std::int32_t>(parse_int(fields[1], counts_path));
        const auto c = static_cast<std::int32_t>(parse_int(fields[2], counts_path));
        auto it = rows.find(e);
        if (it == rows.end())
          throw parse_error(counts_path + ":" + std::to_string(line_no) +
                            ": entity not in described list");
        it->second.emplace_back(w, c);
      }
    }
    for (auto& [e, wc] : rows) corpus.add_row(e, std::move(wc));
    return corpus;
  }

 private:
  void check_entity(std::int32_t entity) const {
    if (entity < 0 || static_cast<std::size_t>(entity) >= rows_.size())
      throw shape_error("entity id out of corpus bounds: " +
                        std::to_string(entity));
  }

  void refresh_flat() const {
    if (!flat_dirty_) return;
    cells_.clear();
    row_begin_.assign(rows_.size() + 1, 0);
    for (std::size_t e = 0; e < rows_.size(); ++e) {
      row_begin_[e] = cells_.size();
      for (const auto& [w, c] : rows_[e])
        cells_.push_back(cell{static_cast<std::int32_t>(e), w, c});
    }
    row_begin_[rows_.size()] = cells_.size();
    flat_dirty_ = false;
  }

  std::vector<char> described_;
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> rows_;
  mutable std::vector<cell> cells_;
  mutable std::vector<std::size_t> row_begin_;
  mutable bool flat_dirty_ = true;
};

// ---------------------------------------------------------------------------
// Description loading.
// ---------------------------------------------------------------------------

/// Parses `entity<TAB>free text` lines into a bag-of-words corpus.
///
/// Vocabulary handling:
///  - frozen_words == nullptr: builds a fresh word vocabulary; tokens whose
///    total corpus frequency is below min_count are dropped; ids follow
///    first-seen order among surviving tokens.
///  - frozen_words != nullptr: reuses that vocabulary verbatim; out-of-vocab
///    tokens are dropped and min_count is not re-applied.
///
/// Unknown entities raise a vocabulary error unless register_new_entities
/// is set, in which case they are appended to the store's entity vocabulary
/// (used for zero-shot evaluation; prepared artifacts are never rewritten).
inline description_corpus load_descriptions(
    const std::string& path, triple_store& store, const tokenizer_options& tok,
    int min_count, bool register_new_entities = false,
    const vocab* frozen_words = nullptr) {
  auto in = open_input(path);

  std::vector<std::int32_t> order;  // entity ids in first-seen order
  std::unordered_map<std::int32_t,
                     std::vector<std::pair<std::string, std::int32_t>>>
      texts;  // entity -> (token, count) in first-seen token order
  std::unordered_map<std::string, std::int64_t> corpus_freq;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": expected `entity<TAB>text`");
    const std::string_view name = std::string_view(line).substr(0, tab);
    const std::string_view text = std::string_view(line).substr(tab + 1);
    if (text.find('\t') != std::string_view::npos)
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": text field may not contain tabs");

    std::int32_t entity;
    if (auto id = store.entities.find(name)) {
      entity = *id;
    } else if (register_new_entities) {
      entity = store.entities.add(name);
    } else {
      throw vocab_error(path + ":" + std::to_string(line_no) +
                        ": unknown entity '" + std::string(name) + "'");
    }

    auto [it, fresh] = texts.try_emplace(entity);
    if (fresh) order.push_back(entity);
    auto& row = it->second;
    for (std::string& token : tokenize(text, tok)) {
      corpus_freq[token] += 1;
      auto pos = std::find_if(row.begin(), row.end(),
                              [&](const auto& p) { return p.first == token; });
      if (pos == row.end())
        row.emplace_back(std::move(token), 1);
      else
        pos->second += 1;
    }
  }

  description_corpus corpus(store.entities.size());
  if (frozen_words != nullptr) {
    corpus.words = *frozen_words;
  } else {
    // First-seen order over surviving tokens keeps ids deterministic.
    for (std::int32_t e : order)
      for (const auto& [token, count] : texts[e])
        if (corpus_freq[token] >= min_count) corpus.words.add(token);
  }

  for (std::int32_t e : order) {
    std::vector<std::pair<std::int32_t, std::int32_t>> cells;
    for (const auto& [token, count] : texts[e]) {
      if (frozen_words == nullptr && corpus_freq[token] < min_count) continue;
      if (auto w = corpus.words.find(token)) cells.emplace_back(*w, count);
    }
    corpus.add_row(e, std::move(cells));
  }
  return corpus;
}

}  // namespace ssp
