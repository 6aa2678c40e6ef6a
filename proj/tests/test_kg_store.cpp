#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ssp/kg_store.hpp"

using namespace ssp;

TEST_CASE("vocab assigns dense ids in first-seen order") {
  vocab v;
  REQUIRE(v.add("alpha") == 0);
  REQUIRE(v.add("beta") == 1);
  REQUIRE(v.add("alpha") == 0);
  REQUIRE(v.size() == 2);
  REQUIRE(v.find("beta").value() == 1);
  REQUIRE_FALSE(v.find("gamma").has_value());
  REQUIRE(v.name(0) == "alpha");
  REQUIRE_THROWS_AS(v.name(2), vocab_error);
  REQUIRE_THROWS_AS(v.name(-1), vocab_error);
}

TEST_CASE("vocab round-trips through its file format") {
  const auto dir = fixtures::scratch_dir("vocab_rt");
  vocab v;
  v.add("first");
  v.add("second entity");
  v.add("third");
  v.save(dir + "/v.tsv");
  const vocab loaded = vocab::load(dir + "/v.tsv");
  REQUIRE(loaded.size() == 3);
  for (std::int32_t i = 0; i < 3; ++i) REQUIRE(loaded.name(i) == v.name(i));
}

TEST_CASE("vocab load rejects gaps and malformed rows") {
  const auto dir = fixtures::scratch_dir("vocab_bad");
  fixtures::write_file(dir + "/gap.tsv", "0\ta\n2\tb\n");
  REQUIRE_THROWS_AS(vocab::load(dir + "/gap.tsv"), parse_error);
  fixtures::write_file(dir + "/fields.tsv", "0\ta\tb\n");
  REQUIRE_THROWS_AS(vocab::load(dir + "/fields.tsv"), parse_error);
  REQUIRE_THROWS_AS(vocab::load(dir + "/missing.tsv"), io_error);
}

TEST_CASE("triple splits load and resolve names") {
  const auto dir = fixtures::scratch_dir("splits");
  fixtures::write_file(dir + "/train.tsv", "a\tlikes\tb\nb\tlikes\tc\n");
  fixtures::write_file(dir + "/test.tsv", "a\tlikes\tc\n");
  triple_store store;
  store.load_split(dir + "/train.tsv", split_kind::train, vocab_mode::build);
  store.load_split(dir + "/test.tsv", split_kind::test, vocab_mode::build);
  REQUIRE(store.entities.size() == 3);
  REQUIRE(store.relations.size() == 1);
  REQUIRE(store.split(split_kind::train).size() == 2);
  REQUIRE(store.split(split_kind::test).size() == 1);
  const triple& t = store.split(split_kind::train)[0];
  REQUIRE(store.entities.name(t.head) == "a");
  REQUIRE(store.entities.name(t.tail) == "b");
}

TEST_CASE("split parsing reports file and line on malformed rows") {
  const auto dir = fixtures::scratch_dir("split_bad");
  fixtures::write_file(dir + "/two.tsv", "a\tlikes\tb\nx\ty\n");
  triple_store store;
  try {
    store.load_split(dir + "/two.tsv", split_kind::train, vocab_mode::build);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    REQUIRE(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("reuse mode rejects unseen names") {
  const auto dir = fixtures::scratch_dir("split_reuse");
  fixtures::write_file(dir + "/train.tsv", "a\tlikes\tb\n");
  fixtures::write_file(dir + "/test.tsv", "a\tlikes\tzzz\n");
  triple_store store;
  store.load_split(dir + "/train.tsv", split_kind::train, vocab_mode::build);
  REQUIRE_THROWS_AS(
      store.load_split(dir + "/test.tsv", split_kind::test, vocab_mode::reuse),
      vocab_error);
}

TEST_CASE("add_triple rejects out-of-range ids") {
  triple_store store;
  store.entities.add("a");
  store.relations.add("r");
  REQUIRE_THROWS_AS(store.add_triple(split_kind::train, {0, 0, 1}), shape_error);
  REQUIRE_THROWS_AS(store.add_triple(split_kind::train, {-1, 0, 0}), shape_error);
  REQUIRE_THROWS_AS(store.add_triple(split_kind::train, {0, 1, 0}), shape_error);
}

TEST_CASE("filter index covers every split and only the splits") {
  auto store = fixtures::make_ring_store(8);
  for (auto k : {split_kind::train, split_kind::valid, split_kind::test})
    for (const triple& t : store.split(k)) REQUIRE(store.in_filter(t));
  REQUIRE_FALSE(store.in_filter({0, 0, 5}));
  REQUIRE_FALSE(store.in_filter({0, 1, 1}));
}

TEST_CASE("filter index matches a set oracle on random triples") {
  triple_store store;
  for (int i = 0; i < 12; ++i) store.entities.add("e" + std::to_string(i));
  for (int r = 0; r < 3; ++r) store.relations.add("r" + std::to_string(r));
  rng gen(99);
  std::set<std::tuple<int, int, int>> oracle;
  for (int n = 0; n < 60; ++n) {
    const triple t{static_cast<std::int32_t>(gen.below(12)),
                   static_cast<std::int32_t>(gen.below(3)),
                   static_cast<std::int32_t>(gen.below(12))};
    store.add_triple(split_kind::train, t);
    oracle.emplace(t.head, t.rel, t.tail);
  }
  store.finalize();
  for (int h = 0; h < 12; ++h)
    for (int r = 0; r < 3; ++r)
      for (int t = 0; t < 12; ++t)
        REQUIRE(store.in_filter({h, r, t}) == (oracle.count({h, r, t}) > 0));
}

TEST_CASE("stats require finalize and training occurrences") {
  auto store = fixtures::make_ring_store(6);
  REQUIRE_NOTHROW(store.stats(0));
  // Relation r1 appears only in valid/test splits.
  REQUIRE_THROWS_AS(store.stats(1), stats_error);
  REQUIRE_THROWS_AS(store.corruption_probability(1), stats_error);

  triple_store raw;
  raw.entities.add("a");
  raw.relations.add("r");
  raw.add_triple(split_kind::train, {0, 0, 0});
  REQUIRE_THROWS_AS(raw.in_filter({0, 0, 0}), contract_error);
  REQUIRE_THROWS_AS(raw.stats(0), contract_error);
}

TEST_CASE("relation statistics: one-to-one relation splits corruption evenly") {
  auto store = fixtures::make_ring_store(10);
  // Ring relation: every head has one tail, every tail one head.
  const auto& st = store.stats(0);
  REQUIRE(st.tails_per_head == Catch::Approx(1.0));
  REQUIRE(st.heads_per_tail == Catch::Approx(1.0));
  REQUIRE(store.corruption_probability(0) == Catch::Approx(0.5));
}

TEST_CASE("relation statistics: one-to-many relation prefers head corruption") {
  triple_store store;
  for (int i = 0; i < 6; ++i) store.entities.add("e" + std::to_string(i));
  store.relations.add("fan");
  // Single head 0 fanning out to 5 tails: tph = 5, hpt = 1.
  for (int t = 1; t < 6; ++t) store.add_triple(split_kind::train, {0, 0, t});
  store.finalize();
  REQUIRE(store.stats(0).tails_per_head == Catch::Approx(5.0));
  REQUIRE(store.stats(0).heads_per_tail == Catch::Approx(1.0));
  REQUIRE(store.corruption_probability(0) == Catch::Approx(5.0 / 6.0));
}

TEST_CASE("relation statistics match a brute-force grouping oracle") {
  triple_store store;
  for (int i = 0; i < 15; ++i) store.entities.add("e" + std::to_string(i));
  for (int r = 0; r < 4; ++r) store.relations.add("r" + std::to_string(r));
  rng gen(4242);
  std::vector<triple> triples;
  for (int n = 0; n < 120; ++n) {
    triples.push_back({static_cast<std::int32_t>(gen.below(15)),
                       static_cast<std::int32_t>(gen.below(4)),
                       static_cast<std::int32_t>(gen.below(15))});
    store.add_triple(split_kind::train, triples.back());
  }
  store.finalize();
  for (int r = 0; r < 4; ++r) {
    std::set<int> heads, tails;
    int count = 0;
    for (const triple& t : triples)
      if (t.rel == r) {
        heads.insert(t.head);
        tails.insert(t.tail);
        ++count;
      }
    if (count == 0) continue;
    const double tph = static_cast<double>(count) / static_cast<double>(heads.size());
    const double hpt = static_cast<double>(count) / static_cast<double>(tails.size());
    REQUIRE(store.stats(r).tails_per_head == Catch::Approx(tph));
    REQUIRE(store.stats(r).heads_per_tail == Catch::Approx(hpt));
    REQUIRE(store.corruption_probability(r) == Catch::Approx(tph / (tph + hpt)));
  }
}

TEST_CASE("finalize is idempotent") {
  auto store = fixtures::make_ring_store(5);
  const double p = store.corruption_probability(0);
  store.finalize();
  REQUIRE(store.corruption_probability(0) == p);
}

// ---------------------------------------------------------------------------
// Tokenizer.
// ---------------------------------------------------------------------------

TEST_CASE("tokenizer lowercases and splits on non-alphanumerics") {
  tokenizer_options opt;
  const auto toks = tokenize("Hello, World! x86-64 C++20", opt);
  REQUIRE(toks == std::vector<std::string>{"hello", "world", "x86", "64", "20"});
}

TEST_CASE("tokenizer drops tokens shorter than two characters") {
  tokenizer_options opt;
  REQUIRE(tokenize("a I b2 c", opt) == std::vector<std::string>{"b2"});
  REQUIRE(tokenize("", opt).empty());
  REQUIRE(tokenize("...!!!", opt).empty());
}

TEST_CASE("tokenizer strips stop words only when asked") {
  tokenizer_options keep;
  tokenizer_options strip;
  strip.strip_stopwords = true;
  REQUIRE(tokenize("the cat and the hat", keep) ==
          std::vector<std::string>{"the", "cat", "and", "the", "hat"});
  REQUIRE(tokenize("the cat and the hat", strip) ==
          std::vector<std::string>{"cat", "hat"});
}

// ---------------------------------------------------------------------------
// Description corpus.
// ---------------------------------------------------------------------------

namespace {
triple_store two_entity_store() {
  triple_store store;
  store.entities.add("apple");
  store.entities.add("banana");
  store.relations.add("r");
  store.add_triple(split_kind::train, {0, 0, 1});
  store.finalize();
  return store;
}
}  // namespace

TEST_CASE("descriptions build counts with a frequency cutoff") {
  const auto dir = fixtures::scratch_dir("desc_min");
  // "fruit" appears 3x corpus-wide, "tasty" 2x, "rare" once.
  fixtures::write_file(dir + "/d.tsv",
                       "apple\tfruit fruit tasty rare\n"
                       "banana\tfruit tasty\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  const auto corpus = load_descriptions(dir + "/d.tsv", store, tok, 2);
  REQUIRE(corpus.words.size() == 2);  // rare dropped
  REQUIRE(corpus.words.find("fruit").has_value());
  REQUIRE(corpus.words.find("tasty").has_value());
  REQUIRE_FALSE(corpus.words.find("rare").has_value());
  REQUIRE(corpus.described(0));
  REQUIRE(corpus.described(1));
  const auto row0 = corpus.row(0);
  REQUIRE(row0.size() == 2);
  std::map<std::int32_t, std::int32_t> counts;
  for (const auto& c : row0) counts[c.word] = c.count;
  REQUIRE(counts[corpus.words.find("fruit").value()] == 2);
  REQUIRE(counts[corpus.words.find("tasty").value()] == 1);
}

TEST_CASE("duplicate description lines merge into one row") {
  const auto dir = fixtures::scratch_dir("desc_dup");
  fixtures::write_file(dir + "/d.tsv",
                       "apple\tsweet sweet\n"
                       "apple\tsweet crunchy\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  const auto corpus = load_descriptions(dir + "/d.tsv", store, tok, 1);
  REQUIRE(corpus.described_count() == 1);
  const auto row = corpus.row(0);
  std::map<std::int32_t, std::int32_t> counts;
  for (const auto& c : row) counts[c.word] = c.count;
  REQUIRE(counts[corpus.words.find("sweet").value()] == 3);
  REQUIRE(counts[corpus.words.find("crunchy").value()] == 1);
}

TEST_CASE("an entity whose words are all filtered stays described with an empty row") {
  const auto dir = fixtures::scratch_dir("desc_empty");
  fixtures::write_file(dir + "/d.tsv",
                       "apple\tunique\n"
                       "banana\tcommon common\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  const auto corpus = load_descriptions(dir + "/d.tsv", store, tok, 2);
  REQUIRE(corpus.described(0));
  REQUIRE(corpus.row(0).empty());
  REQUIRE(corpus.row(1).size() == 1);
  REQUIRE(corpus.described_count() == 2);
  REQUIRE(corpus.cell_count() == 1);
}

TEST_CASE("unknown description entities are rejected unless registration is on") {
  const auto dir = fixtures::scratch_dir("desc_unknown");
  fixtures::write_file(dir + "/d.tsv", "cherry\tred fruit red\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  REQUIRE_THROWS_AS(load_descriptions(dir + "/d.tsv", store, tok, 1),
                    vocab_error);
  const auto before = store.entities.size();
  const auto corpus = load_descriptions(dir + "/d.tsv", store, tok, 1,
                                        /*register_new_entities=*/true);
  REQUIRE(store.entities.size() == before + 1);
  const auto id = store.entities.find("cherry").value();
  REQUIRE(corpus.described(id));
  REQUIRE(corpus.row(id).size() == 2);
}

TEST_CASE("a frozen word vocabulary drops out-of-vocabulary tokens") {
  const auto dir = fixtures::scratch_dir("desc_frozen");
  fixtures::write_file(dir + "/d.tsv", "apple\tknown stranger known\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  vocab frozen;
  frozen.add("known");
  const auto corpus =
      load_descriptions(dir + "/d.tsv", store, tok, 5, false, &frozen);
  REQUIRE(corpus.words.size() == 1);
  const auto row = corpus.row(0);
  REQUIRE(row.size() == 1);
  REQUIRE(row[0].word == 0);
  REQUIRE(row[0].count == 2);  // min_count (5) is not re-applied
}

TEST_CASE("description parsing rejects rows without a tab") {
  const auto dir = fixtures::scratch_dir("desc_notab");
  fixtures::write_file(dir + "/d.tsv", "apple no tab here\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  REQUIRE_THROWS_AS(load_descriptions(dir + "/d.tsv", store, tok, 1),
                    parse_error);
}

TEST_CASE("corpus persists counts and the described list") {
  const auto dir = fixtures::scratch_dir("desc_rt");
  fixtures::write_file(dir + "/d.tsv",
                       "apple\tunique\n"
                       "banana\tcommon common\n");
  auto store = two_entity_store();
  tokenizer_options tok;
  const auto corpus = load_descriptions(dir + "/d.tsv", store, tok, 2);
  corpus.save(dir + "/counts.tsv", dir + "/described.tsv");
  const auto loaded =
      description_corpus::load(dir + "/counts.tsv", dir + "/described.tsv",
                               corpus.words, store.entities.size());
  REQUIRE(loaded.described(0));
  REQUIRE(loaded.row(0).empty());
  REQUIRE(loaded.cells() == corpus.cells());
  REQUIRE(loaded.described_count() == corpus.described_count());
}

TEST_CASE("split id files round-trip") {
  const auto dir = fixtures::scratch_dir("split_ids");
  auto store = fixtures::make_ring_store(7);
  store.save_split_ids(dir + "/train.ids.tsv", split_kind::train);
  triple_store other;
  for (std::int32_t i = 0; i < 7; ++i) other.entities.add("n" + std::to_string(i));
  other.relations.add("r0");
  other.relations.add("r1");
  other.load_split_ids(dir + "/train.ids.tsv", split_kind::train);
  REQUIRE(other.split(split_kind::train).size() ==
          store.split(split_kind::train).size());
  for (std::size_t i = 0; i < other.split(split_kind::train).size(); ++i)
    REQUIRE(other.split(split_kind::train)[i] ==
            store.split(split_kind::train)[i]);
}
