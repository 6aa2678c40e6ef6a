#pragma once

// Prepared-directory layout: the output of ingestion and the input of
// training and evaluation.
//
//   entities.tsv, relations.tsv   vocabularies (id<TAB>name)
//   train.ids.tsv, valid.ids.tsv, test.ids.tsv   integer-encoded splits
//   words.tsv, counts.tsv, described.tsv         description corpus
//                                                (present iff descriptions
//                                                 were supplied)
//   prep_manifest.json            input digests and ingestion settings

#include <filesystem>
#include <optional>
#include <string>

#include "ssp/common.hpp"
#include "ssp/kg_store.hpp"

namespace ssp {

struct prepared_data {
  triple_store store;
  std::optional<description_corpus> corpus;
};

inline void save_prepared(const triple_store& store,
                          const description_corpus* corpus,
                          const std::string& dir) {
  std::filesystem::create_directories(dir);
  store.entities.save(dir + "/entities.tsv");
  store.relations.save(dir + "/relations.tsv");
  store.save_split_ids(dir + "/train.ids.tsv", split_kind::train);
  store.save_split_ids(dir + "/valid.ids.tsv", split_kind::valid);
  store.save_split_ids(dir + "/test.ids.tsv", split_kind::test);
  if (corpus != nullptr) {
    corpus->words.save(dir + "/words.tsv");
    corpus->save(dir + "/counts.tsv", dir + "/described.tsv");
  }
}

inline prepared_data load_prepared(const std::string& dir) {
  prepared_data data;
  data.store.entities = vocab::load(dir + "/entities.tsv");
  data.store.relations = vocab::load(dir + "/relations.tsv");
  data.store.load_split_ids(dir + "/train.ids.tsv", split_kind::train);
  data.store.load_split_ids(dir + "/valid.ids.tsv", split_kind::valid);
  data.store.load_split_ids(dir + "/test.ids.tsv", split_kind::test);
  data.store.finalize();
  if (std::filesystem::exists(dir + "/words.tsv")) {
    data.corpus = description_corpus::load(dir + "/counts.tsv",
                                           dir + "/described.tsv",
                                           vocab::load(dir + "/words.tsv"),
                                           data.store.entities.size());
  }
  return data;
}

}  // namespace ssp
