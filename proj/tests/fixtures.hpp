// Shared test fixtures: scratch directories, tiny graphs, and the clustered
// synthetic corpus whose held-out edges are predictable only from planted
// description topics.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/kg_store.hpp"

namespace fixtures {

/// Fresh directory under the current working directory; wiped if it exists.
inline std::string scratch_dir(const std::string& name) {
  const auto path = std::filesystem::current_path() / ("scratch_" + name);
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path.string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) throw ssp::io_error("fixture write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  return ssp::read_file(path);
}

/// Small ring knowledge graph: `entities` nodes, relation r0 links i -> i+1,
/// r1 links i -> i+2. Train holds the r0 ring, valid/test split the r1 ring.
inline ssp::triple_store make_ring_store(std::int32_t entities) {
  ssp::triple_store store;
  for (std::int32_t i = 0; i < entities; ++i)
    store.entities.add("n" + std::to_string(i));
  store.relations.add("r0");
  store.relations.add("r1");
  for (std::int32_t i = 0; i < entities; ++i) {
    store.add_triple(ssp::split_kind::train, {i, 0, (i + 1) % entities});
    const ssp::triple skip{i, 1, (i + 2) % entities};
    if (i % 2 == 0)
      store.add_triple(ssp::split_kind::valid, skip);
    else
      store.add_triple(ssp::split_kind::test, skip);
  }
  store.finalize();
  return store;
}

// ---------------------------------------------------------------------------
// Clustered synthetic corpus. 10 clusters x 30 entities. Training edges are
// two rings inside each cluster plus deterministic cross-cluster noise; the
// held-out edges jump three steps ahead inside the cluster, so ranking them
// well requires knowing which cluster an entity belongs to - information
// present only in the descriptions.
// ---------------------------------------------------------------------------

inline constexpr int kClusters = 10;
inline constexpr int kPerCluster = 30;
inline constexpr int kEntities = kClusters * kPerCluster;
inline constexpr int kClusterWords = 8;   // per cluster
inline constexpr int kNoisePerEntity = 3;

inline std::string entity_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "e%03d", i);
  return buf;
}

inline std::string cluster_word(int c, int k) {
  return "topic" + std::to_string(c) + "word" + std::to_string(k);
}

struct clustered_files {
  std::string train, valid, test, desc, config;
  std::string labels_train, labels_test, zero_desc;
};

/// Writes the full fixture into `dir` and returns the file paths.
inline clustered_files write_clustered_fixture(const std::string& dir) {
  clustered_files f;
  f.train = dir + "/train.tsv";
  f.valid = dir + "/valid.tsv";
  f.test = dir + "/test.tsv";
  f.desc = dir + "/desc.tsv";
  f.config = dir + "/config.txt";
  f.labels_train = dir + "/labels_train.tsv";
  f.labels_test = dir + "/labels_test.tsv";
  f.zero_desc = dir + "/zero_desc.tsv";

  std::string train, valid, test;
  auto edge = [](int h, const char* r, int t) {
    return entity_name(h) + "\t" + r + "\t" + entity_name(t) + "\n";
  };
  for (int c = 0; c < kClusters; ++c) {
    const int base = c * kPerCluster;
    for (int i = 0; i < kPerCluster; ++i) {
      train += edge(base + i, "r0", base + (i + 1) % kPerCluster);
      train += edge(base + i, "r0", base + (i + 2) % kPerCluster);
    }
    for (int i = 0; i < kPerCluster; i += 3)
      test += edge(base + i, "r0", base + (i + 3) % kPerCluster);
    for (int i = 1; i < kPerCluster; i += 6)
      valid += edge(base + i, "r0", base + (i + 3) % kPerCluster);
  }
  // Deterministic cross-cluster noise through a fixed-seed generator.
  ssp::rng noise(13);
  for (int i = 0; i < kEntities; ++i) {
    for (int k = 0; k < kNoisePerEntity; ++k) {
      int j = static_cast<int>(noise.below(kEntities));
      while (j / kPerCluster == i / kPerCluster)
        j = static_cast<int>(noise.below(kEntities));
      train += edge(i, "r1", j);
    }
  }
  write_file(f.train, train);
  write_file(f.valid, valid);
  write_file(f.test, test);

  // Descriptions: every entity mentions every topic word. Its own cluster's
  // words dominate (count 6..12); foreign words appear once; two corpus-wide
  // filler words appear twice.
  std::string desc;
  for (int i = 0; i < kEntities; ++i) {
    const int c = i / kPerCluster;
    desc += entity_name(i);
    desc += '\t';
    for (int w = 0; w < kClusters * kClusterWords; ++w) {
      const int reps = (w / kClusterWords == c) ? 6 + (i + w) % 7 : 1;
      const std::string token = cluster_word(w / kClusterWords, w % kClusterWords);
      for (int rep = 0; rep < reps; ++rep) {
        desc += token;
        desc += ' ';
      }
    }
    desc += "fillerone fillerone fillertwo fillertwo\n";
  }
  write_file(f.desc, desc);

  write_file(f.config,
             "# clustered fixture configuration\n"
             "dim = 20\n"
             "rate = 0.05\n"
             "margin = 2.0\n"
             "lambda = 0.8\n"
             "mu = 0.0\n"
             "rounds = 300\n"
             "mode = standard\n"
             "seed = 11\n"
             "batch = 1\n"
             "rel_corrupt_frac = 0.0\n"
             "min_count = 1\n");

  // Type labels: the cluster is the type. Every third entity is a training
  // label; the test labels are zero-shot entities described below.
  std::string labels_train;
  for (int i = 0; i < kEntities; i += 3)
    labels_train +=
        entity_name(i) + "\tcluster" + std::to_string(i / kPerCluster) + "\n";
  write_file(f.labels_train, labels_train);

  std::string labels_test, zero_desc;
  for (int c = 0; c < kClusters; ++c) {
    const std::string zname = "zshot" + std::to_string(c);
    labels_test += zname + "\tcluster" + std::to_string(c) + "\n";
    zero_desc += zname;
    zero_desc += '\t';
    for (int k = 0; k < kClusterWords; ++k) {
      const std::string token = cluster_word(c, k);
      for (int rep = 0; rep < 8; ++rep) {
        zero_desc += token;
        zero_desc += ' ';
      }
    }
    zero_desc += "fillerone fillertwo\n";
  }
  write_file(f.labels_test, labels_test);
  write_file(f.zero_desc, zero_desc);
  return f;
}

}  // namespace fixtures
