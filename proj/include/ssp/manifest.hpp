#pragma once

// Run artifacts: checkpoint directories (parameters + metadata) and the JSON
// run manifest. The metadata carries everything evaluation needs to rebuild
// a scorer (model kind, mode, lambda, dim) plus the config hash and a
// fingerprint of the prepared vocabularies for compatibility checking.
//
// Checkpoints, reports, and trajectories are byte-deterministic for a fixed
// seed; the run manifest additionally records wall-clock timings and is the
// one artifact excluded from byte-identity.

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "ssp/common.hpp"
#include "ssp/trainer.hpp"

namespace ssp {

struct checkpoint_meta {
  std::int32_t round = 0;
  model_kind kind = model_kind::transe;
  train_mode mode = train_mode::standard;
  std::int32_t dim = 0;
  double lambda = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  bool norm_entities = false;
  std::string config_hash;
  std::string prep_digest;
};

inline model_kind parse_model_kind(std::string_view text,
                                   const std::string& what) {
  if (text == "transe") return model_kind::transe;
  if (text == "ssp") return model_kind::ssp;
  throw config_error(what + ": unknown model kind '" + std::string(text) + "'");
}

inline void save_checkpoint_meta(const checkpoint_meta& meta,
                                 const std::string& path) {
  auto out = open_output(path);
  out << "round " << meta.round << '\n';
  out << "model " << to_string(meta.kind) << '\n';
  out << "mode " << to_string(meta.mode) << '\n';
  out << "dim " << meta.dim << '\n';
  out << "lambda " << format_double(meta.lambda) << '\n';
  out << "mu " << format_double(meta.mu) << '\n';
  out << "seed " << meta.seed << '\n';
  out << "norm_entities " << (meta.norm_entities ? 1 : 0) << '\n';
  out << "config_hash " << meta.config_hash << '\n';
  out << "prep_digest " << meta.prep_digest << '\n';
  if (!out) throw io_error("failed writing checkpoint metadata: " + path);
}

inline checkpoint_meta load_checkpoint_meta(const std::string& path) {
  auto in = open_input(path);
  checkpoint_meta meta;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    const auto space = stripped.find(' ');
    if (space == std::string_view::npos)
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": expected `key value`");
    kv.emplace(std::string(stripped.substr(0, space)),
               std::string(trim(stripped.substr(space + 1))));
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw parse_error(path + ": missing metadata key `" + key + "`");
    return it->second;
  };
  meta.round = static_cast<std::int32_t>(parse_int(need("round"), path));
  meta.kind = parse_model_kind(need("model"), path);
  meta.mode = parse_train_mode(need("mode"), path);
  meta.dim = static_cast<std::int32_t>(parse_int(need("dim"), path));
  meta.lambda = parse_double(need("lambda"), path);
  meta.mu = parse_double(need("mu"), path);
  meta.seed = static_cast<std::uint64_t>(parse_int(need("seed"), path));
  meta.norm_entities = parse_int(need("norm_entities"), path) != 0;
  meta.config_hash = need("config_hash");
  meta.prep_digest = need("prep_digest");
  return meta;
}

// ---------------------------------------------------------------------------
// Checkpoint directories.
// ---------------------------------------------------------------------------

struct checkpoint {
  checkpoint_meta meta;
  train_state state;
};

inline void save_checkpoint(const train_state& state,
                            const checkpoint_meta& meta,
                            const std::string& dir) {
  std::filesystem::create_directories(dir);
  state.embeddings.save(dir + "/embeddings.txt");
  if (state.has_semantics) state.semantics.save(dir + "/semantics.txt");
  save_checkpoint_meta(meta, dir + "/meta.txt");
}

inline checkpoint load_checkpoint(const std::string& dir) {
  checkpoint cp;
  cp.meta = load_checkpoint_meta(dir + "/meta.txt");
  cp.state.embeddings = embedding_table::load(dir + "/embeddings.txt");
  if (cp.meta.kind == model_kind::ssp) {
    cp.state.semantics = semantic_model::load(dir + "/semantics.txt");
    cp.state.has_semantics = true;
  }
  cp.state.round = cp.meta.round;
  if (cp.state.embeddings.dim() != cp.meta.dim)
    throw compat_error(dir + ": embedding dimension disagrees with metadata");
  if (cp.state.has_semantics &&
      cp.state.semantics.dim() != cp.state.embeddings.dim())
    throw compat_error(dir + ": semantic and embedding dimensions disagree");
  return cp;
}

// ---------------------------------------------------------------------------
// Prepared-directory fingerprint (vocabulary compatibility).
// ---------------------------------------------------------------------------

/// Digest over the vocabulary files of a prepared directory. A checkpoint
/// records this at train time; evaluation recomputes and compares before
/// any scoring happens.
inline std::string prep_fingerprint(const std::string& prep_dir) {
  std::string acc;
  acc += digest_file(prep_dir + "/entities.tsv");
  acc += digest_file(prep_dir + "/relations.tsv");
  const std::string words = prep_dir + "/words.tsv";
  acc += std::filesystem::exists(words) ? digest_file(words) : std::string("-");
  return hex64(fnv1a64(acc));
}

inline void check_prep_compatibility(const checkpoint_meta& meta,
                                     const std::string& prep_dir) {
  const std::string current = prep_fingerprint(prep_dir);
  if (current != meta.prep_digest)
    throw compat_error("prepared directory " + prep_dir +
                       " does not match the checkpoint's recorded "
                       "vocabularies (fingerprint " +
                       current + " vs " + meta.prep_digest + ")");
}

// ---------------------------------------------------------------------------
// Run manifest.
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const train_config& c) {
  return nlohmann::json{{"dim", c.dim},
                        {"rate", c.rate},
                        {"margin", c.margin},
                        {"lambda", c.lambda},
                        {"mu", c.mu},
                        {"rounds", c.rounds},
                        {"mode", to_string(c.mode)},
                        {"seed", c.seed},
                        {"batch", c.batch},
                        {"rel_corrupt_frac", c.rel_corrupt_frac},
                        {"min_count", c.min_count}};
}

inline void write_manifest(const nlohmann::json& manifest,
                           const std::string& path) {
  auto out = open_output(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw io_error("failed writing manifest: " + path);
}

}  // namespace ssp
