// Command-line front end: prep / train / eval-link / eval-rel / eval-class /
// analyze. Progress goes to standard error; machine-readable results go to
// files and standard output. All randomness flows from the config seed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssp/common.hpp"
#include "ssp/evalsuite.hpp"
#include "ssp/kg_store.hpp"
#include "ssp/manifest.hpp"
#include "ssp/prepared.hpp"
#include "ssp/scoring.hpp"
#include "ssp/topic_semantics.hpp"
#include "ssp/trainer.hpp"

namespace {

using nlohmann::json;

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - since)
      .count();
}

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw ssp::io_error("file not found: " + path);
}

// ---------------------------------------------------------------------------
// prep
// ---------------------------------------------------------------------------

struct prep_args {
  std::string train_path, valid_path, test_path, desc_path, config_path, out_dir;
  bool stopwords = false;
};

int cmd_prep(const prep_args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  ssp::train_config cfg;
  if (!args.config_path.empty()) {
    require_file(args.config_path);
    cfg = ssp::parse_config_file(args.config_path);
    cfg.validate();
  }

  ssp::triple_store store;
  require_file(args.train_path);
  store.load_split(args.train_path, ssp::split_kind::train,
                   ssp::vocab_mode::build);
  if (!args.valid_path.empty()) {
    require_file(args.valid_path);
    store.load_split(args.valid_path, ssp::split_kind::valid,
                     ssp::vocab_mode::build);
  }
  if (!args.test_path.empty()) {
    require_file(args.test_path);
    store.load_split(args.test_path, ssp::split_kind::test,
                     ssp::vocab_mode::build);
  }
  store.finalize();

  std::optional<ssp::description_corpus> corpus;
  ssp::tokenizer_options tok;
  tok.strip_stopwords = args.stopwords;
  if (!args.desc_path.empty()) {
    require_file(args.desc_path);
    corpus = ssp::load_descriptions(args.desc_path, store, tok, cfg.min_count);
  }

  ssp::save_prepared(store, corpus ? &*corpus : nullptr, args.out_dir);

  json inputs;
  inputs[args.train_path] = ssp::digest_file(args.train_path);
  if (!args.valid_path.empty())
    inputs[args.valid_path] = ssp::digest_file(args.valid_path);
  if (!args.test_path.empty())
    inputs[args.test_path] = ssp::digest_file(args.test_path);
  if (!args.desc_path.empty())
    inputs[args.desc_path] = ssp::digest_file(args.desc_path);

  json manifest{{"command", "prep"},
                {"inputs", inputs},
                {"min_count", cfg.min_count},
                {"strip_stopwords", args.stopwords},
                {"fingerprint", ssp::prep_fingerprint(args.out_dir)},
                {"timings_ms", json{{"prep", elapsed_ms(t0)}}}};
  ssp::write_manifest(manifest, args.out_dir + "/prep_manifest.json");

  std::printf("entities\t%d\n", store.entities.size());
  std::printf("relations\t%d\n", store.relations.size());
  std::printf("train\t%zu\n", store.split(ssp::split_kind::train).size());
  std::printf("valid\t%zu\n", store.split(ssp::split_kind::valid).size());
  std::printf("test\t%zu\n", store.split(ssp::split_kind::test).size());
  if (corpus) {
    std::printf("words\t%d\n", corpus->words.size());
    std::printf("described\t%lld\n",
                static_cast<long long>(corpus->described_count()));
    std::printf("cells\t%lld\n", static_cast<long long>(corpus->cell_count()));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct train_args {
  std::string prep_dir, config_path, model, out_dir;
  std::optional<std::int64_t> seed_override;
  std::int32_t checkpoint_every = 500;
  bool norm_entities = false;
  std::int32_t early_stop_every = 0;  // 0 = disabled
  int workers = default_workers();
};

struct model_choice {
  ssp::model_kind kind;
  ssp::train_mode mode;
};

model_choice parse_model_flag(const std::string& model) {
  if (model == "transe")
    return {ssp::model_kind::transe, ssp::train_mode::standard};
  if (model == "ssp-std")
    return {ssp::model_kind::ssp, ssp::train_mode::standard};
  if (model == "ssp-joint")
    return {ssp::model_kind::ssp, ssp::train_mode::joint};
  throw ssp::config_error("unknown model flag: " + model);
}

int cmd_train(const train_args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  require_file(args.config_path);
  ssp::train_config cfg = ssp::parse_config_file(args.config_path);
  if (args.seed_override)
    cfg.seed = static_cast<std::uint64_t>(*args.seed_override);
  const model_choice choice = parse_model_flag(args.model);
  ssp::validate_for_model(cfg, choice.kind, choice.mode);

  ssp::prepared_data data = ssp::load_prepared(args.prep_dir);
  if (choice.kind == ssp::model_kind::ssp && !data.corpus)
    throw ssp::config_error(
        "the projection model needs descriptions, but the prepared "
        "directory has no corpus: " +
        args.prep_dir);
  if (args.early_stop_every > 0 &&
      data.store.split(ssp::split_kind::valid).empty())
    throw ssp::config_error("early stopping needs a nonempty valid split");

  const std::string config_hash = ssp::config_hash(cfg, choice.kind);
  const std::string prep_digest = ssp::prep_fingerprint(args.prep_dir);
  std::filesystem::create_directories(args.out_dir);

  std::vector<std::string> artifacts;
  auto meta_for = [&](const ssp::train_state& state) {
    ssp::checkpoint_meta meta;
    meta.round = state.round;
    meta.kind = choice.kind;
    meta.mode = cfg.mode;
    meta.dim = cfg.dim;
    meta.lambda = choice.kind == ssp::model_kind::ssp ? cfg.lambda : 0.0;
    meta.mu = cfg.mu;
    meta.seed = cfg.seed;
    meta.norm_entities = args.norm_entities;
    meta.config_hash = config_hash;
    meta.prep_digest = prep_digest;
    return meta;
  };

  double best_probe = -1.0;
  ssp::train_options options;
  options.checkpoint_every = args.checkpoint_every;
  options.norm_entities = args.norm_entities;
  options.on_checkpoint = [&](const ssp::train_state& state) {
    const std::string dir =
        args.out_dir + "/checkpoint_" + std::to_string(state.round);
    ssp::save_checkpoint(state, meta_for(state), dir);
    artifacts.push_back(dir);
    std::fprintf(stderr, "checkpoint written: %s\n", dir.c_str());
  };
  options.on_round = [&](std::int32_t round, const ssp::epoch_report& report) {
    if (round == 1 || round == cfg.rounds || round % 100 == 0)
      std::fprintf(stderr,
                   "round %d/%d  mean hinge %.6f  topic loss %.6f  skipped %lld\n",
                   round, cfg.rounds, report.mean_hinge,
                   report.topic_loss_value,
                   static_cast<long long>(report.negatives_skipped));
  };
  if (args.early_stop_every > 0) {
    options.should_stop = [&, probe_every = args.early_stop_every](
                              const ssp::train_state& state) {
      if (state.round % probe_every != 0) return false;
      const ssp::semantic_model* sem =
          state.has_semantics ? &state.semantics : nullptr;
      ssp::model_scorer scorer(
          state.embeddings, sem,
          ssp::score_params{choice.kind == ssp::model_kind::ssp ? cfg.lambda : 0.0},
          choice.kind);
      ssp::eval_options eval_opts;
      eval_opts.workers = args.workers;
      const ssp::eval_report report = ssp::link_prediction(
          scorer, data.store, ssp::split_kind::valid, eval_opts);
      const double probe = report.overall.hits10_filtered;
      std::fprintf(stderr, "early-stop probe at round %d: HITS@10 %.2f%%\n",
                   state.round, probe);
      const bool stop = probe <= best_probe;
      best_probe = std::max(best_probe, probe);
      return stop;
    };
  }

  const ssp::description_corpus* corpus = data.corpus ? &*data.corpus : nullptr;
  ssp::train_result result =
      ssp::train(data.store, corpus, cfg, choice.kind, options);

  ssp::save_trajectory(result.trajectory, args.out_dir + "/trajectory.csv");
  artifacts.push_back(args.out_dir + "/trajectory.csv");
  // Stable alias for the latest parameters, independent of the round count.
  const std::string final_dir = args.out_dir + "/checkpoint_final";
  ssp::save_checkpoint(result.state, meta_for(result.state), final_dir);
  artifacts.push_back(final_dir);

  if (result.negatives_skipped > 0)
    std::fprintf(stderr, "negatives skipped over the whole run: %lld\n",
                 static_cast<long long>(result.negatives_skipped));

  json manifest{{"command", "train"},
                {"model", ssp::to_string(choice.kind)},
                {"mode", ssp::to_string(cfg.mode)},
                {"config", ssp::config_to_json(cfg)},
                {"config_hash", config_hash},
                {"prep_dir", args.prep_dir},
                {"prep_digest", prep_digest},
                {"checkpoint_every", args.checkpoint_every},
                {"norm_entities", args.norm_entities},
                {"early_stop_every", args.early_stop_every},
                {"rounds_run", result.state.round},
                {"stopped_early", result.stopped_early},
                {"negatives_skipped", result.negatives_skipped},
                {"artifacts", artifacts},
                {"timings_ms", json{{"train", elapsed_ms(t0)}}}};
  ssp::write_manifest(manifest, args.out_dir + "/manifest.json");

  std::printf("trained %s for %d rounds; final mean hinge %s\n",
              args.model.c_str(), result.state.round,
              ssp::format_double(result.state.last_embed_loss).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// eval-link / eval-rel
// ---------------------------------------------------------------------------

struct eval_args {
  std::string checkpoint_dir, prep_dir, out_dir;
  std::string split = "test";
  std::string ties = "optimistic";
  int workers = default_workers();
};

ssp::split_kind parse_split_flag(const std::string& split) {
  if (split == "valid") return ssp::split_kind::valid;
  if (split == "test") return ssp::split_kind::test;
  throw ssp::config_error("split must be `valid` or `test`, got " + split);
}

ssp::tie_policy parse_ties_flag(const std::string& ties) {
  if (ties == "optimistic") return ssp::tie_policy::optimistic;
  if (ties == "pessimistic") return ssp::tie_policy::pessimistic;
  throw ssp::config_error("ties must be `optimistic` or `pessimistic`");
}

ssp::model_scorer make_scorer(const ssp::checkpoint& cp) {
  const ssp::semantic_model* sem =
      cp.state.has_semantics ? &cp.state.semantics : nullptr;
  return ssp::model_scorer(cp.state.embeddings, sem,
                           ssp::score_params{cp.meta.lambda}, cp.meta.kind);
}

int cmd_eval_rank(const eval_args& args, bool relation_target) {
  const auto t0 = std::chrono::steady_clock::now();
  const ssp::checkpoint cp = ssp::load_checkpoint(args.checkpoint_dir);
  ssp::check_prep_compatibility(cp.meta, args.prep_dir);
  const ssp::prepared_data data = ssp::load_prepared(args.prep_dir);
  if (data.store.entities.size() != cp.state.embeddings.entity_count() ||
      data.store.relations.size() != cp.state.embeddings.relation_count())
    throw ssp::compat_error("checkpoint and prepared vocabularies disagree");

  const ssp::model_scorer scorer = make_scorer(cp);
  ssp::eval_options options;
  options.workers = args.workers;
  options.ties = parse_ties_flag(args.ties);
  const ssp::split_kind split = parse_split_flag(args.split);

  const ssp::eval_report report =
      relation_target ? ssp::relation_prediction(scorer, data.store, split, options)
                      : ssp::link_prediction(scorer, data.store, split, options);

  std::filesystem::create_directories(args.out_dir);
  const std::string csv = args.out_dir + "/report.csv";
  ssp::write_report_csv(report, csv);
  ssp::print_report(report, stdout);

  json manifest{{"command", relation_target ? "eval-rel" : "eval-link"},
                {"checkpoint", args.checkpoint_dir},
                {"prep_dir", args.prep_dir},
                {"split", args.split},
                {"ties", args.ties},
                {"artifacts", json::array({csv})},
                {"timings_ms", json{{"eval", elapsed_ms(t0)}}}};
  ssp::write_manifest(manifest, args.out_dir + "/manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// eval-class
// ---------------------------------------------------------------------------

struct class_args {
  std::string checkpoint_dir, prep_dir, out_dir;
  std::string labels_train, labels_test, zero_shot_desc;
  int clf_epochs = 300;
  double clf_rate = 0.1;
  double clf_l2 = 1e-4;
  int fold_epochs = 200;
  double fold_rate = 0.003;
  bool stopwords = false;
};

int cmd_eval_class(const class_args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const ssp::checkpoint cp = ssp::load_checkpoint(args.checkpoint_dir);
  ssp::check_prep_compatibility(cp.meta, args.prep_dir);
  ssp::prepared_data data = ssp::load_prepared(args.prep_dir);
  if (data.store.entities.size() != cp.state.embeddings.entity_count())
    throw ssp::compat_error("checkpoint and prepared vocabularies disagree");

  // Zero-shot entities: registered in memory only, semantic vectors folded
  // in against the frozen word topics, embedding block zero.
  const std::int32_t trained_entities = cp.state.embeddings.entity_count();
  std::optional<ssp::description_corpus> zs_corpus;
  if (!args.zero_shot_desc.empty()) {
    require_file(args.zero_shot_desc);
    if (cp.meta.kind != ssp::model_kind::ssp)
      throw ssp::config_error(
          "zero-shot evaluation needs a semantic model; the baseline "
          "checkpoint has none");
    if (!data.corpus)
      throw ssp::config_error(
          "zero-shot evaluation needs the prepared word vocabulary, but "
          "the prepared directory has no corpus");
    ssp::tokenizer_options tok;
    tok.strip_stopwords = args.stopwords;
    zs_corpus = ssp::load_descriptions(args.zero_shot_desc, data.store, tok,
                                       /*min_count=*/0,
                                       /*register_new_entities=*/true,
                                       &data.corpus->words);
  }

  require_file(args.labels_train);
  require_file(args.labels_test);
  const ssp::typed_entity_set labels = ssp::load_typed_entities(
      args.labels_train, args.labels_test, data.store.entities);
  if (labels.test_labels.empty())
    throw ssp::input_error("no labeled test entities: " + args.labels_test);

  auto features_for = [&](std::int32_t entity) -> std::vector<double> {
    if (entity < trained_entities) return ssp::build_features(cp.state, entity);
    if (!zs_corpus || !zs_corpus->described(entity))
      throw ssp::feature_error("entity is unknown and undescribed: " +
                               data.store.entities.name(entity));
    const auto row = zs_corpus->row(entity);
    std::vector<double> sem;
    if (row.empty()) {
      sem = ssp::uniform_simplex(static_cast<std::size_t>(cp.meta.dim));
    } else {
      sem = ssp::fold_in(row, cp.state.semantics, args.fold_epochs,
                         args.fold_rate);
    }
    return ssp::build_features_zero_shot(sem);
  };

  auto assemble = [&](const ssp::labeled_entities& rows, ssp::matrix& X) {
    X = ssp::matrix(rows.size(), static_cast<std::size_t>(2 * cp.meta.dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto x = features_for(rows[i].first);
      std::copy(x.begin(), x.end(), X.row(i).begin());
    }
  };
  ssp::matrix x_train, x_test;
  assemble(labels.train_labels, x_train);
  assemble(labels.test_labels, x_test);

  const ssp::ovr_classifier clf = ssp::train_ovr_classifier(
      x_train, labels.train_labels, labels.types.size(), args.clf_epochs,
      args.clf_rate, args.clf_l2);
  for (std::int32_t k : clf.bias_only_classes)
    std::fprintf(stderr, "warning: class '%s' has no positive examples; scored by bias only\n",
                 labels.types.name(k).c_str());

  std::vector<std::vector<std::int32_t>> rankings(labels.test_labels.size());
  std::vector<std::vector<std::int32_t>> truths(labels.test_labels.size());
  for (std::size_t i = 0; i < labels.test_labels.size(); ++i) {
    rankings[i] = clf.ranking(x_test.row(i));
    truths[i] = labels.test_labels[i].second;
  }
  const ssp::map_result map = ssp::compute_map(rankings, truths);
  if (map.excluded_empty > 0)
    std::fprintf(stderr, "warning: %lld entities with empty type sets excluded\n",
                 static_cast<long long>(map.excluded_empty));

  std::filesystem::create_directories(args.out_dir);
  const std::string csv = args.out_dir + "/report.csv";
  {
    auto out = ssp::open_output(csv);
    out << "metric,target,setting,value\n";
    out << "map,combined,-," << ssp::format_double(map.map_percent) << '\n';
    out << "evaluated,combined,-," << map.evaluated << '\n';
    out << "excluded,combined,-," << map.excluded_empty << '\n';
  }

  json manifest{{"command", "eval-class"},
                {"checkpoint", args.checkpoint_dir},
                {"prep_dir", args.prep_dir},
                {"labels_train", args.labels_train},
                {"labels_test", args.labels_test},
                {"zero_shot_desc", args.zero_shot_desc},
                {"classes", labels.types.size()},
                {"clf_epochs", args.clf_epochs},
                {"clf_rate", args.clf_rate},
                {"clf_l2", args.clf_l2},
                {"fold_epochs", args.fold_epochs},
                {"fold_rate", args.fold_rate},
                {"artifacts", json::array({csv})},
                {"timings_ms", json{{"eval", elapsed_ms(t0)}}}};
  ssp::write_manifest(manifest, args.out_dir + "/manifest.json");

  std::printf("MAP %.4f over %lld entities (%lld excluded)\n", map.map_percent,
              static_cast<long long>(map.evaluated),
              static_cast<long long>(map.excluded_empty));
  return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct analyze_args {
  std::string analysis;  // rankpairs | scorediff
  std::string checkpoint_a, checkpoint_b, prep_dir, out_dir;
  std::string split = "test";
  std::string setting = "filtered";
  double bin_width = 0.5;
  std::vector<std::int64_t> thresholds_a = {500, 1000, 2000, 3000, 5000};
  std::int64_t threshold_b = 100;
  int workers = default_workers();
};

int cmd_analyze(const analyze_args& args) {
  const auto t0 = std::chrono::steady_clock::now();
  if (args.setting != "raw" && args.setting != "filtered")
    throw ssp::config_error("setting must be `raw` or `filtered`");
  const bool filtered = args.setting == "filtered";

  const ssp::checkpoint cp_a = ssp::load_checkpoint(args.checkpoint_a);
  const ssp::checkpoint cp_b = ssp::load_checkpoint(args.checkpoint_b);
  ssp::check_prep_compatibility(cp_a.meta, args.prep_dir);
  ssp::check_prep_compatibility(cp_b.meta, args.prep_dir);
  const ssp::prepared_data data = ssp::load_prepared(args.prep_dir);
  const ssp::split_kind split = parse_split_flag(args.split);
  if (data.store.split(split).empty())
    throw ssp::input_error("analysis split is empty");

  const ssp::model_scorer scorer_a = make_scorer(cp_a);
  const ssp::model_scorer scorer_b = make_scorer(cp_b);
  std::filesystem::create_directories(args.out_dir);
  json manifest{{"command", "analyze"},
                {"analysis", args.analysis},
                {"checkpoint_a", args.checkpoint_a},
                {"checkpoint_b", args.checkpoint_b},
                {"prep_dir", args.prep_dir},
                {"split", args.split},
                {"setting", args.setting}};
  std::vector<std::string> artifacts;

  if (args.analysis == "rankpairs") {
    ssp::eval_options options;
    options.workers = args.workers;
    const auto report_a =
        ssp::link_prediction(scorer_a, data.store, split, options);
    const auto report_b =
        ssp::link_prediction(scorer_b, data.store, split, options);
    const auto counts =
        ssp::rank_pair_statistics(report_a.results, report_b.results,
                                  args.thresholds_a, args.threshold_b, filtered);
    const std::string csv = args.out_dir + "/rankpairs.csv";
    {
      auto out = ssp::open_output(csv);
      out << "threshold_a,threshold_b,count\n";
      for (std::size_t m = 0; m < counts.size(); ++m)
        out << args.thresholds_a[m] << ',' << args.threshold_b << ','
            << counts[m] << '\n';
    }
    artifacts.push_back(csv);
    for (std::size_t m = 0; m < counts.size(); ++m)
      std::printf("rank_a>=%lld and rank_b<=%lld: %lld\n",
                  static_cast<long long>(args.thresholds_a[m]),
                  static_cast<long long>(args.threshold_b),
                  static_cast<long long>(counts[m]));
  } else if (args.analysis == "scorediff") {
    const auto pairs =
        ssp::select_hard_pairs(scorer_a, data.store, split, filtered);
    const auto result =
        ssp::score_difference_histogram(pairs, scorer_b, args.bin_width);
    const std::string csv = args.out_dir + "/scorediff.csv";
    ssp::write_histogram_csv(result, csv);
    artifacts.push_back(csv);
    std::printf("success_rate %.4f over %lld pairs\n", result.success_rate,
                static_cast<long long>(result.pairs));
  } else {
    throw ssp::config_error("analysis must be `rankpairs` or `scorediff`");
  }

  manifest["artifacts"] = artifacts;
  manifest["timings_ms"] = json{{"analyze", elapsed_ms(t0)}};
  ssp::write_manifest(manifest, args.out_dir + "/manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph embeddings with semantic hyperplane projection"};
  app.require_subcommand(1);

  prep_args prep;
  auto* prep_cmd = app.add_subcommand("prep", "ingest triples and descriptions");
  prep_cmd->add_option("--train", prep.train_path, "training triples (TSV)")
      ->required();
  prep_cmd->add_option("--valid", prep.valid_path, "validation triples (TSV)");
  prep_cmd->add_option("--test", prep.test_path, "test triples (TSV)");
  prep_cmd->add_option("--desc", prep.desc_path, "entity descriptions (TSV)");
  prep_cmd->add_option("--config", prep.config_path,
                       "config file (for min_count)");
  prep_cmd->add_option("--out", prep.out_dir, "output directory")->required();
  prep_cmd->add_flag("--stopwords", prep.stopwords, "strip English stop words");

  train_args train;
  std::int64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--prep", train.prep_dir, "prepared directory")
      ->required();
  train_cmd->add_option("--config", train.config_path, "config file")
      ->required();
  train_cmd
      ->add_option("--model", train.model, "transe | ssp-std | ssp-joint")
      ->required();
  train_cmd->add_option("--out", train.out_dir, "output directory")->required();
  auto* seed_opt = train_cmd->add_option("--seed", train_seed,
                                         "override the config seed");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every,
                        "rounds between checkpoints");
  train_cmd->add_flag("--norm-entities", train.norm_entities,
                      "project entity vectors into the unit ball after steps");
  train_cmd->add_option("--early-stop-every", train.early_stop_every,
                        "probe valid HITS@10 every K rounds; stop when flat");
  train_cmd->add_option("--workers", train.workers,
                        "threads for early-stop probes");

  eval_args elink;
  auto* elink_cmd = app.add_subcommand("eval-link", "entity link prediction");
  eval_args erel;
  auto* erel_cmd = app.add_subcommand("eval-rel", "relation prediction");
  for (auto [cmd, args] : {std::pair{elink_cmd, &elink}, {erel_cmd, &erel}}) {
    cmd->add_option("--checkpoint", args->checkpoint_dir, "checkpoint directory")
        ->required();
    cmd->add_option("--prep", args->prep_dir, "prepared directory")->required();
    cmd->add_option("--out", args->out_dir, "output directory")->required();
    cmd->add_option("--split", args->split, "valid | test");
    cmd->add_option("--ties", args->ties, "optimistic | pessimistic");
    cmd->add_option("--workers", args->workers, "ranking threads");
  }

  class_args eclass;
  auto* eclass_cmd = app.add_subcommand("eval-class", "entity classification");
  eclass_cmd
      ->add_option("--checkpoint", eclass.checkpoint_dir, "checkpoint directory")
      ->required();
  eclass_cmd->add_option("--prep", eclass.prep_dir, "prepared directory")
      ->required();
  eclass_cmd->add_option("--labels-train", eclass.labels_train,
                         "training type labels (TSV)")
      ->required();
  eclass_cmd->add_option("--labels-test", eclass.labels_test,
                         "test type labels (TSV)")
      ->required();
  eclass_cmd->add_option("--zero-shot-desc", eclass.zero_shot_desc,
                         "descriptions of entities outside the training KG");
  eclass_cmd->add_option("--out", eclass.out_dir, "output directory")
      ->required();
  eclass_cmd->add_option("--clf-epochs", eclass.clf_epochs, "classifier epochs");
  eclass_cmd->add_option("--clf-rate", eclass.clf_rate, "classifier step size");
  eclass_cmd->add_option("--clf-l2", eclass.clf_l2, "classifier L2 penalty");
  eclass_cmd->add_option("--fold-epochs", eclass.fold_epochs, "fold-in epochs");
  eclass_cmd->add_option("--fold-rate", eclass.fold_rate, "fold-in step size");
  eclass_cmd->add_flag("--stopwords", eclass.stopwords,
                       "strip English stop words in zero-shot descriptions");

  analyze_args analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "model comparison analyses");
  analyze_cmd
      ->add_option("--analysis", analyze.analysis, "rankpairs | scorediff")
      ->required();
  analyze_cmd
      ->add_option("--checkpoint-a", analyze.checkpoint_a,
                   "baseline checkpoint")
      ->required();
  analyze_cmd
      ->add_option("--checkpoint-b", analyze.checkpoint_b,
                   "comparison checkpoint")
      ->required();
  analyze_cmd->add_option("--prep", analyze.prep_dir, "prepared directory")
      ->required();
  analyze_cmd->add_option("--out", analyze.out_dir, "output directory")
      ->required();
  analyze_cmd->add_option("--split", analyze.split, "valid | test");
  analyze_cmd->add_option("--setting", analyze.setting, "raw | filtered");
  analyze_cmd->add_option("--bin-width", analyze.bin_width,
                          "histogram bin width");
  analyze_cmd->add_option("--thresholds", analyze.thresholds_a,
                          "rank thresholds for model A");
  analyze_cmd->add_option("--threshold-b", analyze.threshold_b,
                          "rank threshold for model B");
  analyze_cmd->add_option("--workers", analyze.workers, "ranking threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep_cmd) return cmd_prep(prep);
    if (*train_cmd) {
      if (*seed_opt) train.seed_override = train_seed;
      return cmd_train(train);
    }
    if (*elink_cmd) return cmd_eval_rank(elink, /*relation_target=*/false);
    if (*erel_cmd) return cmd_eval_rank(erel, /*relation_target=*/true);
    if (*eclass_cmd) return cmd_eval_class(eclass);
    if (*analyze_cmd) return cmd_analyze(analyze);
  } catch (const ssp::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
