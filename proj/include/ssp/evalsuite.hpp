#pragma once

// Evaluation: link prediction (entity and relation targets) under the raw
// and filtered ranking protocols, multi-label entity classification with
// MAP (including the zero-shot description-only path), and two model
// comparison analyses (rank-pair counts and hard-pair score differences).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/kg_store.hpp"
#include "ssp/scoring.hpp"
#include "ssp/trainer.hpp"

namespace ssp {

// ---------------------------------------------------------------------------
// Read-only scorer over trained parameters.
// ---------------------------------------------------------------------------

class model_scorer {
 public:
  model_scorer(const embedding_table& embeddings, const semantic_model* semantics,
               score_params params, model_kind kind)
      : embeddings_(embeddings),
        semantics_(semantics),
        params_(params),
        kind_(kind) {
    params_.validate();
    if (kind_ == model_kind::ssp) {
      if (semantics_ == nullptr || semantics_->empty())
        throw contract_error("projection scorer needs a semantic model");
      if (semantics_->dim() != embeddings_.dim() ||
          semantics_->entity_count() < embeddings_.entity_count())
        throw shape_error("semantic model does not cover the embedding table");
    }
  }

  std::int32_t entity_count() const { return embeddings_.entity_count(); }
  std::int32_t relation_count() const { return embeddings_.relation_count(); }
  model_kind kind() const { return kind_; }

  /// Score of an arbitrary triple; smaller = more plausible. Thread-safe.
  double score(const triple& t) const {
    const auto d = static_cast<std::size_t>(embeddings_.dim());
    thread_local std::vector<double> e, s;
    e.resize(d);
    loss_vector_into(embeddings_.entity_vecs.row(static_cast<std::size_t>(t.head)),
                     embeddings_.relation_vecs.row(static_cast<std::size_t>(t.rel)),
                     embeddings_.entity_vecs.row(static_cast<std::size_t>(t.tail)),
                     e);
    if (kind_ == model_kind::transe) return sq_norm(e);

    const auto s_h = semantics_->entity_sem.row(static_cast<std::size_t>(t.head));
    const auto s_t = semantics_->entity_sem.row(static_cast<std::size_t>(t.tail));
    s.resize(d);
    double u_norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = s_h[i] + s_t[i];
      u_norm += s[i] * s[i];
    }
    u_norm = std::sqrt(u_norm);
    if (u_norm > 0.0) {
      for (double& v : s) v /= u_norm;
    } else {
      const double uniform = 1.0 / std::sqrt(static_cast<double>(d));
      for (double& v : s) v = uniform;
    }
    return detail::ssp_score_core(e, s, params_.lambda);
  }

 private:
  const embedding_table& embeddings_;
  const semantic_model* semantics_;
  score_params params_;
  model_kind kind_;
};

// ---------------------------------------------------------------------------
// Ranking.
// ---------------------------------------------------------------------------

enum class rank_target { head, tail, relation };
enum class tie_policy { optimistic, pessimistic };

inline const char* to_string(rank_target t) {
  switch (t) {
    case rank_target::head: return "head";
    case rank_target::tail: return "tail";
    default: return "relation";
  }
}

struct rank_result {
  triple query;
  rank_target target = rank_target::tail;
  std::int64_t raw_rank = 0;
  std::int64_t filtered_rank = 0;
};

/// Ranks the golden completion among all candidate substitutions of the
/// target slot. Optimistic rank = 1 + #(strictly smaller score); the
/// pessimistic variant additionally counts non-golden ties. The filtered
/// rank drops candidates (other than the golden one) present in the filter
/// index.
inline rank_result rank_triple(const model_scorer& scorer,
                               const triple_store& store, const triple& t,
                               rank_target target,
                               tie_policy ties = tie_policy::optimistic) {
  const double golden = scorer.score(t);
  const std::int32_t candidates = target == rank_target::relation
                                      ? scorer.relation_count()
                                      : scorer.entity_count();
  const std::int32_t golden_id = target == rank_target::head  ? t.head
                                 : target == rank_target::tail ? t.tail
                                                               : t.rel;
  std::int64_t raw_better = 0, raw_ties = 0;
  std::int64_t filt_better = 0, filt_ties = 0;
  triple cand = t;
  for (std::int32_t c = 0; c < candidates; ++c) {
    if (c == golden_id) continue;
    switch (target) {
      case rank_target::head: cand.head = c; break;
      case rank_target::tail: cand.tail = c; break;
      case rank_target::relation: cand.rel = c; break;
    }
    const double sc = scorer.score(cand);
    const bool better = sc < golden;
    const bool tie = sc == golden;
    if (!better && !tie) continue;
    raw_better += better;
    raw_ties += tie;
    if (!store.in_filter(cand)) {
      filt_better += better;
      filt_ties += tie;
    }
  }
  rank_result out;
  out.query = t;
  out.target = target;
  const std::int64_t tie_bump_raw = ties == tie_policy::pessimistic ? raw_ties : 0;
  const std::int64_t tie_bump_filt = ties == tie_policy::pessimistic ? filt_ties : 0;
  out.raw_rank = 1 + raw_better + tie_bump_raw;
  out.filtered_rank = 1 + filt_better + tie_bump_filt;
  return out;
}

// ---------------------------------------------------------------------------
// Report aggregation.
// ---------------------------------------------------------------------------

struct metric_block {
  double mean_rank_raw = 0.0;
  double mean_rank_filtered = 0.0;
  double hits10_raw = 0.0;      // percentage
  double hits10_filtered = 0.0; // percentage
  std::int64_t count = 0;
};

struct eval_report {
  metric_block overall;
  std::vector<std::pair<rank_target, metric_block>> by_target;
  std::vector<rank_result> results;
};

namespace detail {
inline metric_block aggregate_block(const std::vector<rank_result>& results,
                                    const rank_target* only) {
  metric_block b;
  std::int64_t sum_raw = 0, sum_filt = 0, hit_raw = 0, hit_filt = 0;
  for (const auto& r : results) {
    if (only != nullptr && r.target != *only) continue;
    ++b.count;
    sum_raw += r.raw_rank;
    sum_filt += r.filtered_rank;
    hit_raw += r.raw_rank <= 10;
    hit_filt += r.filtered_rank <= 10;
  }
  if (b.count > 0) {
    const auto n = static_cast<double>(b.count);
    b.mean_rank_raw = static_cast<double>(sum_raw) / n;
    b.mean_rank_filtered = static_cast<double>(sum_filt) / n;
    b.hits10_raw = 100.0 * static_cast<double>(hit_raw) / n;
    b.hits10_filtered = 100.0 * static_cast<double>(hit_filt) / n;
  }
  return b;
}
}  // namespace detail

/// Builds the pooled and per-target metric blocks from raw rank results.
inline eval_report aggregate_results(std::vector<rank_result> results,
                                     const std::vector<rank_target>& targets) {
  eval_report report;
  report.overall = detail::aggregate_block(results, nullptr);
  for (rank_target t : targets)
    report.by_target.emplace_back(t, detail::aggregate_block(results, &t));
  report.results = std::move(results);
  return report;
}

struct eval_options {
  int workers = 1;
  tie_policy ties = tie_policy::optimistic;
};

namespace detail {
/// Fills `results` by running `job(i)` for i in [0, n) across workers.
/// Output position is derived from i, so scheduling cannot change results.
template <typename Job>
inline void parallel_for(std::int64_t n, int workers, Job&& job) {
  if (workers <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto run = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      job(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::int64_t>(workers, n));
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}
}  // namespace detail

/// Head and tail ranking over a split; reports raw and filtered Mean Rank
/// and HITS@10, pooled and per target.
inline eval_report link_prediction(const model_scorer& scorer,
                                   const triple_store& store, split_kind split,
                                   const eval_options& options = {}) {
  const auto& triples = store.split(split);
  if (triples.empty()) throw config_error("evaluation split is empty");
  std::vector<rank_result> results(triples.size() * 2);
  detail::parallel_for(
      static_cast<std::int64_t>(triples.size()), options.workers,
      [&](std::int64_t i) {
        const triple& t = triples[static_cast<std::size_t>(i)];
        results[2 * static_cast<std::size_t>(i)] =
            rank_triple(scorer, store, t, rank_target::head, options.ties);
        results[2 * static_cast<std::size_t>(i) + 1] =
            rank_triple(scorer, store, t, rank_target::tail, options.ties);
      });
  return aggregate_results(std::move(results),
                           {rank_target::head, rank_target::tail});
}

/// Relation ranking over a split.
inline eval_report relation_prediction(const model_scorer& scorer,
                                       const triple_store& store,
                                       split_kind split,
                                       const eval_options& options = {}) {
  const auto& triples = store.split(split);
  if (triples.empty()) throw config_error("evaluation split is empty");
  std::vector<rank_result> results(triples.size());
  detail::parallel_for(static_cast<std::int64_t>(triples.size()),
                       options.workers, [&](std::int64_t i) {
                         results[static_cast<std::size_t>(i)] = rank_triple(
                             scorer, store, triples[static_cast<std::size_t>(i)],
                             rank_target::relation, options.ties);
                       });
  return aggregate_results(std::move(results), {rank_target::relation});
}

/// Machine-readable report: `metric,target,setting,value` rows.
inline void write_report_csv(const eval_report& report, const std::string& path) {
  auto out = open_output(path);
  out << "metric,target,setting,value\n";
  auto emit = [&](const std::string& target, const metric_block& b) {
    out << "mean_rank," << target << ",raw," << format_double(b.mean_rank_raw) << '\n';
    out << "mean_rank," << target << ",filtered," << format_double(b.mean_rank_filtered) << '\n';
    out << "hits10," << target << ",raw," << format_double(b.hits10_raw) << '\n';
    out << "hits10," << target << ",filtered," << format_double(b.hits10_filtered) << '\n';
  };
  emit("combined", report.overall);
  for (const auto& [target, block] : report.by_target)
    emit(to_string(target), block);
  if (!out) throw io_error("failed writing report: " + path);
}

inline void print_report(const eval_report& report, std::FILE* out) {
  std::fprintf(out, "%-10s %10s %14s %10s %14s %8s\n", "target", "MR(raw)",
               "MR(filtered)", "H@10(raw)", "H@10(filtered)", "queries");
  auto line = [&](const char* name, const metric_block& b) {
    std::fprintf(out, "%-10s %10.2f %14.2f %9.2f%% %13.2f%% %8lld\n", name,
                 b.mean_rank_raw, b.mean_rank_filtered, b.hits10_raw,
                 b.hits10_filtered, static_cast<long long>(b.count));
  };
  line("combined", report.overall);
  for (const auto& [target, block] : report.by_target)
    line(to_string(target), block);
}

// ---------------------------------------------------------------------------
// Entity classification.
// ---------------------------------------------------------------------------

/// Multi-label type assignments: (entity id, nonempty sorted type ids).
using labeled_entities =
    std::vector<std::pair<std::int32_t, std::vector<std::int32_t>>>;

struct typed_entity_set {
  vocab types;
  labeled_entities train_labels;
  labeled_entities test_labels;
};

/// Parses one `entity<TAB>type1,type2,...` file against a frozen entity
/// vocabulary, growing the shared type vocabulary.
inline labeled_entities load_label_file(const std::string& path,
                                        const vocab& entities, vocab& types) {
  auto in = open_input(path);
  labeled_entities out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path + ":" + std::to_string(line_no);
    const auto fields = split(std::string_view(line), '\t');
    if (fields.size() != 2)
      throw parse_error(where + ": expected `entity<TAB>type1,type2,...`");
    const auto id = entities.find(fields[0]);
    if (!id)
      throw vocab_error(where + ": unknown entity '" + std::string(fields[0]) + "'");
    std::vector<std::int32_t> ts;
    for (const auto& piece : split(fields[1], ',')) {
      const auto name = trim(piece);
      if (name.empty()) throw parse_error(where + ": empty type name");
      ts.push_back(types.add(name));
    }
    if (ts.empty()) throw parse_error(where + ": entity must have >= 1 type");
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    out.emplace_back(*id, std::move(ts));
  }
  return out;
}

inline typed_entity_set load_typed_entities(const std::string& train_path,
                                            const std::string& test_path,
                                            const vocab& entities) {
  typed_entity_set set;
  set.train_labels = load_label_file(train_path, entities, set.types);
  set.test_labels = load_label_file(test_path, entities, set.types);
  return set;
}

/// Concatenated (semantic vector, embedding vector) features for an entity
/// covered by the trained state. Models without a semantic part contribute
/// a zero semantic block.
inline std::vector<double> build_features(const train_state& state,
                                          std::int32_t entity) {
  const auto d = static_cast<std::size_t>(state.embeddings.dim());
  if (entity < 0 || entity >= state.embeddings.entity_count())
    throw feature_error("entity has no trained representation: " +
                        std::to_string(entity));
  std::vector<double> x(2 * d, 0.0);
  if (state.has_semantics) {
    const auto s = state.semantics.entity_sem.row(static_cast<std::size_t>(entity));
    std::copy(s.begin(), s.end(), x.begin());
  }
  const auto e = state.embeddings.entity_vecs.row(static_cast<std::size_t>(entity));
  std::copy(e.begin(), e.end(), x.begin() + static_cast<std::ptrdiff_t>(d));
  return x;
}

/// Zero-shot features: fold-in semantic vector plus a zero embedding block.
inline std::vector<double> build_features_zero_shot(
    std::span<const double> folded_sem) {
  std::vector<double> x(2 * folded_sem.size(), 0.0);
  std::copy(folded_sem.begin(), folded_sem.end(), x.begin());
  return x;
}

// ---------------------------------------------------------------------------
// One-vs-rest logistic regression.
// ---------------------------------------------------------------------------

class ovr_classifier {
 public:
  matrix weights;             // K x D
  std::vector<double> bias;   // K
  std::vector<std::int32_t> bias_only_classes;  // classes with no positives

  ovr_classifier() = default;
  ovr_classifier(std::int32_t classes, std::int32_t feature_dim)
      : weights(static_cast<std::size_t>(classes),
                static_cast<std::size_t>(feature_dim)),
        bias(static_cast<std::size_t>(classes), 0.0) {}

  std::int32_t classes() const { return static_cast<std::int32_t>(bias.size()); }

  /// Per-class probabilities σ(w_k·x + b_k); used only for ranking classes.
  std::vector<double> scores(std::span<const double> x) const {
    if (x.size() != weights.cols())
      throw shape_error("feature dimension mismatch in classifier");
    std::vector<double> out(bias.size());
    for (std::size_t k = 0; k < bias.size(); ++k)
      out[k] = sigmoid(dot(weights.row(k), x) + bias[k]);
    return out;
  }

  /// Class ids ordered by descending probability; ties break toward the
  /// smaller class id for determinism.
  std::vector<std::int32_t> ranking(std::span<const double> x) const {
    const auto sc = scores(x);
    std::vector<std::int32_t> order(sc.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int32_t a, std::int32_t b) {
                       return sc[static_cast<std::size_t>(a)] >
                              sc[static_cast<std::size_t>(b)];
                     });
    return order;
  }

  static double sigmoid(double z) {
    // Split by sign to avoid overflow in exp.
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
  }
};

/// Trains K independent binary logistic regressors by full-batch gradient
/// descent on mean log-loss with L2 penalty on the weights (not the bias).
/// Classes with zero positive examples keep zero weights and train the bias
/// only (reported in bias_only_classes).
inline ovr_classifier train_ovr_classifier(
    const matrix& features, const labeled_entities& rows_labels,
    std::int32_t classes, int epochs, double rate, double l2 = 0.0) {
  if (features.rows() != rows_labels.size())
    throw input_error("feature rows and label rows differ in count");
  if (features.rows() == 0) throw input_error("no training examples");
  if (classes < 1) throw config_error("classifier needs >= 1 class");
  if (epochs < 0 || !(rate > 0.0) || l2 < 0.0)
    throw config_error("invalid classifier hyperparameters");

  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  const auto kK = static_cast<std::size_t>(classes);

  // Dense 0/1 label matrix and per-class positive counts.
  std::vector<char> y(n * kK, 0);
  std::vector<std::int64_t> positives(kK, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::int32_t t : rows_labels[i].second) {
      if (t < 0 || t >= classes) throw input_error("type id out of range");
      y[i * kK + static_cast<std::size_t>(t)] = 1;
      ++positives[static_cast<std::size_t>(t)];
    }

  ovr_classifier clf(classes, static_cast<std::int32_t>(d));
  for (std::size_t k = 0; k < kK; ++k)
    if (positives[k] == 0)
      clf.bias_only_classes.push_back(static_cast<std::int32_t>(k));

  std::vector<double> grad_w(d);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t k = 0; k < kK; ++k) {
      const bool bias_only = positives[k] == 0;
      auto w = clf.weights.row(k);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = features.row(i);
        const double p = ovr_classifier::sigmoid(dot(w, x) + clf.bias[k]);
        const double err = p - static_cast<double>(y[i * kK + k]);
        grad_b += err;
        if (!bias_only)
          for (std::size_t j = 0; j < d; ++j) grad_w[j] += err * x[j];
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      clf.bias[k] -= rate * grad_b * inv_n;
      if (!bias_only)
        for (std::size_t j = 0; j < d; ++j)
          w[j] -= rate * (grad_w[j] * inv_n + l2 * w[j]);
    }
  }
  return clf;
}

// ---------------------------------------------------------------------------
// Mean average precision.
// ---------------------------------------------------------------------------

struct map_result {
  double map_percent = 0.0;
  std::int64_t evaluated = 0;
  std::int64_t excluded_empty = 0;
};

/// MAP over per-entity class rankings: AP = mean over an entity's true types
/// of (true types at or above that rank) / rank; MAP = mean AP × 100.
/// Entities with empty true sets are excluded (counted for warnings).
inline map_result compute_map(
    const std::vector<std::vector<std::int32_t>>& rankings,
    const std::vector<std::vector<std::int32_t>>& true_types) {
  if (rankings.size() != true_types.size())
    throw input_error("rankings and label sets differ in count");
  map_result out;
  double ap_sum = 0.0;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto& ranking = rankings[i];
    const auto& truth = true_types[i];
    if (truth.empty()) {
      ++out.excluded_empty;
      continue;
    }
    // Validate the ranking is a total order over the class ids it contains.
    std::vector<char> seen(ranking.size(), 0);
    for (std::int32_t c : ranking) {
      if (c < 0 || static_cast<std::size_t>(c) >= ranking.size() ||
          seen[static_cast<std::size_t>(c)])
        throw input_error("prediction is not a total order over classes");
      seen[static_cast<std::size_t>(c)] = 1;
    }
    std::vector<char> is_true(ranking.size(), 0);
    for (std::int32_t t : truth) {
      if (t < 0 || static_cast<std::size_t>(t) >= ranking.size())
        throw input_error("true type id outside the ranked class set");
      is_true[static_cast<std::size_t>(t)] = 1;
    }
    std::int64_t hits = 0;
    double ap = 0.0;
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
      if (is_true[static_cast<std::size_t>(ranking[pos])]) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(pos + 1);
      }
    }
    ap_sum += ap / static_cast<double>(hits);
    ++out.evaluated;
  }
  if (out.evaluated == 0)
    throw input_error("no labeled entities to evaluate");
  out.map_percent = 100.0 * ap_sum / static_cast<double>(out.evaluated);
  return out;
}

// ---------------------------------------------------------------------------
// Rank-pair statistics (model A's hard queries that model B resolves).
// ---------------------------------------------------------------------------

/// counts[m] = #queries with rank_A >= thresholds_a[m] and rank_B <= threshold_b.
/// Both result lists must cover identical queries in identical order.
inline std::vector<std::int64_t> rank_pair_statistics(
    const std::vector<rank_result>& report_a,
    const std::vector<rank_result>& report_b,
    const std::vector<std::int64_t>& thresholds_a, std::int64_t threshold_b,
    bool filtered = true) {
  if (report_a.size() != report_b.size())
    throw input_error("rank reports cover different query counts");
  for (std::size_t i = 0; i < report_a.size(); ++i)
    if (!(report_a[i].query == report_b[i].query) ||
        report_a[i].target != report_b[i].target)
      throw input_error("rank reports cover different queries");
  std::vector<std::int64_t> counts(thresholds_a.size(), 0);
  for (std::size_t i = 0; i < report_a.size(); ++i) {
    const std::int64_t ra =
        filtered ? report_a[i].filtered_rank : report_a[i].raw_rank;
    const std::int64_t rb =
        filtered ? report_b[i].filtered_rank : report_b[i].raw_rank;
    if (rb > threshold_b) continue;
    for (std::size_t m = 0; m < thresholds_a.size(); ++m)
      counts[m] += ra >= thresholds_a[m];
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Hard-pair score differences.
// ---------------------------------------------------------------------------

struct score_pair {
  triple golden;
  triple negative;
};

/// For each split triple, finds the corruption (head or tail slot) the
/// baseline rates no worse than the golden triple and closest to it — the
/// negative with the largest baseline score still <= the golden score
/// ("ranked immediately above"). Triples with no such corruption are
/// skipped. Under the filtered setting corruptions in the filter index are
/// not considered.
inline std::vector<score_pair> select_hard_pairs(const model_scorer& baseline,
                                                 const triple_store& store,
                                                 split_kind split,
                                                 bool filtered = true) {
  std::vector<score_pair> pairs;
  for (const triple& t : store.split(split)) {
    const double golden = baseline.score(t);
    bool found = false;
    double best = 0.0;
    triple best_neg;
    auto consider = [&](const triple& cand) {
      if (filtered && store.in_filter(cand)) return;
      const double sc = baseline.score(cand);
      if (sc > golden) return;
      if (!found || sc > best) {
        found = true;
        best = sc;
        best_neg = cand;
      }
    };
    triple cand = t;
    for (std::int32_t c = 0; c < baseline.entity_count(); ++c) {
      if (c != t.head) {
        cand = t;
        cand.head = c;
        consider(cand);
      }
      if (c != t.tail) {
        cand = t;
        cand.tail = c;
        consider(cand);
      }
    }
    if (found) pairs.push_back({t, best_neg});
  }
  return pairs;
}

struct histogram_bin {
  double left = 0.0;
  double right = 0.0;
  std::int64_t count = 0;
};

struct scorediff_result {
  std::vector<histogram_bin> bins;
  double success_rate = 0.0;  // fraction with f(negative) - f(golden) > 0
  std::int64_t pairs = 0;
};

/// Score differences f(negative) − f(golden) under `scorer`, binned at the
/// given width. A pair succeeds when the difference is strictly positive
/// (the model separates the pair the baseline could not); ties count as
/// failures.
inline scorediff_result score_difference_histogram(
    const std::vector<score_pair>& pairs, const model_scorer& scorer,
    double bin_width = 0.5) {
  if (pairs.empty()) throw input_error("no score pairs to analyze");
  if (!(bin_width > 0.0)) throw config_error("bin width must be > 0");
  std::map<std::int64_t, std::int64_t> binned;
  std::int64_t successes = 0;
  for (const auto& p : pairs) {
    const double diff = scorer.score(p.negative) - scorer.score(p.golden);
    successes += diff > 0.0;
    const auto bin = static_cast<std::int64_t>(std::floor(diff / bin_width));
    ++binned[bin];
  }
  scorediff_result out;
  out.pairs = static_cast<std::int64_t>(pairs.size());
  out.success_rate =
      static_cast<double>(successes) / static_cast<double>(pairs.size());
  for (const auto& [bin, count] : binned)
    out.bins.push_back({static_cast<double>(bin) * bin_width,
                        static_cast<double>(bin + 1) * bin_width, count});
  return out;
}

/// Histogram CSV: `bin_left,bin_right,count`.
inline void write_histogram_csv(const scorediff_result& result,
                                const std::string& path) {
  auto out = open_output(path);
  out << "bin_left,bin_right,count\n";
  for (const auto& b : result.bins)
    out << format_double(b.left) << ',' << format_double(b.right) << ','
        << b.count << '\n';
  if (!out) throw io_error("failed writing histogram: " + path);
}

}  // namespace ssp
