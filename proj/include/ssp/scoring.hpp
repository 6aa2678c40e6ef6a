#pragma once

// Score functions and their gradients. The loss vector of a triple is
// e = h + r - t; the plain translation score is ‖e‖₂² and the projection
// score discounts the part of e lying inside the semantic hyperplane with
// unit normal s:  f = −λ‖e − (sᵀe)s‖₂² + ‖e‖₂².  Smaller means more
// plausible throughout.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/topic_semantics.hpp"

namespace ssp {

struct score_params {
  double lambda = 0.2;  // balance factor, 0 <= lambda < 1

  void validate() const {
    if (!(lambda >= 0.0 && lambda < 1.0))
      throw config_error("lambda must satisfy 0 <= lambda < 1");
  }
};

enum class train_mode { standard, joint };
enum class model_kind { transe, ssp };

// ---------------------------------------------------------------------------
// Core vector ops.
// ---------------------------------------------------------------------------

inline void loss_vector_into(std::span<const double> h,
                             std::span<const double> r,
                             std::span<const double> t, std::span<double> out) {
  if (h.size() != r.size() || h.size() != t.size() || h.size() != out.size())
    throw shape_error("loss_vector: dimension mismatch");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h[i] + r[i] - t[i];
}

/// e = h + r − t.
inline std::vector<double> loss_vector(std::span<const double> h,
                                       std::span<const double> r,
                                       std::span<const double> t) {
  std::vector<double> out(h.size());
  loss_vector_into(h, r, t, out);
  return out;
}

namespace detail {
inline void check_unit(std::span<const double> s) {
  if (std::fabs(norm(s) - 1.0) > 1e-9)
    throw contract_error("hyperplane normal must be a unit vector");
}
}  // namespace detail

/// e − (sᵀe)·s, the component of e inside the hyperplane with unit normal s.
inline std::vector<double> project_onto_hyperplane(std::span<const double> e,
                                                   std::span<const double> s) {
  if (e.size() != s.size())
    throw shape_error("projection: dimension mismatch");
  detail::check_unit(s);
  const double along = dot(s, e);
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = e[i] - along * s[i];
  return out;
}

// ---------------------------------------------------------------------------
// Scores.
// ---------------------------------------------------------------------------

/// ‖h + r − t‖₂².
inline double transe_score(std::span<const double> h, std::span<const double> r,
                           std::span<const double> t) {
  std::vector<double> e(h.size());
  loss_vector_into(h, r, t, e);
  return sq_norm(e);
}

namespace detail {
/// Score from a precomputed loss vector and unit normal (no contract check).
inline double ssp_score_core(std::span<const double> e,
                             std::span<const double> s, double lambda) {
  const double along = dot(s, e);
  double in_plane = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double p = e[i] - along * s[i];
    in_plane += p * p;
  }
  return -lambda * in_plane + sq_norm(e);
}
}  // namespace detail

/// −λ‖e − (sᵀe)s‖₂² + ‖e‖₂² with e = h + r − t and unit normal s.
/// With λ = 0 this equals transe_score exactly (identical arithmetic order).
inline double ssp_score(std::span<const double> h, std::span<const double> r,
                        std::span<const double> t, std::span<const double> s,
                        const score_params& params) {
  params.validate();
  if (h.size() != s.size())
    throw shape_error("ssp_score: dimension mismatch");
  detail::check_unit(s);
  std::vector<double> e(h.size());
  loss_vector_into(h, r, t, e);
  return detail::ssp_score_core(e, s, params.lambda);
}

// ---------------------------------------------------------------------------
// Gradients.
// ---------------------------------------------------------------------------

/// Analytic partial derivatives of the projection score. The semantic
/// gradients flow through the normalization s = (s_h+s_t)/‖s_h+s_t‖ in
/// joint mode and are identically zero in standard mode. When both
/// semantic inputs are all-zero the uniform unit normal is substituted
/// (a constant, so semantic gradients are zero in every mode).
struct ssp_gradient_result {
  double score = 0.0;
  std::vector<double> d_head, d_rel, d_tail;   // d_rel == d_head, d_tail == -d_head
  std::vector<double> d_sem_head, d_sem_tail;  // zero in standard mode
};

inline ssp_gradient_result ssp_gradients(
    std::span<const double> h, std::span<const double> r,
    std::span<const double> t, std::span<const double> s_h,
    std::span<const double> s_t, const score_params& params, train_mode mode) {
  params.validate();
  if (s_h.size() != h.size() || s_t.size() != h.size())
    throw shape_error("ssp_gradients: dimension mismatch");
  const std::size_t d = h.size();

  ssp_gradient_result out;
  std::vector<double> e(d);
  loss_vector_into(h, r, t, e);
  if (!all_finite(e) || !all_finite(s_h) || !all_finite(s_t))
    throw training_error("non-finite input to gradient computation");

  // u = s_h + s_t; s = u / ‖u‖, falling back to the uniform unit normal
  // when u is (numerically) zero.
  std::vector<double> s(d);
  double u_norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    s[i] = s_h[i] + s_t[i];
    u_norm += s[i] * s[i];
  }
  u_norm = std::sqrt(u_norm);
  bool degenerate = !(u_norm > 0.0);
  if (degenerate) {
    s = uniform_unit(d);
  } else {
    for (double& v : s) v /= u_norm;
  }

  const double lambda = params.lambda;
  const double along = dot(s, e);
  out.score = detail::ssp_score_core(e, s, lambda);

  // ∂f/∂h = 2(1−λ)e + 2λ(sᵀe)s;  ∂f/∂r = ∂f/∂h;  ∂f/∂t = −∂f/∂h.
  out.d_head.resize(d);
  out.d_rel.resize(d);
  out.d_tail.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double g = 2.0 * (1.0 - lambda) * e[i] + 2.0 * lambda * along * s[i];
    out.d_head[i] = g;
    out.d_rel[i] = g;
    out.d_tail[i] = -g;
  }

  // ∂f/∂s_h = ∂f/∂s_t = (2λ(sᵀe)/‖u‖)·(e − (sᵀe)s): the in-plane part of e
  // scaled through the chain rule of the normalization. Zero when semantics
  // are frozen.
  out.d_sem_head.assign(d, 0.0);
  out.d_sem_tail.assign(d, 0.0);
  if (mode == train_mode::joint && !degenerate) {
    const double coef = 2.0 * lambda * along / u_norm;
    for (std::size_t i = 0; i < d; ++i) {
      const double g = coef * (e[i] - along * s[i]);
      out.d_sem_head[i] = g;
      out.d_sem_tail[i] = g;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embedding table.
// ---------------------------------------------------------------------------

class embedding_table {
 public:
  matrix entity_vecs;    // |E| x d
  matrix relation_vecs;  // |R| x d

  embedding_table() = default;
  embedding_table(std::int32_t entities, std::int32_t relations,
                  std::int32_t dim)
      : entity_vecs(static_cast<std::size_t>(entities),
                    static_cast<std::size_t>(dim)),
        relation_vecs(static_cast<std::size_t>(relations),
                      static_cast<std::size_t>(dim)) {}

  std::int32_t dim() const {
    return static_cast<std::int32_t>(entity_vecs.cols());
  }
  std::int32_t entity_count() const {
    return static_cast<std::int32_t>(entity_vecs.rows());
  }
  std::int32_t relation_count() const {
    return static_cast<std::int32_t>(relation_vecs.rows());
  }

  bool operator==(const embedding_table&) const = default;

  /// Header `dim entities relations`, then entity rows, then relation rows.
  void save(const std::string& path) const {
    auto out = open_output(path);
    out << dim() << ' ' << entity_count() << ' ' << relation_count() << '\n';
    semantic_model::write_rows(out, entity_vecs);
    semantic_model::write_rows(out, relation_vecs);
    if (!out) throw io_error("failed writing embeddings: " + path);
  }

  static embedding_table load(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
      throw parse_error(path + ": missing header line");
    const auto fields = split(trim(line), ' ');
    if (fields.size() != 3)
      throw parse_error(path + ": header must be `dim entities relations`");
    const auto d = parse_int(fields[0], path);
    const auto ne = parse_int(fields[1], path);
    const auto nr = parse_int(fields[2], path);
    if (d < 0 || ne < 0 || nr < 0)
      throw parse_error(path + ": negative header field");
    embedding_table table(static_cast<std::int32_t>(ne),
                          static_cast<std::int32_t>(nr),
                          static_cast<std::int32_t>(d));
    semantic_model::read_rows(in, table.entity_vecs, path);
    semantic_model::read_rows(in, table.relation_vecs, path);
    return table;
  }
};

}  // namespace ssp
