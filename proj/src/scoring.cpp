#include "clicklab/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <type_traits>
#include <unordered_set>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/text.hpp"

namespace clicklab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError(ErrorKind::NonFinite, std::string(what) + " is not finite");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double cosine_sim(std::span<const double> q, std::span<const double> d) {
  if (q.size() != d.size()) {
    throw DataError(ErrorKind::ShapeMismatch, "embedding dimensions differ");
  }
  const double nq = norm(q);
  const double nd = norm(d);
  if (nq == 0.0 || nd == 0.0) {
    throw DataError(ErrorKind::ZeroVector, "cosine similarity of a zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) dot += q[i] * d[i];
  return dot / (nq * nd);
}

double activate(Activation act, double x) {
  switch (act) {
    case Activation::Gelu:
      return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
  }
  throw InternalError("unhandled activation");
}

double activate_grad(Activation act, double x) {
  switch (act) {
    case Activation::Gelu: {
      const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return cdf + x * pdf;
    }
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Relu:
      return x > 0.0 ? 1.0 : 0.0;
  }
  throw InternalError("unhandled activation");
}

InteractionHead InteractionHead::zeros(std::uint32_t dim, Activation act) {
  InteractionHead head;
  head.dim = dim;
  head.activation = act;
  head.w1.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  head.b1.assign(dim, 0.0);
  head.w2.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  head.b2.assign(dim, 0.0);
  head.w_out.assign(dim + 2, 0.0);
  head.b_out = 0.0;
  return head;
}

InteractionHead InteractionHead::random(std::uint32_t dim, std::uint64_t seed, Activation act) {
  InteractionHead head = zeros(dim, act);
  Rng rng(derive_seed(seed, "head-init"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto* block : {&head.w1, &head.w2}) {
    for (auto& w : *block) w = rng.normal() * scale;
  }
  for (auto& w : head.w_out) w = rng.normal() * scale;
  return head;
}

void InteractionHead::check_shapes() const {
  const auto d = static_cast<std::size_t>(dim);
  if (w1.size() != d * d || b1.size() != d || w2.size() != d * d || b2.size() != d ||
      w_out.size() != d + 2) {
    throw DataError(ErrorKind::ShapeMismatch, "interaction head weight shapes are inconsistent");
  }
}

std::size_t InteractionHead::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w_out.size() + 1;
}

namespace {

struct HeadTrace {
  std::vector<double> m, a1, h1, a2, h, z;
  std::vector<bool> from_q;
  double dist = 0.0, cos = 0.0, pre_sigmoid = 0.0, score = 0.0;
};

HeadTrace head_run(std::span<const double> q, std::span<const double> d,
                   const InteractionHead& head) {
  head.check_shapes();
  const auto dim = static_cast<std::size_t>(head.dim);
  if (q.size() != dim || d.size() != dim) {
    throw DataError(ErrorKind::ShapeMismatch, "embedding dimension does not match head");
  }
  check_finite(q, "query embedding");
  check_finite(d, "document embedding");

  HeadTrace t;
  t.m.resize(dim);
  t.from_q.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    t.from_q[i] = q[i] >= d[i];  // ties route to q
    t.m[i] = t.from_q[i] ? q[i] : d[i];
  }
  t.a1.assign(dim, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    double acc = head.b1[r];
    const double* row = head.w1.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) acc += row[c] * t.m[c];
    t.a1[r] = acc;
  }
  t.h1.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) t.h1[i] = activate(head.activation, t.a1[i]);
  t.a2.assign(dim, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    double acc = head.b2[r];
    const double* row = head.w2.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) acc += row[c] * t.h1[c];
    t.a2[r] = acc;
  }
  t.h.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) t.h[i] = t.m[i] + t.a2[i];  // residual

  double dist_sq = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double diff = q[i] - d[i];
    dist_sq += diff * diff;
  }
  t.dist = std::sqrt(dist_sq);
  t.cos = cosine_sim(q, d);

  double acc = head.b_out;
  for (std::size_t i = 0; i < dim; ++i) acc += head.w_out[i] * t.h[i];
  acc += head.w_out[dim] * t.dist;
  acc += head.w_out[dim + 1] * t.cos;
  t.pre_sigmoid = acc;
  t.score = sigmoid(acc);
  return t;
}

}  // namespace

double head_forward(std::span<const double> q, std::span<const double> d,
                    const InteractionHead& head) {
  return head_run(q, d, head).score;
}

HeadGradients head_gradient(std::span<const double> q, std::span<const double> d,
                            const InteractionHead& head, double upstream) {
  const HeadTrace t = head_run(q, d, head);
  const auto dim = static_cast<std::size_t>(head.dim);

  HeadGradients g;
  g.w1.assign(dim * dim, 0.0);
  g.b1.assign(dim, 0.0);
  g.w2.assign(dim * dim, 0.0);
  g.b2.assign(dim, 0.0);
  g.w_out.assign(dim + 2, 0.0);
  g.dq.assign(dim, 0.0);
  g.dd.assign(dim, 0.0);

  const double du = upstream * t.score * (1.0 - t.score);
  for (std::size_t i = 0; i < dim; ++i) g.w_out[i] = du * t.h[i];
  g.w_out[dim] = du * t.dist;
  g.w_out[dim + 1] = du * t.cos;
  g.b_out = du;

  std::vector<double> dh(dim);
  for (std::size_t i = 0; i < dim; ++i) dh[i] = du * head.w_out[i];
  const double ddist = du * head.w_out[dim];
  const double dcos = du * head.w_out[dim + 1];

  // Residual block: h = m + W2 act(W1 m + b1) + b2.
  std::vector<double> dm = dh;
  for (std::size_t r = 0; r < dim; ++r) {
    const double da2 = dh[r];
    g.b2[r] = da2;
    double* grow = g.w2.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) grow[c] = da2 * t.h1[c];
  }
  std::vector<double> dh1(dim, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    const double da2 = dh[r];
    const double* row = head.w2.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) dh1[c] += da2 * row[c];
  }
  std::vector<double> da1(dim);
  for (std::size_t i = 0; i < dim; ++i) da1[i] = dh1[i] * activate_grad(head.activation, t.a1[i]);
  for (std::size_t r = 0; r < dim; ++r) {
    g.b1[r] = da1[r];
    double* grow = g.w1.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) grow[c] = da1[r] * t.m[c];
  }
  for (std::size_t r = 0; r < dim; ++r) {
    const double* row = head.w1.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) dm[c] += da1[r] * row[c];
  }

  // Max routes to the winning side.
  for (std::size_t i = 0; i < dim; ++i) {
    if (t.from_q[i]) {
      g.dq[i] += dm[i];
    } else {
      g.dd[i] += dm[i];
    }
  }

  // Distance feature; subgradient 0 at q == d.
  if (t.dist > 0.0) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double unit = (q[i] - d[i]) / t.dist;
      g.dq[i] += ddist * unit;
      g.dd[i] -= ddist * unit;
    }
  }

  // Cosine feature.
  const double nq = norm(q);
  const double nd = norm(d);
  for (std::size_t i = 0; i < dim; ++i) {
    g.dq[i] += dcos * (d[i] / (nq * nd) - t.cos * q[i] / (nq * nq));
    g.dd[i] += dcos * (q[i] / (nq * nd) - t.cos * d[i] / (nd * nd));
  }
  return g;
}

ContrastiveResult contrastive_loss(const std::vector<EmbeddingVector>& q_embs,
                                   const std::vector<EmbeddingVector>& d_embs, double tau) {
  const std::size_t n = q_embs.size();
  if (n == 0 || d_embs.size() != n) {
    throw DataError(ErrorKind::ShapeMismatch, "need matching non-empty embedding batches");
  }
  if (!(tau > 0.0)) {
    throw DataError(ErrorKind::InvariantViolation, "temperature must be positive");
  }
  const std::size_t dim = q_embs[0].size();
  for (const auto& v : q_embs) {
    if (v.size() != dim) throw DataError(ErrorKind::ShapeMismatch, "ragged query batch");
    check_finite(v, "query embedding");
  }
  for (const auto& v : d_embs) {
    if (v.size() != dim) throw DataError(ErrorKind::ShapeMismatch, "ragged document batch");
    check_finite(v, "document embedding");
  }

  // Cosine matrix and row-stabilized softmax.
  std::vector<double> cos(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cos[i * n + j] = cosine_sim(q_embs[i], d_embs[j]);
    }
  }
  ContrastiveResult result;
  result.dq.assign(n, EmbeddingVector(dim, 0.0));
  result.dd.assign(n, EmbeddingVector(dim, 0.0));

  std::vector<double> dcos(n * n, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = cos.data() + i * n;
    double row_max = row[0];
    for (std::size_t j = 1; j < n; ++j) row_max = std::max(row_max, row[j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp((row[j] - row_max) / tau);
    const double log_denom = row_max / tau + std::log(denom);
    loss += log_denom - row[i] / tau;
    for (std::size_t j = 0; j < n; ++j) {
      const double softmax = std::exp((row[j] - row_max) / tau) / denom;
      const double ds = (softmax - (i == j ? 1.0 : 0.0)) / static_cast<double>(n);
      dcos[i * n + j] = ds / tau;
      result.dtau += ds * (-row[j] / (tau * tau));
    }
  }
  result.loss = loss / static_cast<double>(n);
  if (!std::isfinite(result.loss)) {
    throw DataError(ErrorKind::NonFinite, "contrastive loss is not finite");
  }

  // Chain through the cosine into both embedding sets.
  std::vector<double> norms_q(n), norms_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms_q[i] = norm(q_embs[i]);
    norms_d[i] = norm(d_embs[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dc = dcos[i * n + j];
      if (dc == 0.0) continue;
      const double c = cos[i * n + j];
      const double inv = 1.0 / (norms_q[i] * norms_d[j]);
      for (std::size_t k = 0; k < dim; ++k) {
        result.dq[i][k] += dc * (d_embs[j][k] * inv - c * q_embs[i][k] / (norms_q[i] * norms_q[i]));
        result.dd[j][k] += dc * (q_embs[i][k] * inv - c * d_embs[j][k] / (norms_d[j] * norms_d[j]));
      }
    }
  }
  return result;
}

CorpusStats build_corpus_stats(const std::vector<std::vector<std::string>>& docs) {
  CorpusStats stats;
  stats.doc_count = docs.size();
  std::uint64_t total_len = 0;
  for (const auto& doc : docs) {
    total_len += doc.size();
    std::unordered_set<std::string_view> seen;
    for (const auto& term : doc) seen.insert(term);
    for (const auto& term : seen) ++stats.doc_freq[std::string(term)];
  }
  stats.avg_doc_len =
      stats.doc_count ? static_cast<double>(total_len) / static_cast<double>(stats.doc_count) : 0.0;
  return stats;
}

double bm25_score(const std::vector<std::string>& query_terms,
                  const std::vector<std::string>& doc_terms, const CorpusStats& stats, double k1,
                  double b) {
  if (stats.doc_count == 0) {
    throw DataError(ErrorKind::EmptyCorpus, "BM25 needs corpus statistics");
  }
  std::unordered_map<std::string_view, std::uint32_t> tf;
  for (const auto& term : doc_terms) ++tf[term];
  const double dl = static_cast<double>(doc_terms.size());
  const double len_norm =
      stats.avg_doc_len > 0.0 ? (1.0 - b + b * dl / stats.avg_doc_len) : 1.0;
  const double n_docs = static_cast<double>(stats.doc_count);
  double score = 0.0;
  for (const auto& term : query_terms) {
    const auto it = tf.find(term);
    if (it == tf.end()) continue;
    const auto df_it = stats.doc_freq.find(term);
    const double df = df_it == stats.doc_freq.end() ? 0.0 : static_cast<double>(df_it->second);
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    const double f = static_cast<double>(it->second);
    score += idf * f * (k1 + 1.0) / (f + k1 * len_norm);
  }
  return score;
}

ToyEmbedder ToyEmbedder::random(std::uint32_t dim, std::uint32_t buckets, std::uint64_t seed) {
  ToyEmbedder emb;
  emb.dim = dim;
  emb.buckets = buckets;
  emb.table.resize(static_cast<std::size_t>(dim) * buckets);
  Rng rng(derive_seed(seed, "toy-embedder-init"));
  for (auto& w : emb.table) w = rng.normal() * 0.1;
  return emb;
}

std::vector<std::size_t> ToyEmbedder::token_buckets(std::string_view text) const {
  const auto tokens = tokenize(text);
  std::vector<std::size_t> out;
  if (tokens.empty()) {
    out.push_back(static_cast<std::size_t>(fnv1a64("<empty>") % buckets));
    return out;
  }
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    out.push_back(static_cast<std::size_t>(fnv1a64(token) % buckets));
  }
  return out;
}

EmbeddingVector ToyEmbedder::embed(std::string_view text) const {
  const auto slots = token_buckets(text);
  EmbeddingVector vec(dim, 0.0);
  for (std::size_t slot : slots) {
    const double* row = table.data() + slot * dim;
    for (std::uint32_t k = 0; k < dim; ++k) vec[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(slots.size());
  for (auto& x : vec) x *= inv;
  return vec;
}

TrainResult train_toy_embedder(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg) {
  if (pairs.empty()) {
    throw DataError(ErrorKind::DegenerateInput, "no training pairs");
  }
  TrainResult result;
  result.embedder = ToyEmbedder::random(cfg.dim, cfg.buckets, cfg.seed);
  result.head = InteractionHead::random(cfg.dim, derive_seed(cfg.seed, "head"), Activation::Gelu);
  double log_tau = std::log(cfg.tau_init);

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches =
        build_batches(pairs, cfg.batch_size, derive_seed(cfg.seed, "epoch", epoch));
    double epoch_loss = 0.0;
    std::size_t batch_count = 0;
    for (const auto& batch : batches) {
      if (batch.size() < 2) continue;  // contrastive loss needs in-batch negatives
      const std::size_t n = batch.size();
      const double tau = std::exp(log_tau);

      std::vector<EmbeddingVector> q_embs(n), d_embs(n);
      std::vector<std::vector<std::size_t>> q_slots(n), d_slots(n);
      for (std::size_t i = 0; i < n; ++i) {
        q_slots[i] = result.embedder.token_buckets(batch[i].query);
        d_slots[i] = result.embedder.token_buckets(batch[i].doc_text);
        q_embs[i] = result.embedder.embed(batch[i].query);
        d_embs[i] = result.embedder.embed(batch[i].doc_text);
      }
      auto contrastive = contrastive_loss(q_embs, d_embs, tau);
      double batch_loss = contrastive.loss;

      // Optional pointwise term: weighted squared error of the head score.
      std::vector<HeadGradients> head_grads;
      if (cfg.pointwise_mix > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double score = head_forward(q_embs[i], d_embs[i], result.head);
          const double err = score - batch[i].label;
          batch_loss += cfg.pointwise_mix * batch[i].weight * err * err / static_cast<double>(n);
          const double upstream =
              cfg.pointwise_mix * batch[i].weight * 2.0 * err / static_cast<double>(n);
          head_grads.push_back(head_gradient(q_embs[i], d_embs[i], result.head, upstream));
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw DataError(ErrorKind::DivergenceDetected, "training loss is not finite");
      }
      epoch_loss += batch_loss;
      ++batch_count;

      if (cfg.lr > 0.0) {
        // Scatter embedding gradients back into the shared token table.
        const auto scatter = [&](const std::vector<std::size_t>& slots,
                                 const EmbeddingVector& grad) {
          const double inv = 1.0 / static_cast<double>(slots.size());
          for (std::size_t slot : slots) {
            double* row = result.embedder.table.data() + slot * cfg.dim;
            for (std::uint32_t k = 0; k < cfg.dim; ++k) row[k] -= cfg.lr * grad[k] * inv;
          }
        };
        for (std::size_t i = 0; i < n; ++i) {
          EmbeddingVector gq = contrastive.dq[i];
          EmbeddingVector gd = contrastive.dd[i];
          if (!head_grads.empty()) {
            for (std::uint32_t k = 0; k < cfg.dim; ++k) {
              gq[k] += head_grads[i].dq[k];
              gd[k] += head_grads[i].dd[k];
            }
          }
          scatter(q_slots[i], gq);
          scatter(d_slots[i], gd);
        }
        log_tau -= cfg.lr * contrastive.dtau * tau;  // d loss / d log(tau)
        if (!head_grads.empty()) {
          for (const auto& hg : head_grads) {
            for (std::size_t k = 0; k < hg.w1.size(); ++k) result.head.w1[k] -= cfg.lr * hg.w1[k];
            for (std::size_t k = 0; k < hg.b1.size(); ++k) result.head.b1[k] -= cfg.lr * hg.b1[k];
            for (std::size_t k = 0; k < hg.w2.size(); ++k) result.head.w2[k] -= cfg.lr * hg.w2[k];
            for (std::size_t k = 0; k < hg.b2.size(); ++k) result.head.b2[k] -= cfg.lr * hg.b2[k];
            for (std::size_t k = 0; k < hg.w_out.size(); ++k)
              result.head.w_out[k] -= cfg.lr * hg.w_out[k];
            result.head.b_out -= cfg.lr * hg.b_out;
          }
        }
      }
    }
    result.epoch_losses.push_back(batch_count ? epoch_loss / static_cast<double>(batch_count) : 0.0);
  }
  result.tau = std::exp(log_tau);
  return result;
}

namespace {

template <typename T>
void write_raw(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const char* what) {
  char bytes[sizeof(T)];
  in.read(bytes, sizeof(T));
  if (!in) throw DataError(ErrorKind::Io, std::string("truncated ") + what);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kEmbMagic[4] = {'C', 'L', 'E', 'B'};
constexpr char kHeadMagic[4] = {'C', 'L', 'H', 'D'};

}  // namespace

void write_embeddings(std::ostream& out,
                      const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
                      std::uint32_t dim) {
  out.write(kEmbMagic, 4);
  write_raw<std::uint32_t>(out, 1);
  write_raw<std::uint32_t>(out, dim);
  write_raw<std::uint64_t>(out, entries.size());
  for (const auto& [key, vec] : entries) {
    if (vec.size() != dim) {
      throw DataError(ErrorKind::ShapeMismatch, "embedding '" + key + "' has wrong dimension");
    }
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    for (double x : vec) write_raw<double>(out, x);
  }
  if (!out) throw DataError(ErrorKind::Io, "embedding write failed");
}

std::vector<std::pair<std::string, EmbeddingVector>> read_embeddings(std::istream& in,
                                                                     std::uint32_t* dim_out) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEmbMagic, 4) != 0) {
    throw DataError(ErrorKind::MalformedLine, "not an embedding file (bad magic)");
  }
  const auto version = read_raw<std::uint32_t>(in, "embedding header");
  if (version != 1) {
    throw DataError(ErrorKind::MalformedLine, "unsupported embedding file version");
  }
  const auto dim = read_raw<std::uint32_t>(in, "embedding header");
  const auto count = read_raw<std::uint64_t>(in, "embedding header");
  if (dim_out) *dim_out = dim;
  std::vector<std::pair<std::string, EmbeddingVector>> entries;
  entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto key_len = read_raw<std::uint32_t>(in, "embedding record");
    std::string key(key_len, '\0');
    in.read(key.data(), key_len);
    if (!in) throw DataError(ErrorKind::Io, "truncated embedding record");
    EmbeddingVector vec(dim);
    for (auto& x : vec) x = read_raw<double>(in, "embedding record");
    entries.emplace_back(std::move(key), std::move(vec));
  }
  return entries;
}

void write_head(std::ostream& out, const InteractionHead& head) {
  head.check_shapes();
  out.write(kHeadMagic, 4);
  write_raw<std::uint32_t>(out, 1);
  write_raw<std::uint32_t>(out, head.dim);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(head.activation));
  for (const auto* block : {&head.w1, &head.b1, &head.w2, &head.b2, &head.w_out}) {
    for (double x : *block) write_raw<double>(out, x);
  }
  write_raw<double>(out, head.b_out);
  if (!out) throw DataError(ErrorKind::Io, "head write failed");
}

InteractionHead read_head(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kHeadMagic, 4) != 0) {
    throw DataError(ErrorKind::MalformedLine, "not a head file (bad magic)");
  }
  const auto version = read_raw<std::uint32_t>(in, "head header");
  if (version != 1) throw DataError(ErrorKind::MalformedLine, "unsupported head file version");
  const auto dim = read_raw<std::uint32_t>(in, "head header");
  const auto act = read_raw<std::uint32_t>(in, "head header");
  if (act > 2) throw DataError(ErrorKind::MalformedLine, "unknown activation id");
  InteractionHead head = InteractionHead::zeros(dim, static_cast<Activation>(act));
  for (auto* block : {&head.w1, &head.b1, &head.w2, &head.b2, &head.w_out}) {
    for (double& x : *block) x = read_raw<double>(in, "head weights");
  }
  head.b_out = read_raw<double>(in, "head weights");
  return head;
}

}  // namespace clicklab
