#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clicklab/sampling.hpp"

namespace clicklab {

using EmbeddingVector = std::vector<double>;

double cosine_sim(std::span<const double> q, std::span<const double> d);

enum class Activation : std::uint32_t { Gelu = 0, Tanh = 1, Relu = 2 };
double activate(Activation act, double x);
double activate_grad(Activation act, double x);

// Bi-encoder interaction head: element-wise max of the two embeddings, a
// 2-layer feed-forward block with a residual connection, then a linear layer
// over [hidden, euclidean distance, cosine] squashed by a sigmoid.
struct InteractionHead {
  std::uint32_t dim = 0;
  Activation activation = Activation::Gelu;
  std::vector<double> w1;     // dim x dim, row-major
  std::vector<double> b1;     // dim
  std::vector<double> w2;     // dim x dim
  std::vector<double> b2;     // dim
  std::vector<double> w_out;  // dim + 2
  double b_out = 0.0;

  static InteractionHead zeros(std::uint32_t dim, Activation act = Activation::Gelu);
  static InteractionHead random(std::uint32_t dim, std::uint64_t seed,
                                Activation act = Activation::Gelu);
  void check_shapes() const;
  std::size_t parameter_count() const;
};

double head_forward(std::span<const double> q, std::span<const double> d,
                    const InteractionHead& head);

struct HeadGradients {
  std::vector<double> w1, b1, w2, b2, w_out;
  double b_out = 0.0;
  std::vector<double> dq, dd;
};

// Exact gradients of (upstream * score) w.r.t. every head weight and both
// embeddings. The element-wise max routes its subgradient to the larger
// input, ties toward q; the distance feature's gradient at q == d is zero.
HeadGradients head_gradient(std::span<const double> q, std::span<const double> d,
                            const InteractionHead& head, double upstream);

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<EmbeddingVector> dq;  // one gradient per query embedding
  std::vector<EmbeddingVector> dd;  // one gradient per document embedding
  double dtau = 0.0;
};

// Cross-entropy with in-batch negatives over cosine similarities scaled by
// 1/tau, stabilized by row-max subtraction. Loss is the mean over rows.
ContrastiveResult contrastive_loss(const std::vector<EmbeddingVector>& q_embs,
                                   const std::vector<EmbeddingVector>& d_embs, double tau);

// ---- BM25 lexical baseline ----

struct CorpusStats {
  std::uint64_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::unordered_map<std::string, std::uint64_t> doc_freq;
};

CorpusStats build_corpus_stats(const std::vector<std::vector<std::string>>& docs);

double bm25_score(const std::vector<std::string>& query_terms,
                  const std::vector<std::string>& doc_terms, const CorpusStats& stats,
                  double k1 = 1.2, double b = 0.75);

// ---- Toy hashed bag-of-tokens embedder ----

// Desk-scale stand-in for a pretrained encoder: a bucketed token table whose
// rows are averaged over the tokens of a text. Queries and documents share
// the table (siamese).
struct ToyEmbedder {
  std::uint32_t dim = 32;
  std::uint32_t buckets = 4096;
  std::vector<double> table;  // buckets x dim

  static ToyEmbedder random(std::uint32_t dim, std::uint32_t buckets, std::uint64_t seed);
  EmbeddingVector embed(std::string_view text) const;
  std::vector<std::size_t> token_buckets(std::string_view text) const;
};

struct TrainConfig {
  std::uint32_t dim = 32;
  std::uint32_t buckets = 4096;
  std::uint32_t epochs = 10;
  double lr = 0.1;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double tau_init = 0.07;
  // Weight of the optional pointwise head term mixed into the loss.
  double pointwise_mix = 0.0;
};

struct TrainResult {
  ToyEmbedder embedder;
  InteractionHead head;  // trained only when pointwise_mix > 0
  double tau = 0.07;
  std::vector<double> epoch_losses;
};

// SGD over contrastive batches; tau is learned in log space so it stays
// positive. Throws DivergenceDetected if the loss leaves the reals.
TrainResult train_toy_embedder(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg);

// ---- Embedding file format ----
// Header: magic "CLEB", u32 version, u32 dim, u64 count; then per record a
// u32 key length, the key bytes, and dim little-endian f64 values.

void write_embeddings(std::ostream& out,
                      const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
                      std::uint32_t dim);
std::vector<std::pair<std::string, EmbeddingVector>> read_embeddings(std::istream& in,
                                                                     std::uint32_t* dim_out = nullptr);

// Head file format: magic "CLHD", u32 version, u32 dim, u32 activation, then
// the weights in declaration order as little-endian f64.
void write_head(std::ostream& out, const InteractionHead& head);
InteractionHead read_head(std::istream& in);

}  // namespace clicklab
