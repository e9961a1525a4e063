#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"
#include "clicklab/scoring.hpp"
#include "clicklab/text.hpp"

using namespace clicklab;

namespace {

EmbeddingVector random_vec(Rng& rng, std::size_t dim) {
  EmbeddingVector v(dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("cosine similarity") {
  CHECK(cosine_sim(EmbeddingVector{1, 2}, EmbeddingVector{1, 2}) == doctest::Approx(1.0));
  CHECK(cosine_sim(EmbeddingVector{1, 0}, EmbeddingVector{0, 1}) == doctest::Approx(0.0));
  CHECK(cosine_sim(EmbeddingVector{1, 2}, EmbeddingVector{2, 1}) == doctest::Approx(0.8));
  CHECK_THROWS_AS(cosine_sim(EmbeddingVector{0, 0}, EmbeddingVector{1, 1}), DataError);
  CHECK_THROWS_AS(cosine_sim(EmbeddingVector{1}, EmbeddingVector{1, 1}), DataError);
}

TEST_CASE("head forward basics") {
  const std::uint32_t dim = 6;
  Rng rng(5);
  const auto q = random_vec(rng, dim);
  const auto d = random_vec(rng, dim);

  SUBCASE("all-zero weights give sigmoid(0) = 0.5") {
    const auto head = InteractionHead::zeros(dim);
    CHECK(head_forward(q, d, head) == doctest::Approx(0.5));
  }
  SUBCASE("output strictly inside (0,1)") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto head = InteractionHead::random(dim, seed);
      const double score = head_forward(q, d, head);
      CHECK(score > 0.0);
      CHECK(score < 1.0);
    }
  }
  SUBCASE("bit-identical across repeated evaluation") {
    const auto head = InteractionHead::random(dim, 11);
    const double a = head_forward(q, d, head);
    const double b = head_forward(q, d, head);
    CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
  }
  SUBCASE("shape mismatch") {
    const auto head = InteractionHead::random(dim, 1);
    CHECK_THROWS_AS(head_forward(EmbeddingVector{1, 2}, d, head), DataError);
  }
}

namespace {

// Central finite differences over every head parameter and both embeddings.
void check_head_gradients(std::uint32_t dim, std::uint64_t seed, Activation act,
                          double tolerance = 1e-4) {
  Rng rng(seed);
  auto head = InteractionHead::random(dim, seed, act);
  auto q = random_vec(rng, dim);
  auto d = random_vec(rng, dim);
  const double upstream = rng.normal();
  const auto grads = head_gradient(q, d, head, upstream);
  const double eps = 1e-5;

  const auto check_param = [&](double* param, double analytic) {
    const double saved = *param;
    *param = saved + eps;
    const double plus = upstream * head_forward(q, d, head);
    *param = saved - eps;
    const double minus = upstream * head_forward(q, d, head);
    *param = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double scale = std::max({1e-8, std::abs(numeric), std::abs(analytic)});
    CHECK(std::abs(numeric - analytic) / scale < tolerance);
  };

  for (std::size_t i = 0; i < head.w1.size(); ++i) check_param(&head.w1[i], grads.w1[i]);
  for (std::size_t i = 0; i < head.b1.size(); ++i) check_param(&head.b1[i], grads.b1[i]);
  for (std::size_t i = 0; i < head.w2.size(); ++i) check_param(&head.w2[i], grads.w2[i]);
  for (std::size_t i = 0; i < head.b2.size(); ++i) check_param(&head.b2[i], grads.b2[i]);
  for (std::size_t i = 0; i < head.w_out.size(); ++i) check_param(&head.w_out[i], grads.w_out[i]);
  check_param(&head.b_out, grads.b_out);
  for (std::size_t i = 0; i < dim; ++i) check_param(&q[i], grads.dq[i]);
  for (std::size_t i = 0; i < dim; ++i) check_param(&d[i], grads.dd[i]);
}

}  // namespace

TEST_CASE("head gradients match finite differences (spot checks)") {
  check_head_gradients(4, 101, Activation::Gelu);
  check_head_gradients(4, 102, Activation::Tanh);
  check_head_gradients(5, 103, Activation::Gelu);
}

TEST_CASE("head gradient conventions") {
  const std::uint32_t dim = 4;
  Rng rng(9);
  const auto head = InteractionHead::random(dim, 77);
  const auto q = random_vec(rng, dim);

  SUBCASE("zero upstream, zero gradients") {
    const auto d = random_vec(rng, dim);
    const auto grads = head_gradient(q, d, head, 0.0);
    for (double g : grads.w1) CHECK(g == 0.0);
    for (double g : grads.dq) CHECK(g == 0.0);
    CHECK(grads.b_out == 0.0);
  }
  SUBCASE("distance feature gradient is zero at q == d") {
    // With q == d only the distance path is singular; the max and cosine
    // paths stay live, so isolate the distance input's contribution by
    // zeroing every other output weight.
    auto iso = InteractionHead::zeros(dim);
    iso.w_out[dim] = 1.0;  // distance feature only
    const auto grads = head_gradient(q, q, iso, 1.0);
    for (double g : grads.dq) CHECK(g == 0.0);
    for (double g : grads.dd) CHECK(g == 0.0);
  }
  SUBCASE("max ties route to q") {
    auto iso = InteractionHead::zeros(dim);
    for (std::size_t i = 0; i < dim; ++i) iso.w_out[i] = 1.0;  // hidden = m (residual, zero ffn)
    const auto grads = head_gradient(q, q, iso, 1.0);
    for (std::size_t i = 0; i < dim; ++i) {
      CHECK(grads.dq[i] != 0.0);
      // d receives only the cosine path (zero weight) -> nothing.
      CHECK(grads.dd[i] == 0.0);
    }
  }
}

TEST_CASE("contrastive loss identities") {
  SUBCASE("N = 1 gives loss 0 exactly") {
    const auto result = contrastive_loss({{1.0, 2.0}}, {{2.0, 1.0}}, 0.07);
    CHECK(result.loss == 0.0);
  }
  SUBCASE("orthonormal diagonal at tau = 1 gives ln(1 + e^-1)") {
    const std::vector<EmbeddingVector> qs = {{1, 0}, {0, 1}};
    const std::vector<EmbeddingVector> ds = {{1, 0}, {0, 1}};
    const auto result = contrastive_loss(qs, ds, 1.0);
    CHECK(result.loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(result.loss == doctest::Approx(0.313262).epsilon(1e-5));
  }
  SUBCASE("uniform similarities give ln N") {
    for (std::size_t n : {2u, 4u, 8u}) {
      std::vector<EmbeddingVector> qs(n, EmbeddingVector{0.3, -0.7, 0.2});
      std::vector<EmbeddingVector> ds(n, EmbeddingVector{0.3, -0.7, 0.2});
      const auto result = contrastive_loss(qs, ds, 0.07);
      CHECK(std::abs(result.loss - std::log(static_cast<double>(n))) < 1e-12);
    }
  }
  SUBCASE("batch order permutation keeps the mean loss") {
    Rng rng(31);
    std::vector<EmbeddingVector> qs, ds;
    for (int i = 0; i < 6; ++i) {
      qs.push_back(random_vec(rng, 5));
      ds.push_back(random_vec(rng, 5));
    }
    const double base = contrastive_loss(qs, ds, 0.2).loss;
    std::vector<EmbeddingVector> qs2 = {qs[3], qs[0], qs[5], qs[1], qs[4], qs[2]};
    std::vector<EmbeddingVector> ds2 = {ds[3], ds[0], ds[5], ds[1], ds[4], ds[2]};
    CHECK(contrastive_loss(qs2, ds2, 0.2).loss == doctest::Approx(base).epsilon(1e-12));
  }
  SUBCASE("loss is nonnegative") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<EmbeddingVector> qs, ds;
      const std::size_t n = 1 + rng.next_below(6);
      for (std::size_t i = 0; i < n; ++i) {
        qs.push_back(random_vec(rng, 4));
        ds.push_back(random_vec(rng, 4));
      }
      CHECK(contrastive_loss(qs, ds, 0.05 + rng.next_double()).loss >= 0.0);
    }
  }
  SUBCASE("zero vector is an error") {
    CHECK_THROWS_AS(contrastive_loss({{0.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {0.0, 1.0}}, 1.0),
                    DataError);
  }
}

TEST_CASE("contrastive gradients match finite differences (spot check)") {
  Rng rng(2024);
  const std::size_t n = 4, dim = 5;
  std::vector<EmbeddingVector> qs, ds;
  for (std::size_t i = 0; i < n; ++i) {
    qs.push_back(random_vec(rng, dim));
    ds.push_back(random_vec(rng, dim));
  }
  const double tau = 0.3;
  const auto result = contrastive_loss(qs, ds, tau);
  const double eps = 1e-6;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      qs[i][k] += eps;
      const double plus = contrastive_loss(qs, ds, tau).loss;
      qs[i][k] -= 2 * eps;
      const double minus = contrastive_loss(qs, ds, tau).loss;
      qs[i][k] += eps;
      const double numeric = (plus - minus) / (2 * eps);
      CHECK(result.dq[i][k] == doctest::Approx(numeric).epsilon(1e-4));
    }
  }
  const double tau_plus = contrastive_loss(qs, ds, tau + eps).loss;
  const double tau_minus = contrastive_loss(qs, ds, tau - eps).loss;
  CHECK(result.dtau == doctest::Approx((tau_plus - tau_minus) / (2 * eps)).epsilon(1e-4));
}

TEST_CASE("BM25") {
  const std::vector<std::vector<std::string>> corpus = {
      {"automatic", "parking", "car"},
      {"cooking", "eggs"},
      {"parking", "lot", "rules", "parking"},
  };
  const auto stats = build_corpus_stats(corpus);
  CHECK(stats.doc_count == 3);
  CHECK(stats.avg_doc_len == doctest::Approx(3.0));
  CHECK(stats.doc_freq.at("parking") == 2);

  SUBCASE("no query term in the document scores 0") {
    CHECK(bm25_score({"cooking"}, corpus[0], stats) == 0.0);
  }
  SUBCASE("single-doc corpus pins the written formula") {
    const std::vector<std::vector<std::string>> one = {{"parking"}};
    const auto s1 = build_corpus_stats(one);
    // N = n = 1: idf = ln(1 + 0.5/1.5) = ln(4/3); tf component with
    // tf = 1, dl = avgdl: (k1+1)/(1+k1) = 1.
    CHECK(bm25_score({"parking"}, one[0], s1, 1.2, 0.75) ==
          doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("monotone in term frequency at fixed length") {
    const std::vector<std::string> doc1 = {"parking", "a", "b", "c"};
    const std::vector<std::string> doc2 = {"parking", "parking", "b", "c"};
    CHECK(bm25_score({"parking"}, doc2, stats) > bm25_score({"parking"}, doc1, stats));
  }
  SUBCASE("invariant to query term order") {
    const std::vector<std::string> doc = {"automatic", "parking", "rules"};
    CHECK(bm25_score({"automatic", "parking"}, doc, stats) ==
          doctest::Approx(bm25_score({"parking", "automatic"}, doc, stats)).epsilon(1e-15));
  }
  SUBCASE("empty corpus is an error") {
    CorpusStats empty;
    CHECK_THROWS_AS(bm25_score({"x"}, {"x"}, empty), DataError);
  }
}

TEST_CASE("embedding and head files round-trip") {
  Rng rng(8);
  std::vector<std::pair<std::string, EmbeddingVector>> entries = {
      {"some query", random_vec(rng, 3)},
      {"http://doc", random_vec(rng, 3)},
      {"", random_vec(rng, 3)},  // empty keys are legal
  };
  std::stringstream buffer;
  write_embeddings(buffer, entries, 3);
  std::uint32_t dim = 0;
  const auto back = read_embeddings(buffer, &dim);
  CHECK(dim == 3);
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].first == entries[i].first);
    CHECK(back[i].second == entries[i].second);
  }

  const auto head = InteractionHead::random(4, 99, Activation::Tanh);
  std::stringstream head_buffer;
  write_head(head_buffer, head);
  const auto head_back = read_head(head_buffer);
  CHECK(head_back.dim == head.dim);
  CHECK(head_back.activation == head.activation);
  CHECK(head_back.w1 == head.w1);
  CHECK(head_back.w_out == head.w_out);
  CHECK(head_back.b_out == head.b_out);

  std::stringstream junk("not an embedding file");
  CHECK_THROWS_AS(read_embeddings(junk), DataError);
}

TEST_CASE("toy embedder basics") {
  const auto emb = ToyEmbedder::random(8, 64, 3);
  const auto a = emb.embed("automatic parking prague");
  const auto b = emb.embed("automatic parking prague");
  CHECK(a == b);
  CHECK(a.size() == 8);
  // Empty text maps to the reserved bucket, not a zero vector.
  const auto e = emb.embed("");
  CHECK(std::any_of(e.begin(), e.end(), [](double x) { return x != 0.0; }));
}

namespace {

std::vector<TrainingPair> toy_corpus() {
  // Doc texts share tokens with their own query and not with others.
  std::vector<TrainingPair> pairs;
  const char* topics[] = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot"};
  for (int t = 0; t < 6; ++t) {
    for (int v = 0; v < 3; ++v) {
      pairs.push_back(TrainingPair{
          std::string("query about ") + topics[t],
          std::string(topics[t]) + " document " + std::to_string(v) + " about " + topics[t],
          1.0, 1.0});
    }
  }
  return pairs;
}

}  // namespace

TEST_CASE("toy trainer: lr = 0 leaves weights unchanged") {
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.buckets = 128;
  cfg.epochs = 3;
  cfg.lr = 0.0;
  cfg.seed = 5;
  const auto before = ToyEmbedder::random(cfg.dim, cfg.buckets, cfg.seed);
  const auto result = train_toy_embedder(toy_corpus(), cfg);
  CHECK(result.embedder.table == before.table);
  CHECK(result.tau == doctest::Approx(cfg.tau_init));
}

TEST_CASE("toy trainer: a single repeated batch strictly decreases the loss") {
  // One pair per query so every epoch sees the same full batch; the loss is
  // permutation invariant, so the per-epoch shuffle cannot disturb it.
  std::vector<TrainingPair> pairs;
  const char* topics[] = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot"};
  for (const char* topic : topics) {
    pairs.push_back(TrainingPair{std::string("query about ") + topic,
                                 std::string(topic) + " document about " + topic, 1.0, 1.0});
  }
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.buckets = 128;
  cfg.epochs = 6;
  cfg.lr = 0.05;
  cfg.batch_size = 6;
  cfg.seed = 5;
  const auto result = train_toy_embedder(pairs, cfg);
  REQUIRE(result.epoch_losses.size() == 6);
  for (std::size_t e = 1; e <= 5; ++e) {
    CHECK(result.epoch_losses[e] < result.epoch_losses[e - 1]);
  }
  CHECK(result.tau > 0.0);
}

TEST_CASE("toy trainer is deterministic under the seed") {
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.buckets = 64;
  cfg.epochs = 2;
  cfg.lr = 0.2;
  cfg.seed = 12;
  const auto a = train_toy_embedder(toy_corpus(), cfg);
  const auto b = train_toy_embedder(toy_corpus(), cfg);
  CHECK(a.embedder.table == b.embedder.table);
  CHECK(a.epoch_losses == b.epoch_losses);
}
