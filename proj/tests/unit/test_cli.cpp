#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clicklab/manifest.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* env = std::getenv("CLICKLAB_BIN");
  REQUIRE_MESSAGE(env != nullptr, "CLICKLAB_BIN must point at the clicklab binary");
  return env;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const std::string command = binary_path() + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  std::size_t n;
  while ((n = ::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, n);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("clicklab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter() {
    static int c = 0;
    return c++;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("unknown flags exit with the usage code") {
  CHECK(run_cli("simulate --no-such-flag").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);  // a subcommand is required
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("label --help").exit_code == 0);
}

TEST_CASE("data errors exit with the data code") {
  TempDir dir;
  const auto bad = dir.file("bad.tsv");
  std::ofstream(bad) << "only\tthree\tcolumns\n";
  CHECK(run_cli("aggregate " + bad + " " + dir.file("out.tsv")).exit_code == 3);
  CHECK(run_cli("aggregate " + dir.file("missing.tsv") + " " + dir.file("out.tsv")).exit_code == 3);
}

TEST_CASE("pipeline end to end with manifests") {
  TempDir dir;
  const auto log = dir.file("log.tsv");
  const auto truth = dir.file("truth.tsv");
  const auto curated = dir.file("curated.tsv");
  const auto pairs = dir.file("pairs.tsv");
  const auto labeled = dir.file("labeled.tsv");

  CHECK(run_cli("simulate --queries 60 --seed 3 --out " + log + " --truth " + truth).exit_code == 0);
  CHECK(run_cli("curate --seed 1 " + log + " " + curated).exit_code == 0);
  CHECK(run_cli("aggregate " + curated + " " + pairs).exit_code == 0);
  CHECK(run_cli("label --formula cdr --weights views " + pairs + " " + labeled).exit_code == 0);

  for (const auto& out : {log, curated, pairs, labeled}) {
    CAPTURE(out);
    CHECK(fs::exists(out));
    const auto manifest_path = out + ".manifest.json";
    REQUIRE(fs::exists(manifest_path));
    const auto manifest = nlohmann::json::parse(read_file(manifest_path));
    CHECK(manifest["tool"] == "clicklab");
    CHECK(manifest["outputs"][0]["digest_fnv1a64"] ==
          clicklab::file_digest_hex(manifest["outputs"][0]["path"]));
  }

  SUBCASE("correlate and stats read the artifacts") {
    const auto corr = run_cli("correlate " + pairs + " " + truth);
    CHECK(corr.exit_code == 0);
    const auto parsed = nlohmann::json::parse(corr.output);
    CHECK(parsed["correlations"].size() == 5);
    CHECK(parsed["unmatched_pairs"] == 0);

    const auto stats = run_cli("stats " + log);
    CHECK(stats.exit_code == 0);
    const auto stats_json = nlohmann::json::parse(stats.output);
    CHECK(stats_json["requests"].get<std::uint64_t>() >= 300);
  }

  SUBCASE("negatives never collide with observed pairs") {
    const auto pool = dir.file("pool.tsv");
    // Build a pool from the curated log's documents plus extras.
    std::ofstream out(pool);
    for (int i = 0; i < 50; ++i) out << "http://extra" << i << ".example.com/\tT\tB\n";
    out.close();
    const auto negatives = dir.file("neg.tsv");
    CHECK(run_cli("negatives --k 2 --seed 9 " + pairs + " " + pool + " " + negatives).exit_code == 0);
    std::ifstream in(negatives);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      CHECK(line.find("extra") != std::string::npos);
      CHECK(line.substr(line.size() - 4) == "\t0\t1");
      ++rows;
    }
    CHECK(rows > 0);
  }
}

TEST_CASE("pipes compose: simulate | aggregate | label") {
  TempDir dir;
  const std::string command = binary_path() + " simulate --queries 20 --seed 5 | " +
                              binary_path() + " aggregate - - | " + binary_path() +
                              " label --formula clicks - " + dir.file("out.tsv") +
                              " 2>/dev/null";
  const int status = std::system(command.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(dir.file("out.tsv")));
}

TEST_CASE("reruns are byte-identical, including across thread counts") {
  TempDir dir;
  const auto out1 = dir.file("a.tsv");
  const auto out2 = dir.file("b.tsv");
  CHECK(run_cli("simulate --queries 80 --seed 17 --out " + out1).exit_code == 0);
  CHECK(run_cli("--threads 3 simulate --queries 80 --seed 17 --out " + out2).exit_code == 0);
  CHECK(clicklab::file_digest_hex(out1) == clicklab::file_digest_hex(out2));

  const auto pairs1 = dir.file("p1.tsv");
  const auto pairs2 = dir.file("p2.tsv");
  CHECK(run_cli("--threads 1 aggregate " + out1 + " " + pairs1).exit_code == 0);
  CHECK(run_cli("--threads 5 aggregate " + out1 + " " + pairs2).exit_code == 0);
  CHECK(read_file(pairs1) == read_file(pairs2));
}

TEST_CASE("eval, sigtest, and baseline subcommands") {
  TempDir dir;
  const auto gold = dir.file("gold.tsv");
  {
    std::ofstream out(gold);
    out << "queryone\tu1\tdoc a\t1\n"
        << "queryone\tu2\tdoc b\t0\n"
        << "queryone\tu3\tdoc c\t0.66\n"
        << "querytwo\tu1\tdoc d\t0\n"
        << "querytwo\tu2\tdoc e\t1\n";
  }
  const auto scores = dir.file("scores.tsv");
  {
    std::ofstream out(scores);
    out << "queryone\tu1\t0.9\nqueryone\tu2\t0.1\nqueryone\tu3\t0.5\n"
        << "querytwo\tu1\t0.8\nquerytwo\tu2\t0.2\n";
  }
  const auto per_query = dir.file("pq.tsv");
  const auto eval = run_cli("eval --metric ndcg10 --per-query " + per_query + " " + gold + " " + scores);
  CHECK(eval.exit_code == 0);
  const auto parsed = nlohmann::json::parse(eval.output);
  CHECK(parsed["queries"] == 2);
  // queryone ranks both relevant docs on top (u1, u3): NDCG 1.
  // querytwo puts its one relevant doc second: 1/log2(3).
  const double q1 = 1.0;
  const double q2 = 1.0 / std::log2(3.0);
  CHECK(parsed["mean"].get<double>() == doctest::Approx((q1 + q2) / 2.0).epsilon(1e-9));

  const auto p10 = run_cli("eval --metric p10 " + gold + " " + scores);
  CHECK(nlohmann::json::parse(p10.output)["mean"].get<double>() ==
        doctest::Approx((0.2 + 0.1) / 2.0).epsilon(1e-9));

  const auto sig = run_cli("sigtest --samples 5000 --seed 4 " + per_query + " " + per_query);
  CHECK(sig.exit_code == 0);
  CHECK(nlohmann::json::parse(sig.output)["p_value"].get<double>() == doctest::Approx(1.0));

  const auto baseline = run_cli("baseline --trials 200 --seed 6 " + gold);
  CHECK(baseline.exit_code == 0);
  const auto base_json = nlohmann::json::parse(baseline.output);
  CHECK(base_json["oracle_ndcg10"].get<double>() > 0.9);
  CHECK(base_json["random_ndcg10"].get<double>() < base_json["oracle_ndcg10"].get<double>());
}

TEST_CASE("train-toy, score, and baseline-bm25 compose") {
  TempDir dir;
  const auto labeled = dir.file("labeled.tsv");
  {
    std::ofstream out(labeled);
    const char* topics[] = {"alpha", "bravo", "charlie", "delta"};
    for (const char* t : topics) {
      for (int v = 0; v < 2; ++v) {
        out << "query about " << t << "\thttp://" << t << v << "/\t" << t << " title\t" << t
            << " body text " << v << "\t1\t1\n";
      }
    }
  }
  const auto emb = dir.file("emb.bin");
  const auto head = dir.file("head.bin");
  const auto train = run_cli("train-toy --dim 8 --buckets 64 --epochs 3 --lr 0.3 --seed 2 --head " +
                             head + " " + labeled + " " + emb);
  CHECK(train.exit_code == 0);
  CHECK(nlohmann::json::parse(train.output)["epoch_losses"].size() == 3);
  CHECK(fs::exists(emb));
  CHECK(fs::exists(head));

  const auto scores = dir.file("scores.tsv");
  CHECK(run_cli("score --embeddings " + emb + " " + labeled + " " + scores).exit_code == 0);
  CHECK(run_cli("score --head " + head + " --embeddings " + emb + " " + labeled + " " +
                dir.file("scores2.tsv"))
            .exit_code == 0);

  // BM25 over the same corpus: url, title, bte columns.
  const auto corpus = dir.file("corpus.tsv");
  {
    std::ofstream out(corpus);
    const char* topics[] = {"alpha", "bravo", "charlie", "delta"};
    for (const char* t : topics) {
      for (int v = 0; v < 2; ++v) {
        out << "http://" << t << v << "/\t" << t << " title\t" << t << " body text " << v << "\n";
      }
    }
  }
  const auto bm25_scores = dir.file("bm25.tsv");
  CHECK(run_cli("baseline-bm25 " + corpus + " " + labeled + " " + bm25_scores).exit_code == 0);
  // Matching topic should outscore a mismatched one.
  std::ifstream in(bm25_scores);
  std::string line;
  std::getline(in, line);
  const auto fields = line.find("alpha");
  CHECK(fields != std::string::npos);
}
