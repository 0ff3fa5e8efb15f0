#include <chrono>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "terank/cli.hpp"
#include "terank/errors.hpp"
#include "terank/manifest.hpp"
#include "terank/scoring.hpp"
#include "terank/synth.hpp"
#include "test_util.hpp"

using namespace terank;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// A small zoo on disk, shared by the tests below.
fs::path small_zoo() {
  static const fs::path dir = [] {
    auto d = test::scratch_dir("cli_zoo");
    const auto r = run_cli({"synth", "--seed", "3", "--models", "4", "--classes", "3", "--per-class", "40", "--dim",
                            "6", "--rho-range", "2:2", "--noise-range", "3:1", "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("synth writes models and truth") {
  const auto dir = small_zoo();
  for (int m = 0; m < 4; ++m) CHECK(fs::exists(dir / ("model_0" + std::to_string(m) + ".emb1")));
  const auto truth = load_truth(dir / "truth.csv");
  CHECK(truth.size() == 4);
  CHECK(load_emb1(dir / "model_02.emb1").class_count() == 3);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"score"}).code == cli::kUsage);
  const auto dir = small_zoo().string();
  CHECK(run_cli({"score", "--input", dir, "--alpha", "-1"}).code == cli::kUsage);
  CHECK(run_cli({"score", "--input", dir, "--metric", "accuracy"}).code == cli::kUsage);
  CHECK(run_cli({"score", "--input", dir, "--pca-energy", "0.5", "--pca-rank", "2"}).code == cli::kUsage);
  CHECK(run_cli({"score", "--input", dir, "--format", "xml"}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("data errors exit with 3") {
  const auto dir = test::scratch_dir("cli_data_err");
  CHECK(run_cli({"score", "--input", (dir / "nope.emb1").string()}).code == cli::kDataError);
  std::ofstream(dir / "bad.emb1") << "EMB2 nonsense";
  CHECK(run_cli({"score", "--input", (dir / "bad.emb1").string()}).code == cli::kDataError);

  // A scored model missing from the truth table.
  const auto scores = (dir / "scores.json").string();
  REQUIRE(run_cli({"score", "--input", small_zoo().string(), "--out", scores}).code == 0);
  std::ofstream(dir / "truth.csv") << "model,dataset,regime,pool,accuracy\nmodel_00,synthetic,synthetic,supervised,50\n";
  const auto r = run_cli({"evaluate", "--scores", scores, "--truth", (dir / "truth.csv").string(), "--out",
                          (dir / "eval").string()});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("model_01") != std::string::npos);
}

TEST_CASE("score emits paired records for each mode") {
  const auto dir = test::scratch_dir("cli_score");
  const auto out = (dir / "scores.json").string();
  const auto r = run_cli({"score", "--input", small_zoo().string(), "--metric", "gbc", "--metric", "lda", "--mode",
                          "none", "--mode", "sa", "--out", out});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  const auto& recs = doc["records"];
  REQUIRE(recs.size() == 4 * 2 * 2);
  for (std::size_t i = 0; i < recs.size(); i += 2) {
    CHECK(recs[i]["model"] == recs[i + 1]["model"]);
    CHECK(recs[i]["metric"] == recs[i + 1]["metric"]);
    CHECK(recs[i]["mode"] == "none");
    CHECK(recs[i]["perturbed"] == false);
    CHECK(recs[i + 1]["mode"] == "sa");
    CHECK(recs[i + 1]["perturbed"] == true);
    CHECK(recs[i]["score"] != recs[i + 1]["score"]);
  }
  CHECK(doc["manifest"]["tool"] == kToolVersion);
  CHECK(doc["manifest"]["inputs"].size() == 4);
  CHECK(doc["manifest"]["config"]["alpha"] == 0.005);

  const auto csv = run_cli({"score", "--input", small_zoo().string(), "--format", "csv"});
  REQUIRE(csv.code == 0);
  const auto rows = lines(csv.out);
  CHECK(rows.front() == "model,dataset,metric,mode,score,wall_time_s");
  CHECK(rows.size() == 5);
}

TEST_CASE("CSV inputs are scored like EMB1 inputs") {
  const auto dir = test::scratch_dir("cli_csv");
  const auto set = load_emb1(small_zoo() / "model_00.emb1");
  {
    std::ofstream out(dir / "model_00.csv");
    out.precision(9);
    out << "x0,x1,x2,x3,x4,x5,cls\n";
    for (Eigen::Index i = 0; i < set.size(); ++i) {
      for (Eigen::Index j = 0; j < set.dim(); ++j) out << set.features()(i, j) << ',';
      out << set.labels()[i] + 10 << '\n';
    }
  }
  const auto a = run_cli({"score", "--input", (dir / "model_00.csv").string(), "--label-col", "cls", "--metric",
                          "gbc", "--format", "csv"});
  const auto b = run_cli({"score", "--input", (small_zoo() / "model_00.emb1").string(), "--metric", "gbc",
                          "--format", "csv"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  auto score_of = [](const std::string& out) {
    const auto row = lines(out).at(1);
    const auto cells = row.substr(0, row.rfind(','));
    return std::stod(cells.substr(cells.rfind(',') + 1));
  };
  CHECK(score_of(a.out) == doctest::Approx(score_of(b.out)).epsilon(1e-6));
}

TEST_CASE("evaluate writes reports and reruns identically") {
  const auto dir = test::scratch_dir("cli_eval");
  const auto scores = (dir / "scores.json").string();
  const auto truth = (small_zoo() / "truth.csv").string();
  REQUIRE(run_cli({"score", "--input", small_zoo().string(), "--metric", "logme", "--mode", "none", "--mode", "sa",
                   "--out", scores})
              .code == 0);
  const auto first = run_cli({"evaluate", "--scores", scores, "--truth", truth, "--out", (dir / "a").string()});
  const auto second = run_cli({"evaluate", "--scores", scores, "--truth", truth, "--out", (dir / "b").string()});
  REQUIRE(first.code == 0);
  REQUIRE(second.code == 0);
  for (const char* f : {"report_logme_none.json", "report_logme_sa.json", "plot_logme_none.csv", "plot_logme_sa.csv",
                        "summary.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto report = report_from_json(nlohmann::json::parse(slurp(dir / "a" / "report_logme_sa.json")));
  CHECK(report.models.size() == 4);
  CHECK(report.tau_w >= -1.0);
  CHECK(report.tau_w <= 1.0);
  const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["comparisons"][0]["after"] == "sa");
  CHECK(lines(slurp(dir / "a" / "plot_logme_sa.csv")).size() == 5);

  REQUIRE(run_cli({"evaluate", "--scores", scores, "--truth", truth, "--format", "csv", "--out", (dir / "c").string()})
              .code == 0);
  CHECK(lines(slurp(dir / "c" / "summary.csv")).front() ==
        "before,after,metric,pairs,mean_before,mean_after,improvement_pct");
  CHECK(run_cli({"evaluate", "--scores", scores, "--truth", truth}).code == cli::kUsage);
}

TEST_CASE("sweep covers each grid once per metric") {
  const auto zoo = small_zoo().string();
  const auto truth = (small_zoo() / "truth.csv").string();
  const auto r = run_cli({"sweep", "--input", zoo, "--truth", truth, "--metric", "gbc", "--metric", "lda",
                          "--alpha-grid", "0.001,0.01,0.05", "--sigma-grid", "0.5,0.9"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows.front() == "varied,alpha,sigma,metric,tau_w");
  CHECK(rows.size() == 1 + 2 * (3 + 2));
  CHECK(rows[1].rfind("alpha,0.001,0.6,gbc,", 0) == 0);
  CHECK(run_cli({"sweep", "--input", zoo}).code == cli::kUsage);
}

TEST_CASE("one-point sweep equals score plus evaluate") {
  const auto dir = test::scratch_dir("cli_sweep_one");
  const auto zoo = small_zoo().string();
  const auto truth = (small_zoo() / "truth.csv").string();
  const auto sweep = run_cli({"sweep", "--input", zoo, "--truth", truth, "--metric", "nleep", "--alpha-grid", "0.01",
                              "--sigma-grid", "0.7", "--alpha", "0.01", "--sigma", "0.7", "--seed", "5"});
  REQUIRE(sweep.code == 0);
  const auto rows = lines(sweep.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].substr(rows[1].find(',')) == rows[2].substr(rows[2].find(',')));

  const auto scores = (dir / "s.json").string();
  REQUIRE(run_cli({"score", "--input", zoo, "--metric", "nleep", "--alpha", "0.01", "--sigma", "0.7", "--seed", "5",
                   "--out", scores})
              .code == 0);
  REQUIRE(run_cli({"evaluate", "--scores", scores, "--truth", truth, "--out", (dir / "e").string()}).code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "e" / "report_nleep_sa.json"));
  const double tau = std::stod(rows[1].substr(rows[1].rfind(',') + 1));
  CHECK(tau == report["tau_w"].get<double>());
}

TEST_CASE("sweep can generate its own zoo") {
  const auto r = run_cli({"sweep", "--models", "3", "--classes", "3", "--per-class", "20", "--dim", "4",
                          "--alpha-grid", "0.005", "--sigma-grid", "0.6"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 3);
}

TEST_CASE("bench reports every metric with an overhead ratio") {
  const auto r = run_cli({"bench", "--input", small_zoo().string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows.front() == "metric,raw_s,none_s,sa_s,sa_over_none");
  REQUIRE(rows.size() == 5);
  CHECK(rows[1].rfind("logme,", 0) == 0);
  CHECK(rows[4].rfind("lda,", 0) == 0);
  CHECK(std::count(rows[2].begin(), rows[2].end(), ',') == 4);
}

TEST_CASE("NLEEP on PCA-reduced inputs is no slower than at full dimension") {
  // Low-rank embeddings: four overlapping classes in 6 latent dimensions,
  // mapped to 256 features with a little isotropic noise.
  RandomStream rng(12);
  const int n = 800, d = 256, latent = 6;
  const Matrix w = test::gaussian_matrix(rng, latent, d);
  const Matrix mu = test::gaussian_matrix(rng, 4, latent, 0.7);
  Matrix z(n, latent);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 4;
    for (int j = 0; j < latent; ++j) z(i, j) = mu(labels[i], j) + rng.gaussian();
  }
  const EmbeddingSet raw(z * w + test::gaussian_matrix(rng, n, d, 0.05), labels, 4);
  const EmbeddingSet reduced = transform(fit_pca(raw), raw);
  REQUIRE(reduced.dim() < 10);
  auto best_of = [](int reps, const auto& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double full = best_of(3, [&] { score_nleep(raw, std::nullopt, 1); });
  const double small = best_of(3, [&] { score_nleep(reduced, std::nullopt, 1); });
  CHECK(small <= full);
}
