// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "terank/cli.hpp"
#include "terank/digest.hpp"
#include "terank/evaluation.hpp"
#include "terank/manifest.hpp"
#include "terank/metrics.hpp"
#include "terank/perturbation.hpp"
#include "terank/scoring.hpp"
#include "terank/synth.hpp"
#include "test_util.hpp"

using namespace terank;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double max_intra_change(const EmbeddingSet& a, const EmbeddingSet& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      if (a.labels()[i] != a.labels()[j]) continue;
      worst = std::max(worst, std::abs((a.features().row(i) - a.features().row(j)).norm() -
                                       (b.features().row(i) - b.features().row(j)).norm()));
    }
  }
  return worst;
}

// 1 -------------------------------------------------------------------------
Outcome spread_unit_displacement() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = gen_class_gaussians(3, 200, 16, 2.0, 1.0, 1000 + seed);
    const auto g = class_geometry(set);
    const auto out = spread(set);
    for (Eigen::Index i = 0; i < set.size(); ++i) {
      const auto c = g.centroids.row(set.labels()[i]);
      const double before = (set.features().row(i) - c).norm();
      if (before <= 1e-12) continue;
      worst = std::max(worst, std::abs((out.features().row(i) - c).norm() - before - 1.0));
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-5, "max |increase - 1| = " + num(worst));
  o.require(secs < 1.0, "runtime " + num(secs) + " s");
  if (o.pass) o.detail = "max |increase - 1| = " + num(worst) + ", " + num(secs) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome radius_forms_agree() {
  Outcome o;
  RandomStream rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.below(60));
    const int d = 1 + static_cast<int>(rng.below(32));
    const Matrix x = test::gaussian_matrix(rng, n, d, 0.5 + 0.05 * t);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::RowVectorXd stds = ((x.rowwise() - mean).array().square().colwise().sum() / n).sqrt();
    worst = std::max(worst, std::abs(class_radius(x, class_centroid(x)) - stds.norm()));
  }
  o.require(worst <= 1e-6, "max difference " + num(worst));
  if (o.pass) o.detail = "max difference " + num(worst) + " over 100 classes";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome attract_equilibrium_and_rigidity() {
  Outcome o;
  RandomStream rng(33);
  double worst_eq = 0.0;
  double worst_rigid = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + static_cast<int>(rng.below(10));
    Matrix a = test::gaussian_matrix(rng, 25, d);
    Matrix b = test::gaussian_matrix(rng, 35, d, 1.5);
    a.rowwise() -= a.colwise().mean();
    b.rowwise() -= b.colwise().mean();
    PerturbConfig cfg;
    cfg.sigma = 0.2 + 0.05 * t;
    cfg.alpha = 0.01 * (1 + t);
    const double ra = class_radius(a, Vector::Zero(d)), rb = class_radius(b, Vector::Zero(d));
    const Vector dir = test::gaussian_matrix(rng, d, 1).col(0).normalized();
    b.rowwise() += (cfg.sigma * (ra + rb) * dir).transpose();
    Matrix both(60, d);
    both << a, b;
    std::vector<int> labels(60, 0);
    std::fill(labels.begin() + 25, labels.end(), 1);
    const EmbeddingSet set(both, labels, 2);
    for (auto direction : {AttractDirection::toward_other, AttractDirection::literal_eq3}) {
      cfg.attract_direction = direction;
      const auto out = attract(set, class_geometry(set), cfg);
      worst_eq = std::max(worst_eq, (out.features() - set.features()).cwiseAbs().maxCoeff());
      worst_rigid = std::max(worst_rigid, max_intra_change(set, out));
    }
  }
  // Rigidity away from equilibrium, including the full SA composition.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = gen_class_gaussians(4, 30, 8, 2.0, 1.0, seed);
    PerturbConfig cfg;
    cfg.alpha = 0.05;
    worst_rigid = std::max(worst_rigid, max_intra_change(set, attract(set, class_geometry(set), cfg)));
    const auto spreaded = spread(set);
    worst_rigid = std::max(worst_rigid, max_intra_change(spreaded, attract(spreaded, class_geometry(spreaded), cfg)));
  }
  o.require(worst_eq <= 1e-9, "equilibrium displacement " + num(worst_eq));
  o.require(worst_rigid <= 1e-9, "intra-class distance change " + num(worst_rigid));
  if (o.pass) o.detail = "equilibrium shift " + num(worst_eq) + ", intra-class change " + num(worst_rigid);
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome logme_oracle() {
  Outcome o;
  double worst = 0.0;
  int iterations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(4000 + seed);
    const int n = 3 + static_cast<int>(rng.below(4));
    const int d = 1 + static_cast<int>(rng.below(2));
    Matrix f = test::gaussian_matrix(rng, n, d);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = i % 2 == 0 ? 1.0 : 0.0;
    f.col(0) += 0.8 * y;
    const auto fit = maximize_evidence(f, y);
    const double grid = test::grid_max_evidence(f, y);
    worst = std::max(worst, std::abs(fit.evidence - grid));
    iterations = std::max(iterations, fit.iterations);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
      o.require(fit.trace[i] >= fit.trace[i - 1] - 1e-12, "evidence decreased in instance " + std::to_string(seed));
    }
  }
  o.require(worst <= 1e-2, "max |fixed point - grid| = " + num(worst));
  if (o.pass) o.detail = "max |fixed point - grid| = " + num(worst) + ", traces monotone";
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome tau_oracle() {
  Outcome o;
  RandomStream rng(55);
  double worst = 0.0;
  for (int len = 2; len <= 6; ++len) {
    for (int t = 0; t < 200; ++t) {
      std::vector<double> truth(len), scores(len);
      for (int i = 0; i < len; ++i) {
        truth[i] = t % 3 == 0 ? static_cast<double>(rng.below(4)) : rng.uniform() * 100.0;
        scores[i] = t % 2 == 0 ? static_cast<double>(rng.below(3)) : rng.gaussian();
      }
      if (std::all_of(truth.begin(), truth.end(), [&](double v) { return v == truth[0]; })) truth[0] += 1.0;
      worst = std::max(worst, std::abs(weighted_kendall_tau(truth, scores) - test::exhaustive_tau_symmetric(truth, scores)));
      worst = std::max(worst, std::abs(weighted_kendall_tau(truth, scores, TauWeighting::truth_ranks) -
                                       test::exhaustive_tau(truth, scores, false)));
      std::vector<double> x(len), neg(len);
      for (int i = 0; i < len; ++i) {
        x[i] = rng.gaussian();
        neg[i] = -x[i];
      }
      o.require(std::abs(weighted_kendall_tau(x, x) - 1.0) <= 1e-12, "tau(x, x) != 1");
      o.require(std::abs(weighted_kendall_tau(x, neg) + 1.0) <= 1e-12, "tau(x, -x) != -1");
    }
  }
  o.require(worst <= 1e-12, "max deviation " + num(worst));
  if (o.pass) o.detail = "1000 instances, max deviation " + num(worst);
  return o;
}

// 6 -------------------------------------------------------------------------
EmbeddingSet with_labels(const EmbeddingSet& set, std::vector<int> labels) {
  return EmbeddingSet(set.features(), std::move(labels), set.class_count());
}

Outcome metric_sanity() {
  Outcome o;
  const auto t0 = Clock::now();
  {
    RandomStream rng(6);
    std::vector<int> labels(4000, 0);
    std::fill(labels.begin() + 2000, labels.end(), 1);
    const double g = score_gbc(EmbeddingSet(test::gaussian_matrix(rng, 4000, 4), labels, 2));
    o.require(std::abs(g + 1.0) <= 0.05, "GBC coincident = " + num(g));
    auto far = gen_class_gaussians(3, 100, 4, 0.0, 1.0, 7);
    Matrix f = far.features();
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, 0) += 100.0 * far.labels()[i];
    const double gf = score_gbc(far.with_features(f));
    o.require(gf > -1e-8, "GBC separated = " + num(gf));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = gen_class_gaussians(3, 80, 5, 0.5 + seed * 0.5, 1.0, 60 + seed);
    const double s = score_nleep(set, std::nullopt, seed);
    o.require(s <= 0.0, "NLEEP positive: " + num(s));
    const double l = score_lda(set);
    o.require(l >= 0.0 && l <= 1.0, "LDA outside [0,1]: " + num(l));
  }
  {
    const auto tight = gen_class_gaussians(3, 100, 4, 20.0, 0.5, 8);
    const double s = score_nleep(tight, std::nullopt, 1);
    o.require(s > -0.05, "NLEEP near-separable = " + num(s));
    const auto sep = gen_class_gaussians(4, 100, 5, 20.0, 1.0, 9);
    const double l = score_lda(sep);
    o.require(l > 0.95, "LDA separable = " + num(l));
    auto shuffled = gen_class_gaussians(4, 500, 5, 3.0, 1.0, 10);
    auto labels = shuffled.labels();
    RandomStream rng(11);
    for (std::size_t i = labels.size() - 1; i > 0; --i) std::swap(labels[i], labels[rng.below(i + 1)]);
    const double chance = score_lda(with_labels(shuffled, labels));
    o.require(std::abs(chance - 0.25) <= 0.05, "LDA shuffled = " + num(chance));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime " + num(secs) + " s");
  if (o.pass) o.detail = num(secs) + " s";
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome truth_fidelity() {
  Outcome o;
  const fs::path dir = fs::path(TERANK_DATA_DIR) / "truth";
  try {
    for (const auto& s : test::kTruthSpotChecks) {
      const auto acc = load_truth(dir / s.file).accuracy(s.model, s.dataset, s.regime, s.pool);
      o.require(acc && *acc == s.accuracy, std::string(s.model) + "/" + s.dataset + "/" + s.regime + " mismatch");
    }
    for (const auto& f : test::kTruthFiles) {
      o.require(fnv1a64_file(dir / f.file) == f.fnv1a64, std::string(f.file) + " checksum changed");
    }
  } catch (const std::exception& e) {
    o.require(false, e.what());
  }
  if (o.pass) o.detail = "10 spot checks, 6 checksums";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome improvement_arithmetic() {
  Outcome o;
  const auto rows = improvement_summary(test::reports_from(test::kLogmeBefore, "none"),
                                        test::reports_from(test::kLogmeAfter, "sa"));
  o.require(rows.size() == 1, "expected one summary row");
  if (!o.pass) return o;
  const double pct = rows[0].improvement_pct;
  o.require(std::abs(pct - test::kExpectedImprovementPct) <= 0.5, "improvement " + num(pct) + "%");
  o.require(std::abs(rows[0].mean_before - 0.542) < 1e-3 && std::abs(rows[0].mean_after - 0.698) < 1e-3,
            "means " + num(rows[0].mean_before) + " / " + num(rows[0].mean_after));
  if (o.pass) o.detail = "means " + num(rows[0].mean_before) + " -> " + num(rows[0].mean_after) + ", +" + num(pct) + "%";
  return o;
}

// 9 -------------------------------------------------------------------------
constexpr std::uint64_t kZooSeed = 1;

Outcome end_to_end_zoo() {
  Outcome o;
  const auto t0 = Clock::now();
  ZooConfig cfg;
  cfg.rho = linspace(2.0, 2.0, 8);
  cfg.noise = linspace(6.0, 1.5, 8);
  cfg.seed = kZooSeed;
  const auto zoo = gen_model_zoo(cfg);
  PerturbConfig none;
  none.mode = PerturbMode::none;
  const PerturbConfig sa;  // alpha 0.005, sigma 0.6
  std::string taus;
  for (auto metric : {MetricId::logme, MetricId::gbc, MetricId::nleep, MetricId::lda}) {
    std::vector<ScoreRecord> before, after;
    for (std::size_t m = 0; m < zoo.models.size(); ++m) {
      const auto seed = model_seed(kZooSeed, m);
      before.push_back(score_model(zoo.models[m], metric, none, EnergyTarget{}, seed));
      after.push_back(score_model(zoo.models[m], metric, sa, EnergyTarget{}, seed));
      o.require(before.back().score != after.back().score,
                std::string(to_string(metric)) + ": SA left " + zoo.models[m].model_id() + " unchanged");
    }
    const double tb = rank_and_report(before, zoo.truth, "synthetic", "synthetic", "supervised").tau_w;
    const double ta = rank_and_report(after, zoo.truth, "synthetic", "synthetic", "supervised").tau_w;
    o.require(tb >= 0.8, std::string(to_string(metric)) + " tau_w without SA = " + num(tb));
    o.require(ta >= 0.8, std::string(to_string(metric)) + " tau_w with SA = " + num(ta));
    taus += std::string(to_string(metric)) + " " + num(tb) + "/" + num(ta) + "  ";
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + num(secs) + " s");
  if (o.pass) o.detail = "none/sa: " + taus + num(secs) + " s";
  return o;
}

// 10 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string without_timing(const fs::path& p) {
  return strip_timing(nlohmann::ordered_json::parse(slurp(p))).dump(2);
}

Outcome determinism() {
  Outcome o;
  const auto dir = test::scratch_dir("acceptance_determinism");
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) {
    const int code = cli::run(args, sink, sink);
    o.require(code == 0, "command failed: " + args.front() + " (exit " + std::to_string(code) + ")");
  };
  const auto zoo = (dir / "zoo").string();
  run({"synth", "--seed", "7", "--out", zoo});
  if (!o.pass) return o;
  for (const char* jobs : {"1", "8"}) {
    const auto run_dir = dir / (std::string("jobs_") + jobs);
    const auto scores = (run_dir / "scores.json").string();
    run({"score", "--input", zoo, "--seed", "7", "--jobs", jobs, "--metric", "logme", "--metric", "gbc", "--metric",
         "nleep", "--metric", "lda", "--mode", "none", "--mode", "sa", "--out", scores});
    run({"evaluate", "--scores", scores, "--truth", zoo + "/truth.csv", "--out", (run_dir / "eval").string()});
  }
  if (!o.pass) return o;
  o.require(without_timing(dir / "jobs_1" / "scores.json") == without_timing(dir / "jobs_8" / "scores.json"),
            "score JSON differs");
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "jobs_1" / "eval")) {
    if (entry.path().extension() != ".json") continue;
    const auto other = dir / "jobs_8" / "eval" / entry.path().filename();
    o.require(fs::exists(other) && without_timing(entry.path()) == without_timing(other),
              entry.path().filename().string() + " differs");
    ++files;
  }
  o.require(files == 9, "expected 9 JSON files per evaluation, found " + std::to_string(files));
  if (o.pass) o.detail = "score JSON and " + std::to_string(files) + " evaluate JSON files identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"spread unit displacement", spread_unit_displacement},
      {"radius form equivalence", radius_forms_agree},
      {"attract equilibrium and rigidity", attract_equilibrium_and_rigidity},
      {"LogME fixed point vs grid oracle", logme_oracle},
      {"weighted tau vs exhaustive oracle", tau_oracle},
      {"metric sanity suite", metric_sanity},
      {"truth table fidelity", truth_fidelity},
      {"improvement summary arithmetic", improvement_arithmetic},
      {"end-to-end synthetic zoo", end_to_end_zoo},
      {"determinism across --jobs", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s [%2zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
