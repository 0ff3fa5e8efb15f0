#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "terank/cli.hpp"
#include "terank/digest.hpp"
#include "terank/errors.hpp"
#include "terank/evaluation.hpp"
#include "terank/manifest.hpp"
#include "terank/metrics.hpp"
#include "terank/perturbation.hpp"
#include "terank/reduction.hpp"
#include "terank/scoring.hpp"
#include "terank/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace terank::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string format = "json";
};

struct PipelineOptions {
  std::vector<std::string> metrics{"logme"};
  std::vector<std::string> modes{"sa"};
  double alpha = kDefaultAlpha;
  double sigma = kDefaultSigma;
  std::string attract_dir = "toward";
  double pca_energy = kDefaultPcaEnergy;
  int pca_rank = 0;
  int nleep_k = 0;
  double lda_eps = 1e-4;
  std::string label_col = "label";
  std::string dataset = "synthetic";

  PcaTarget pca_target() const {
    if (pca_rank > 0) return RankTarget{pca_rank};
    return EnergyTarget{pca_energy};
  }
  MetricOptions metric_options() const {
    MetricOptions o;
    if (nleep_k > 0) o.nleep_components = nleep_k;
    o.lda.epsilon_scale = lda_eps;
    return o;
  }
  PerturbConfig perturb(PerturbMode mode) const {
    PerturbConfig cfg;
    cfg.alpha = alpha;
    cfg.sigma = sigma;
    cfg.mode = mode;
    cfg.attract_direction = parse_attract_direction(attract_dir);
    return cfg;
  }
  void validate() const {
    perturb(PerturbMode::none).validate();
    if (pca_rank == 0 && !(pca_energy > 0.0 && pca_energy <= 1.0)) throw UsageError("--pca-energy must be in (0, 1]");
    if (pca_rank < 0) throw UsageError("--pca-rank must be positive");
    if (nleep_k < 0) throw UsageError("--nleep-k must be positive");
    if (!(lda_eps > 0.0)) throw UsageError("--lda-eps must be positive");
    if (metrics.empty()) throw UsageError("at least one --metric is required");
    for (const auto& m : metrics) parse_metric(m);
    for (const auto& m : modes) parse_perturb_mode(m);
  }
  json to_json() const {
    json j;
    j["metrics"] = metrics;
    j["modes"] = modes;
    j["alpha"] = alpha;
    j["sigma"] = sigma;
    j["attract_dir"] = attract_dir;
    if (pca_rank > 0) {
      j["pca_rank"] = pca_rank;
    } else {
      j["pca_energy"] = pca_energy;
    }
    if (nleep_k > 0) j["nleep_k"] = nleep_k;
    j["lda_eps"] = lda_eps;
    j["label_col"] = label_col;
    j["dataset"] = dataset;
    return j;
  }
};

struct ZooOptions {
  int models = 8;
  int classes = 5;
  int per_class = 300;
  int dim = 16;
  std::string rho_range = "2:2";
  std::string noise_range = "6:1.5";

  ZooConfig config(std::uint64_t seed) const {
    auto parse_range = [this](const std::string& text, const char* flag) {
      const auto colon = text.find(':');
      try {
        if (colon == std::string::npos) return linspace(std::stod(text), std::stod(text), models);
        return linspace(std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1)), models);
      } catch (const std::exception&) {
        throw UsageError(std::string(flag) + " expects a:b");
      }
    };
    ZooConfig cfg;
    cfg.classes = classes;
    cfg.per_class = per_class;
    cfg.dim = dim;
    cfg.rho = parse_range(rho_range, "--rho-range");
    cfg.noise = parse_range(noise_range, "--noise-range");
    cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

void add_pipeline_flags(CLI::App& cmd, PipelineOptions& p) {
  cmd.add_option("--metric", p.metrics, "Metric(s): logme, gbc, nleep, lda (repeatable)")
      ->check(CLI::IsMember({"logme", "gbc", "nleep", "lda"}));
  cmd.add_option("--alpha", p.alpha, "Attract step scale")->capture_default_str();
  cmd.add_option("--sigma", p.sigma, "Equilibrium radius multiplier")->capture_default_str();
  cmd.add_option("--attract-dir", p.attract_dir, "Attract sign convention: toward or literal")
      ->check(CLI::IsMember({"toward", "literal"}))
      ->capture_default_str();
  auto* energy = cmd.add_option("--pca-energy", p.pca_energy, "PCA retained variance fraction")->capture_default_str();
  auto* rank = cmd.add_option("--pca-rank", p.pca_rank, "Explicit PCA rank");
  energy->excludes(rank);
  cmd.add_option("--nleep-k", p.nleep_k, "GMM components for NLEEP (default: class count)");
  cmd.add_option("--lda-eps", p.lda_eps, "LDA ridge scale relative to trace(S_w)/k")->capture_default_str();
  cmd.add_option("--label-col", p.label_col, "Label column for CSV inputs")->capture_default_str();
  cmd.add_option("--dataset", p.dataset, "Dataset id attached to scores")->capture_default_str();
}

void add_zoo_flags(CLI::App& cmd, ZooOptions& z) {
  cmd.add_option("--models", z.models, "Number of models")->capture_default_str();
  cmd.add_option("--classes", z.classes, "Classes per dataset")->capture_default_str();
  cmd.add_option("--per-class", z.per_class, "Samples per class")->capture_default_str();
  cmd.add_option("--dim", z.dim, "Feature dimension")->capture_default_str();
  cmd.add_option("--rho-range", z.rho_range, "Centroid scale, first:last model")->capture_default_str();
  cmd.add_option("--noise-range", z.noise_range, "Intra-class std, first:last model")->capture_default_str();
}

std::vector<fs::path> list_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".emb1" || ext == ".csv") && entry.path().stem() != "truth") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      throw IoError("input '" + in + "' does not exist");
    }
  }
  if (files.empty()) throw DataError("no .emb1 or .csv inputs found");
  return files;
}

EmbeddingSet load_input(const fs::path& path, const PipelineOptions& p) {
  EmbeddingSet set = path.extension() == ".csv" ? load_csv(path, p.label_col) : load_emb1(path);
  return set.with_ids(path.stem().string(), p.dataset);
}

/// Runs task(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written to per-index slots by the task.
void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct ModelScores {
  std::vector<ScoreRecord> records;
  Diagnostics diag;
};

std::vector<ModelScores> score_all(const std::vector<EmbeddingSet>& sets, const PipelineOptions& p,
                                   std::uint64_t seed, int jobs) {
  std::vector<ModelScores> out(sets.size());
  const auto opts = p.metric_options();
  const auto pca = p.pca_target();
  parallel_for(static_cast<int>(sets.size()), jobs, [&](int i) {
    for (const auto& metric : p.metrics) {
      for (const auto& mode : p.modes) {
        out[i].records.push_back(score_model(sets[i], parse_metric(metric), p.perturb(parse_perturb_mode(mode)), pca,
                                             model_seed(seed, static_cast<std::uint64_t>(i)), opts, &out[i].diag));
      }
    }
  });
  return out;
}

json record_to_json(const ScoreRecord& r) {
  return json{{"model", r.model_id},          {"dataset", r.dataset_id}, {"metric", to_string(r.metric)},
              {"mode", to_string(r.mode)},    {"perturbed", r.perturbed()}, {"score", r.score},
              {"wall_time_s", r.wall_time_s}};
}

ScoreRecord record_from_json(const nlohmann::json& j) {
  try {
    ScoreRecord r;
    r.model_id = j.at("model").get<std::string>();
    r.dataset_id = j.at("dataset").get<std::string>();
    r.metric = parse_metric(j.at("metric").get<std::string>());
    r.mode = parse_perturb_mode(j.at("mode").get<std::string>());
    r.score = j.at("score").get<double>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed score record: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string csv_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::vector<std::string> inputs;
  PipelineOptions pipeline;
};

int cmd_score(const ScoreArgs& a, const GlobalOptions& g, std::ostream& out) {
  a.pipeline.validate();
  const auto start = Clock::now();
  RunManifest manifest;
  manifest.command = "score";
  manifest.config = a.pipeline.to_json();
  manifest.config["seed"] = g.seed;

  const auto files = list_inputs(a.inputs);
  std::vector<EmbeddingSet> sets;
  for (const auto& f : files) {
    manifest.add_input(f);
    sets.push_back(load_input(f, a.pipeline));
  }
  manifest.step_times_s.emplace_back("load", seconds_since(start));
  const auto score_start = Clock::now();
  const auto scored = score_all(sets, a.pipeline, g.seed, g.jobs);
  manifest.step_times_s.emplace_back("score", seconds_since(score_start));

  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "model,dataset,metric,mode,score,wall_time_s\n";
    for (const auto& m : scored) {
      for (const auto& r : m.records) {
        csv << r.model_id << ',' << r.dataset_id << ',' << to_string(r.metric) << ',' << to_string(r.mode) << ','
            << csv_number(r.score) << ',' << csv_number(r.wall_time_s) << '\n';
      }
    }
    write_text(g.out, csv.str(), out);
    return kOk;
  }
  json records = json::array();
  json warnings = json::array();
  for (const auto& m : scored) {
    for (const auto& r : m.records) records.push_back(record_to_json(r));
    for (const auto& w : m.diag.warnings) warnings.push_back(w);
  }
  json doc;
  doc["manifest"] = manifest.to_json();
  doc["records"] = std::move(records);
  doc["warnings"] = std::move(warnings);
  write_text(g.out, doc.dump(2) + "\n", out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string scores;
  std::string truth;
  std::string dataset;
  std::string regime = "synthetic";
  std::string pool = "supervised";
  std::string weighting = "symmetric";
};

struct Evaluation {
  std::vector<RankingReport> reports;  // ordered by (metric, mode) of first appearance
  json summary = json::array();
};

Evaluation evaluate_records(const std::vector<ScoreRecord>& records, const TruthTable& truth, const EvaluateArgs& a) {
  std::string dataset = a.dataset;
  if (dataset.empty()) {
    for (const auto& r : records) {
      if (dataset.empty()) dataset = r.dataset_id;
      if (r.dataset_id != dataset) throw UsageError("scores span several datasets; pass --dataset");
    }
  }
  const auto weighting = parse_weighting(a.weighting);
  std::vector<std::pair<MetricId, PerturbMode>> cells;
  std::map<std::pair<MetricId, PerturbMode>, std::vector<ScoreRecord>> grouped;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.metric, r.mode);
    if (!grouped.count(key)) cells.push_back(key);
    grouped[key].push_back(r);
  }
  Evaluation ev;
  for (const auto& key : cells) {
    ev.reports.push_back(rank_and_report(grouped[key], truth, dataset, a.regime, a.pool, weighting));
  }

  // Baseline (mode none) against every other mode present.
  std::vector<RankingReport> base;
  for (const auto& r : ev.reports) {
    if (r.perturb_mode == "none") base.push_back(r);
  }
  std::vector<std::string> other_modes;
  for (const auto& r : ev.reports) {
    if (r.perturb_mode != "none" &&
        std::find(other_modes.begin(), other_modes.end(), r.perturb_mode) == other_modes.end()) {
      other_modes.push_back(r.perturb_mode);
    }
  }
  if (!base.empty()) {
    for (const auto& mode : other_modes) {
      std::vector<RankingReport> after;
      for (const auto& r : ev.reports) {
        if (r.perturb_mode == mode) after.push_back(r);
      }
      json rows = json::array();
      for (const auto& row : improvement_summary(base, after)) {
        rows.push_back({{"metric", row.metric},
                        {"pairs", row.pairs},
                        {"mean_before", row.mean_before},
                        {"mean_after", row.mean_after},
                        {"improvement_pct", row.improvement_pct}});
      }
      ev.summary.push_back({{"before", "none"}, {"after", mode}, {"rows", rows}});
    }
  }
  return ev;
}

int cmd_evaluate(const EvaluateArgs& a, const GlobalOptions& g, std::ostream& out) {
  parse_weighting(a.weighting);
  if (g.out.empty()) throw UsageError("evaluate needs --out <dir>");
  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.config = {{"dataset", a.dataset}, {"regime", a.regime}, {"pool", a.pool}, {"weighting", a.weighting}};

  std::ifstream in(a.scores);
  if (!in) throw IoError("cannot open " + a.scores);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed score JSON: " + std::string(e.what()));
  }
  // Score files carry wall-clock timings; digest them without those so that
  // reruns of the same scoring job produce identical reports.
  manifest.inputs.emplace_back(fs::path(a.scores).filename().string(), hex64(fnv1a64(strip_timing(doc).dump())));
  manifest.add_input(a.truth);
  if (!doc.contains("records") || !doc["records"].is_array()) throw DataError("score JSON has no records array");
  std::vector<ScoreRecord> records;
  for (const auto& r : doc["records"]) records.push_back(record_from_json(r));
  if (doc.contains("manifest")) manifest.config["score_manifest"] = strip_timing(doc["manifest"]);
  const TruthTable truth = load_truth(a.truth);

  const auto ev = evaluate_records(records, truth, a);
  const fs::path dir(g.out);
  fs::create_directories(dir);
  const json manifest_json = manifest.to_json();
  out << std::left << std::setw(8) << "metric" << std::setw(9) << "mode" << "tau_w\n";
  for (const auto& r : ev.reports) {
    json j = report_to_json(r);
    j["manifest"] = manifest_json;
    const std::string stem = r.metric + "_" + r.perturb_mode;
    write_text((dir / ("report_" + stem + ".json")).string(), j.dump(2) + "\n", out);
    write_text((dir / ("plot_" + stem + ".csv")).string(), report_plot_csv(r), out);
    out << std::setw(8) << r.metric << std::setw(9) << r.perturb_mode << fixed(r.tau_w) << '\n';
  }
  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "before,after,metric,pairs,mean_before,mean_after,improvement_pct\n";
    for (const auto& cmp : ev.summary) {
      for (const auto& row : cmp["rows"]) {
        csv << cmp["before"].get<std::string>() << ',' << cmp["after"].get<std::string>() << ','
            << row["metric"].get<std::string>() << ',' << row["pairs"].get<std::size_t>() << ','
            << csv_number(row["mean_before"].get<double>()) << ',' << csv_number(row["mean_after"].get<double>())
            << ',' << csv_number(row["improvement_pct"].get<double>()) << '\n';
      }
    }
    write_text((dir / "summary.csv").string(), csv.str(), out);
  } else {
    json summary;
    summary["manifest"] = manifest_json;
    summary["comparisons"] = ev.summary;
    write_text((dir / "summary.json").string(), summary.dump(2) + "\n", out);
  }
  for (const auto& cmp : ev.summary) {
    for (const auto& row : cmp["rows"]) {
      out << row["metric"].get<std::string>() << ": " << cmp["after"].get<std::string>() << " vs none "
          << fixed(row["improvement_pct"].get<double>(), 2) << "%\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ZooSource {
  std::vector<std::string> inputs;
  std::string truth;
  ZooOptions zoo;
};

std::pair<std::vector<EmbeddingSet>, TruthTable> load_or_generate(const ZooSource& src, const PipelineOptions& p,
                                                                  std::uint64_t seed, RunManifest& manifest) {
  if (src.inputs.empty()) {
    ModelZoo zoo = gen_model_zoo(src.zoo.config(seed));
    manifest.config["zoo"] = {{"models", src.zoo.models},       {"classes", src.zoo.classes},
                              {"per_class", src.zoo.per_class}, {"dim", src.zoo.dim},
                              {"rho_range", src.zoo.rho_range}, {"noise_range", src.zoo.noise_range}};
    std::vector<EmbeddingSet> sets;
    for (auto& m : zoo.models) sets.push_back(m.with_ids(m.model_id(), p.dataset));
    return {std::move(sets), std::move(zoo.truth)};
  }
  if (src.truth.empty()) throw UsageError("--truth is required with --input");
  std::vector<EmbeddingSet> sets;
  for (const auto& f : list_inputs(src.inputs)) {
    manifest.add_input(f);
    sets.push_back(load_input(f, p));
  }
  manifest.add_input(src.truth);
  return {std::move(sets), load_truth(src.truth)};
}

struct SweepArgs {
  ZooSource source;
  PipelineOptions pipeline;
  std::vector<double> alpha_grid{0.001, 0.005, 0.01, 0.05};
  std::vector<double> sigma_grid{0.5, 0.6, 0.7, 0.8, 0.9};
  std::string regime = "synthetic";
  std::string pool = "supervised";
};

int cmd_sweep(const SweepArgs& a, const GlobalOptions& g, std::ostream& out) {
  a.pipeline.validate();
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.config = a.pipeline.to_json();
  auto [sets, truth] = load_or_generate(a.source, a.pipeline, g.seed, manifest);

  std::ostringstream csv;
  csv << "varied,alpha,sigma,metric,tau_w\n";
  struct Point {
    const char* varied;
    double alpha;
    double sigma;
  };
  std::vector<Point> points;
  for (double alpha : a.alpha_grid) points.push_back({"alpha", alpha, a.pipeline.sigma});
  for (double sigma : a.sigma_grid) points.push_back({"sigma", a.pipeline.alpha, sigma});
  for (const auto& metric : a.pipeline.metrics) {
    for (const auto& pt : points) {
      PipelineOptions p = a.pipeline;
      p.metrics = {metric};
      p.modes = {"sa"};
      p.alpha = pt.alpha;
      p.sigma = pt.sigma;
      p.validate();
      std::vector<ScoreRecord> records;
      for (auto& m : score_all(sets, p, g.seed, g.jobs)) records.insert(records.end(), m.records.begin(), m.records.end());
      EvaluateArgs ea;
      ea.regime = a.regime;
      ea.pool = a.pool;
      const auto ev = evaluate_records(records, truth, ea);
      csv << pt.varied << ',' << csv_number(pt.alpha) << ',' << csv_number(pt.sigma) << ',' << metric << ','
          << csv_number(ev.reports.front().tau_w) << '\n';
    }
  }
  write_text(g.out, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  ZooOptions zoo;
  std::string dataset = "synthetic";
};

int cmd_synth(const SynthArgs& a, const GlobalOptions& g, std::ostream& out) {
  if (g.out.empty()) throw UsageError("synth needs --out <dir>");
  ZooConfig cfg = a.zoo.config(g.seed);
  cfg.dataset = a.dataset;
  const ModelZoo zoo = gen_model_zoo(cfg);
  const fs::path dir(g.out);
  fs::create_directories(dir);
  for (const auto& m : zoo.models) save_emb1(m, dir / (m.model_id() + ".emb1"));
  save_truth(zoo.truth, dir / "truth.csv");
  out << "wrote " << zoo.models.size() << " models and truth.csv to " << dir.string() << '\n';
  for (const auto& r : zoo.truth.records()) out << "  " << r.model << "  accuracy " << fixed(r.accuracy, 2) << "%\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> inputs;
  PipelineOptions pipeline;
  int repeat = 1;
};

int cmd_bench(const BenchArgs& a, const GlobalOptions& g, std::ostream& out) {
  a.pipeline.validate();
  if (a.repeat < 1) throw UsageError("--repeat must be >= 1");
  std::vector<EmbeddingSet> sets;
  for (const auto& f : list_inputs(a.inputs)) sets.push_back(load_input(f, a.pipeline));
  const auto opts = a.pipeline.metric_options();
  const auto pca = a.pipeline.pca_target();

  std::ostringstream csv;
  csv << "metric,raw_s,none_s,sa_s,sa_over_none\n";
  for (const auto& name : a.pipeline.metrics) {
    const MetricId metric = parse_metric(name);
    double raw_s = 0.0;
    double none_s = 0.0;
    double sa_s = 0.0;
    for (int rep = 0; rep < a.repeat; ++rep) {
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto seed = model_seed(g.seed, i);
        const auto t0 = Clock::now();
        score_metric(sets[i], metric, opts, seed);
        raw_s += seconds_since(t0);
        none_s += score_model(sets[i], metric, a.pipeline.perturb(PerturbMode::none), pca, seed, opts).wall_time_s;
        sa_s += score_model(sets[i], metric, a.pipeline.perturb(PerturbMode::spread_then_attract), pca, seed, opts)
                    .wall_time_s;
      }
    }
    const double reps = a.repeat;
    csv << name << ',' << csv_number(raw_s / reps) << ',' << csv_number(none_s / reps) << ','
        << csv_number(sa_s / reps) << ',' << csv_number(none_s > 0.0 ? sa_s / none_s : 0.0) << '\n';
  }
  write_text(g.out, csv.str(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank pre-trained models by transferability of their embeddings", "terank"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base seed; model i uses seed XOR i")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Maximum concurrent models")->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--format", g.format, "Machine-readable format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score every input model");
  score_cmd->add_option("--input", score.inputs, "EMB1/CSV files or directories")->required();
  add_pipeline_flags(*score_cmd, score.pipeline);
  score_cmd->add_option("--mode", score.pipeline.modes, "Perturbation mode(s): none, spread, attract, sa")
      ->check(CLI::IsMember({"none", "spread", "attract", "sa"}));

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Rank scores against ground truth");
  eval_cmd->add_option("--scores", evaluate.scores, "Score JSON from `terank score`")->required();
  eval_cmd->add_option("--truth", evaluate.truth, "Truth CSV")->required();
  eval_cmd->add_option("--dataset", evaluate.dataset, "Dataset key (default: from scores)");
  eval_cmd->add_option("--regime", evaluate.regime, "vanilla, lbft, lft or synthetic")->capture_default_str();
  eval_cmd->add_option("--pool", evaluate.pool, "supervised or self_supervised")->capture_default_str();
  eval_cmd->add_option("--weighting", evaluate.weighting, "symmetric or truth_ranks")
      ->check(CLI::IsMember({"symmetric", "truth_ranks"}))
      ->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Hyper-parameter sensitivity of SA over a model zoo");
  sweep_cmd->add_option("--input", sweep.source.inputs, "EMB1/CSV files or directories (default: generate a zoo)");
  sweep_cmd->add_option("--truth", sweep.source.truth, "Truth CSV for --input");
  add_zoo_flags(*sweep_cmd, sweep.source.zoo);
  add_pipeline_flags(*sweep_cmd, sweep.pipeline);
  sweep_cmd->add_option("--alpha-grid", sweep.alpha_grid, "Alpha values (sigma fixed at --sigma)")->delimiter(',');
  sweep_cmd->add_option("--sigma-grid", sweep.sigma_grid, "Sigma values (alpha fixed at --alpha)")->delimiter(',');
  sweep_cmd->add_option("--regime", sweep.regime)->capture_default_str();
  sweep_cmd->add_option("--pool", sweep.pool)->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic model zoo");
  add_zoo_flags(*synth_cmd, synth.zoo);
  synth_cmd->add_option("--dataset", synth.dataset)->capture_default_str();

  BenchArgs bench;
  bench.pipeline.metrics = {"logme", "gbc", "nleep", "lda"};
  auto* bench_cmd = app.add_subcommand("bench", "Time metrics with and without SA");
  bench_cmd->add_option("--input", bench.inputs, "EMB1/CSV files or directories")->required();
  add_pipeline_flags(*bench_cmd, bench.pipeline);
  bench_cmd->add_option("--repeat", bench.repeat, "Repetitions per measurement")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "terank: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (g.jobs < 1) throw UsageError("--jobs must be >= 1");
    if (*score_cmd) return cmd_score(score, g, out);
    if (*eval_cmd) return cmd_evaluate(evaluate, g, out);
    if (*sweep_cmd) return cmd_sweep(sweep, g, out);
    if (*synth_cmd) return cmd_synth(synth, g, out);
    if (*bench_cmd) return cmd_bench(bench, g, out);
  } catch (const UsageError& e) {
    err << "terank: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "terank: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "terank: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const fs::filesystem_error& e) {
    err << "terank: data error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace terank::cli
