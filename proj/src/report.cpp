#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "terank/errors.hpp"
#include "terank/evaluation.hpp"

namespace terank {

RankingReport rank_and_report(const std::vector<ScoreRecord>& scores, const TruthTable& truth,
                              const std::string& dataset, const std::string& regime, const std::string& pool,
                              TauWeighting weighting) {
  if (scores.size() < 2) throw DataError("ranking needs scores for at least 2 models");
  RankingReport report;
  report.metric = std::string(to_string(scores.front().metric));
  report.perturb_mode = std::string(to_string(scores.front().mode));
  report.dataset = dataset;
  report.regime = regime;
  report.pool = pool;
  report.weighting = std::string(to_string(weighting));

  std::vector<double> score_values;
  std::vector<double> accuracies;
  for (const auto& rec : scores) {
    if (rec.metric != scores.front().metric || rec.mode != scores.front().mode) {
      throw UsageError("rank_and_report expects records of a single metric and perturbation mode");
    }
    const auto acc = truth.accuracy(rec.model_id, dataset, regime, pool);
    if (!acc) {
      throw MissingModelError("model '" + rec.model_id + "' has no ground truth for (" + dataset + ", " + regime +
                                  ", " + pool + ")",
                              rec.model_id);
    }
    score_values.push_back(rec.score);
    accuracies.push_back(*acc);
    report.wall_time_s += rec.wall_time_s;
  }
  const auto pred = descending_ranks(score_values);
  const auto actual = descending_ranks(accuracies);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    report.models.push_back({scores[i].model_id, score_values[i], accuracies[i], pred[i], actual[i]});
  }
  report.tau_w = weighted_kendall_tau(accuracies, score_values, weighting);
  return report;
}

nlohmann::ordered_json report_to_json(const RankingReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  j["dataset"] = report.dataset;
  j["regime"] = report.regime;
  j["pool"] = report.pool;
  j["perturb_mode"] = report.perturb_mode;
  j["weighting"] = report.weighting;
  j["tau_w"] = report.tau_w;
  auto& models = j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : report.models) {
    models.push_back({{"id", m.id},
                      {"score", m.score},
                      {"accuracy", m.accuracy},
                      {"pred_rank", m.pred_rank},
                      {"truth_rank", m.truth_rank}});
  }
  j["wall_time_s"] = report.wall_time_s;
  return j;
}

RankingReport report_from_json(const nlohmann::json& j) {
  try {
    RankingReport r;
    r.metric = j.at("metric").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.regime = j.at("regime").get<std::string>();
    r.pool = j.at("pool").get<std::string>();
    r.perturb_mode = j.at("perturb_mode").get<std::string>();
    r.weighting = j.value("weighting", std::string("symmetric"));
    r.tau_w = j.at("tau_w").get<double>();
    for (const auto& m : j.at("models")) {
      r.models.push_back({m.at("id").get<std::string>(), m.at("score").get<double>(), m.at("accuracy").get<double>(),
                          m.at("pred_rank").get<int>(), m.at("truth_rank").get<int>()});
    }
    r.wall_time_s = j.value("wall_time_s", 0.0);
    if (r.tau_w < -1.0 || r.tau_w > 1.0) throw DataError("report tau_w outside [-1, 1]");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string report_plot_csv(const RankingReport& report) {
  auto number = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  std::string out = "score,accuracy,model\n";
  for (const auto& m : report.models) out += number(m.score) + ',' + number(m.accuracy) + ',' + m.id + '\n';
  return out;
}

std::vector<ImprovementRow> improvement_summary(const std::vector<RankingReport>& before,
                                                const std::vector<RankingReport>& after) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, const RankingReport*> base;
  for (const auto& r : before) {
    if (!base.emplace(Key{r.metric, r.dataset}, &r).second) {
      throw UnpairedReportError("duplicate baseline report for (" + r.metric + ", " + r.dataset + ")");
    }
  }
  if (before.size() != after.size()) throw UnpairedReportError("before/after report counts differ");

  std::map<std::string, ImprovementRow> rows;
  std::set<Key> used;
  for (const auto& r : after) {
    const Key key{r.metric, r.dataset};
    const auto it = base.find(key);
    if (it == base.end() || !used.insert(key).second) {
      throw UnpairedReportError("no unique baseline report for (" + r.metric + ", " + r.dataset + ")");
    }
    auto& row = rows[r.metric];
    row.metric = r.metric;
    ++row.pairs;
    row.mean_before += it->second->tau_w;
    row.mean_after += r.tau_w;
  }
  std::vector<ImprovementRow> out;
  for (auto& [metric, row] : rows) {
    row.mean_before /= static_cast<double>(row.pairs);
    row.mean_after /= static_cast<double>(row.pairs);
    const double diff = row.mean_after - row.mean_before;
    row.improvement_pct = diff == 0.0 ? 0.0 : diff / std::abs(row.mean_before) * 100.0;
    out.push_back(row);
  }
  return out;
}

}  // namespace terank
