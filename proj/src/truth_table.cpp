#include <charconv>
#include <fstream>
#include <sstream>

#include "terank/errors.hpp"
#include "terank/evaluation.hpp"

namespace terank {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool known_regime(const std::string& r) { return r == "vanilla" || r == "lbft" || r == "lft" || r == "synthetic"; }
bool known_pool(const std::string& p) { return p == "supervised" || p == "self_supervised"; }

std::string format_accuracy(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

TruthTable::TruthTable(std::vector<TruthRecord> records) {
  for (auto& r : records) add(std::move(r));
}

void TruthTable::add(TruthRecord record) {
  // Synthetic zoos can reach exactly 100%, so the upper bound is inclusive.
  if (!(record.accuracy > 0.0 && record.accuracy <= 100.0)) {
    throw AccuracyRangeError("accuracy " + format_accuracy(record.accuracy) + " for " + record.model + "/" +
                             record.dataset + " outside (0, 100]");
  }
  if (!known_regime(record.regime)) throw DataError("unknown fine-tuning regime '" + record.regime + "'");
  if (!known_pool(record.pool)) throw DataError("unknown model pool '" + record.pool + "'");
  if (accuracy(record.model, record.dataset, record.regime, record.pool)) {
    throw DuplicateKeyError("duplicate truth key (" + record.model + ", " + record.dataset + ", " + record.regime +
                            ", " + record.pool + ")");
  }
  records_.push_back(std::move(record));
}

std::optional<double> TruthTable::accuracy(std::string_view model, std::string_view dataset, std::string_view regime,
                                           std::string_view pool) const {
  for (const auto& r : records_) {
    if (r.model == model && r.dataset == dataset && r.regime == regime && r.pool == pool) return r.accuracy;
  }
  return std::nullopt;
}

TruthTable parse_truth(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "model,dataset,regime,pool,accuracy") {
    throw DataError(source + ": expected header model,dataset,regime,pool,accuracy");
  }
  TruthTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 5) throw DataError(source + ":" + std::to_string(line_no) + ": expected 5 columns");
    double acc = 0.0;
    const auto& text = cells[4];
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), acc);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw NonNumericCellError(source + ":" + std::to_string(line_no) + ": non-numeric accuracy '" + text + "'");
    }
    table.add({cells[0], cells[1], cells[2], cells[3], acc});
  }
  return table;
}

TruthTable load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_truth(in, path.string());
}

void save_truth(const TruthTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "model,dataset,regime,pool,accuracy\n";
  for (const auto& r : table.records()) {
    out << r.model << ',' << r.dataset << ',' << r.regime << ',' << r.pool << ',' << format_accuracy(r.accuracy)
        << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace terank
