#include "stqa/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace stqa {

namespace {

using boost::multiprecision::cpp_int;

// Canonical text of an answer for grouping by ground truth.
std::string answer_key(const Answer& a) {
  if (!a.is_set()) return a.to_string();
  auto v = a.values;
  std::sort(v.begin(), v.end());
  return Answer::set(a.kind, v).to_string();
}

nlohmann::json rate_json(const Rate& r) {
  if (!r) return nullptr;
  std::ostringstream exact;
  exact << numerator(*r) << "/" << denominator(*r);
  return {{"exact", exact.str()}, {"value", format_rate(r, 4)}};
}

nlohmann::json stats_json(const CompositionStats& s) {
  nlohmann::json j;
  j["ca"] = rate_json(s.ca());
  j["rwr"] = rate_json(s.rwr());
  j["delta"] = rate_json(s.delta());
  j["ca_count"] = s.ca_total;
  j["rwr_count"] = s.rwr_total;
  nlohmann::json n = nlohmann::json::object();
  for (std::size_t k = 1; k <= 5; ++k) n[std::to_string(k)] = rate_json(s.rwr_n(k));
  j["rwr_n"] = n;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [k, v] : s.by_wrong) counts[std::to_string(k)] = v.first;
  j["rwr_n_count"] = counts;
  return j;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

}  // namespace

Rate ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return Rational(cpp_int(num), cpp_int(den));
}

std::string format_rate(const Rate& r, int decimals) {
  if (!r) return "N/A";
  cpp_int scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const bool negative = *r < 0;
  const Rational v = negative ? Rational(-*r) : *r;
  // round half away from zero: floor(v * scale + 1/2)
  const cpp_int scaled = (numerator(v) * scale * 2 + denominator(v)) / (denominator(v) * 2);
  const cpp_int whole = scaled / scale;
  std::string frac = cpp_int(scaled % scale).str();
  frac = std::string(decimals - frac.size(), '0') + frac;
  std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
  if (decimals > 0) out += "." + frac;
  return out;
}

Rate accuracy(const RecordSet& records, QuestionType type) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;  // gt -> (correct, total)
  for (const auto& r : records.records()) {
    if (r.qtype != type || !r.ground_truth) continue;
    auto& g = groups[answer_key(*r.ground_truth)];
    g.first += r.correct() ? 1 : 0;
    g.second += 1;
  }
  if (groups.empty()) return std::nullopt;
  Rational sum = 0;
  for (const auto& [k, g] : groups) sum += Rational(cpp_int(g.first), cpp_int(g.second));
  return sum / cpp_int(groups.size());
}

Rate overall_accuracy(const RecordSet& records) {
  Rational sum = 0;
  std::size_t n = 0;
  for (auto t : kAllQuestionTypes) {
    if (auto a = accuracy(records, t)) {
      sum += *a;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / cpp_int(n);
}

Rate CompositionStats::rwr_n(std::size_t n) const {
  auto it = by_wrong.find(n);
  if (it == by_wrong.end()) return std::nullopt;
  return ratio(it->second.second, it->second.first);
}

Rate CompositionStats::delta() const {
  auto a = ca();
  auto b = rwr();
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

CompositionStats composition_stats(const RecordSet& records, std::optional<QuestionType> type) {
  CompositionStats s;
  for (const auto& r : records.records()) {
    if (!r.is_compositional || r.children.empty() || !r.ground_truth) continue;
    if (type && r.qtype != *type) continue;
    std::size_t wrong = 0;
    bool resolvable = true;
    for (const auto* c : records.children_of(r)) {
      if (!c || !c->ground_truth) {
        resolvable = false;
        break;
      }
      wrong += c->correct() ? 0 : 1;
    }
    if (!resolvable) continue;
    const std::size_t ok = r.correct() ? 1 : 0;
    if (wrong == 0) {
      s.ca_total++;
      s.ca_correct += ok;
    } else {
      s.rwr_total++;
      s.rwr_correct += ok;
      auto& n = s.by_wrong[wrong];
      n.first++;
      n.second += ok;
    }
  }
  return s;
}

ConsistencyReport internal_consistency(const RecordSet& records,
                                       const std::vector<ConsistencyRule>& rules) {
  ConsistencyReport out;
  Rational sum = 0;
  std::size_t defined = 0;
  std::size_t all_ok = 0;
  std::size_t all_checks = 0;
  for (const auto& rule : rules) {
    RuleScore score{rule.id()};
    for (const auto& r : records.records()) {
      if (!rule.applies(r, records)) continue;
      for (const auto& c : rule.derive(r, records)) {
        score.checks++;
        score.satisfied += c.satisfied ? 1 : 0;
      }
    }
    if (auto ic = score.ic()) {
      sum += *ic;
      ++defined;
    }
    all_ok += score.satisfied;
    all_checks += score.checks;
    out.rules.push_back(score);
  }
  if (defined) out.overall = sum / cpp_int(defined);
  out.weighted = ratio(all_ok, all_checks);
  return out;
}

MetricsReport compute_metrics(const RecordSet& records, const std::vector<ConsistencyRule>& rules) {
  MetricsReport rep;
  rep.records = records.records().size();
  for (auto t : kAllQuestionTypes) {
    TypeRow row{t};
    for (const auto& r : records.records()) row.records += r.qtype == t ? 1 : 0;
    row.accuracy = accuracy(records, t);
    row.composition = composition_stats(records, t);
    rep.types.push_back(row);
  }
  rep.overall_accuracy = overall_accuracy(records);
  rep.composition = composition_stats(records);
  rep.consistency = internal_consistency(records, rules);
  return rep;
}

std::string render_report(const MetricsReport& report, bool weighted_ic) {
  std::ostringstream out;
  out << "records: " << report.records << "\n\n";
  const std::vector<std::string> head = {"Type", "N", "Acc", "CA", "RWR", "Delta",
                                         "RWR-1", "RWR-2", "RWR-3", "RWR-4", "RWR-5"};
  const std::vector<std::size_t> width = {24, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7};
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << pad(cells[i], width[i]);
    out << "\n";
  };
  auto row = [&](const std::string& name, std::size_t n, const Rate& acc, const CompositionStats& s) {
    std::vector<std::string> cells = {name, std::to_string(n), format_rate(acc), format_rate(s.ca()),
                                      format_rate(s.rwr()), format_rate(s.delta())};
    for (std::size_t k = 1; k <= 5; ++k) cells.push_back(format_rate(s.rwr_n(k)));
    line(cells);
  };
  line(head);
  for (const auto& t : report.types) row(std::string(to_string(t.type)), t.records, t.accuracy, t.composition);
  row("Overall", report.records, report.overall_accuracy, report.composition);

  out << "\n" << pad("Consistency check", 28) << pad("Checks", 9) << "IC\n";
  for (const auto& r : report.consistency.rules) {
    out << pad(r.id, 28) << pad(std::to_string(r.checks), 9) << format_rate(r.ic()) << "\n";
  }
  out << pad("Overall", 28) << pad("-", 9)
      << format_rate(weighted_ic ? report.consistency.weighted : report.consistency.overall) << "\n";
  return out.str();
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["records"] = report.records;
  nlohmann::json types = nlohmann::json::array();
  for (const auto& t : report.types) {
    nlohmann::json row = stats_json(t.composition);
    row["type"] = std::string(to_string(t.type));
    row["count"] = t.records;
    row["accuracy"] = rate_json(t.accuracy);
    types.push_back(row);
  }
  j["types"] = types;
  nlohmann::json overall = stats_json(report.composition);
  overall["accuracy"] = rate_json(report.overall_accuracy);
  j["overall"] = overall;
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : report.consistency.rules) {
    rules.push_back({{"rule", r.id}, {"checks", r.checks}, {"satisfied", r.satisfied},
                     {"ic", rate_json(r.ic())}});
  }
  j["consistency"] = {{"rules", rules},
                      {"overall", rate_json(report.consistency.overall)},
                      {"weighted", rate_json(report.consistency.weighted)}};
  return j;
}

}  // namespace stqa
