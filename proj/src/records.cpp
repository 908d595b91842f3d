#include "stqa/records.hpp"

#include <fstream>
#include <sstream>

#include "stqa/errors.hpp"

namespace stqa {

bool PredictionRecord::correct() const {
  return ground_truth && equivalent(*ground_truth, prediction());
}

PredictionRecord record_from_json(const nlohmann::json& j) {
  PredictionRecord r;
  try {
    r.video_id = j.at("video_id").get<std::string>();
    r.question_id = j.at("question_id").get<std::string>();
    const auto qt = question_type_from_string(j.at("qtype").get<std::string>());
    if (!qt) throw FormatError("unknown qtype " + j.at("qtype").dump());
    r.qtype = *qt;
    if (j.contains("children")) r.children = j.at("children").get<std::vector<std::string>>();
    r.is_compositional = j.value("is_compositional", !r.children.empty());
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
      r.ground_truth = answer_from_json(j.at("ground_truth"));
    }
    if (j.contains("predicted") && !j.at("predicted").is_null()) {
      r.predicted = answer_from_json(j.at("predicted"));
    }
    r.rule = j.value("rule", std::string());
    if (j.contains("args")) r.args = j.at("args").get<std::vector<std::string>>();
    if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad prediction record: ") + e.what());
  }
  return r;
}

nlohmann::json to_json(const PredictionRecord& r) {
  nlohmann::json j;
  j["video_id"] = r.video_id;
  j["question_id"] = r.question_id;
  j["qtype"] = std::string(to_string(r.qtype));
  j["is_compositional"] = r.is_compositional;
  j["children"] = r.children;
  j["ground_truth"] = r.ground_truth ? to_json(*r.ground_truth) : nlohmann::json(nullptr);
  j["predicted"] = r.predicted ? to_json(*r.predicted) : nlohmann::json(nullptr);
  j["rule"] = r.rule;
  j["args"] = r.args;
  if (r.error) j["error"] = *r.error;
  return j;
}

std::vector<PredictionRecord> parse_records(const std::string& text) {
  std::vector<PredictionRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    // programs that failed before execution carry no question node
    if (j.is_object() && j.contains("qtype") && j.at("qtype").is_null() && j.contains("error")) continue;
    out.push_back(record_from_json(j));
  }
  return out;
}

std::vector<PredictionRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_records(buf.str());
}

RecordSet::RecordSet(std::vector<PredictionRecord> records) : records_(std::move(records)) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto key = std::make_pair(records_[i].video_id, records_[i].question_id);
    if (!index_.emplace(key, i).second) {
      problems.push_back("duplicate id " + key.first + "/" + key.second);
    }
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    for (std::size_t k = 0; k < r.children.size(); ++k) {
      auto it = index_.find({r.video_id, r.children[k]});
      if (it == index_.end()) {
        problems.push_back("dangling child " + r.children[k] + " of " + r.video_id + "/" +
                           r.question_id);
        continue;
      }
      parents_[it->second].emplace_back(i, k);
    }
  }
  if (!problems.empty()) {
    std::string msg = "unresolved prediction records:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw RecordError(msg);
  }
}

const PredictionRecord* RecordSet::find(const std::string& video_id,
                                        const std::string& question_id) const {
  auto it = index_.find({video_id, question_id});
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const PredictionRecord*> RecordSet::children_of(const PredictionRecord& r) const {
  std::vector<const PredictionRecord*> out;
  for (const auto& c : r.children) out.push_back(find(r.video_id, c));
  return out;
}

std::vector<std::pair<const PredictionRecord*, std::size_t>> RecordSet::parents_of(
    const PredictionRecord& r) const {
  std::vector<std::pair<const PredictionRecord*, std::size_t>> out;
  auto self = index_.find({r.video_id, r.question_id});
  if (self == index_.end()) return out;
  auto it = parents_.find(self->second);
  if (it == parents_.end()) return out;
  for (const auto& [p, k] : it->second) out.emplace_back(&records_[p], k);
  return out;
}

}  // namespace stqa
