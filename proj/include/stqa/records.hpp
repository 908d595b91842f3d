#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqa/answer.hpp"
#include "stqa/question_type.hpp"

namespace stqa {

/// One scored question. Besides the evaluation fields, `rule` and `args`
/// carry the program node the question came from; consistency rules need
/// them to tell e.g. an And parent from an Xor parent.
struct PredictionRecord {
  std::string video_id;
  std::string question_id;
  QuestionType qtype = QuestionType::ObjectExists;
  bool is_compositional = false;
  std::vector<std::string> children;
  std::optional<Answer> ground_truth;  // absent: unlabeled
  std::optional<Answer> predicted;     // absent: not yet predicted
  std::string rule;
  std::vector<std::string> args;
  std::optional<std::string> error;

  /// Predicted answer, None when absent.
  Answer prediction() const { return predicted.value_or(Answer::none()); }
  /// Labeled and the prediction is equivalent to the ground truth.
  bool correct() const;
};

/// Throws FormatError on missing or ill-typed fields.
PredictionRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PredictionRecord& r);

/// Reads JSON lines; blank lines and program-level error lines (null qtype)
/// are skipped.
std::vector<PredictionRecord> read_records(const std::string& path);
std::vector<PredictionRecord> parse_records(const std::string& text);

/// Records indexed by (video id, question id) with parent links. Throws
/// RecordError listing every dangling child id and duplicate id.
class RecordSet {
 public:
  explicit RecordSet(std::vector<PredictionRecord> records);

  const std::vector<PredictionRecord>& records() const { return records_; }
  const PredictionRecord* find(const std::string& video_id, const std::string& question_id) const;
  std::vector<const PredictionRecord*> children_of(const PredictionRecord& r) const;
  /// (parent, position of r among the parent's children).
  std::vector<std::pair<const PredictionRecord*, std::size_t>> parents_of(
      const PredictionRecord& r) const;

 private:
  std::vector<PredictionRecord> records_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> parents_;
};

}  // namespace stqa
