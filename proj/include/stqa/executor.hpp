#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqa/rules.hpp"

namespace stqa {

struct NodeFailure {
  RuleErrorKind kind;
  std::string message;

  bool operator==(const NodeFailure&) const = default;
};

/// One executed node. Exactly one of result / failure is set.
struct TraceEntry {
  std::string key;
  std::string rule;
  std::optional<QuestionType> qtype;
  std::vector<std::string> child_keys;
  std::optional<IntermediateResult> result;
  std::optional<NodeFailure> failure;

  bool internal() const { return !qtype.has_value(); }
  /// The answer, or None for a failed node.
  Answer answer() const { return result ? result->answer : Answer::none(); }

  bool operator==(const TraceEntry&) const = default;
};

/// Insertion-ordered map NodeKey -> entry. Entries are never replaced.
class Trace {
 public:
  bool contains(const std::string& key) const { return index_.count(key) != 0; }
  const TraceEntry* find(const std::string& key) const;
  /// Throws std::logic_error on a duplicate key.
  void insert(TraceEntry entry);

  const std::vector<TraceEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const Trace& other) const { return entries_ == other.entries_; }

 private:
  std::vector<TraceEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct ExecuteOptions {
  const Vocabulary* vocab = nullptr;  // standard vocabulary when null
  /// Reuse entries already present in the input trace instead of recomputing.
  bool memoize = true;
};

/// Algorithm 1: children first, left to right, then the node itself. Rule
/// failures are stored in the node's entry; a node with a failed child gets a
/// Propagated failure.
Trace execute(const ProgramNode& program, const SceneRepresentation& scene, Trace trace_in = {},
              const ExecuteOptions& options = {});

struct ExecutionOutcome {
  Trace trace;
  std::string root_key;
  Answer root_answer;  // None when the root failed
  std::vector<std::pair<std::string, NodeFailure>> errors;
};

ExecutionOutcome run_program(const ProgramNode& program, const SceneRepresentation& scene,
                             const ExecuteOptions& options = {});

struct SubquestionAnswer {
  std::string key;
  std::optional<QuestionType> qtype;  // nullopt for internal primitives
  Answer answer;
};

std::vector<SubquestionAnswer> answers_by_subquestion(const ExecutionOutcome& outcome);

/// One line per entry: index, rule, type, answer, evidence summary, key.
std::string trace_to_text(const Trace& trace);
nlohmann::json trace_to_json(const Trace& trace);

}  // namespace stqa
