#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace stqa {

enum class AnswerKind {
  None,  // absence: no qualifying entity ("None")
  Binary,
  Object,
  Action,
  Relation,
  Time,
  ObjectSet,
  ActionSet,
  RelationSet,
};

/// A symbolic answer. Scalar kinds hold exactly one value; set kinds hold an
/// ordered list of distinct names; None holds nothing.
struct Answer {
  AnswerKind kind = AnswerKind::None;
  std::vector<std::string> values;

  static Answer none() { return {}; }
  static Answer binary(bool yes) { return {AnswerKind::Binary, {yes ? "yes" : "no"}}; }
  static Answer object(std::string name) { return {AnswerKind::Object, {std::move(name)}}; }
  static Answer action(std::string name) { return {AnswerKind::Action, {std::move(name)}}; }
  static Answer relation(std::string name) { return {AnswerKind::Relation, {std::move(name)}}; }
  static Answer time(std::string word) { return {AnswerKind::Time, {std::move(word)}}; }
  static Answer set(AnswerKind kind, std::vector<std::string> names) {
    return {kind, std::move(names)};
  }

  bool is_none() const { return kind == AnswerKind::None; }
  bool is_binary() const { return kind == AnswerKind::Binary; }
  bool is_yes() const { return is_binary() && values.front() == "yes"; }
  bool is_no() const { return is_binary() && values.front() == "no"; }
  bool is_set() const;
  /// Object, Action, Relation or Time scalar.
  bool is_name() const;
  const std::string& name() const { return values.front(); }

  /// "yes", "blanket", "None", "{cup, dish}".
  std::string to_string() const;

  bool operator==(const Answer&) const = default;
};

std::string_view to_string(AnswerKind kind);

/// Answer identity for scoring: set-ness must agree, scalars compare by text
/// (None renders as "None"), sets compare as unordered collections. The
/// object/action/relation distinction is not part of the identity.
bool equivalent(const Answer& a, const Answer& b);

/// Names an answer contributes as candidates: the members of a set, the
/// single name of a scalar, nothing for None or Binary.
std::vector<std::string> member_names(const Answer& a);

/// Scalars and None serialize as strings, sets as arrays.
nlohmann::json to_json(const Answer& a);
/// Inverse of to_json up to the object/action/relation distinction: plain
/// names come back as Object, arrays as ObjectSet.
Answer answer_from_json(const nlohmann::json& j);

}  // namespace stqa
