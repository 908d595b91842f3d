#include "stqa/answer.hpp"

#include <algorithm>

#include "stqa/errors.hpp"

namespace stqa {

bool Answer::is_set() const {
  return kind == AnswerKind::ObjectSet || kind == AnswerKind::ActionSet ||
         kind == AnswerKind::RelationSet;
}

bool Answer::is_name() const {
  return kind == AnswerKind::Object || kind == AnswerKind::Action ||
         kind == AnswerKind::Relation || kind == AnswerKind::Time;
}

std::string Answer::to_string() const {
  if (is_none()) return "None";
  if (!is_set()) return values.front();
  std::string out = "{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i];
  }
  return out + "}";
}

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::None: return "none";
    case AnswerKind::Binary: return "binary";
    case AnswerKind::Object: return "object";
    case AnswerKind::Action: return "action";
    case AnswerKind::Relation: return "relation";
    case AnswerKind::Time: return "time";
    case AnswerKind::ObjectSet: return "objects";
    case AnswerKind::ActionSet: return "actions";
    case AnswerKind::RelationSet: return "relations";
  }
  return "?";
}

bool equivalent(const Answer& a, const Answer& b) {
  if (a.is_set() != b.is_set()) return false;
  if (!a.is_set()) return a.to_string() == b.to_string();
  auto x = a.values;
  auto y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

std::vector<std::string> member_names(const Answer& a) {
  if (a.is_set() || a.is_name()) return a.values;
  return {};
}

nlohmann::json to_json(const Answer& a) {
  if (a.is_set()) return a.values;
  return a.to_string();
}

Answer answer_from_json(const nlohmann::json& j) {
  if (j.is_array()) {
    std::vector<std::string> names;
    for (const auto& v : j) names.push_back(v.get<std::string>());
    return Answer::set(AnswerKind::ObjectSet, std::move(names));
  }
  if (!j.is_string()) throw FormatError("answer must be a string or an array of strings");
  auto s = j.get<std::string>();
  if (s == "None") return Answer::none();
  if (s == "yes" || s == "no") return Answer::binary(s == "yes");
  if (s == "after" || s == "before") return Answer::time(s);
  return Answer::object(std::move(s));
}

}  // namespace stqa
