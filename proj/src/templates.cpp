#include "stqa/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include "stqa/errors.hpp"

namespace stqa {

namespace {

using QT = QuestionType;

// I(r,o) below abbreviates the interaction
// query_interaction(filter_relation(scene, r), filter_object(scene, o)).
const std::vector<QuestionTemplate> kTemplates = {
    {"T01", QT::ObjectExists, "Is there a {o}?", "query_object(filter_object(scene, {o}))"},
    {"T02", QT::RelationExists, "Are they {r} something?",
     "query_relation(filter_relation(scene, {r}))"},
    {"T03", QT::Interaction, "Are they {r} the {o}?",
     "query_interaction(filter_relation(scene, {r}), filter_object(scene, {o}))"},
    {"T04", QT::Interaction, "Is there a {o} and are they {r} it?",
     "query_interaction(query_relation(filter_relation(scene, {r})), "
     "query_object(filter_object(scene, {o})))"},
    {"T05", QT::InteractionTemporalLoc, "Were they {r} the {o} {loc} {a}?",
     "interaction_temporal_{loc}(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(scene, {a}))"},
    {"T06", QT::InteractionTemporalLoc, "Were they {r} the {o} {loc} {r2} the {o2}?",
     "interaction_temporal_{loc}(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), query_interaction(filter_relation(scene, {r2}), "
     "filter_object(scene, {o2})))"},
    {"T07", QT::InteractionTemporalLoc, "Were they {r} the {o} between {a} and {a2}?",
     "interaction_temporal_between(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(scene, {a}), filter_actions(scene, {a2}))"},
    {"T08", QT::InteractionTemporalLoc, "Were they {r} the {o} {loc} {verb} the thing they were {r2}?",
     "interaction_temporal_{loc}(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(query_subject_relation(filter_relation(scene, "
     "{r2})), {verb}))"},
    {"T09", QT::ExistsTemporalLoc, "Is there a {o} {loc} {a}?",
     "interaction_temporal_{loc}(query_object(filter_object(scene, {o})), "
     "filter_actions(scene, {a}))"},
    {"T10", QT::ExistsTemporalLoc, "Are they {r} something {loc} {a}?",
     "interaction_temporal_{loc}(query_relation(filter_relation(scene, {r})), "
     "filter_actions(scene, {a}))"},
    {"T11", QT::ExistsTemporalLoc, "Is there a {o} between {a} and {a2}?",
     "interaction_temporal_between(query_object(filter_object(scene, {o})), "
     "filter_actions(scene, {a}), filter_actions(scene, {a2}))"},
    {"T12", QT::ObjectTemporalLoc, "What were they {r} {loc} {a}?",
     "objects_{loc}(query_relation(filter_relation(scene, {r})), filter_actions(scene, {a}))"},
    {"T13", QT::ObjectTemporalLoc, "Which things were they {r} {loc} {a}?",
     "objects_{loc}(query_relation(filter_relation(scene, {r})), filter_actions(scene, {a}), all)"},
    {"T14", QT::ObjectTemporalLoc, "What were they {r} between {a} and {a2}?",
     "objects_between(query_relation(filter_relation(scene, {r})), filter_actions(scene, {a}), "
     "filter_actions(scene, {a2}))"},
    {"T15", QT::ActionTemporalLoc, "What did they do {dir} {a}?",
     "actions_{dir}(filter_actions(scene, {a}))"},
    {"T16", QT::ActionTemporalLoc, "What did they do to the thing they were {r} {dir} {a}?",
     "actions_{dir}(filter_actions(query_subject_relation(filter_relation(scene, {r}))), "
     "filter_actions(scene, {a}))"},
    {"T17", QT::ActionTemporalLoc, "What did they do {dir} {r} the {o}?",
     "actions_{dir}(query_interaction(filter_relation(scene, {r}), filter_object(scene, {o})))"},
    {"T18", QT::LongestShortestAction, "What did they do for the {ext} time?",
     "{ext}_action(filter_actions(scene))"},
    {"T19", QT::LongestShortestAction, "What did they do for the {ext} time to the thing they were {r}?",
     "{ext}_action(filter_actions(query_subject_relation(filter_relation(scene, {r}))))"},
    {"T20", QT::Action, "What did they do?", "filter_actions(scene)"},
    {"T21", QT::Action, "What did they do by {verb} the thing they were {r}?",
     "filter_actions(query_subject_relation(filter_relation(scene, {r})), {verb})"},
    {"T22", QT::Object, "What were they {r}?", "query_subject_relation(filter_relation(scene, {r}))"},
    {"T23", QT::Choose, "Were they {r} the {o} or the {o2}?",
     "choose(query_interaction(filter_relation(scene, {r}), filter_object(scene, {o})), "
     "query_interaction(filter_relation(scene, {r}), filter_object(scene, {o2})), {o}, {o2})"},
    {"T24", QT::Choose, "Which did they do for a {cmp} time, {a} or {a2}?",
     "choose_action_{cmp}(filter_actions(scene, {a}), filter_actions(scene, {a2}))"},
    {"T25", QT::Choose, "Were they {r} the {o} after or before {a}?",
     "or(interaction_temporal_after(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(scene, {a})), "
     "interaction_temporal_before(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(scene, {a})))"},
    {"T26", QT::Equals, "Is the {pos} thing they were {r} the {pos2} thing they were {r2}?",
     "object_equals(query_{pos}(query_subject_relation(filter_relation(scene, {r}))), "
     "query_{pos2}(query_subject_relation(filter_relation(scene, {r2}))))"},
    {"T27", QT::Equals, "Is what they did {dir} {a} what they did for the {ext} time?",
     "action_equals(actions_{dir}(filter_actions(scene, {a})), {ext}_action(filter_actions(scene)))"},
    {"T28", QT::Equals,
     "Is the thing they were {r} {loc} {a} the thing they were {r2} {loc2} {a2}?",
     "object_equals(objects_{loc}(query_relation(filter_relation(scene, {r})), "
     "filter_actions(scene, {a})), objects_{loc2}(query_relation(filter_relation(scene, {r2})), "
     "filter_actions(scene, {a2})))"},
    {"T29", QT::Conjunction, "Were they {r} the {o} {conj} {r2} the {o2}?",
     "conjunction_{conj}(query_interaction(filter_relation(scene, {r}), filter_object(scene, {o})), "
     "query_interaction(filter_relation(scene, {r2}), filter_object(scene, {o2})))"},
    {"T30", QT::Conjunction, "Were they {r} the {o} {loc} {a} {conj} {r2} the {o2}?",
     "conjunction_{conj}(interaction_temporal_{loc}(query_interaction(filter_relation(scene, {r}), "
     "filter_object(scene, {o})), filter_actions(scene, {a})), "
     "query_interaction(filter_relation(scene, {r2}), filter_object(scene, {o2})))"},
    {"T31", QT::Conjunction, "Is there a {o} {loc} {a} {conj} is there a {o2}?",
     "conjunction_{conj}(interaction_temporal_{loc}(query_object(filter_object(scene, {o})), "
     "filter_actions(scene, {a})), query_object(filter_object(scene, {o2})))"},
    {"T32", QT::FirstLast, "What was the {pos} thing they were {r}?",
     "query_{pos}(query_subject_relation(filter_relation(scene, {r})))"},
    {"T33", QT::FirstLast, "What did they do {pos}?", "query_{pos}(filter_actions(scene))"},
    {"T34", QT::FirstLast, "What was the {pos} thing they were {r} {loc} {a}?",
     "query_{pos}(objects_{loc}(query_relation(filter_relation(scene, {r})), "
     "filter_actions(scene, {a}), all))"},
};

std::string strip_digits(std::string_view name) {
  while (!name.empty() && std::isdigit(static_cast<unsigned char>(name.back()))) {
    name.remove_suffix(1);
  }
  return std::string(name);
}

// Splits a pattern into literal text and slot names, alternating; literal
// pieces are at even positions.
std::vector<std::string> split_pattern(std::string_view pattern) {
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{') {
      parts.push_back(cur);
      cur.clear();
      std::size_t close = pattern.find('}', i);
      parts.emplace_back(pattern.substr(i + 1, close - i - 1));
      i = close;
    } else {
      cur.push_back(pattern[i]);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string quote_literal(const std::string& v) {
  bool plain = true;
  for (char c : v) {
    if (c == ',' || c == '(' || c == ')' || c == '"' || c == '\\') plain = false;
  }
  if (plain) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

bool slot_value_ok(SlotKind kind, const std::string& v, const Vocabulary& vocab) {
  switch (kind) {
    case SlotKind::Object: return vocab.is_object(v);
    case SlotKind::Relation:
    case SlotKind::Verb: return vocab.is_relation(v);
    case SlotKind::Action: return vocab.is_action(v);
    default: {
      const auto words = slot_words(kind);
      return std::find(words.begin(), words.end(), v) != words.end();
    }
  }
}

void check_slots(const QuestionTemplate& t, const TemplateInstance& q, const Vocabulary& vocab) {
  for (const auto& name : template_slots(t)) {
    auto it = q.slots.find(name);
    if (it == q.slots.end()) {
      throw ProgramError(ProgramErrorKind::NoTemplate, 0,
                         "template " + std::string(t.id) + " needs slot " + name);
    }
    if (!slot_value_ok(slot_kind(name), it->second, vocab)) {
      throw ProgramError(ProgramErrorKind::Vocabulary, 0,
                         "slot " + name + " value \"" + it->second + "\" is not a valid " +
                             strip_digits(name) + " value");
    }
  }
}

std::string fill(std::string_view pattern, const TemplateInstance& q, bool quote) {
  const auto parts = split_pattern(pattern);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i % 2 == 0) {
      out += parts[i];
    } else {
      const std::string& v = q.slots.at(parts[i]);
      out += quote ? quote_literal(v) : v;
    }
  }
  return out;
}

std::string regex_escape(const std::string& s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

SlotKind slot_kind(std::string_view slot_name) {
  const std::string base = strip_digits(slot_name);
  if (base == "o") return SlotKind::Object;
  if (base == "r") return SlotKind::Relation;
  if (base == "a") return SlotKind::Action;
  if (base == "verb") return SlotKind::Verb;
  if (base == "loc") return SlotKind::Localizer;
  if (base == "dir") return SlotKind::Direction;
  if (base == "pos") return SlotKind::Position;
  if (base == "ext") return SlotKind::Extremum;
  if (base == "cmp") return SlotKind::Comparison;
  if (base == "conj") return SlotKind::Connective;
  throw ProgramError(ProgramErrorKind::NoTemplate, 0, "unknown slot name " + std::string(slot_name));
}

std::vector<std::string> slot_words(SlotKind kind) {
  switch (kind) {
    case SlotKind::Localizer: return {"after", "before", "while"};
    case SlotKind::Direction: return {"after", "before"};
    case SlotKind::Position: return {"first", "last"};
    case SlotKind::Extremum: return {"longest", "shortest"};
    case SlotKind::Comparison: return {"shorter", "longer"};
    case SlotKind::Connective: return {"and", "xor"};
    default: return {};
  }
}

std::span<const QuestionTemplate> question_templates() { return kTemplates; }

const QuestionTemplate* find_template(std::string_view id) {
  for (const auto& t : kTemplates) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<std::string> template_slots(const QuestionTemplate& t) {
  std::vector<std::string> out;
  const auto parts = split_pattern(t.program);
  for (std::size_t i = 1; i < parts.size(); i += 2) {
    if (std::find(out.begin(), out.end(), parts[i]) == out.end()) out.push_back(parts[i]);
  }
  return out;
}

ProgramNode question_to_program(const TemplateInstance& q, const Vocabulary& vocab) {
  const QuestionTemplate* t = find_template(q.template_id);
  if (!t) throw ProgramError(ProgramErrorKind::NoTemplate, 0, "no template " + q.template_id);
  if (t->category != q.category) {
    throw ProgramError(ProgramErrorKind::NoTemplate, 0,
                       "template " + q.template_id + " is not of category " +
                           std::string(to_string(q.category)));
  }
  check_slots(*t, q, vocab);
  return parse_program(fill(t->program, q, true), vocab);
}

TemplateInstance match_question(std::string_view english, const Vocabulary& vocab) {
  const std::string text(english);
  for (const auto& t : kTemplates) {
    const auto parts = split_pattern(t.english);
    std::string re;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i % 2 == 0) {
        re += regex_escape(parts[i]);
      } else {
        re += "(.+?)";
        names.push_back(parts[i]);
      }
    }
    std::smatch m;
    if (!std::regex_match(text, m, std::regex(re))) continue;
    TemplateInstance q{t.category, std::string(t.id), {}};
    bool ok = true;
    for (std::size_t i = 0; i < names.size() && ok; ++i) {
      auto [it, fresh] = q.slots.emplace(names[i], m[i + 1].str());
      ok = (fresh || it->second == m[i + 1].str()) &&
           slot_value_ok(slot_kind(names[i]), m[i + 1].str(), vocab);
    }
    if (ok) return q;
  }
  throw ProgramError(ProgramErrorKind::NoTemplate, 0,
                     "no template matches \"" + std::string(english) + "\"");
}

std::string render_question(const TemplateInstance& q) {
  const QuestionTemplate* t = find_template(q.template_id);
  if (!t) throw ProgramError(ProgramErrorKind::NoTemplate, 0, "no template " + q.template_id);
  return fill(t->english, q, false);
}

TemplateInstance parse_question_line(std::string_view line) {
  auto bad = [&](const std::string& why) {
    return FormatError("bad question record \"" + std::string(line) + "\": " + why);
  };
  const std::size_t t1 = line.find('\t');
  if (t1 == std::string_view::npos) throw bad("expected CATEGORY<TAB>template-id<TAB>slots");
  const std::size_t t2 = line.find('\t', t1 + 1);
  const auto category = question_type_from_string(line.substr(0, t1));
  if (!category) throw bad("unknown category");
  TemplateInstance q{*category,
                     std::string(line.substr(t1 + 1, t2 == std::string_view::npos ? std::string_view::npos
                                                                                   : t2 - t1 - 1)),
                     {}};
  if (t2 == std::string_view::npos) return q;
  std::string_view rest = line.substr(t2 + 1);
  while (!rest.empty()) {
    const std::size_t semi = rest.find(';');
    std::string_view item = rest.substr(0, semi);
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) throw bad("slot without '='");
      q.slots[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  return q;
}

std::string format_question_line(const TemplateInstance& q) {
  std::string out = std::string(to_string(q.category)) + "\t" + q.template_id + "\t";
  bool first = true;
  const QuestionTemplate* t = find_template(q.template_id);
  std::vector<std::string> order = t ? template_slots(*t) : std::vector<std::string>{};
  for (const auto& [k, v] : q.slots) {
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  for (const auto& k : order) {
    auto it = q.slots.find(k);
    if (it == q.slots.end()) continue;
    if (!first) out += ";";
    first = false;
    out += k + "=" + it->second;
  }
  return out;
}

std::vector<TemplateInstance> read_question_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open question file: " + path);
  std::vector<TemplateInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_question_line(line));
  }
  return out;
}

}  // namespace stqa
