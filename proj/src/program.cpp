#include "stqa/program.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <variant>

#include "stqa/errors.hpp"

namespace stqa {

namespace {

using enum ArgKind;
using enum SceneInput;

// Children and literal arities follow the input columns of the rule tables:
// (scene, token) rules read the scene, (exe_trace, token) rules read their
// children's results.
const std::vector<RuleSyntax> kCatalog = {
    {"filter_object", Required, 0, 0, {Object}, 1},
    {"filter_relation", Required, 0, 0, {Relation}, 1},
    {"query_object", Forbidden, 1, 1, {}, 0},
    {"query_relation", Forbidden, 1, 1, {}, 0},
    {"query_interaction", Forbidden, 2, 2, {}, 0},
    {"interaction_temporal_after", Forbidden, 2, 2, {}, 0},
    {"interaction_temporal_before", Forbidden, 2, 2, {}, 0},
    {"interaction_temporal_while", Forbidden, 2, 2, {}, 0},
    {"interaction_temporal_between", Forbidden, 3, 3, {}, 0},
    {"actions_after", Forbidden, 1, 2, {}, 0},
    {"actions_before", Forbidden, 1, 2, {}, 0},
    {"objects_after", Forbidden, 2, 2, {Flag}, 0, "all"},
    {"objects_before", Forbidden, 2, 2, {Flag}, 0, "all"},
    {"objects_while", Forbidden, 2, 2, {Flag}, 0, "all"},
    {"objects_between", Forbidden, 3, 3, {Flag}, 0, "all"},
    {"longest_action", Forbidden, 1, 1, {}, 0},
    {"shortest_action", Forbidden, 1, 1, {}, 0},
    {"filter_actions", InsteadOfChildren, 1, 1, {Action}, 0},
    {"query_subject_relation", Forbidden, 1, 1, {}, 0},
    {"choose", Forbidden, 2, 2, {Option, Option}, 2},
    {"or", Forbidden, 2, 2, {}, 0},
    {"choose_action_shorter", Forbidden, 2, 2, {}, 0},
    {"choose_action_longer", Forbidden, 2, 2, {}, 0},
    {"object_equals", Forbidden, 2, 2, {}, 0},
    {"action_equals", Forbidden, 2, 2, {}, 0},
    {"conjunction_and", Forbidden, 2, 2, {}, 0},
    {"conjunction_xor", Forbidden, 2, 2, {}, 0},
    {"query_first", Forbidden, 1, 1, {}, 0},
    {"query_last", Forbidden, 1, 1, {}, 0},
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// ---- raw syntax tree -------------------------------------------------------

struct RawLiteral {
  std::string text;
  std::size_t pos;
};

struct RawCall {
  std::string name;
  std::size_t pos;
  std::vector<std::variant<RawCall, RawLiteral>> items;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  RawCall parse_root() {
    skip_ws();
    RawCall root = parse_call_after_name(read_call_name());
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ProgramError(ProgramErrorKind::Syntax, pos_,
                       "syntax error at " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::pair<std::string, std::size_t> read_call_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a rule name");
    return {std::string(text_.substr(start, pos_ - start)), start};
  }

  RawCall parse_call_after_name(std::pair<std::string, std::size_t> name) {
    RawCall call{std::move(name.first), name.second, {}};
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '(' after " + call.name);
    ++pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return call;
    }
    while (true) {
      call.items.push_back(parse_item());
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated argument list of " + call.name);
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ')') {
        ++pos_;
        return call;
      }
      fail("expected ',' or ')'");
    }
  }

  std::variant<RawCall, RawLiteral> parse_item() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      std::string lit;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        lit.push_back(text_[pos_++]);
      }
      if (pos_ >= text_.size()) fail("unterminated quoted literal");
      ++pos_;
      return RawLiteral{std::move(lit), start};
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != '(' && text_[end] != ')' &&
           text_[end] != '"') {
      ++end;
    }
    std::string_view seg = text_.substr(start, end - start);
    while (!seg.empty() && std::isspace(static_cast<unsigned char>(seg.back()))) {
      seg.remove_suffix(1);
    }
    if (end < text_.size() && text_[end] == '(') {
      for (char c : seg) {
        if (!is_ident_char(c)) {
          pos_ = start;
          fail("malformed rule name \"" + std::string(seg) + "\"");
        }
      }
      pos_ = start;
      return parse_call_after_name(read_call_name());
    }
    if (seg.empty()) {
      pos_ = start;
      fail("empty argument");
    }
    pos_ = end;
    return RawLiteral{std::string(seg), start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---- checks ----------------------------------------------------------------

struct Shape {
  bool scene = false;
  std::vector<const RawCall*> children;
  std::vector<const RawLiteral*> literals;
};

Shape shape_of(const RawCall& call) {
  Shape s;
  for (std::size_t i = 0; i < call.items.size(); ++i) {
    if (const auto* c = std::get_if<RawCall>(&call.items[i])) {
      s.children.push_back(c);
      continue;
    }
    const auto& lit = std::get<RawLiteral>(call.items[i]);
    if (lit.text == "scene") {
      if (i != 0 || s.scene) {
        throw ProgramError(ProgramErrorKind::Syntax, lit.pos,
                           "syntax error at " + std::to_string(lit.pos) +
                               ": 'scene' must be the first argument");
      }
      s.scene = true;
    } else {
      s.literals.push_back(&lit);
    }
  }
  return s;
}

std::string plural(int n, std::string_view word) {
  std::string out = std::to_string(n) + " " + std::string(word);
  if (n != 1) out += word == "child" ? "ren" : "s";
  return out;
}

void check_structure(const RawCall& call) {
  const RuleSyntax* syn = find_rule_syntax(call.name);
  if (!syn) {
    throw ProgramError(ProgramErrorKind::UnknownRule, call.pos, "unknown rule \"" + call.name + "\"");
  }
  const Shape s = shape_of(call);
  const int nc = static_cast<int>(s.children.size());
  const int na = static_cast<int>(s.literals.size());
  const int max_args = static_cast<int>(syn->args.size());

  auto mismatch = [&](const std::string& expected) {
    throw ProgramError(ProgramErrorKind::Arity, call.pos,
                       "arity mismatch: " + call.name + " expects " + expected + ", got " +
                           (s.scene ? "scene, " : "") + plural(nc, "child") + " and " +
                           plural(na, "argument"));
  };

  std::string expected = (syn->min_children == syn->max_children
                              ? plural(syn->min_children, "child")
                              : std::to_string(syn->min_children) + ".." +
                                    std::to_string(syn->max_children) + " children") +
                         " and " +
                         (syn->min_args == max_args
                              ? plural(max_args, "argument")
                              : std::to_string(syn->min_args) + ".." + std::to_string(max_args) +
                                    " arguments");
  switch (syn->scene) {
    case Required:
      if (!s.scene || nc != 0) mismatch("scene, " + expected);
      break;
    case Forbidden:
      if (s.scene || nc < syn->min_children || nc > syn->max_children) mismatch(expected);
      break;
    case InsteadOfChildren:
      if (s.scene ? nc != 0 : (nc < syn->min_children || nc > syn->max_children)) {
        mismatch("either scene or " + expected);
      }
      break;
  }
  if (na < syn->min_args || na > max_args) mismatch(expected);
  for (const auto* c : s.children) check_structure(*c);
}

void check_literals(const RawCall& call, const Vocabulary& vocab) {
  const RuleSyntax* syn = find_rule_syntax(call.name);
  const Shape s = shape_of(call);
  for (std::size_t i = 0; i < s.literals.size(); ++i) {
    const auto& lit = *s.literals[i];
    ArgKind kind = syn->args[i];
    // filter_actions names an action when it reads the scene and a verb when
    // it selects actions on objects resolved by its child.
    if (call.name == "filter_actions" && !s.scene) kind = Verb;
    bool ok = false;
    std::string want;
    switch (kind) {
      case Object: ok = vocab.is_object(lit.text); want = "object"; break;
      case Relation: ok = vocab.is_relation(lit.text); want = "relation"; break;
      case Action: ok = vocab.is_action(lit.text); want = "action"; break;
      case Verb: ok = vocab.is_relation(lit.text); want = "verb (relation)"; break;
      case Option:
        ok = vocab.is_object(lit.text) || vocab.is_action(lit.text);
        want = "object or action";
        break;
      case Flag: ok = lit.text == syn->flag_word; want = "'" + std::string(syn->flag_word) + "'"; break;
    }
    if (!ok) {
      throw ProgramError(ProgramErrorKind::Vocabulary, lit.pos,
                         "unknown vocabulary literal \"" + lit.text + "\" in " + call.name +
                             " (expected " + want + ")");
    }
  }
  for (const auto* c : s.children) check_literals(*c, vocab);
}

ProgramNode build(const RawCall& call) {
  const Shape s = shape_of(call);
  ProgramNode node;
  node.rule = call.name;
  node.reads_scene = s.scene;
  for (const auto* lit : s.literals) node.args.push_back(lit->text);
  for (const auto* c : s.children) node.children.push_back(build(*c));
  node.qtype = infer_qtype(node.rule, node.children);
  return node;
}

std::string quote_if_needed(const std::string& lit) {
  bool plain = !lit.empty() && lit != "scene" && !std::isspace(static_cast<unsigned char>(lit.front())) &&
               !std::isspace(static_cast<unsigned char>(lit.back()));
  for (char c : lit) {
    if (c == ',' || c == '(' || c == ')' || c == '"' || c == '\\') plain = false;
  }
  if (plain) return lit;
  std::string out = "\"";
  for (char c : lit) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

void post_order(const ProgramNode& node, std::vector<const ProgramNode*>& out) {
  for (const auto& c : node.children) post_order(c, out);
  out.push_back(&node);
}

}  // namespace

std::size_t ProgramNode::question_child_count() const {
  std::size_t n = 0;
  for (const auto& c : children) n += c.is_internal() ? 0 : 1;
  return n;
}

std::string Token::to_string() const {
  std::string out = "(";
  out += parent ? std::string(stqa::to_string(*parent)) : std::string("internal");
  out += ";";
  for (std::size_t i = 0; i < children.size(); ++i) {
    out += i ? ", " : " ";
    out += stqa::to_string(children[i]);
  }
  return out + ")";
}

std::span<const RuleSyntax> rule_catalog() { return kCatalog; }

const RuleSyntax* find_rule_syntax(std::string_view name) {
  for (const auto& r : rule_catalog()) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::optional<QuestionType> infer_qtype(std::string_view rule,
                                        const std::vector<ProgramNode>& children) {
  using QT = QuestionType;
  static const std::map<std::string_view, QT> fixed = {
      {"query_object", QT::ObjectExists},
      {"query_relation", QT::RelationExists},
      {"query_interaction", QT::Interaction},
      {"actions_after", QT::ActionTemporalLoc},
      {"actions_before", QT::ActionTemporalLoc},
      {"objects_after", QT::ObjectTemporalLoc},
      {"objects_before", QT::ObjectTemporalLoc},
      {"objects_while", QT::ObjectTemporalLoc},
      {"objects_between", QT::ObjectTemporalLoc},
      {"longest_action", QT::LongestShortestAction},
      {"shortest_action", QT::LongestShortestAction},
      {"filter_actions", QT::Action},
      {"query_subject_relation", QT::Object},
      {"choose", QT::Choose},
      {"or", QT::Choose},
      {"choose_action_shorter", QT::Choose},
      {"choose_action_longer", QT::Choose},
      {"object_equals", QT::Equals},
      {"action_equals", QT::Equals},
      {"conjunction_and", QT::Conjunction},
      {"conjunction_xor", QT::Conjunction},
      {"query_first", QT::FirstLast},
      {"query_last", QT::FirstLast},
  };
  if (auto it = fixed.find(rule); it != fixed.end()) return it->second;
  if (starts_with(rule, "interaction_temporal_")) {
    // The target decides between interaction and existence localization.
    if (!children.empty() && children.front().qtype &&
        (*children.front().qtype == QT::ObjectExists ||
         *children.front().qtype == QT::RelationExists)) {
      return QT::ExistsTemporalLoc;
    }
    return QT::InteractionTemporalLoc;
  }
  return std::nullopt;
}

ProgramNode parse_program(std::string_view text, const Vocabulary& vocab) {
  Lexer lexer(text);
  const RawCall root = lexer.parse_root();
  check_structure(root);
  check_literals(root, vocab);
  return build(root);
}

std::string serialize_program(const ProgramNode& node) {
  std::string out = node.rule + "(";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  if (node.reads_scene) {
    sep();
    out += "scene";
  }
  for (const auto& c : node.children) {
    sep();
    out += serialize_program(c);
  }
  for (const auto& a : node.args) {
    sep();
    out += quote_if_needed(a);
  }
  return out + ")";
}

Token token_of(const ProgramNode& node) {
  Token t{node.qtype, {}};
  for (const auto& c : node.children) {
    if (c.qtype) t.children.push_back(*c.qtype);
  }
  return t;
}

std::vector<const ProgramNode*> decompose(const ProgramNode& node) {
  std::vector<const ProgramNode*> out;
  post_order(node, out);
  return out;
}

std::vector<std::string> node_keys(const ProgramNode& node) {
  std::map<std::string, int> seen;
  std::vector<std::string> keys;
  for (const auto* n : decompose(node)) {
    std::string text = serialize_program(*n);
    const int ordinal = seen[text]++;
    keys.push_back(text + "#" + std::to_string(ordinal));
  }
  return keys;
}

std::size_t subtree_size(const ProgramNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += subtree_size(c);
  return n;
}

std::size_t depth(const ProgramNode& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, depth(c));
  return d + 1;
}

std::vector<std::string> read_program_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open program file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(b, e - b + 1));
  }
  return lines;
}

}  // namespace stqa
