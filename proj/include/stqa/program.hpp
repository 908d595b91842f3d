#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stqa/question_type.hpp"
#include "stqa/vocabulary.hpp"

namespace stqa {

/// A node of a question program. Question nodes carry a QuestionType;
/// scene-selection primitives (filter_object, filter_relation) carry none and
/// are internal steps of the question that owns them.
///
/// Textual form: `rule(scene, child, ..., literal, ...)`, where the literal
/// word `scene` marks a node that reads the scene representation directly.
struct ProgramNode {
  std::string rule;
  bool reads_scene = false;
  std::vector<std::string> args;
  std::vector<ProgramNode> children;
  std::optional<QuestionType> qtype;

  bool is_internal() const { return !qtype.has_value(); }
  /// Number of children that are questions (not internal primitives).
  std::size_t question_child_count() const;

  bool operator==(const ProgramNode&) const = default;
};

/// The dispatch key of a node: its own type and the types of its question
/// children in order. Internal primitive children do not contribute.
struct Token {
  std::optional<QuestionType> parent;
  std::vector<QuestionType> children;

  std::string to_string() const;
  bool operator==(const Token&) const = default;
};

enum class ArgKind { Object, Relation, Action, Verb, Option, Flag };
enum class SceneInput { Required, Forbidden, InsteadOfChildren };

/// Syntax-level signature used by the parser: arity of children and literal
/// arguments, and whether the node reads the scene.
struct RuleSyntax {
  std::string_view name;
  SceneInput scene = SceneInput::Forbidden;
  int min_children = 0;
  int max_children = 0;
  std::vector<ArgKind> args;  // slot kinds; the first `min_args` are mandatory
  int min_args = 0;
  std::string_view flag_word;  // the accepted word for an ArgKind::Flag slot
};

/// Every rule name the grammar knows, in catalog order.
std::span<const RuleSyntax> rule_catalog();
const RuleSyntax* find_rule_syntax(std::string_view name);

/// The question type a node with this rule and these children belongs to;
/// nullopt for internal primitives.
std::optional<QuestionType> infer_qtype(std::string_view rule,
                                        const std::vector<ProgramNode>& children);

/// Parses and checks one program. Throws ProgramError (syntax with byte
/// position, unknown rule, arity mismatch, unknown vocabulary literal).
/// Structure is checked over the whole tree before any literal is looked up.
ProgramNode parse_program(std::string_view text, const Vocabulary& vocab = Vocabulary::standard());

/// Canonical text: scene marker first, then children, then literals.
std::string serialize_program(const ProgramNode& node);

Token token_of(const ProgramNode& node);

/// All nodes of the tree in post-order (children before parents, left to
/// right).
std::vector<const ProgramNode*> decompose(const ProgramNode& node);

/// Trace keys aligned with decompose(node): canonical subtree text plus an
/// occurrence ordinal ("...#0", "...#1") so repeated sub-questions stay
/// distinct.
std::vector<std::string> node_keys(const ProgramNode& node);

std::size_t subtree_size(const ProgramNode& node);
std::size_t depth(const ProgramNode& node);

/// Reads a program file: one program per line; blank lines and lines
/// starting with '#' are skipped. Returns the raw lines.
std::vector<std::string> read_program_lines(const std::string& path);

}  // namespace stqa
