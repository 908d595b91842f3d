#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stqa/answer.hpp"
#include "stqa/errors.hpp"
#include "stqa/program.hpp"
#include "stqa/scene.hpp"

namespace stqa {

/// The result a_q of one node: a symbolic answer and the part of the scene
/// that supports it.
struct IntermediateResult {
  Answer answer;
  Evidence evidence;

  bool operator==(const IntermediateResult&) const = default;
};

enum class RuleErrorKind {
  MissingChild,
  TypeMismatch,
  AmbiguousChoice,
  NoValidChoice,
  UnknownToken,
  Propagated,
};

std::string_view to_string(RuleErrorKind kind);

/// A rule that could not produce an answer. The executor records these per
/// node instead of aborting.
class RuleError : public Error {
 public:
  RuleError(RuleErrorKind kind, const std::string& message) : Error(message), kind_(kind) {}
  RuleErrorKind kind() const { return kind_; }

 private:
  RuleErrorKind kind_;
};

enum class RuleInputKind { Scene, Trace };

/// Registry row: what a rule reads, which literals it takes and what it
/// answers.
struct RuleSignature {
  std::string_view name;
  RuleInputKind input;
  std::string_view args;
  std::string_view output;
  std::string_view summary;
};

std::span<const RuleSignature> rule_signatures();
const RuleSignature* find_signature(std::string_view name);

/// What a rule sees: the scene, its own node (for literals) and the results
/// of all its children in order, internal primitives included.
struct RuleContext {
  const SceneRepresentation& scene;
  const Vocabulary& vocab;
  const ProgramNode& node;
  std::vector<const IntermediateResult*> children;
};

using RuleFn = IntermediateResult (*)(const RuleContext&);

/// One row of the dispatch table. A token matches when the parent type is
/// equal and each question child's type is in the allowed set.
struct RuleBinding {
  std::string_view rule;
  std::optional<QuestionType> parent;
  std::vector<std::vector<QuestionType>> children;
  std::string_view variant;
  RuleFn fn;
};

std::span<const RuleBinding> rule_bindings();

struct RuleHandle {
  std::string_view rule;
  std::string_view variant;
  RuleFn fn = nullptr;

  IntermediateResult operator()(const RuleContext& ctx) const { return fn(ctx); }
};

/// Polymorphic dispatch: the same rule name binds different handlers for
/// different child types. Throws RuleError(UnknownToken) when nothing binds.
RuleHandle get_rule(const Token& token, std::string_view rule_name);

/// Frame window [lo, hi] a localizer induces from anchor intervals; empty
/// when lo > hi.
struct Window {
  Frame lo = 1;
  Frame hi = 0;
  bool empty() const { return lo > hi; }
};

}  // namespace stqa
