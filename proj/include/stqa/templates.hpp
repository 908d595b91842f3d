#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stqa/program.hpp"

namespace stqa {

/// Slot kinds are fixed by the slot name with trailing digits removed:
/// o object, r relation, a action, verb relation used as a verb, loc
/// after/before/while, dir after/before, pos first/last, ext
/// longest/shortest, cmp shorter/longer, conj and/xor.
enum class SlotKind { Object, Relation, Action, Verb, Localizer, Direction, Position, Extremum,
                      Comparison, Connective };

SlotKind slot_kind(std::string_view slot_name);
/// The closed word list of a word-valued slot kind; empty for vocabulary kinds.
std::vector<std::string> slot_words(SlotKind kind);

struct QuestionTemplate {
  std::string_view id;
  QuestionType category;
  std::string_view english;  // "{slot}" placeholders
  std::string_view program;  // same placeholders, program grammar
};

std::span<const QuestionTemplate> question_templates();
const QuestionTemplate* find_template(std::string_view id);
/// Slot names in order of first appearance in the program pattern.
std::vector<std::string> template_slots(const QuestionTemplate& t);

struct TemplateInstance {
  QuestionType category;
  std::string template_id;
  std::map<std::string, std::string> slots;

  bool operator==(const TemplateInstance&) const = default;
};

/// Fills the template and parses the result. Throws ProgramError with kind
/// NoTemplate (unknown id, category mismatch, missing slot) or Vocabulary
/// (slot value outside its vocabulary or word list).
ProgramNode question_to_program(const TemplateInstance& q,
                                const Vocabulary& vocab = Vocabulary::standard());

/// Matches an English question against every template's English form.
/// Throws ProgramError(NoTemplate) when none matches with valid slot values.
TemplateInstance match_question(std::string_view english,
                                const Vocabulary& vocab = Vocabulary::standard());

std::string render_question(const TemplateInstance& q);

/// "CATEGORY<TAB>template-id<TAB>slot=value;..." records.
TemplateInstance parse_question_line(std::string_view line);
std::string format_question_line(const TemplateInstance& q);
std::vector<TemplateInstance> read_question_file(const std::string& path);

}  // namespace stqa
