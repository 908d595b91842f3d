#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace stqa {

/// The 14 sub-question categories.
enum class QuestionType {
  ObjectExists,
  RelationExists,
  Interaction,
  InteractionTemporalLoc,
  ExistsTemporalLoc,
  ObjectTemporalLoc,
  ActionTemporalLoc,
  LongestShortestAction,
  Action,
  Object,
  Choose,
  Equals,
  Conjunction,
  FirstLast,
};

inline constexpr std::array<QuestionType, 14> kAllQuestionTypes = {
    QuestionType::ObjectExists,          QuestionType::RelationExists,
    QuestionType::Interaction,           QuestionType::InteractionTemporalLoc,
    QuestionType::ExistsTemporalLoc,     QuestionType::ObjectTemporalLoc,
    QuestionType::ActionTemporalLoc,     QuestionType::LongestShortestAction,
    QuestionType::Action,                QuestionType::Object,
    QuestionType::Choose,                QuestionType::Equals,
    QuestionType::Conjunction,           QuestionType::FirstLast,
};

std::string_view to_string(QuestionType t);
std::optional<QuestionType> question_type_from_string(std::string_view s);

/// Types whose answers are yes/no.
bool is_binary_type(QuestionType t);

}  // namespace stqa
