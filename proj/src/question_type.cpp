#include "stqa/question_type.hpp"

namespace stqa {

std::string_view to_string(QuestionType t) {
  switch (t) {
    case QuestionType::ObjectExists: return "ObjectExists";
    case QuestionType::RelationExists: return "RelationExists";
    case QuestionType::Interaction: return "Interaction";
    case QuestionType::InteractionTemporalLoc: return "InteractionTemporalLoc";
    case QuestionType::ExistsTemporalLoc: return "ExistsTemporalLoc";
    case QuestionType::ObjectTemporalLoc: return "ObjectTemporalLoc";
    case QuestionType::ActionTemporalLoc: return "ActionTemporalLoc";
    case QuestionType::LongestShortestAction: return "LongestShortestAction";
    case QuestionType::Action: return "Action";
    case QuestionType::Object: return "Object";
    case QuestionType::Choose: return "Choose";
    case QuestionType::Equals: return "Equals";
    case QuestionType::Conjunction: return "Conjunction";
    case QuestionType::FirstLast: return "FirstLast";
  }
  return "?";
}

std::optional<QuestionType> question_type_from_string(std::string_view s) {
  for (auto t : kAllQuestionTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

bool is_binary_type(QuestionType t) {
  switch (t) {
    case QuestionType::ObjectExists:
    case QuestionType::RelationExists:
    case QuestionType::Interaction:
    case QuestionType::InteractionTemporalLoc:
    case QuestionType::ExistsTemporalLoc:
    case QuestionType::Equals:
    case QuestionType::Conjunction: return true;
    default: return false;
  }
}

}  // namespace stqa
