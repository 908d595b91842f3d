#include <gtest/gtest.h>

#include "stqa/executor.hpp"
#include "stqa/program.hpp"
#include "stqa/rules.hpp"
#include "support.hpp"

using namespace stqa;
using stqa::test::SceneBuilder;

namespace {

ExecutionOutcome run(const SceneRepresentation& scene, const std::string& text) {
  return run_program(parse_program(text), scene);
}

Answer answer(const SceneRepresentation& scene, const std::string& text) {
  return run(scene, text).root_answer;
}

std::optional<RuleErrorKind> root_error(const SceneRepresentation& scene, const std::string& text) {
  const auto out = run(scene, text);
  const auto* e = out.trace.find(out.root_key);
  if (!e || !e->failure) return std::nullopt;
  return e->failure->kind;
}

std::string interaction(const std::string& r, const std::string& o) {
  return "query_interaction(filter_relation(scene, " + r + "), filter_object(scene, " + o + "))";
}

std::string temporal(const std::string& loc, const std::string& target, const std::string& anchor) {
  return "interaction_temporal_" + loc + "(" + target + ", " + anchor + ")";
}

const Answer kYes = Answer::binary(true);
const Answer kNo = Answer::binary(false);

}  // namespace

TEST(Registry, SignaturesAndBindings) {
  EXPECT_EQ(rule_signatures().size(), 29u);
  for (const auto& s : rule_catalog()) EXPECT_NE(find_signature(s.name), nullptr) << s.name;
  EXPECT_GT(rule_bindings().size(), rule_signatures().size());
}

TEST(Registry, UnknownTokenIsRuleError) {
  Token t{QuestionType::Conjunction, {QuestionType::Object, QuestionType::Object}};
  try {
    get_rule(t, "conjunction_and");
    FAIL();
  } catch (const RuleError& e) {
    EXPECT_EQ(e.kind(), RuleErrorKind::UnknownToken);
  }
}

TEST(Registry, DispatchDependsOnChildTypes) {
  const auto p = parse_program("query_first(filter_actions(scene))");
  const auto q = parse_program("query_first(query_subject_relation(filter_relation(scene, holding)))");
  EXPECT_NE(get_rule(token_of(p), p.rule).variant, get_rule(token_of(q), q.rule).variant);
}

TEST(Rules, ExistenceQueries) {
  auto s = SceneBuilder(4).rel(2, "holding", "blanket").scene;
  EXPECT_EQ(answer(s, "query_object(filter_object(scene, blanket))"), kYes);
  EXPECT_EQ(answer(s, "query_object(filter_object(scene, chair))"), kNo);
  EXPECT_EQ(answer(s, "query_relation(filter_relation(scene, holding))"), kYes);
  EXPECT_EQ(answer(s, "query_relation(filter_relation(scene, touching))"), kNo);
}

TEST(Rules, InteractionNeedsTheSameTriple) {
  auto s = SceneBuilder(4).rel(1, "holding", "phone").rel(1, "looking at", "blanket").scene;
  EXPECT_EQ(answer(s, interaction("holding", "blanket")), kNo);
  EXPECT_EQ(answer(s, interaction("looking at", "blanket")), kYes);
  EXPECT_EQ(answer(s, "query_interaction(query_relation(filter_relation(scene, holding)), "
                      "query_object(filter_object(scene, blanket)))"),
            kNo);
}

TEST(Rules, AfterIsStrict) {
  const std::string q = temporal("after", interaction("holding", "blanket"),
                                 "filter_actions(scene, sitting in a chair)");
  auto at_end = SceneBuilder(8).rel(4, "holding", "blanket").act("sitting in a chair", 2, 4).scene;
  auto past_end = SceneBuilder(8).rel(5, "holding", "blanket").act("sitting in a chair", 2, 4).scene;
  EXPECT_EQ(answer(at_end, q), kNo);
  EXPECT_EQ(answer(past_end, q), kYes);
}

TEST(Rules, BeforeWhileBetween) {
  auto s = SceneBuilder(12)
               .rel(1, "holding", "blanket")
               .rel(6, "holding", "phone")
               .act("sitting in a chair", 3, 4)
               .act("watching television", 8, 9)
               .scene;
  const std::string blanket = interaction("holding", "blanket");
  const std::string phone = interaction("holding", "phone");
  const std::string chair = "filter_actions(scene, sitting in a chair)";
  const std::string tv = "filter_actions(scene, watching television)";
  EXPECT_EQ(answer(s, temporal("before", blanket, chair)), kYes);
  EXPECT_EQ(answer(s, temporal("before", phone, chair)), kNo);
  EXPECT_EQ(answer(s, temporal("while", phone, chair)), kNo);
  EXPECT_EQ(answer(s, "interaction_temporal_between(" + phone + ", " + chair + ", " + tv + ")"), kYes);
  // anchor order does not matter
  EXPECT_EQ(answer(s, "interaction_temporal_between(" + phone + ", " + tv + ", " + chair + ")"), kYes);
  EXPECT_EQ(answer(s, "interaction_temporal_between(" + blanket + ", " + chair + ", " + tv + ")"), kNo);
}

TEST(Rules, WhileCountsTheAnchorFrames) {
  auto s = SceneBuilder(6).rel(3, "holding", "blanket").act("sitting in a chair", 3, 5).scene;
  EXPECT_EQ(answer(s, temporal("while", interaction("holding", "blanket"),
                               "filter_actions(scene, sitting in a chair)")),
            kYes);
}

TEST(Rules, UngroundedAnchorAnswersNo) {
  auto s = SceneBuilder(6).rel(3, "holding", "blanket").scene;
  EXPECT_EQ(answer(s, temporal("after", interaction("holding", "blanket"),
                               "filter_actions(scene, sitting in a chair)")),
            kNo);
  EXPECT_EQ(answer(s, temporal("after", interaction("holding", "blanket"), interaction("touching", "door"))),
            kNo);
}

TEST(Rules, InteractionAnchorUsesMatchedFrames) {
  auto s = SceneBuilder(10)
               .rel(2, "touching", "door")
               .rel(4, "touching", "door")
               .rel(4, "holding", "blanket")
               .rel(7, "holding", "blanket")
               .scene;
  EXPECT_EQ(answer(s, temporal("after", interaction("holding", "blanket"), interaction("touching", "door"))),
            kYes);
  EXPECT_EQ(answer(s, temporal("before", interaction("touching", "door"), interaction("holding", "blanket"))),
            kYes);
}

TEST(Rules, ObjectsAfterFirstAndAll) {
  auto s = SceneBuilder(10)
               .rel(1, "holding", "pillow")
               .rel(5, "holding", "phone")
               .rel(5, "holding", "dish")
               .rel(7, "holding", "pillow")
               .act("sitting on the floor", 2, 3)
               .scene;
  const std::string base = "objects_after(query_relation(filter_relation(scene, holding)), "
                           "filter_actions(scene, sitting on the floor)";
  EXPECT_EQ(answer(s, base + ")"), Answer::object("dish"));  // frame 5, then name order
  EXPECT_EQ(answer(s, base + ", all)"), Answer::set(AnswerKind::ObjectSet, {"dish", "phone", "pillow"}));
  auto empty = SceneBuilder(10).rel(1, "holding", "pillow").act("sitting on the floor", 2, 3).scene;
  EXPECT_EQ(answer(empty, base + ")"), Answer::none());
  EXPECT_EQ(answer(empty, base + ", all)"), Answer::set(AnswerKind::ObjectSet, {}));
}

TEST(Rules, ActionsAfterAndBefore) {
  auto s = SceneBuilder(20)
               .act("holding a book", 5, 6)
               .act("watching television", 9, 12)
               .act("standing up", 8, 8)
               .act("sneezing somewhere", 1, 2)
               .act("smiling at something", 3, 4)
               .scene;
  EXPECT_EQ(answer(s, "actions_after(filter_actions(scene, holding a book))"), Answer::action("standing up"));
  EXPECT_EQ(answer(s, "actions_before(filter_actions(scene, holding a book))"),
            Answer::action("smiling at something"));
  EXPECT_EQ(answer(s, "actions_before(filter_actions(scene, sneezing somewhere))"), Answer::none());
}

TEST(Rules, ActionsAfterWithCandidates) {
  auto s = SceneBuilder(20)
               .rel(1, "holding", "blanket")
               .act("holding a blanket", 1, 2, "blanket")
               .act("sitting in a chair", 3, 4, "chair")
               .act("standing up", 5, 5)
               .act("snuggling with a blanket", 7, 8, "blanket")
               .scene;
  EXPECT_EQ(answer(s, "actions_after(filter_actions(query_subject_relation(filter_relation(scene, holding))), "
                      "filter_actions(scene, sitting in a chair))"),
            Answer::action("snuggling with a blanket"));
}

TEST(Rules, LongestShortestBreaksTiesByOrder) {
  auto s = SceneBuilder(20)
               .act("holding a book", 5, 7)
               .act("watching television", 1, 3)
               .act("standing up", 10, 10)
               .scene;
  EXPECT_EQ(answer(s, "longest_action(filter_actions(scene))"), Answer::action("watching television"));
  EXPECT_EQ(answer(s, "shortest_action(filter_actions(scene))"), Answer::action("standing up"));
  auto none = SceneBuilder(3).scene;
  EXPECT_EQ(answer(none, "longest_action(filter_actions(scene))"), Answer::none());
}

TEST(Rules, FilterActionsByObjectAndVerb) {
  auto s = SceneBuilder(10)
               .rel(2, "touching", "blanket")
               .act("holding a blanket", 1, 2, "blanket")
               .act("snuggling with a blanket", 3, 5, "blanket")
               .act("holding a book", 6, 7, "book")
               .scene;
  const std::string objs = "query_subject_relation(filter_relation(scene, touching))";
  EXPECT_EQ(answer(s, "filter_actions(" + objs + ")"),
            Answer::set(AnswerKind::ActionSet, {"holding a blanket", "snuggling with a blanket"}));
  EXPECT_EQ(answer(s, "filter_actions(" + objs + ", holding)"),
            Answer::set(AnswerKind::ActionSet, {"holding a blanket"}));
  EXPECT_EQ(answer(s, "filter_actions(scene)"),
            Answer::set(AnswerKind::ActionSet, {"holding a blanket", "snuggling with a blanket", "holding a book"}));
}

TEST(Rules, ChooseNeedsExactlyOneOption) {
  auto s = SceneBuilder(4).rel(1, "holding", "blanket").rel(2, "holding", "phone").scene;
  auto choose = [](const std::string& a, const std::string& b) {
    return "choose(" + interaction("holding", a) + ", " + interaction("holding", b) + ", " + a + ", " + b + ")";
  };
  EXPECT_EQ(answer(s, choose("blanket", "chair")), Answer::object("blanket"));
  EXPECT_EQ(root_error(s, choose("blanket", "phone")), RuleErrorKind::AmbiguousChoice);
  EXPECT_EQ(root_error(s, choose("door", "chair")), RuleErrorKind::NoValidChoice);
}

TEST(Rules, OrPicksTheTimeWord) {
  auto s = SceneBuilder(10).rel(8, "holding", "blanket").act("sitting in a chair", 2, 4).scene;
  const std::string target = interaction("holding", "blanket");
  const std::string anchor = "filter_actions(scene, sitting in a chair)";
  EXPECT_EQ(answer(s, "or(" + temporal("after", target, anchor) + ", " + temporal("before", target, anchor) + ")"),
            Answer::time("after"));
}

TEST(Rules, ChooseActionShorterAndLonger) {
  auto s = SceneBuilder(20).act("holding a book", 1, 3).act("watching television", 5, 10).act("standing up", 12, 14).scene;
  EXPECT_EQ(answer(s, "choose_action_shorter(filter_actions(scene, holding a book), "
                      "filter_actions(scene, watching television))"),
            Answer::action("holding a book"));
  EXPECT_EQ(answer(s, "choose_action_longer(filter_actions(scene, holding a book), "
                      "filter_actions(scene, watching television))"),
            Answer::action("watching television"));
  // equal durations: the earlier instance wins
  EXPECT_EQ(answer(s, "choose_action_shorter(filter_actions(scene, standing up), "
                      "filter_actions(scene, holding a book))"),
            Answer::action("holding a book"));
  EXPECT_EQ(root_error(s, "choose_action_shorter(filter_actions(scene, sneezing somewhere), "
                          "filter_actions(scene, holding a book))"),
            RuleErrorKind::NoValidChoice);
}

TEST(Rules, EqualsTreatsNoneAsUnequal) {
  auto s = SceneBuilder(6).rel(1, "holding", "dish").rel(3, "touching", "dish").scene;
  const std::string first_held = "query_first(query_subject_relation(filter_relation(scene, holding)))";
  const std::string first_touched = "query_first(query_subject_relation(filter_relation(scene, touching)))";
  const std::string first_wiped = "query_first(query_subject_relation(filter_relation(scene, wiping)))";
  EXPECT_EQ(answer(s, "object_equals(" + first_held + ", " + first_touched + ")"), kYes);
  EXPECT_EQ(answer(s, "object_equals(" + first_wiped + ", " + first_wiped + ")"), kNo);
}

TEST(Rules, EqualsRejectsSets) {
  auto s = SceneBuilder(6).rel(1, "holding", "dish").rel(2, "holding", "phone").act("standing up", 1, 1).scene;
  const auto err = root_error(
      s, "object_equals(objects_after(query_relation(filter_relation(scene, holding)), "
         "filter_actions(scene, standing up), all), query_first(query_subject_relation(filter_relation(scene, "
         "holding))))");
  EXPECT_EQ(err, RuleErrorKind::TypeMismatch);
}

TEST(Rules, ConjunctionAndXor) {
  auto s = SceneBuilder(4).rel(1, "holding", "blanket").scene;
  const std::string yes = interaction("holding", "blanket");
  const std::string no = interaction("holding", "phone");
  EXPECT_EQ(answer(s, "conjunction_and(" + yes + ", " + yes + ")"), kYes);
  EXPECT_EQ(answer(s, "conjunction_and(" + yes + ", " + no + ")"), kNo);
  EXPECT_EQ(answer(s, "conjunction_xor(" + yes + ", " + no + ")"), kYes);
  EXPECT_EQ(answer(s, "conjunction_xor(" + no + ", " + no + ")"), kNo);
}

TEST(Rules, FirstAndLast) {
  auto s = SceneBuilder(10)
               .rel(2, "holding", "phone")
               .rel(6, "holding", "dish")
               .act("watching television", 4, 5)
               .act("standing up", 1, 1)
               .scene;
  EXPECT_EQ(answer(s, "query_first(filter_actions(scene))"), Answer::action("standing up"));
  EXPECT_EQ(answer(s, "query_last(filter_actions(scene))"), Answer::action("watching television"));
  EXPECT_EQ(answer(s, "query_last(query_subject_relation(filter_relation(scene, holding)))"), Answer::object("dish"));
  EXPECT_EQ(answer(s, "query_first(query_subject_relation(filter_relation(scene, wiping)))"), Answer::none());
}

TEST(Rules, SubjectRelationIsOrderedSet) {
  auto s = SceneBuilder(10).rel(3, "holding", "phone").rel(1, "holding", "dish").rel(3, "holding", "bag").scene;
  EXPECT_EQ(answer(s, "query_subject_relation(filter_relation(scene, holding))"),
            Answer::set(AnswerKind::ObjectSet, {"dish", "bag", "phone"}));
  EXPECT_EQ(answer(s, "query_subject_relation(filter_relation(scene, wiping))"), Answer::none());
}
