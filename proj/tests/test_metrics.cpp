#include <gtest/gtest.h>

#include "stqa/errors.hpp"
#include "stqa/metrics.hpp"
#include "support.hpp"

using namespace stqa;
using QT = QuestionType;

namespace {

PredictionRecord rec(std::string id, QT type, std::optional<std::string> gt, std::optional<std::string> pred,
                     std::vector<std::string> children = {}, std::string rule = "") {
  PredictionRecord r;
  r.video_id = "v";
  r.question_id = std::move(id);
  r.qtype = type;
  r.children = std::move(children);
  r.is_compositional = !r.children.empty();
  if (gt) r.ground_truth = Answer::object(*gt);
  if (pred) r.predicted = Answer::object(*pred);
  r.rule = std::move(rule);
  return r;
}

PredictionRecord yn(std::string id, QT type, bool gt, bool pred, std::vector<std::string> children = {},
                    std::string rule = "") {
  PredictionRecord r = rec(std::move(id), type, std::nullopt, std::nullopt, std::move(children), std::move(rule));
  r.ground_truth = Answer::binary(gt);
  r.predicted = Answer::binary(pred);
  return r;
}

const RuleScore& score(const ConsistencyReport& rep, const std::string& id) {
  for (const auto& r : rep.rules) {
    if (r.id == id) return r;
  }
  throw std::out_of_range(id);
}

Rational q(int n, int d) { return Rational(n, d); }

}  // namespace

TEST(Rates, Formatting) {
  EXPECT_EQ(format_rate(std::nullopt), "N/A");
  EXPECT_EQ(format_rate(q(2, 3)), "0.67");
  EXPECT_EQ(format_rate(q(1, 8), 2), "0.13");  // half away from zero
  EXPECT_EQ(format_rate(q(-1, 8), 2), "-0.13");
  EXPECT_EQ(format_rate(q(1, 1)), "1.00");
  EXPECT_EQ(format_rate(q(2, 3), 4), "0.6667");
  EXPECT_FALSE(ratio(3, 0).has_value());
}

TEST(Accuracy, BalancedOverGroundTruthAnswers) {
  // gt yes: 3 of 4 right; gt no: 0 of 1 right -> (3/4 + 0) / 2
  std::vector<PredictionRecord> rs = {yn("a", QT::ObjectExists, true, true), yn("b", QT::ObjectExists, true, true),
                                      yn("c", QT::ObjectExists, true, true), yn("d", QT::ObjectExists, true, false),
                                      yn("e", QT::ObjectExists, false, true)};
  const RecordSet set(rs);
  EXPECT_EQ(*accuracy(set, QT::ObjectExists), q(3, 8));
  EXPECT_FALSE(accuracy(set, QT::Choose).has_value());
  EXPECT_EQ(*overall_accuracy(set), q(3, 8));
}

TEST(Accuracy, UnlabeledRecordsAreExcluded) {
  std::vector<PredictionRecord> rs = {rec("a", QT::Object, "dish", "dish"), rec("b", QT::Object, std::nullopt, "cup")};
  EXPECT_EQ(*accuracy(RecordSet(rs), QT::Object), q(1, 1));
}

TEST(Accuracy, MissingPredictionCountsAsNone) {
  std::vector<PredictionRecord> rs = {rec("a", QT::Object, "None", std::nullopt)};
  EXPECT_EQ(*accuracy(RecordSet(rs), QT::Object), q(1, 1));
}

TEST(Composition, HandFixture) {
  const RecordSet set(read_records(test::fixture("metrics_hand.jsonl")));
  const auto s = composition_stats(set);
  EXPECT_EQ(*s.ca(), q(1, 1));
  EXPECT_EQ(*s.rwr(), q(2, 3));
  EXPECT_EQ(*s.rwr_n(1), q(1, 2));
  EXPECT_EQ(*s.rwr_n(2), q(1, 1));
  EXPECT_FALSE(s.rwr_n(3).has_value());
  EXPECT_EQ(*s.delta(), q(2, 3) - q(1, 1));
  EXPECT_EQ(s.ca_total + s.rwr_total, 4u);
}

TEST(Composition, UnlabeledChildMakesParentUnresolvable) {
  std::vector<PredictionRecord> rs = {yn("c1", QT::Interaction, true, true),
                                      rec("c2", QT::Interaction, std::nullopt, std::nullopt),
                                      yn("p", QT::Conjunction, true, true, {"c1", "c2"})};
  const auto s = composition_stats(RecordSet(rs));
  EXPECT_EQ(s.ca_total + s.rwr_total, 0u);
  EXPECT_FALSE(s.ca().has_value());
}

TEST(Records, DanglingChildIsRecordError) {
  std::vector<PredictionRecord> rs = {yn("p", QT::Conjunction, true, true, {"c1", "ghost"}),
                                      yn("c1", QT::Interaction, true, true)};
  try {
    RecordSet set(rs);
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Records, DuplicateIdIsRecordError) {
  std::vector<PredictionRecord> rs = {yn("a", QT::Interaction, true, true), yn("a", QT::Interaction, true, true)};
  EXPECT_THROW(RecordSet set(rs), RecordError);
}

TEST(Records, JsonRoundTripAndProgramErrorLines) {
  const auto r = yn("p", QT::Conjunction, true, false, {"c"}, "conjunction_and");
  const auto back = record_from_json(to_json(r));
  EXPECT_EQ(back.question_id, "p");
  EXPECT_EQ(back.children, std::vector<std::string>{"c"});
  EXPECT_EQ(back.rule, "conjunction_and");
  EXPECT_TRUE(back.predicted->is_no());
  const std::string text = to_json(r).dump() +
                           "\n{\"video_id\":\"v\",\"question_id\":\"x\",\"qtype\":null,\"error\":\"Syntax\"}\n\n";
  EXPECT_EQ(parse_records(text).size(), 1u);
  EXPECT_THROW(parse_records("{\"video_id\":\"v\"}"), FormatError);
}

TEST(Consistency, DefaultRuleTable) {
  const auto rules = default_consistency_rules();
  ASSERT_EQ(rules.size(), 31u);
  EXPECT_EQ(rules.front().id(), "Interaction/Yes");
  EXPECT_EQ(rules.back().id(), "Object/No");
}

TEST(Consistency, AndYesWithANoChildIsAViolation) {
  std::vector<PredictionRecord> rs = {
      yn("c1", QT::Interaction, true, true, {}, "query_interaction"),
      yn("c2", QT::Interaction, true, false, {}, "query_interaction"),
      yn("p", QT::Conjunction, true, true, {"c1", "c2"}, "conjunction_and")};
  const auto rep = internal_consistency(RecordSet(rs), default_consistency_rules());
  const auto& s = score(rep, "And/Yes");
  EXPECT_EQ(s.checks, 2u);
  EXPECT_EQ(s.satisfied, 1u);
  // c2 answered no, so its And parent must say no: another violation
  EXPECT_EQ(*score(rep, "Interaction/No").ic(), q(0, 1));
  EXPECT_FALSE(score(rep, "Xor/Yes").ic().has_value());
}

TEST(Consistency, FirstLastMembership) {
  PredictionRecord set = rec("s", QT::Object, std::nullopt, std::nullopt, {}, "query_subject_relation");
  set.predicted = Answer::set(AnswerKind::ObjectSet, {"dish", "cup"});
  std::vector<PredictionRecord> rs = {set, rec("f", QT::FirstLast, std::nullopt, "bag", {"s"}, "query_first")};
  const auto rep = internal_consistency(RecordSet(rs), default_consistency_rules());
  EXPECT_EQ(*score(rep, "First/Object").ic(), q(0, 1));
}

TEST(Consistency, OverallIsMeanOverDefinedRules) {
  std::vector<PredictionRecord> rs = {
      yn("c1", QT::Interaction, true, true, {}, "query_interaction"),
      yn("c2", QT::Interaction, true, false, {}, "query_interaction"),
      yn("p", QT::Conjunction, true, true, {"c1", "c2"}, "conjunction_and")};
  const auto rep = internal_consistency(RecordSet(rs), default_consistency_rules());
  // And/Yes 1/2 and Interaction/No 0/1 are the only defined rules
  EXPECT_EQ(*rep.overall, q(1, 4));
  EXPECT_EQ(*rep.weighted, q(1, 3));
}

TEST(Report, EmptyInputIsAllNotAvailable) {
  const auto rep = compute_metrics(RecordSet({}), default_consistency_rules());
  const auto text = render_report(rep);
  EXPECT_EQ(text.find("0.00"), std::string::npos);
  EXPECT_NE(text.find("N/A"), std::string::npos);
  const auto j = report_to_json(rep);
  EXPECT_TRUE(j["overall"]["accuracy"].is_null());
}

TEST(Report, JsonCarriesExactFractions) {
  const RecordSet set(read_records(test::fixture("metrics_hand.jsonl")));
  const auto j = report_to_json(compute_metrics(set, default_consistency_rules()));
  EXPECT_EQ(j["overall"]["rwr"]["exact"], "2/3");
  EXPECT_EQ(j["overall"]["rwr_n"]["1"]["exact"], "1/2");
}
