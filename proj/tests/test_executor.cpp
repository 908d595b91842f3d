#include <gtest/gtest.h>

#include "stqa/executor.hpp"
#include "stqa/program.hpp"
#include "support.hpp"

using namespace stqa;
using stqa::test::SceneBuilder;

namespace {

SceneRepresentation small_scene() {
  return SceneBuilder(10)
      .rel(1, "holding", "blanket")
      .rel(2, "holding", "phone")
      .rel(6, "sitting on", "chair")
      .act("holding a blanket", 1, 2, "blanket")
      .act("sitting in a chair", 5, 7, "chair")
      .scene;
}

const char* kAnd =
    "conjunction_and(query_interaction(filter_relation(scene, holding), filter_object(scene, blanket)), "
    "interaction_temporal_after(query_interaction(filter_relation(scene, sitting on), filter_object(scene, "
    "chair)), filter_actions(scene, holding a blanket)))";

}  // namespace

TEST(Executor, LeafTraceHasFilterAndQuery) {
  const auto out = run_program(parse_program("query_object(filter_object(scene, blanket))"), small_scene());
  ASSERT_EQ(out.trace.size(), 2u);
  EXPECT_TRUE(out.trace.entries()[0].internal());
  EXPECT_EQ(out.trace.entries()[1].rule, "query_object");
  EXPECT_TRUE(out.root_answer.is_yes());
  const auto rows = answers_by_subquestion(out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].qtype.has_value());
}

TEST(Executor, TraceFollowsPostOrderAndIsComplete) {
  const auto p = parse_program(kAnd);
  const auto out = run_program(p, small_scene());
  const auto keys = node_keys(p);
  ASSERT_EQ(out.trace.size(), keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) EXPECT_EQ(out.trace.entries()[i].key, keys[i]);
  EXPECT_TRUE(out.root_answer.is_yes());
  EXPECT_TRUE(out.errors.empty());
}

TEST(Executor, ChildStandaloneMatchesEntryInParent) {
  const auto p = parse_program(kAnd);
  const auto scene = small_scene();
  const auto whole = run_program(p, scene);
  for (const auto& child : p.children) {
    const auto alone = run_program(child, scene);
    const auto* inside = whole.trace.find(alone.root_key);
    ASSERT_NE(inside, nullptr);
    EXPECT_EQ(*inside, *alone.trace.find(alone.root_key));
  }
}

TEST(Executor, MemoizedTraceGivesTheSameAnswers) {
  const auto scene = small_scene();
  const auto p = parse_program(kAnd);
  const auto q = parse_program(
      "query_interaction(filter_relation(scene, holding), filter_object(scene, blanket))");
  const Trace warm = execute(q, scene);
  const Trace memo = execute(p, scene, warm);
  const Trace cold = execute(p, scene);
  const auto root = node_keys(p).back();
  EXPECT_EQ(memo.find(root)->answer(), cold.find(root)->answer());
  EXPECT_EQ(memo.size(), cold.size());
}

TEST(Executor, MemoHitIsNotRecomputed) {
  const auto scene = small_scene();
  const auto q = parse_program("query_object(filter_object(scene, blanket))");
  Trace seeded;
  const auto key = node_keys(q).back();
  seeded.insert({key, "query_object", QuestionType::ObjectExists, {}, IntermediateResult{Answer::binary(false), {}},
                 std::nullopt});
  EXPECT_TRUE(execute(q, scene, seeded).find(key)->answer().is_no());
  ExecuteOptions no_memo;
  no_memo.memoize = false;
  EXPECT_THROW(execute(q, scene, seeded, no_memo), std::logic_error);
}

TEST(Executor, FailuresPropagateAndSiblingsStillRun) {
  const auto scene = SceneBuilder(4).rel(1, "holding", "blanket").rel(1, "holding", "phone").scene;
  const auto p = parse_program(
      "object_equals(choose(query_interaction(filter_relation(scene, holding), filter_object(scene, blanket)), "
      "query_interaction(filter_relation(scene, holding), filter_object(scene, phone)), blanket, phone), "
      "query_first(query_subject_relation(filter_relation(scene, holding))))");
  const auto out = run_program(p, scene);
  ASSERT_EQ(out.errors.size(), 2u);
  EXPECT_EQ(out.errors[0].second.kind, RuleErrorKind::AmbiguousChoice);
  EXPECT_EQ(out.errors[1].second.kind, RuleErrorKind::Propagated);
  EXPECT_EQ(out.errors[1].first, out.root_key);
  EXPECT_TRUE(out.root_answer.is_none());
  const auto& sibling = out.trace.entries()[out.trace.size() - 2];
  EXPECT_EQ(sibling.rule, "query_first");
  EXPECT_EQ(sibling.answer(), Answer::object("blanket"));
}

TEST(Executor, TextDumpShowsErrorsAndEvidence) {
  const auto scene = SceneBuilder(4).rel(1, "holding", "blanket").rel(1, "holding", "phone").scene;
  const auto p = parse_program(
      "choose(query_interaction(filter_relation(scene, holding), filter_object(scene, blanket)), "
      "query_interaction(filter_relation(scene, holding), filter_object(scene, phone)), blanket, phone)");
  const auto text = trace_to_text(run_program(p, scene).trace);
  EXPECT_NE(text.find("ERROR AmbiguousChoice"), std::string::npos);
  EXPECT_NE(text.find("1 triple @ frames 1..1"), std::string::npos);
  const auto json = trace_to_json(run_program(p, scene).trace);
  ASSERT_TRUE(json.is_array());
  EXPECT_EQ(json.back()["error"]["kind"], "AmbiguousChoice");
}

TEST(Executor, EmptyTraceHasNoRows) {
  EXPECT_TRUE(answers_by_subquestion(ExecutionOutcome{}).empty());
}

// ---- figure fixtures -------------------------------------------------------

class FigureTest : public ::testing::TestWithParam<std::string> {};

TEST_P(FigureTest, ReproducesPrintedAnswerAndSteps) {
  const auto fig = test::load_figure(GetParam());
  ExecuteOptions opts;
  opts.vocab = &test::fixture_vocab();
  const auto out = run_program(parse_program(fig.program, test::fixture_vocab()), fig.scene, opts);
  if (fig.answer) {
    EXPECT_TRUE(test::same_answer(out.root_answer, *fig.answer)) << out.root_answer.to_string();
    EXPECT_TRUE(out.errors.empty());
  }
  // steps appear in order among the question entries
  std::size_t at = 0;
  for (const auto& e : out.trace.entries()) {
    if (at < fig.steps.size() && e.rule == fig.steps[at].rule && !e.internal() &&
        test::same_answer(e.answer(), fig.steps[at].answer)) {
      ++at;
    }
  }
  EXPECT_EQ(at, fig.steps.size()) << trace_to_text(out.trace);
}

INSTANTIATE_TEST_SUITE_P(Figures, FigureTest,
                         ::testing::Values("fig01", "fig04", "fig05", "fig07", "fig08", "fig09", "fig10",
                                           "fig11", "fig12", "fig13"));

TEST(Figures, SwappedEqualsArgumentsFlipTheAnswer) {
  const auto fig = test::load_figure("fig10");
  ExecuteOptions opts;
  opts.vocab = &test::fixture_vocab();
  const auto right = run_program(parse_program(fig.program, test::fixture_vocab()), fig.scene, opts);
  const auto swapped = run_program(parse_program(fig.swapped_program, test::fixture_vocab()), fig.scene, opts);
  EXPECT_TRUE(test::same_answer(right.root_answer, *fig.answer));
  EXPECT_TRUE(test::same_answer(swapped.root_answer, *fig.swapped_answer));
  EXPECT_NE(right.root_answer, swapped.root_answer);
  // the first argument handed to equals differs, visibly in the trace
  const auto arg = [](const ExecutionOutcome& o) {
    return o.trace.find(o.trace.find(o.root_key)->child_keys[0])->answer();
  };
  EXPECT_EQ(arg(right), Answer::object("book"));
  EXPECT_TRUE(arg(swapped).is_none());
}

TEST(Figures, MisStructuredProgramIsATraceVisibleTypeMismatch) {
  const auto fig = test::load_figure("fig14");
  ExecuteOptions opts;
  opts.vocab = &test::fixture_vocab();
  const auto out = run_program(parse_program(fig.program, test::fixture_vocab()), fig.scene, opts);
  ASSERT_EQ(out.errors.size(), 1u);
  EXPECT_EQ(out.errors[0].first, out.root_key);
  EXPECT_EQ(to_string(out.errors[0].second.kind), fig.error);
  EXPECT_NE(trace_to_text(out.trace).find("ERROR " + fig.error), std::string::npos);
}
