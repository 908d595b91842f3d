#include <gtest/gtest.h>

#include "stqa/errors.hpp"
#include "stqa/scene.hpp"
#include "stqa/vocabulary.hpp"
#include "support.hpp"

using namespace stqa;
using stqa::test::SceneBuilder;

TEST(Vocabulary, StandardTablesAreDisjointWhereExpected) {
  const auto& v = Vocabulary::standard();
  EXPECT_TRUE(v.is_object("blanket"));
  EXPECT_TRUE(v.is_relation("sitting on"));
  EXPECT_TRUE(v.is_action("holding a blanket"));
  EXPECT_TRUE(v.is_action("None"));
  EXPECT_FALSE(v.is_object("holding"));
  EXPECT_FALSE(v.is_object("cup"));
}

TEST(Vocabulary, ExtendsDefault) {
  const auto& v = test::fixture_vocab();
  EXPECT_TRUE(v.is_object("cup"));
  EXPECT_TRUE(v.is_object("chair"));
  EXPECT_TRUE(v.is_action("taking a cup from somewhere"));
}

TEST(Vocabulary, MissingFileIsIoError) {
  EXPECT_THROW(Vocabulary::load("/nonexistent/vocab.json"), IoError);
}

TEST(Scene, ValidSceneHasNoViolations) {
  auto b = SceneBuilder(5).rel(1, "holding", "blanket").act("holding a blanket", 1, 3, "blanket");
  EXPECT_TRUE(validate_scene(b.scene, Vocabulary::standard()).ok());
}

TEST(Scene, ReversedIntervalIsFlaggedWithLocation) {
  auto b = SceneBuilder(5).act("holding a blanket", 4, 2, "blanket");
  const auto rep = validate_scene(b.scene, Vocabulary::standard());
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].location, "action 0");
  EXPECT_NE(rep.violations[0].message.find("reversed"), std::string::npos);
}

TEST(Scene, OutOfRangeAndUnknownNamesAreFlagged) {
  auto b = SceneBuilder(5)
               .rel(2, "holding", "unicorn")
               .rel(2, "juggling", "blanket")
               .act("holding a blanket", 3, 9, "blanket");
  const auto rep = validate_scene(b.scene, Vocabulary::standard());
  EXPECT_EQ(rep.violations.size(), 3u);
}

TEST(Scene, DuplicateTripleInOneFrameIsFlagged) {
  auto b = SceneBuilder(3).rel(1, "holding", "blanket").rel(1, "holding", "blanket");
  EXPECT_FALSE(validate_scene(b.scene, Vocabulary::standard()).ok());
}

TEST(Scene, JsonRoundTrip) {
  auto b = SceneBuilder(6)
               .rel(1, "holding", "blanket")
               .rel(4, "sitting on", "chair")
               .act("sitting in a chair", 3, 5, "chair");
  const auto back = scene_from_json(scene_to_json(b.scene));
  EXPECT_EQ(scene_to_json(back), scene_to_json(b.scene));
  EXPECT_EQ(back.triple_count(), 2u);
}

TEST(Scene, StaticFrameOutsideRangeIsFormatError) {
  nlohmann::json j = {{"frame_count", 2},
                      {"static", {{{"frame", 3}, {"relation", "holding"}, {"object", "blanket"}}}},
                      {"dynamic", nlohmann::json::array()}};
  EXPECT_THROW(scene_from_json(j), FormatError);
}

TEST(Scene, StaticAtFramesChecksRange) {
  auto b = SceneBuilder(4).rel(2, "holding", "blanket").rel(3, "touching", "door");
  EXPECT_EQ(static_at_frames(b.scene, {2, 3}).size(), 2u);
  EXPECT_TRUE(static_at_frames(b.scene, {}).empty());
  EXPECT_THROW(static_at_frames(b.scene, {5}), RangeError);
}

TEST(Scene, ActionsInWindowContainedVersusOverlapping) {
  auto b = SceneBuilder(10).act("holding a book", 2, 4).act("watching television", 5, 9).act("standing up", 6, 6);
  EXPECT_EQ(actions_in_window(b.scene, 4, 8, WindowMode::Contained).size(), 1u);
  EXPECT_EQ(actions_in_window(b.scene, 4, 8, WindowMode::Overlapping).size(), 3u);
  EXPECT_THROW(actions_in_window(b.scene, 8, 4, WindowMode::Contained), RangeError);
}

TEST(Scene, TimeReversalIsAnInvolution) {
  auto b = SceneBuilder(7).rel(1, "holding", "blanket").act("holding a blanket", 1, 3, "blanket");
  const auto r = time_reversed(b.scene);
  EXPECT_EQ(r.triples_at(7).size(), 1u);
  EXPECT_EQ(r.dynamic_sr.actions[0].t_start, 5);
  EXPECT_EQ(r.dynamic_sr.actions[0].t_end, 7);
  EXPECT_EQ(scene_to_json(time_reversed(r)), scene_to_json(b.scene));
}

TEST(Scene, EvidenceMergeIsSortedAndDeduplicated) {
  Evidence a;
  a.triples = {{3, {"person", "holding", "cup"}}, {1, {"person", "holding", "cup"}}};
  Evidence b;
  b.triples = {{1, {"person", "holding", "cup"}}};
  const auto m = Evidence::merge(a, b);
  ASSERT_EQ(m.triples.size(), 2u);
  EXPECT_EQ(m.triples[0].frame, 1);
}
