#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stqa/errors.hpp"
#include "stqa/executor.hpp"
#include "stqa/synth.hpp"
#include "support.hpp"

using namespace stqa;
namespace fs = std::filesystem;

namespace {

SynthConfig small_config(std::uint64_t seed = 11) {
  SynthConfig c;
  c.seed = seed;
  c.scenes = 6;
  c.questions_per_type = 2;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("stqa_test_synth_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(SynthConfig, JsonRoundTrip) {
  auto c = small_config();
  c.relation_pool = {2, 3};
  const auto back = synth_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(SynthConfig, BadValuesAreConfigErrors) {
  EXPECT_THROW(synth_config_from_json(nlohmann::json::array()), ConfigError);
  EXPECT_THROW(synth_config_from_json({{"scenes", "many"}}), ConfigError);
  EXPECT_THROW(synth_config_from_json({{"distribution", "zipf"}}), ConfigError);
  EXPECT_THROW(synth_config_from_json({{"type_weights", {{"Nonsense", 1.0}}}}), ConfigError);

  SynthConfig c;
  c.frame_count = {5, 2};
  EXPECT_THROW(c.check(Vocabulary::standard()), ConfigError);
  c = SynthConfig{};
  c.objects_per_scene = {3, 10000};
  EXPECT_THROW(c.check(Vocabulary::standard()), ConfigError);
  c = SynthConfig{};
  c.repeat_action_prob = 1.5;
  EXPECT_THROW(c.check(Vocabulary::standard()), ConfigError);
  EXPECT_NO_THROW(SynthConfig{}.check(Vocabulary::standard()));
}

TEST(Synth, SceneGenerationIsDeterministicAndValid) {
  const auto c = small_config();
  const auto a = generate_scene(c, 42);
  const auto b = generate_scene(c, 42);
  EXPECT_EQ(scene_to_json(a), scene_to_json(b));
  EXPECT_TRUE(validate_scene(a, Vocabulary::standard()).ok());
  EXPECT_GE(a.frame_count, c.frame_count.lo);
  EXPECT_LE(a.frame_count, c.frame_count.hi);
}

TEST(Synth, UniformCorpusCoversEveryType) {
  const auto c = small_config();
  const auto corpus = generate_corpus(c);
  EXPECT_EQ(corpus.scenes.size(), 6u);
  ASSERT_EQ(corpus.type_counts.size(), kAllQuestionTypes.size());
  for (const auto& [t, n] : corpus.type_counts) {
    const int skipped = corpus.skipped.count(t) ? corpus.skipped.at(t) : 0;
    EXPECT_EQ(n + skipped * c.questions_per_type, c.scenes * c.questions_per_type) << to_string(t);
  }
  for (const auto& inst : corpus.instances) {
    EXPECT_LE(depth(inst.program), static_cast<std::size_t>(c.max_depth));
    EXPECT_EQ(inst.program.qtype, inst.question.category);
  }
}

TEST(Synth, CorpusIsDeterministicPerSeed) {
  const auto a = generate_corpus(small_config(3));
  const auto b = generate_corpus(small_config(3));
  const auto c = generate_corpus(small_config(4));
  ASSERT_EQ(a.instances.size(), b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    EXPECT_EQ(serialize_program(a.instances[i].program), serialize_program(b.instances[i].program));
  }
  bool differs = a.instances.size() != c.instances.size();
  for (std::size_t i = 0; !differs && i < a.instances.size(); ++i) {
    differs = serialize_program(a.instances[i].program) != serialize_program(c.instances[i].program);
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, OracleAgreesWithExecutorOnEveryNode) {
  const auto corpus = generate_corpus(small_config(5));
  std::map<std::string, std::size_t> scene_of;
  for (std::size_t i = 0; i < corpus.video_ids.size(); ++i) scene_of[corpus.video_ids[i]] = i;
  for (const auto& inst : corpus.instances) {
    const auto& scene = corpus.scenes.at(scene_of.at(inst.video_id));
    const auto out = run_program(inst.program, scene);
    const auto keys = node_keys(inst.program);
    ASSERT_EQ(keys.size(), inst.oracle.nodes.size());
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const auto* e = out.trace.find(keys[k]);
      ASSERT_NE(e, nullptr);
      const auto& want = inst.oracle.nodes[k];
      EXPECT_TRUE(equivalent(e->answer(), want.answer)) << inst.id << " " << keys[k];
      const std::optional<std::string> got =
          e->failure ? std::optional<std::string>(std::string(to_string(e->failure->kind))) : std::nullopt;
      EXPECT_EQ(got, want.error) << inst.id << " " << keys[k];
    }
    EXPECT_TRUE(equivalent(out.root_answer, inst.oracle.root));
  }
}

TEST(Synth, OracleOnFigureOne) {
  const auto fig = test::load_figure("fig01");
  const auto p = parse_program(fig.program, test::fixture_vocab());
  EXPECT_TRUE(test::same_answer(oracle_answer(p, fig.scene, test::fixture_vocab()).root, *fig.answer));
}

TEST(Synth, ManifestRowsOnePerQuestionNode) {
  const auto corpus = generate_corpus(small_config(8));
  const auto& inst = corpus.instances.front();
  const auto rows = manifest_records(inst, "scenes/x.json");
  std::size_t questions = 0;
  for (const auto* n : decompose(inst.program)) questions += n->is_internal() ? 0 : 1;
  ASSERT_EQ(rows.size(), questions);
  EXPECT_TRUE(rows.back().value("root", false));
  EXPECT_EQ(rows.back()["scene"], "scenes/x.json");
  for (const auto& r : rows) EXPECT_TRUE(r["predicted"].is_null());
}

TEST(Synth, WrittenCorpusIsByteIdentical) {
  const auto a = temp_dir("a");
  const auto b = temp_dir("b");
  write_corpus(generate_corpus(small_config(9)), a.string());
  write_corpus(generate_corpus(small_config(9)), b.string());
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_GE(files, 4u);
  EXPECT_TRUE(fs::exists(a / "manifest.jsonl"));
  fs::remove_all(a);
  fs::remove_all(b);
}
