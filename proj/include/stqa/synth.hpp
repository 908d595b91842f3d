#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqa/oracle.hpp"
#include "stqa/templates.hpp"

namespace stqa {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

enum class TypeDistribution { Uniform, Weighted };

struct SynthConfig {
  std::uint64_t seed = 0;
  int scenes = 100;
  IntRange frame_count{6, 16};
  IntRange objects_per_scene{3, 6};
  IntRange relation_pool{4, 8};  // distinct relations a scene draws from
  IntRange relations_per_frame{1, 3};
  IntRange actions_per_scene{2, 5};
  double repeat_action_prob = 0.2;
  int questions_per_type = 8;
  int max_depth = 6;
  TypeDistribution distribution = TypeDistribution::Uniform;
  std::map<QuestionType, double> type_weights;  // weighted mode only

  /// Throws ConfigError when a range is empty or the vocabulary cannot
  /// satisfy it.
  void check(const Vocabulary& vocab) const;
};

/// Missing keys keep their defaults. Throws ConfigError on bad values.
SynthConfig synth_config_from_json(const nlohmann::json& j);
SynthConfig load_synth_config(const std::string& path);
nlohmann::json to_json(const SynthConfig& c);

/// Small deterministic RNG wrapper; the integer mapping does not depend on
/// the standard library's distribution implementations.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi);  // inclusive
  double unit();
  bool chance(double p) { return unit() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

SceneRepresentation generate_scene(const SynthConfig& config, std::uint64_t seed,
                                   const Vocabulary& vocab = Vocabulary::standard());

struct GeneratedQuestion {
  TemplateInstance question;
  ProgramNode program;
};

struct QuestionBatch {
  std::vector<GeneratedQuestion> questions;
  std::vector<QuestionType> skipped;  // types the scene could not support
};

QuestionBatch generate_questions(const SceneRepresentation& scene, const SynthConfig& config,
                                 std::uint64_t seed,
                                 const Vocabulary& vocab = Vocabulary::standard());

struct LabeledInstance {
  std::string id;
  std::string video_id;
  TemplateInstance question;
  ProgramNode program;
  OracleResult oracle;
};

struct Corpus {
  std::vector<std::string> video_ids;
  std::vector<SceneRepresentation> scenes;
  std::vector<LabeledInstance> instances;
  std::map<QuestionType, int> type_counts;
  std::map<QuestionType, int> skipped;
};

Corpus generate_corpus(const SynthConfig& config, const Vocabulary& vocab = Vocabulary::standard());

/// Manifest rows for one instance: one record per question node, ground
/// truth from the oracle, predicted left null.
std::vector<nlohmann::json> manifest_records(const LabeledInstance& inst,
                                             const std::string& scene_path);

/// Writes scenes/<video>.json, questions.tsv, programs.txt and
/// manifest.jsonl under `dir`.
void write_corpus(const Corpus& corpus, const std::string& dir);

}  // namespace stqa
