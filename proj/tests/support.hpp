#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqa/answer.hpp"
#include "stqa/scene.hpp"
#include "stqa/vocabulary.hpp"

namespace stqa::test {

inline std::string fixture(const std::string& rel) { return std::string(STQA_FIXTURES) + "/" + rel; }

inline const Vocabulary& fixture_vocab() {
  static const Vocabulary v = Vocabulary::load(fixture("vocab.json"));
  return v;
}

struct FigureStep {
  std::string rule;
  nlohmann::json answer;
};

// A transcribed figure: scene, program, and what the figure shows.
struct Figure {
  std::string name;
  SceneRepresentation scene;
  std::string program;
  std::optional<nlohmann::json> answer;
  std::vector<FigureStep> steps;
  std::string swapped_program;
  std::optional<nlohmann::json> swapped_answer;
  std::string error;
};

inline Figure load_figure(const std::string& name) {
  std::ifstream in(fixture("figures/" + name + ".json"));
  const auto j = nlohmann::json::parse(in);
  Figure f;
  f.name = name;
  f.scene = scene_from_json(j.at("scene"));
  f.program = j.at("program").get<std::string>();
  if (j.contains("answer")) f.answer = j.at("answer");
  if (j.contains("steps")) {
    for (const auto& s : j.at("steps")) f.steps.push_back({s.at("rule").get<std::string>(), s.at("answer")});
  }
  f.swapped_program = j.value("swapped_program", std::string());
  if (j.contains("swapped_answer")) f.swapped_answer = j.at("swapped_answer");
  f.error = j.value("error", std::string());
  return f;
}

inline bool same_answer(const Answer& a, const nlohmann::json& expected) {
  return equivalent(a, answer_from_json(expected));
}

// A triple-only scene builder for rule tests.
struct SceneBuilder {
  SceneRepresentation scene;
  explicit SceneBuilder(int frames) : scene(SceneRepresentation::with_frames(frames)) {}
  SceneBuilder& rel(Frame f, const std::string& r, const std::string& o) {
    scene.add_triple(f, {"person", r, o});
    return *this;
  }
  SceneBuilder& act(const std::string& a, Frame s, Frame e, const std::string& o = "") {
    scene.add_action({"person", a, o, s, e});
    return *this;
  }
};

}  // namespace stqa::test
