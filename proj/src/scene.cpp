#include "stqa/scene.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "stqa/errors.hpp"

namespace stqa {

bool action_order(const ActionInstance& a, const ActionInstance& b) {
  return std::tie(a.t_start, a.t_end, a.action, a.subject, a.object) <
         std::tie(b.t_start, b.t_end, b.action, b.subject, b.object);
}

SceneRepresentation SceneRepresentation::with_frames(int frames) {
  SceneRepresentation s;
  s.frame_count = frames;
  s.static_sr.frames.resize(frames > 0 ? frames : 0);
  return s;
}

void SceneRepresentation::add_triple(Frame frame, RelationTriple triple) {
  if (frame < 1 || frame > frame_count) {
    throw RangeError("frame " + std::to_string(frame) + " outside [1, " +
                     std::to_string(frame_count) + "]");
  }
  static_sr.frames[frame - 1].push_back(std::move(triple));
}

void SceneRepresentation::add_action(ActionInstance action) {
  dynamic_sr.actions.push_back(std::move(action));
}

const std::vector<RelationTriple>& SceneRepresentation::triples_at(Frame frame) const {
  return static_sr.frames.at(frame - 1);
}

std::size_t SceneRepresentation::triple_count() const {
  std::size_t n = 0;
  for (const auto& f : static_sr.frames) n += f.size();
  return n;
}

void Evidence::normalize() {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  std::sort(actions.begin(), actions.end(), action_order);
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
}

Evidence Evidence::merge(const Evidence& a, const Evidence& b) {
  Evidence out = a;
  out.triples.insert(out.triples.end(), b.triples.begin(), b.triples.end());
  out.actions.insert(out.actions.end(), b.actions.begin(), b.actions.end());
  out.normalize();
  return out;
}

ValidationReport validate_scene(const SceneRepresentation& scene, const Vocabulary& vocab) {
  ValidationReport report;
  auto flag = [&](std::string where, std::string what) {
    report.violations.push_back({std::move(where), std::move(what)});
  };

  const int T = scene.frame_count;
  if (T < 1) flag("scene", "frame count " + std::to_string(T) + " is below 1");
  if (static_cast<int>(scene.static_sr.frames.size()) != T) {
    flag("scene", "static frame list has " + std::to_string(scene.static_sr.frames.size()) +
                      " entries for " + std::to_string(T) + " frames");
  }

  for (std::size_t i = 0; i < scene.static_sr.frames.size(); ++i) {
    const std::string where = "frame " + std::to_string(i + 1);
    const auto& frame = scene.static_sr.frames[i];
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const auto& t = frame[k];
      if (!vocab.is_object(t.subject)) flag(where, "unknown subject \"" + t.subject + "\"");
      else if (t.subject != "person") flag(where, "non-person subject \"" + t.subject + "\"");
      if (!vocab.is_relation(t.relation)) flag(where, "unknown relation \"" + t.relation + "\"");
      if (!vocab.is_object(t.object)) flag(where, "unknown object \"" + t.object + "\"");
      if (std::find(frame.begin(), frame.begin() + k, t) != frame.begin() + k) {
        flag(where, "duplicate triple (" + t.subject + ", " + t.relation + ", " + t.object + ")");
      }
    }
  }

  const auto& actions = scene.dynamic_sr.actions;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string where = "action " + std::to_string(i);
    const auto& a = actions[i];
    if (!vocab.is_action(a.action)) flag(where, "unknown action \"" + a.action + "\"");
    if (!vocab.is_object(a.subject)) flag(where, "unknown subject \"" + a.subject + "\"");
    else if (a.subject != "person") flag(where, "non-person subject \"" + a.subject + "\"");
    if (!a.object.empty() && !vocab.is_object(a.object)) {
      flag(where, "unknown object \"" + a.object + "\"");
    }
    if (a.t_start > a.t_end) {
      flag(where, "interval reversed at action " + std::to_string(i));
    } else if (a.t_start < 1 || a.t_end > T) {
      flag(where, "interval [" + std::to_string(a.t_start) + ", " + std::to_string(a.t_end) +
                      "] outside [1, " + std::to_string(T) + "]");
    }
    if (std::find(actions.begin(), actions.begin() + i, a) != actions.begin() + i) {
      flag(where, "duplicate action instance \"" + a.action + "\"");
    }
  }
  return report;
}

std::vector<TaggedTriple> static_at_frames(const SceneRepresentation& scene,
                                           const std::set<Frame>& frames) {
  std::vector<TaggedTriple> out;
  for (Frame f : frames) {
    if (f < 1 || f > scene.frame_count) {
      throw RangeError("frame " + std::to_string(f) + " outside [1, " +
                       std::to_string(scene.frame_count) + "]");
    }
    for (const auto& t : scene.triples_at(f)) out.push_back({f, t});
  }
  return out;
}

std::vector<ActionInstance> actions_in_window(const SceneRepresentation& scene, Frame lo, Frame hi,
                                              WindowMode mode) {
  if (lo > hi) {
    throw RangeError("reversed window [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (lo < 1 || hi > scene.frame_count) {
    throw RangeError("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] outside [1, " + std::to_string(scene.frame_count) + "]");
  }
  std::vector<ActionInstance> out;
  for (const auto& a : scene.dynamic_sr.actions) {
    bool keep = mode == WindowMode::Contained ? (lo <= a.t_start && a.t_end <= hi)
                                              : (a.t_start <= hi && a.t_end >= lo);
    if (keep) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), action_order);
  return out;
}

SceneRepresentation time_reversed(const SceneRepresentation& scene) {
  const int T = scene.frame_count;
  auto out = SceneRepresentation::with_frames(T);
  for (int t = 1; t <= T; ++t) out.static_sr.frames[T - t] = scene.static_sr.frames[t - 1];
  for (auto a : scene.dynamic_sr.actions) {
    const Frame s = T + 1 - a.t_end;
    const Frame e = T + 1 - a.t_start;
    a.t_start = s;
    a.t_end = e;
    out.dynamic_sr.actions.push_back(std::move(a));
  }
  return out;
}

nlohmann::json to_json(const TaggedTriple& t) {
  return {{"frame", t.frame},
          {"subject", t.triple.subject},
          {"relation", t.triple.relation},
          {"object", t.triple.object}};
}

nlohmann::json to_json(const ActionInstance& a) {
  return {{"subject", a.subject}, {"action", a.action},   {"object", a.object},
          {"t_start", a.t_start}, {"t_end", a.t_end}};
}

nlohmann::json to_json(const Evidence& e) {
  nlohmann::json triples = nlohmann::json::array();
  for (const auto& t : e.triples) triples.push_back(to_json(t));
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : e.actions) actions.push_back(to_json(a));
  return {{"triples", std::move(triples)}, {"actions", std::move(actions)}};
}

nlohmann::json scene_to_json(const SceneRepresentation& scene) {
  nlohmann::json statics = nlohmann::json::array();
  for (int t = 1; t <= scene.frame_count; ++t) {
    for (const auto& tr : scene.triples_at(t)) statics.push_back(to_json(TaggedTriple{t, tr}));
  }
  nlohmann::json dynamics = nlohmann::json::array();
  for (const auto& a : scene.dynamic_sr.actions) dynamics.push_back(to_json(a));
  return {{"frame_count", scene.frame_count}, {"static", std::move(statics)},
          {"dynamic", std::move(dynamics)}};
}

SceneRepresentation scene_from_json(const nlohmann::json& j) {
  try {
    const int T = j.at("frame_count").get<int>();
    auto scene = SceneRepresentation::with_frames(T);
    for (const auto& e : j.at("static")) {
      const Frame f = e.at("frame").get<int>();
      RelationTriple t{e.value("subject", std::string("person")), e.at("relation").get<std::string>(),
                       e.at("object").get<std::string>()};
      if (f < 1 || f > T) {
        throw FormatError("static entry at frame " + std::to_string(f) + " outside [1, " +
                          std::to_string(T) + "]");
      }
      scene.add_triple(f, std::move(t));
    }
    for (const auto& e : j.at("dynamic")) {
      scene.add_action({e.value("subject", std::string("person")), e.at("action").get<std::string>(),
                        e.value("object", std::string()), e.at("t_start").get<int>(),
                        e.at("t_end").get<int>()});
    }
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
}

SceneRepresentation load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  try {
    return scene_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_scene(const SceneRepresentation& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene file: " + path);
  out << scene_to_json(scene).dump(1) << '\n';
}

}  // namespace stqa
