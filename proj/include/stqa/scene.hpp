#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqa/vocabulary.hpp"

namespace stqa {

/// Frame indices are 1-based: a scene of T frames spans [1, T].
using Frame = int;

struct RelationTriple {
  std::string subject;
  std::string relation;
  std::string object;

  auto operator<=>(const RelationTriple&) const = default;
};

/// A relation triple anchored to the frame it was observed in.
struct TaggedTriple {
  Frame frame = 0;
  RelationTriple triple;

  auto operator<=>(const TaggedTriple&) const = default;
};

struct ActionInstance {
  std::string subject;
  std::string action;
  std::string object;  // empty when the action phrase names no object
  Frame t_start = 0;
  Frame t_end = 0;

  int duration() const { return t_end - t_start + 1; }
  bool operator==(const ActionInstance&) const = default;
};

/// Total order used everywhere a deterministic choice among action instances
/// is needed: (t_start, t_end, action name), then subject and object.
bool action_order(const ActionInstance& a, const ActionInstance& b);

struct StaticSR {
  std::vector<std::vector<RelationTriple>> frames;  // frames[t - 1]
};

struct DynamicSR {
  std::vector<ActionInstance> actions;
};

struct SceneRepresentation {
  StaticSR static_sr;
  DynamicSR dynamic_sr;
  int frame_count = 0;

  /// An empty scene of `frames` frames.
  static SceneRepresentation with_frames(int frames);

  void add_triple(Frame frame, RelationTriple triple);
  void add_action(ActionInstance action);

  const std::vector<RelationTriple>& triples_at(Frame frame) const;
  std::size_t triple_count() const;
};

/// A subset of a scene: frame-tagged triples and action instances. Kept in
/// canonical form (sorted, unique) so two evidence sets compare by value.
struct Evidence {
  std::vector<TaggedTriple> triples;
  std::vector<ActionInstance> actions;

  bool empty() const { return triples.empty() && actions.empty(); }
  void normalize();
  bool operator==(const Evidence&) const = default;

  /// Union of two evidence sets in canonical form.
  static Evidence merge(const Evidence& a, const Evidence& b);
};

struct Violation {
  std::string location;  // "frame 3", "action 0", "scene"
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

/// Every invariant violation of `scene` against `vocab`. Violations are data:
/// this never throws. A subject other than "person" is flagged too.
ValidationReport validate_scene(const SceneRepresentation& scene, const Vocabulary& vocab);

/// Triples whose frame is in `frames`, in frame order. Throws RangeError for
/// an index outside [1, T].
std::vector<TaggedTriple> static_at_frames(const SceneRepresentation& scene,
                                           const std::set<Frame>& frames);

enum class WindowMode { Contained, Overlapping };

/// Actions inside (or overlapping) [lo, hi], ordered by action_order. Throws
/// RangeError for a reversed or out-of-range window.
std::vector<ActionInstance> actions_in_window(const SceneRepresentation& scene, Frame lo, Frame hi,
                                              WindowMode mode);

/// Maps frame t to T + 1 - t; action intervals flip accordingly.
SceneRepresentation time_reversed(const SceneRepresentation& scene);

nlohmann::json scene_to_json(const SceneRepresentation& scene);
/// Throws FormatError on missing keys or bad types. Frame indices are not
/// range-checked here; use validate_scene.
SceneRepresentation scene_from_json(const nlohmann::json& j);
SceneRepresentation load_scene(const std::string& path);
void save_scene(const SceneRepresentation& scene, const std::string& path);

nlohmann::json to_json(const TaggedTriple& t);
nlohmann::json to_json(const ActionInstance& a);
nlohmann::json to_json(const Evidence& e);

}  // namespace stqa
