#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace stqa {

enum class NameKind { Object, Relation, Action };

std::string_view to_string(NameKind kind);

/// One closed name set with a stable name <-> id bijection. Ids follow
/// insertion order.
class NameTable {
 public:
  NameTable() = default;
  explicit NameTable(std::vector<std::string> names);

  bool contains(std::string_view name) const;
  std::optional<std::int32_t> id_of(std::string_view name) const;
  const std::string& name_of(std::int32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  /// Appends a name unless already present. Returns its id.
  std::int32_t add(std::string name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// The closed vocabularies a scene and a program may draw from. Lookups are
/// case-sensitive on the canonical lowercase forms.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> objects, std::vector<std::string> relations,
             std::vector<std::string> actions);

  /// The object, relation and action lists of the reference benchmark
  /// vocabulary (29 objects, 62 relations, 71 actions including "None").
  static const Vocabulary& standard();

  const NameTable& objects() const { return objects_; }
  const NameTable& relations() const { return relations_; }
  const NameTable& actions() const { return actions_; }
  const NameTable& table(NameKind kind) const;

  bool is_object(std::string_view name) const { return objects_.contains(name); }
  bool is_relation(std::string_view name) const { return relations_.contains(name); }
  bool is_action(std::string_view name) const { return actions_.contains(name); }

  /// Returns a copy extended with extra names. Existing ids are preserved.
  Vocabulary extended(const std::vector<std::string>& objects,
                      const std::vector<std::string>& relations,
                      const std::vector<std::string>& actions) const;

  /// The object mentioned by an action phrase ("holding a blanket" ->
  /// "blanket"), matched on whole words, longest object name first. Empty
  /// when the phrase names no known object.
  std::string object_of_action(std::string_view action) const;

  nlohmann::json to_json() const;
  /// Accepts {"objects":[...], "relations":[...], "actions":[...]}. With
  /// "extends_default": true the arrays are appended to the standard lists.
  static Vocabulary from_json(const nlohmann::json& j);
  static Vocabulary load(const std::string& path);

 private:
  NameTable objects_;
  NameTable relations_;
  NameTable actions_;
};

}  // namespace stqa
