#include "stqa/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "stqa/errors.hpp"

namespace stqa {

namespace {

const std::vector<std::string> kObjects = {
    "chair",   "paper",  "food",  "door",   "vacuum",       "person",   "laptop", "dish",
    "phone",   "blanket", "doorknob", "clothes", "window",   "bed",      "floor",  "closet",
    "broom",   "mirror", "table", "refrigerator", "pillow", "picture",  "bag",    "box",
    "light",   "shoe",   "medicine", "doorway", "television"};

const std::vector<std::string> kRelations = {
    "looking at", "not looking at", "unsure", "above", "beneath", "in front of", "behind",
    "on the side of", "in", "carrying", "covered by", "drinking from", "eating",
    "having it on the back", "holding", "leaning on", "lying on", "sitting on", "standing on",
    "touching", "twisting", "wearing", "wiping", "writing on", "not contacting", "drinking",
    "putting", "taking", "closing", "throwing", "putting down", "grasping", "walking", "sitting",
    "watching", "opening", "snuggling", "standing", "working on", "tidying", "working",
    "awakening", "fixing", "smiling", "playing", "lying", "playing on", "sneezing", "dressing",
    "undressing", "washing", "pouring", "turning", "making", "going", "talking", "consuming",
    "laughing", "running", "reaching", "photographing", "cooking"};

const std::vector<std::string> kActions = {
    "undressing themselves", "fixing a vacuum", "washing a mirror", "holding a bag",
    "snuggling with a pillow", "watching a picture", "watching a laptop or something on a laptop",
    "fixing a door", "holding a vacuum", "putting on a shoe", "holding some food",
    "washing something with a blanket", "watching a book", "turning off a light",
    "holding a blanket", "watching television", "holding a mirror", "taking off some shoes",
    "sitting at a table", "washing a window", "fixing their hair", "fixing a doorknob",
    "tidying up a blanket", "holding a book", "washing a cup", "lying on the floor",
    "tidying up with a broom", "holding a paper", "smiling at something", "working on a book",
    "holding a broom", "holding a cup of something", "watching something in a mirror",
    "holding some medicine", "laughing at something", "fixing a light", "snuggling with a blanket",
    "holding some clothes", "holding a phone", "washing some clothes", "holding a picture",
    "pouring something into a cup", "dressing themselves", "tidying up a closet",
    "sitting in a bed", "holding a shoe", "holding a pillow", "washing their hands", "None",
    "turning on a light", "lying on a bed", "tidying some clothes", "washing a table",
    "tidying something on the floor", "sitting on the floor", "tidying up a table", "standing up",
    "walking through a doorway", "eating some food", "holding a dish", "standing on a chair",
    "watching outside of a window", "grasping onto a doorknob", "holding a box",
    "running somewhere", "sitting in a chair", "holding a laptop", "making some food",
    "sitting on a table", "awakening in bed", "sneezing somewhere"};

std::vector<std::string> string_array(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  return out;
}

}  // namespace

std::string_view to_string(NameKind kind) {
  switch (kind) {
    case NameKind::Object: return "object";
    case NameKind::Relation: return "relation";
    case NameKind::Action: return "action";
  }
  return "?";
}

NameTable::NameTable(std::vector<std::string> names) {
  for (auto& n : names) add(std::move(n));
}

bool NameTable::contains(std::string_view name) const {
  return ids_.find(std::string(name)) != ids_.end();
}

std::optional<std::int32_t> NameTable::id_of(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::int32_t NameTable::add(std::string name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  auto id = static_cast<std::int32_t>(names_.size());
  ids_.emplace(name, id);
  names_.push_back(std::move(name));
  return id;
}

Vocabulary::Vocabulary(std::vector<std::string> objects, std::vector<std::string> relations,
                       std::vector<std::string> actions)
    : objects_(std::move(objects)), relations_(std::move(relations)), actions_(std::move(actions)) {}

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary v(kObjects, kRelations, kActions);
  return v;
}

const NameTable& Vocabulary::table(NameKind kind) const {
  switch (kind) {
    case NameKind::Object: return objects_;
    case NameKind::Relation: return relations_;
    case NameKind::Action: return actions_;
  }
  throw std::logic_error("bad NameKind");
}

Vocabulary Vocabulary::extended(const std::vector<std::string>& objects,
                                const std::vector<std::string>& relations,
                                const std::vector<std::string>& actions) const {
  Vocabulary v = *this;
  for (const auto& n : objects) v.objects_.add(n);
  for (const auto& n : relations) v.relations_.add(n);
  for (const auto& n : actions) v.actions_.add(n);
  return v;
}

std::string Vocabulary::object_of_action(std::string_view action) const {
  std::vector<std::string> words;
  std::string cur;
  for (char c : action) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));

  std::string best;
  for (const auto& obj : objects_.names()) {
    if (obj == "person" || obj.size() <= best.size()) continue;
    if (std::find(words.begin(), words.end(), obj) != words.end()) best = obj;
  }
  return best;
}

nlohmann::json Vocabulary::to_json() const {
  return {{"objects", objects_.names()},
          {"relations", relations_.names()},
          {"actions", actions_.names()}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  auto objects = string_array(j, "objects");
  auto relations = string_array(j, "relations");
  auto actions = string_array(j, "actions");
  if (j.value("extends_default", false)) {
    return standard().extended(objects, relations, actions);
  }
  return Vocabulary(std::move(objects), std::move(relations), std::move(actions));
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file: " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace stqa
