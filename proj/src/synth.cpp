#include "stqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "stqa/errors.hpp"

namespace stqa {

namespace {

void check_range(const IntRange& r, const char* name, int floor) {
  if (r.lo > r.hi) throw ConfigError(std::string(name) + " range is empty");
  if (r.lo < floor) {
    throw ConfigError(std::string(name) + " must be at least " + std::to_string(floor));
  }
}

IntRange range_from_json(const nlohmann::json& j, const char* key, IntRange fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw ConfigError(std::string(key) + " must be [lo, hi]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

std::vector<std::string> scene_objects(const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& o : vocab.objects().names()) {
    if (o != "person") out.push_back(o);
  }
  return out;
}

std::vector<std::string> real_actions(const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& a : vocab.actions().names()) {
    if (a != "None") out.push_back(a);
  }
  return out;
}

template <typename T>
std::vector<T> sample_distinct(SynthRng& rng, std::vector<T> pool, int n) {
  std::vector<T> out;
  for (int i = 0; i < n && !pool.empty(); ++i) {
    const int k = rng.uniform(0, static_cast<int>(pool.size()) - 1);
    out.push_back(pool[k]);
    pool.erase(pool.begin() + k);
  }
  return out;
}

// The relation an action phrase starts with ("holding a blanket" -> "holding").
std::string leading_relation(const std::string& action, const Vocabulary& vocab) {
  std::string best;
  for (const auto& r : vocab.relations().names()) {
    if (action.size() > r.size() && action.compare(0, r.size(), r) == 0 && action[r.size()] == ' ' &&
        r.size() > best.size()) {
      best = r;
    }
  }
  return best;
}

int pattern_depth(std::string_view program) {
  int d = 0;
  int best = 0;
  for (char c : program) {
    if (c == '(') best = std::max(best, ++d);
    if (c == ')') --d;
  }
  return best;
}

struct SceneFacts {
  std::vector<std::string> objects;    // non-person objects seen in triples
  std::vector<std::string> relations;  // relations seen in triples
  std::vector<std::pair<std::string, std::string>> pairs;  // (relation, object)
  std::vector<std::string> action_names;
  std::vector<ActionInstance> object_actions;  // instances naming an object
  std::size_t action_count = 0;
};

SceneFacts facts_of(const SceneRepresentation& scene) {
  std::set<std::string> objs, rels;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& frame : scene.static_sr.frames) {
    for (const auto& t : frame) {
      if (t.object != "person") objs.insert(t.object);
      rels.insert(t.relation);
      pairs.insert({t.relation, t.object});
    }
  }
  std::set<std::string> names;
  SceneFacts f;
  for (const auto& a : scene.dynamic_sr.actions) {
    names.insert(a.action);
    if (!a.object.empty()) f.object_actions.push_back(a);
  }
  std::sort(f.object_actions.begin(), f.object_actions.end(), action_order);
  f.objects.assign(objs.begin(), objs.end());
  f.relations.assign(rels.begin(), rels.end());
  f.pairs.assign(pairs.begin(), pairs.end());
  f.action_names.assign(names.begin(), names.end());
  f.action_count = scene.dynamic_sr.actions.size();
  return f;
}

bool has_slot(const std::vector<std::string>& slots, const char* name) {
  return std::find(slots.begin(), slots.end(), name) != slots.end();
}

bool supported(const QuestionTemplate& t, const SceneFacts& f, const SynthConfig& c) {
  if (pattern_depth(t.program) > c.max_depth) return false;
  const auto slots = template_slots(t);
  const std::string_view p = t.program;
  const bool dynamic = p.find("filter_actions") != std::string_view::npos ||
                       p.find("actions_") != std::string_view::npos ||
                       p.find("_action(") != std::string_view::npos;
  if (dynamic && f.action_count == 0) return false;
  if (has_slot(slots, "a2") && f.action_names.size() < 2) return false;
  if (t.category == QuestionType::LongestShortestAction && f.action_count < 2) return false;
  if (has_slot(slots, "verb") && f.object_actions.empty()) return false;
  return true;
}

class SlotSampler {
 public:
  SlotSampler(const SceneFacts& f, const Vocabulary& vocab, SynthRng& rng)
      : f_(f), vocab_(vocab), rng_(rng), all_objects_(scene_objects(vocab)) {}

  std::map<std::string, std::string> sample(const QuestionTemplate& t) {
    std::map<std::string, std::string> s;
    const auto slots = template_slots(t);
    if (has_slot(slots, "verb")) {
      // Anchor on an action done to an object: its verb, and a relation that
      // was observed with that object.
      const auto& act = rng_.pick(f_.object_actions);
      std::string verb = leading_relation(act.action, vocab_);
      if (verb.empty()) verb = rng_.pick(vocab_.relations().names());
      s["verb"] = verb;
      std::vector<std::string> rels;
      for (const auto& [r, o] : f_.pairs) {
        if (o == act.object) rels.push_back(r);
      }
      const std::string rkey = has_slot(slots, "r2") ? "r2" : "r";
      s[rkey] = !rels.empty() && rng_.chance(0.8) ? rng_.pick(rels) : relation();
    }
    for (const char* suffix : {"", "2"}) {
      const std::string r = std::string("r") + suffix;
      const std::string o = std::string("o") + suffix;
      if (has_slot(slots, r.c_str()) && has_slot(slots, o.c_str()) && !s.count(r) && !s.count(o) &&
          !f_.pairs.empty() && rng_.chance(0.7)) {
        const auto& [rel, obj] = rng_.pick(f_.pairs);
        s[r] = rel;
        s[o] = obj;
      }
    }
    std::vector<std::string> actions_left = f_.action_names;
    for (const auto& name : slots) {
      if (s.count(name)) continue;
      switch (slot_kind(name)) {
        case SlotKind::Object: s[name] = object(); break;
        case SlotKind::Relation:
        case SlotKind::Verb: s[name] = relation(); break;
        case SlotKind::Action: {
          const int k = rng_.uniform(0, static_cast<int>(actions_left.size()) - 1);
          s[name] = actions_left[k];
          actions_left.erase(actions_left.begin() + k);
          break;
        }
        default: s[name] = rng_.pick(slot_words(slot_kind(name))); break;
      }
    }
    // Options of a choice must differ.
    if (t.id == std::string_view("T23") && s["o"] == s["o2"]) {
      std::vector<std::string> others;
      for (const auto& o : all_objects_) {
        if (o != s["o"]) others.push_back(o);
      }
      s["o2"] = rng_.pick(others);
    }
    return s;
  }

 private:
  std::string object() {
    if (!f_.objects.empty() && rng_.chance(0.8)) return rng_.pick(f_.objects);
    return rng_.pick(all_objects_);
  }
  std::string relation() {
    if (!f_.relations.empty() && rng_.chance(0.8)) return rng_.pick(f_.relations);
    return rng_.pick(vocab_.relations().names());
  }

  const SceneFacts& f_;
  const Vocabulary& vocab_;
  SynthRng& rng_;
  std::vector<std::string> all_objects_;
};

std::map<QuestionType, int> per_type_counts(const SynthConfig& c) {
  std::map<QuestionType, int> out;
  if (c.distribution == TypeDistribution::Uniform) {
    for (auto t : kAllQuestionTypes) out[t] = c.questions_per_type;
    return out;
  }
  double total = 0;
  for (const auto& [t, w] : c.type_weights) total += w;
  const double budget = static_cast<double>(c.questions_per_type) * kAllQuestionTypes.size();
  for (auto t : kAllQuestionTypes) {
    auto it = c.type_weights.find(t);
    const double w = it == c.type_weights.end() ? 0.0 : it->second;
    out[t] = total > 0 ? static_cast<int>(std::llround(budget * w / total)) : 0;
  }
  return out;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

int SynthRng::uniform(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

double SynthRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

void SynthConfig::check(const Vocabulary& vocab) const {
  check_range(frame_count, "frame_count", 1);
  check_range(objects_per_scene, "objects_per_scene", 1);
  check_range(relation_pool, "relation_pool", 1);
  check_range(relations_per_frame, "relations_per_frame", 0);
  check_range(actions_per_scene, "actions_per_scene", 0);
  if (scenes < 0) throw ConfigError("scenes must be non-negative");
  if (questions_per_type < 0) throw ConfigError("questions_per_type must be non-negative");
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (repeat_action_prob < 0 || repeat_action_prob > 1) {
    throw ConfigError("repeat_action_prob must be in [0, 1]");
  }
  const int objects = static_cast<int>(scene_objects(vocab).size());
  if (objects_per_scene.hi > objects) {
    throw ConfigError("objects_per_scene asks for " + std::to_string(objects_per_scene.hi) +
                      " objects, the vocabulary has " + std::to_string(objects));
  }
  const int relations = static_cast<int>(vocab.relations().size());
  if (relation_pool.hi > relations) {
    throw ConfigError("relation_pool asks for " + std::to_string(relation_pool.hi) +
                      " relations, the vocabulary has " + std::to_string(relations));
  }
  if (relations_per_frame.hi > objects_per_scene.lo * relation_pool.lo) {
    throw ConfigError("relations_per_frame exceeds the distinct triples a scene can hold");
  }
  const int actions = static_cast<int>(real_actions(vocab).size());
  if (repeat_action_prob == 0 && actions_per_scene.hi > actions) {
    throw ConfigError("actions_per_scene asks for " + std::to_string(actions_per_scene.hi) +
                      " distinct actions, the vocabulary has " + std::to_string(actions));
  }
  if (actions_per_scene.hi > 0 && frame_count.lo < 1) throw ConfigError("actions need frames");
  if (distribution == TypeDistribution::Weighted) {
    double total = 0;
    for (const auto& [t, w] : type_weights) {
      if (w < 0) throw ConfigError("type weights must be non-negative");
      total += w;
    }
    if (total <= 0) throw ConfigError("weighted distribution needs a positive weight");
  }
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SynthConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scenes")) c.scenes = j.at("scenes").get<int>();
    c.frame_count = range_from_json(j, "frame_count", c.frame_count);
    c.objects_per_scene = range_from_json(j, "objects_per_scene", c.objects_per_scene);
    c.relation_pool = range_from_json(j, "relation_pool", c.relation_pool);
    c.relations_per_frame = range_from_json(j, "relations_per_frame", c.relations_per_frame);
    c.actions_per_scene = range_from_json(j, "actions_per_scene", c.actions_per_scene);
    if (j.contains("repeat_action_prob")) c.repeat_action_prob = j.at("repeat_action_prob").get<double>();
    if (j.contains("questions_per_type")) c.questions_per_type = j.at("questions_per_type").get<int>();
    if (j.contains("max_depth")) c.max_depth = j.at("max_depth").get<int>();
    if (j.contains("distribution")) {
      const auto d = j.at("distribution").get<std::string>();
      if (d == "uniform") c.distribution = TypeDistribution::Uniform;
      else if (d == "weighted") c.distribution = TypeDistribution::Weighted;
      else throw ConfigError("distribution must be uniform or weighted");
    }
    if (j.contains("type_weights")) {
      for (const auto& [k, v] : j.at("type_weights").items()) {
        const auto t = question_type_from_string(k);
        if (!t) throw ConfigError("unknown question type in type_weights: " + k);
        c.type_weights[*t] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return synth_config_from_json(j);
}

nlohmann::json to_json(const SynthConfig& c) {
  auto range = [](const IntRange& r) { return nlohmann::json::array({r.lo, r.hi}); };
  nlohmann::json j = {
      {"seed", c.seed},
      {"scenes", c.scenes},
      {"frame_count", range(c.frame_count)},
      {"objects_per_scene", range(c.objects_per_scene)},
      {"relation_pool", range(c.relation_pool)},
      {"relations_per_frame", range(c.relations_per_frame)},
      {"actions_per_scene", range(c.actions_per_scene)},
      {"repeat_action_prob", c.repeat_action_prob},
      {"questions_per_type", c.questions_per_type},
      {"max_depth", c.max_depth},
      {"distribution", c.distribution == TypeDistribution::Uniform ? "uniform" : "weighted"},
  };
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [t, v] : c.type_weights) w[std::string(to_string(t))] = v;
  j["type_weights"] = w;
  return j;
}

SceneRepresentation generate_scene(const SynthConfig& config, std::uint64_t seed,
                                   const Vocabulary& vocab) {
  config.check(vocab);
  SynthRng rng(seed);
  const int T = rng.uniform(config.frame_count.lo, config.frame_count.hi);
  auto scene = SceneRepresentation::with_frames(T);

  const auto objects = sample_distinct(rng, scene_objects(vocab),
                                       rng.uniform(config.objects_per_scene.lo,
                                                   config.objects_per_scene.hi));
  const auto relations = sample_distinct(rng, vocab.relations().names(),
                                         rng.uniform(config.relation_pool.lo, config.relation_pool.hi));

  // Actions: phrases naming one of the scene's objects, or no object at all.
  std::vector<std::string> eligible;
  for (const auto& a : real_actions(vocab)) {
    const std::string o = vocab.object_of_action(a);
    if (o.empty() || std::find(objects.begin(), objects.end(), o) != objects.end()) {
      eligible.push_back(a);
    }
  }
  const int nact = rng.uniform(config.actions_per_scene.lo, config.actions_per_scene.hi);
  std::vector<std::string> used;
  std::vector<std::string> fresh = eligible;
  int attempts = 0;
  while (static_cast<int>(scene.dynamic_sr.actions.size()) < nact) {
    if (++attempts > 1000 * (nact + 1)) throw ConfigError("cannot place the requested actions");
    std::string name;
    if ((!used.empty() && rng.chance(config.repeat_action_prob)) || fresh.empty()) {
      name = rng.pick(used.empty() ? eligible : used);
    } else {
      const int k = rng.uniform(0, static_cast<int>(fresh.size()) - 1);
      name = fresh[k];
      fresh.erase(fresh.begin() + k);
    }
    const int start = rng.uniform(1, T);
    const int len = rng.uniform(1, std::max(1, T / 3));
    ActionInstance a{"person", name, vocab.object_of_action(name), start, std::min(T, start + len - 1)};
    if (std::find(scene.dynamic_sr.actions.begin(), scene.dynamic_sr.actions.end(), a) !=
        scene.dynamic_sr.actions.end()) {
      continue;
    }
    scene.add_action(a);
    if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(name);
  }

  auto add_unique = [&](Frame f, RelationTriple t) {
    const auto& at = scene.triples_at(f);
    if (std::find(at.begin(), at.end(), t) == at.end()) scene.add_triple(f, std::move(t));
  };
  for (Frame f = 1; f <= T; ++f) {
    const int k = rng.uniform(config.relations_per_frame.lo, config.relations_per_frame.hi);
    while (static_cast<int>(scene.triples_at(f).size()) < k) {
      add_unique(f, {"person", rng.pick(relations), rng.pick(objects)});
    }
  }
  // Co-occurrence bias: each action's object is related to in some frame of
  // its interval, by the action's own verb when the pool has it.
  for (const auto& a : scene.dynamic_sr.actions) {
    if (a.object.empty()) continue;
    const Frame f = rng.uniform(a.t_start, a.t_end);
    std::string rel = leading_relation(a.action, vocab);
    if (rel.empty() || std::find(relations.begin(), relations.end(), rel) == relations.end() ||
        !rng.chance(0.5)) {
      rel = rng.pick(relations);
    }
    add_unique(f, {"person", rel, a.object});
  }
  return scene;
}

QuestionBatch generate_questions(const SceneRepresentation& scene, const SynthConfig& config,
                                 std::uint64_t seed, const Vocabulary& vocab) {
  SynthRng rng(seed);
  const SceneFacts facts = facts_of(scene);
  SlotSampler sampler(facts, vocab, rng);
  QuestionBatch batch;
  for (const auto& [type, count] : per_type_counts(config)) {
    if (count == 0) continue;
    std::vector<const QuestionTemplate*> usable;
    for (const auto& t : question_templates()) {
      if (t.category == type && supported(t, facts, config)) usable.push_back(&t);
    }
    if (usable.empty()) {
      batch.skipped.push_back(type);
      continue;
    }
    const int offset = rng.uniform(0, static_cast<int>(usable.size()) - 1);
    for (int i = 0; i < count; ++i) {
      const QuestionTemplate& t = *usable[(offset + i) % usable.size()];
      TemplateInstance q{type, std::string(t.id), sampler.sample(t)};
      ProgramNode program = question_to_program(q, vocab);
      batch.questions.push_back({std::move(q), std::move(program)});
    }
  }
  return batch;
}

Corpus generate_corpus(const SynthConfig& config, const Vocabulary& vocab) {
  config.check(vocab);
  Corpus corpus;
  const int width = 5;
  std::size_t next_instance = 0;
  for (int s = 0; s < config.scenes; ++s) {
    const std::string vid = padded("scene_", static_cast<std::size_t>(s), width);
    auto scene = generate_scene(config, mix(config.seed, 2 * static_cast<std::uint64_t>(s)), vocab);
    auto batch = generate_questions(scene, config, mix(config.seed, 2 * static_cast<std::uint64_t>(s) + 1),
                                    vocab);
    for (auto t : batch.skipped) corpus.skipped[t]++;
    for (auto& g : batch.questions) {
      LabeledInstance inst;
      inst.id = padded("q", next_instance++, 6);
      inst.video_id = vid;
      inst.oracle = oracle_answer(g.program, scene, vocab);
      inst.question = std::move(g.question);
      inst.program = std::move(g.program);
      corpus.type_counts[inst.question.category]++;
      corpus.instances.push_back(std::move(inst));
    }
    corpus.video_ids.push_back(vid);
    corpus.scenes.push_back(std::move(scene));
  }
  return corpus;
}

std::vector<nlohmann::json> manifest_records(const LabeledInstance& inst,
                                             const std::string& scene_path) {
  const auto nodes = decompose(inst.program);
  std::map<const ProgramNode*, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  std::vector<nlohmann::json> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ProgramNode& n = *nodes[i];
    if (n.is_internal()) continue;
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : n.children) {
      if (!c.is_internal()) children.push_back(inst.id + ":" + std::to_string(index.at(&c)));
    }
    const bool root = i + 1 == nodes.size();
    nlohmann::json r;
    r["video_id"] = inst.video_id;
    r["question_id"] = inst.id + ":" + std::to_string(i);
    r["instance"] = inst.id;
    r["qtype"] = std::string(to_string(*n.qtype));
    r["is_compositional"] = !children.empty();
    r["children"] = children;
    r["ground_truth"] = to_json(inst.oracle.nodes[i].answer);
    r["predicted"] = nullptr;
    r["rule"] = n.rule;
    r["args"] = n.args;
    r["program"] = serialize_program(n);
    r["root"] = root;
    if (inst.oracle.nodes[i].error) r["oracle_error"] = *inst.oracle.nodes[i].error;
    if (root) {
      r["scene"] = scene_path;
      r["template"] = inst.question.template_id;
      r["question"] = render_question(inst.question);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "scenes", ec);
  if (ec) throw IoError("cannot create corpus directory " + dir + ": " + ec.message());
  std::map<std::string, std::string> scene_paths;
  for (std::size_t i = 0; i < corpus.scenes.size(); ++i) {
    const std::string rel = "scenes/" + corpus.video_ids[i] + ".json";
    save_scene(corpus.scenes[i], (fs::path(dir) / rel).string());
    scene_paths[corpus.video_ids[i]] = rel;
  }
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  auto questions = open("questions.tsv");
  auto programs = open("programs.txt");
  auto manifest = open("manifest.jsonl");
  for (const auto& inst : corpus.instances) {
    questions << format_question_line(inst.question) << "\n";
    programs << serialize_program(inst.program) << "\n";
    for (const auto& r : manifest_records(inst, scene_paths.at(inst.video_id))) {
      manifest << r.dump() << "\n";
    }
  }
}

}  // namespace stqa
