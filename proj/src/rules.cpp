#include "stqa/rules.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace stqa {

namespace {

using QT = QuestionType;

// ---- helpers ---------------------------------------------------------------

const IntermediateResult& child(const RuleContext& ctx, std::size_t i) {
  if (i >= ctx.children.size() || !ctx.children[i]) {
    throw RuleError(RuleErrorKind::MissingChild,
                    ctx.node.rule + ": missing child " + std::to_string(i + 1));
  }
  return *ctx.children[i];
}

const Answer& binary_child(const RuleContext& ctx, std::size_t i) {
  const Answer& a = child(ctx, i).answer;
  if (!a.is_binary()) {
    throw RuleError(RuleErrorKind::TypeMismatch, ctx.node.rule + ": child " + std::to_string(i + 1) +
                                                     " answered " + a.to_string() +
                                                     ", expected yes/no");
  }
  return a;
}

// The literal of the filter primitive at the bottom of a child chain, e.g. the
// object of query_object(filter_object(scene, o)).
std::string filter_literal(const ProgramNode& node, std::string_view filter) {
  const ProgramNode* n = &node;
  while (n->rule != filter) {
    if (n->children.empty()) return {};
    n = &n->children.front();
  }
  return n->args.empty() ? std::string() : n->args.front();
}

IntermediateResult yes_no(bool yes, Evidence evidence) {
  return {Answer::binary(yes), std::move(evidence)};
}

struct Interval {
  Frame lo;
  Frame hi;
};

// Anchor interval: actions contribute [t_start, t_end], triples their frame.
std::optional<Interval> hull(const Evidence& e) {
  std::optional<Interval> out;
  auto extend = [&](Frame lo, Frame hi) {
    if (!out) {
      out = Interval{lo, hi};
    } else {
      out->lo = std::min(out->lo, lo);
      out->hi = std::max(out->hi, hi);
    }
  };
  for (const auto& t : e.triples) extend(t.frame, t.frame);
  for (const auto& a : e.actions) extend(a.t_start, a.t_end);
  return out;
}

enum class Localizer { After, Before, While, Between };

Localizer localizer_of(std::string_view rule) {
  if (rule.ends_with("_after")) return Localizer::After;
  if (rule.ends_with("_before")) return Localizer::Before;
  if (rule.ends_with("_while")) return Localizer::While;
  return Localizer::Between;
}

// The window of a temporal rule, or nullopt when an anchor has no evidence.
// Children from `first_anchor` on are anchors.
std::optional<Window> localize(const RuleContext& ctx, std::size_t first_anchor) {
  const Localizer loc = localizer_of(ctx.node.rule);
  std::vector<Interval> anchors;
  for (std::size_t i = first_anchor; i < ctx.node.children.size(); ++i) {
    auto h = hull(child(ctx, i).evidence);
    if (!h) return std::nullopt;
    anchors.push_back(*h);
  }
  const Frame T = ctx.scene.frame_count;
  switch (loc) {
    case Localizer::After: return Window{anchors[0].hi + 1, T};
    case Localizer::Before: return Window{1, anchors[0].lo - 1};
    case Localizer::While: return Window{anchors[0].lo, anchors[0].hi};
    case Localizer::Between: {
      if (anchors.size() < 2) {
        throw RuleError(RuleErrorKind::MissingChild, ctx.node.rule + ": needs two anchors");
      }
      auto a = anchors[0];
      auto b = anchors[1];
      if (std::tie(b.lo, b.hi) < std::tie(a.lo, a.hi)) std::swap(a, b);
      return Window{a.hi + 1, b.lo - 1};
    }
  }
  return std::nullopt;
}

Evidence restrict(const Evidence& e, const Window& w) {
  Evidence out;
  for (const auto& t : e.triples) {
    if (t.frame >= w.lo && t.frame <= w.hi) out.triples.push_back(t);
  }
  for (const auto& a : e.actions) {
    if (a.t_start <= w.hi && a.t_end >= w.lo) out.actions.push_back(a);
  }
  return out;
}

// Objects of the triples ordered by first frame of appearance, then name.
std::vector<std::string> ordered_objects(const std::vector<TaggedTriple>& triples) {
  std::map<std::string, Frame> first;
  for (const auto& t : triples) {
    auto [it, fresh] = first.emplace(t.triple.object, t.frame);
    if (!fresh) it->second = std::min(it->second, t.frame);
  }
  std::vector<std::pair<Frame, std::string>> order;
  for (const auto& [name, f] : first) order.emplace_back(f, name);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  for (auto& [f, name] : order) out.push_back(std::move(name));
  return out;
}

std::vector<ActionInstance> sorted_actions(std::vector<ActionInstance> v) {
  std::sort(v.begin(), v.end(), action_order);
  return v;
}

std::vector<std::string> distinct_names(const std::vector<ActionInstance>& sorted) {
  std::vector<std::string> out;
  for (const auto& a : sorted) {
    if (std::find(out.begin(), out.end(), a.action) == out.end()) out.push_back(a.action);
  }
  return out;
}

Evidence triples_of_object(const Evidence& e, const std::string& object) {
  Evidence out;
  for (const auto& t : e.triples) {
    if (t.triple.object == object) out.triples.push_back(t);
  }
  return out;
}

// ---- scene-level filters ---------------------------------------------------

IntermediateResult filter_object(const RuleContext& ctx) {
  const std::string& o = ctx.node.args.at(0);
  Evidence e;
  for (Frame f = 1; f <= ctx.scene.frame_count; ++f) {
    for (const auto& t : ctx.scene.triples_at(f)) {
      if (t.subject == o || t.object == o) e.triples.push_back({f, t});
    }
  }
  e.normalize();
  std::vector<std::string> names;
  if (!e.empty()) names.push_back(o);
  return {Answer::set(AnswerKind::ObjectSet, std::move(names)), std::move(e)};
}

IntermediateResult filter_relation(const RuleContext& ctx) {
  const std::string& r = ctx.node.args.at(0);
  Evidence e;
  for (Frame f = 1; f <= ctx.scene.frame_count; ++f) {
    for (const auto& t : ctx.scene.triples_at(f)) {
      if (t.relation == r) e.triples.push_back({f, t});
    }
  }
  e.normalize();
  std::vector<std::string> names;
  if (!e.empty()) names.push_back(r);
  return {Answer::set(AnswerKind::RelationSet, std::move(names)), std::move(e)};
}

IntermediateResult query_exists(const RuleContext& ctx) {
  const auto& c = child(ctx, 0);
  return yes_no(!c.evidence.empty(), c.evidence);
}

IntermediateResult query_interaction(const RuleContext& ctx) {
  const auto& rel = child(ctx, 0);
  const auto& obj = child(ctx, 1);
  const std::string o = filter_literal(ctx.node.children[1], "filter_object");
  std::set<TaggedTriple> with_object(obj.evidence.triples.begin(), obj.evidence.triples.end());
  Evidence e;
  for (const auto& t : rel.evidence.triples) {
    if (t.triple.object == o && with_object.count(t)) e.triples.push_back(t);
  }
  const bool yes = !e.empty();
  return yes_no(yes, std::move(e));
}

// ---- temporal rules --------------------------------------------------------

IntermediateResult interaction_temporal(const RuleContext& ctx) {
  const auto& target = child(ctx, 0);
  const auto w = localize(ctx, 1);
  if (!w || w->empty()) return yes_no(false, {});
  Evidence e = restrict(target.evidence, *w);
  const bool yes = binary_child(ctx, 0).is_yes() && !e.empty();
  return yes_no(yes, std::move(e));
}

IntermediateResult objects_temporal(const RuleContext& ctx) {
  const bool all = !ctx.node.args.empty();
  const auto w = localize(ctx, 1);
  Evidence e;
  if (w && !w->empty()) e = restrict(child(ctx, 0).evidence, *w);
  e.actions.clear();
  auto names = ordered_objects(e.triples);
  if (all) return {Answer::set(AnswerKind::ObjectSet, std::move(names)), std::move(e)};
  if (names.empty()) return {Answer::none(), {}};
  Evidence chosen = triples_of_object(e, names.front());
  return {Answer::object(names.front()), std::move(chosen)};
}

IntermediateResult actions_boundary(const RuleContext& ctx) {
  const bool after = ctx.node.rule == "actions_after";
  const bool has_candidates = ctx.node.children.size() == 2;
  const auto anchor = hull(child(ctx, has_candidates ? 1 : 0).evidence);
  if (!anchor) return {Answer::none(), {}};
  const auto& pool = has_candidates ? child(ctx, 0).evidence.actions : ctx.scene.dynamic_sr.actions;
  std::optional<ActionInstance> best;
  for (const auto& a : sorted_actions(pool)) {
    if (after ? a.t_start <= anchor->hi : a.t_end >= anchor->lo) continue;
    // Candidates arrive in action order, so only a strictly nearer one wins.
    if (!best || (after ? a.t_start < best->t_start : a.t_end > best->t_end)) best = a;
  }
  if (!best) return {Answer::none(), {}};
  Evidence e;
  e.actions.push_back(*best);
  return {Answer::action(best->action), std::move(e)};
}

IntermediateResult extremal_action(const RuleContext& ctx) {
  const bool longest = ctx.node.rule == "longest_action";
  std::optional<ActionInstance> best;
  for (const auto& a : sorted_actions(child(ctx, 0).evidence.actions)) {
    if (!best || (longest ? a.duration() > best->duration() : a.duration() < best->duration())) {
      best = a;
    }
  }
  if (!best) return {Answer::none(), {}};
  Evidence e;
  e.actions.push_back(*best);
  return {Answer::action(best->action), std::move(e)};
}

bool verb_matches(const std::string& action, const std::string& verb) {
  return action == verb || action.starts_with(verb + " ");
}

IntermediateResult filter_actions(const RuleContext& ctx) {
  Evidence e;
  if (ctx.node.reads_scene) {
    for (const auto& a : ctx.scene.dynamic_sr.actions) {
      if (ctx.node.args.empty() || a.action == ctx.node.args.front()) e.actions.push_back(a);
    }
  } else {
    const auto objects = member_names(child(ctx, 0).answer);
    for (const auto& a : ctx.scene.dynamic_sr.actions) {
      if (a.object.empty() ||
          std::find(objects.begin(), objects.end(), a.object) == objects.end()) {
        continue;
      }
      if (ctx.node.args.empty() || verb_matches(a.action, ctx.node.args.front())) {
        e.actions.push_back(a);
      }
    }
  }
  e.normalize();
  return {Answer::set(AnswerKind::ActionSet, distinct_names(e.actions)), std::move(e)};
}

IntermediateResult query_subject_relation(const RuleContext& ctx) {
  Evidence e;
  e.triples = child(ctx, 0).evidence.triples;
  auto names = ordered_objects(e.triples);
  if (names.empty()) return {Answer::none(), {}};
  return {Answer::set(AnswerKind::ObjectSet, std::move(names)), std::move(e)};
}

// ---- combinators -----------------------------------------------------------

std::size_t pick_one(const RuleContext& ctx) {
  const bool a = binary_child(ctx, 0).is_yes();
  const bool b = binary_child(ctx, 1).is_yes();
  if (a && b) {
    throw RuleError(RuleErrorKind::AmbiguousChoice, ctx.node.rule + ": both options hold");
  }
  if (!a && !b) {
    throw RuleError(RuleErrorKind::NoValidChoice, ctx.node.rule + ": neither option holds");
  }
  return a ? 0 : 1;
}

Evidence both(const RuleContext& ctx) {
  return Evidence::merge(child(ctx, 0).evidence, child(ctx, 1).evidence);
}

IntermediateResult choose(const RuleContext& ctx) {
  const std::size_t k = pick_one(ctx);
  const std::string& option = ctx.node.args.at(k);
  Answer a = ctx.vocab.is_object(option) ? Answer::object(option) : Answer::action(option);
  return {std::move(a), child(ctx, k).evidence};
}

IntermediateResult or_choice(const RuleContext& ctx) {
  const std::size_t k = pick_one(ctx);
  return {Answer::time(k == 0 ? "after" : "before"), child(ctx, k).evidence};
}

IntermediateResult choose_action_extremal(const RuleContext& ctx) {
  const bool shorter = ctx.node.rule == "choose_action_shorter";
  std::vector<ActionInstance> picked;
  for (std::size_t i = 0; i < 2; ++i) {
    auto acts = sorted_actions(child(ctx, i).evidence.actions);
    if (acts.empty()) {
      throw RuleError(RuleErrorKind::NoValidChoice,
                      ctx.node.rule + ": option " + std::to_string(i + 1) + " grounds no action");
    }
    picked.push_back(acts.front());
  }
  const auto& a = picked[0];
  const auto& b = picked[1];
  std::size_t k;
  if (a.duration() != b.duration()) {
    k = (a.duration() < b.duration()) == shorter ? 0 : 1;
  } else {
    k = action_order(b, a) ? 1 : 0;
  }
  Evidence e;
  e.actions = picked;
  e.normalize();
  return {Answer::action(picked[k].action), std::move(e)};
}

const Answer& name_child(const RuleContext& ctx, std::size_t i) {
  const Answer& a = child(ctx, i).answer;
  if (!a.is_none() && !a.is_name()) {
    throw RuleError(RuleErrorKind::TypeMismatch, ctx.node.rule + ": child " + std::to_string(i + 1) +
                                                     " answered " + a.to_string() +
                                                     ", expected a single name");
  }
  return a;
}

IntermediateResult equals(const RuleContext& ctx) {
  const Answer& a = name_child(ctx, 0);
  const Answer& b = name_child(ctx, 1);
  const bool yes = !a.is_none() && !b.is_none() && a.name() == b.name();
  return yes_no(yes, both(ctx));
}

IntermediateResult conjunction(const RuleContext& ctx) {
  const bool a = binary_child(ctx, 0).is_yes();
  const bool b = binary_child(ctx, 1).is_yes();
  const bool yes = ctx.node.rule == "conjunction_and" ? (a && b) : (a != b);
  return yes_no(yes, both(ctx));
}

IntermediateResult first_last_action(const RuleContext& ctx) {
  auto acts = sorted_actions(child(ctx, 0).evidence.actions);
  if (acts.empty()) return {Answer::none(), {}};
  const auto& pick = ctx.node.rule == "query_first" ? acts.front() : acts.back();
  Evidence e;
  e.actions.push_back(pick);
  return {Answer::action(pick.action), std::move(e)};
}

IntermediateResult first_last_object(const RuleContext& ctx) {
  const auto& ev = child(ctx, 0).evidence;
  auto names = ordered_objects(ev.triples);
  if (names.empty()) return {Answer::none(), {}};
  const auto& pick = ctx.node.rule == "query_first" ? names.front() : names.back();
  return {Answer::object(pick), triples_of_object(ev, pick)};
}

// ---- tables ----------------------------------------------------------------

const std::vector<RuleSignature> kSignatures = {
    {"filter_object", RuleInputKind::Scene, "object", "objects",
     "selects the triples an object takes part in"},
    {"filter_relation", RuleInputKind::Scene, "relation", "relations",
     "selects the triples carrying a relation"},
    {"query_object", RuleInputKind::Trace, "", "binary", "whether an object exists"},
    {"query_relation", RuleInputKind::Trace, "", "binary", "whether a relation exists"},
    {"query_interaction", RuleInputKind::Trace, "", "binary",
     "whether a relation holds with an object in some frame"},
    {"interaction_temporal_after", RuleInputKind::Trace, "", "binary",
     "whether the target holds after the anchor ends"},
    {"interaction_temporal_before", RuleInputKind::Trace, "", "binary",
     "whether the target holds before the anchor starts"},
    {"interaction_temporal_while", RuleInputKind::Trace, "", "binary",
     "whether the target holds during the anchor"},
    {"interaction_temporal_between", RuleInputKind::Trace, "", "binary",
     "whether the target holds between two anchors"},
    {"actions_after", RuleInputKind::Trace, "", "action", "nearest action starting after the anchor"},
    {"actions_before", RuleInputKind::Trace, "", "action", "nearest action ending before the anchor"},
    {"objects_after", RuleInputKind::Trace, "[all]", "object | objects",
     "objects of the relation after the anchor"},
    {"objects_before", RuleInputKind::Trace, "[all]", "object | objects",
     "objects of the relation before the anchor"},
    {"objects_while", RuleInputKind::Trace, "[all]", "object | objects",
     "objects of the relation during the anchor"},
    {"objects_between", RuleInputKind::Trace, "[all]", "object | objects",
     "objects of the relation between two anchors"},
    {"longest_action", RuleInputKind::Trace, "", "action", "the candidate action of longest duration"},
    {"shortest_action", RuleInputKind::Trace, "", "action", "the candidate action of shortest duration"},
    {"filter_actions", RuleInputKind::Scene, "[action] | [verb]", "actions",
     "action instances of the scene, or those done on the child's objects"},
    {"query_subject_relation", RuleInputKind::Trace, "", "objects",
     "objects taking part in the child's triples"},
    {"choose", RuleInputKind::Trace, "option option", "object | action",
     "the option whose condition holds"},
    {"or", RuleInputKind::Trace, "", "time", "after or before, whichever localizer holds"},
    {"choose_action_shorter", RuleInputKind::Trace, "", "action", "the shorter of two actions"},
    {"choose_action_longer", RuleInputKind::Trace, "", "action", "the longer of two actions"},
    {"object_equals", RuleInputKind::Trace, "", "binary", "whether two objects are the same"},
    {"action_equals", RuleInputKind::Trace, "", "binary", "whether two actions are the same"},
    {"conjunction_and", RuleInputKind::Trace, "", "binary", "both children hold"},
    {"conjunction_xor", RuleInputKind::Trace, "", "binary", "exactly one child holds"},
    {"query_first", RuleInputKind::Trace, "", "object | action", "earliest candidate"},
    {"query_last", RuleInputKind::Trace, "", "object | action", "latest candidate"},
};

const std::vector<QT> kExistsLike = {QT::ObjectExists, QT::RelationExists, QT::Interaction};
const std::vector<QT> kAnchor = {QT::Interaction, QT::Action};
const std::vector<QT> kBinary = {QT::ObjectExists,     QT::RelationExists,         QT::Interaction,
                                 QT::ExistsTemporalLoc, QT::InteractionTemporalLoc, QT::Equals,
                                 QT::Conjunction};
const std::vector<QT> kObjectNames = {QT::Object, QT::ObjectTemporalLoc, QT::FirstLast, QT::Choose};
const std::vector<QT> kActionNames = {QT::ActionTemporalLoc, QT::LongestShortestAction,
                                      QT::FirstLast, QT::Choose};
const std::vector<QT> kObjectSources = {QT::Object, QT::ObjectTemporalLoc, QT::FirstLast};

std::vector<RuleBinding> make_bindings() {
  std::vector<RuleBinding> b = {
      {"filter_object", std::nullopt, {}, "scene", filter_object},
      {"filter_relation", std::nullopt, {}, "scene", filter_relation},
      {"query_object", QT::ObjectExists, {}, "filter", query_exists},
      {"query_relation", QT::RelationExists, {}, "filter", query_exists},
      {"query_interaction", QT::Interaction, {}, "filters", query_interaction},
      {"query_interaction", QT::Interaction, {{QT::RelationExists}, {QT::ObjectExists}}, "questions",
       query_interaction},
      {"actions_after", QT::ActionTemporalLoc, {kAnchor}, "scene actions", actions_boundary},
      {"actions_before", QT::ActionTemporalLoc, {kAnchor}, "scene actions", actions_boundary},
      {"actions_after", QT::ActionTemporalLoc, {{QT::Action}, kAnchor}, "candidates",
       actions_boundary},
      {"actions_before", QT::ActionTemporalLoc, {{QT::Action}, kAnchor}, "candidates",
       actions_boundary},
      {"longest_action", QT::LongestShortestAction, {{QT::Action}}, "", extremal_action},
      {"shortest_action", QT::LongestShortestAction, {{QT::Action}}, "", extremal_action},
      {"filter_actions", QT::Action, {}, "scene", filter_actions},
      {"filter_actions", QT::Action, {kObjectSources}, "on objects", filter_actions},
      {"query_subject_relation", QT::Object, {}, "filter", query_subject_relation},
      {"query_subject_relation", QT::Object, {{QT::RelationExists, QT::Interaction}}, "question",
       query_subject_relation},
      {"choose", QT::Choose, {kBinary, kBinary}, "options", choose},
      {"or", QT::Choose, {{QT::InteractionTemporalLoc, QT::ExistsTemporalLoc},
                          {QT::InteractionTemporalLoc, QT::ExistsTemporalLoc}},
       "time", or_choice},
      {"choose_action_shorter", QT::Choose, {{QT::Action}, {QT::Action}}, "", choose_action_extremal},
      {"choose_action_longer", QT::Choose, {{QT::Action}, {QT::Action}}, "", choose_action_extremal},
      {"object_equals", QT::Equals, {kObjectNames, kObjectNames}, "", equals},
      {"action_equals", QT::Equals, {kActionNames, kActionNames}, "", equals},
      {"conjunction_and", QT::Conjunction, {kBinary, kBinary}, "", conjunction},
      {"conjunction_xor", QT::Conjunction, {kBinary, kBinary}, "", conjunction},
      {"query_first", QT::FirstLast, {{QT::Action}}, "action", first_last_action},
      {"query_last", QT::FirstLast, {{QT::Action}}, "action", first_last_action},
      {"query_first", QT::FirstLast, {{QT::Object, QT::ObjectTemporalLoc}}, "object",
       first_last_object},
      {"query_last", QT::FirstLast, {{QT::Object, QT::ObjectTemporalLoc}}, "object",
       first_last_object},
  };
  const char* temporal[] = {"interaction_temporal_after", "interaction_temporal_before",
                            "interaction_temporal_while"};
  const char* objects[] = {"objects_after", "objects_before", "objects_while"};
  for (QT parent : {QT::InteractionTemporalLoc, QT::ExistsTemporalLoc}) {
    const std::vector<QT> target = parent == QT::InteractionTemporalLoc
                                       ? std::vector<QT>{QT::Interaction}
                                       : std::vector<QT>{QT::ObjectExists, QT::RelationExists};
    for (const char* r : temporal) b.push_back({r, parent, {target, kAnchor}, "", interaction_temporal});
    b.push_back({"interaction_temporal_between", parent, {target, kAnchor, kAnchor}, "",
                 interaction_temporal});
  }
  for (const char* r : objects) b.push_back({r, QT::ObjectTemporalLoc, {kExistsLike, kAnchor}, "",
                                             objects_temporal});
  b.push_back({"objects_between", QT::ObjectTemporalLoc, {kExistsLike, kAnchor, kAnchor}, "",
               objects_temporal});
  return b;
}

const std::vector<RuleBinding>& bindings() {
  static const std::vector<RuleBinding> table = make_bindings();
  return table;
}

bool matches(const RuleBinding& b, const Token& token) {
  if (b.parent != token.parent || b.children.size() != token.children.size()) return false;
  for (std::size_t i = 0; i < b.children.size(); ++i) {
    const auto& allowed = b.children[i];
    if (std::find(allowed.begin(), allowed.end(), token.children[i]) == allowed.end()) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(RuleErrorKind kind) {
  switch (kind) {
    case RuleErrorKind::MissingChild: return "MissingChild";
    case RuleErrorKind::TypeMismatch: return "TypeMismatch";
    case RuleErrorKind::AmbiguousChoice: return "AmbiguousChoice";
    case RuleErrorKind::NoValidChoice: return "NoValidChoice";
    case RuleErrorKind::UnknownToken: return "UnknownToken";
    case RuleErrorKind::Propagated: return "PropagatedError";
  }
  return "?";
}

std::span<const RuleSignature> rule_signatures() { return kSignatures; }

const RuleSignature* find_signature(std::string_view name) {
  for (const auto& s : kSignatures) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::span<const RuleBinding> rule_bindings() { return bindings(); }

RuleHandle get_rule(const Token& token, std::string_view rule_name) {
  for (const auto& b : bindings()) {
    if (b.rule == rule_name && matches(b, token)) return {b.rule, b.variant, b.fn};
  }
  throw RuleError(RuleErrorKind::UnknownToken,
                  "no rule binds " + std::string(rule_name) + " to token " + token.to_string());
}

}  // namespace stqa
