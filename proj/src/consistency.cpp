#include <algorithm>

#include "stqa/metrics.hpp"

namespace stqa {

namespace {

using QT = QuestionType;
using Checks = std::vector<ConsistencyCheck>;

bool says_yes(const PredictionRecord* r) { return r && r->prediction().is_yes(); }
bool says_no(const PredictionRecord* r) { return r && r->prediction().is_no(); }

bool is_rule(const PredictionRecord& r, std::initializer_list<std::string_view> names) {
  return std::find(names.begin(), names.end(), r.rule) != names.end();
}

// The prediction as a single name, or nothing for None, yes/no and sets.
std::optional<std::string> single_name(const Answer& a) {
  if (a.is_set() || a.is_binary() || a.is_none()) return std::nullopt;
  return a.name();
}

bool member(const std::string& name, const PredictionRecord* r) {
  if (!r) return false;
  const auto names = member_names(r->prediction());
  return std::find(names.begin(), names.end(), name) != names.end();
}

// An anchor grounds an interval: an interaction anchor said yes, an action
// anchor selected at least one action.
bool grounded(const PredictionRecord* r) {
  if (!r) return false;
  const Answer a = r->prediction();
  if (a.is_binary()) return a.is_yes();
  return !member_names(a).empty();
}

// Checks on the questions that contain `q`, implied by `q` answering no:
// And parents answer no, temporal parents localizing `q` answer no, and a
// time choice does not pick the word of `q`.
Checks upward_from_no(const PredictionRecord& q, const RecordSet& rs) {
  Checks out;
  for (const auto& [p, k] : rs.parents_of(q)) {
    if (p->rule == "conjunction_and") {
      out.push_back({p, says_no(p)});
    } else if (p->rule.starts_with("interaction_temporal_") && k == 0) {
      out.push_back({p, says_no(p)});
    } else if (p->rule == "or") {
      const auto word = single_name(p->prediction());
      out.push_back({p, !word || *word != (k == 0 ? "after" : "before")});
    }
  }
  return out;
}

Checks children_yes(const PredictionRecord& q, const RecordSet& rs) {
  Checks out;
  for (const auto* c : rs.children_of(q)) out.push_back({c, says_yes(c)});
  return out;
}

Checks target_yes(const PredictionRecord& q, const RecordSet& rs) {
  const auto kids = rs.children_of(q);
  if (kids.empty()) return {};
  return {{kids[0], says_yes(kids[0])}};
}

ConsistencyRule rule(std::string family, std::string answer,
                     std::function<bool(const PredictionRecord&, const RecordSet&)> applies,
                     std::function<Checks(const PredictionRecord&, const RecordSet&)> derive) {
  return {std::move(family), std::move(answer), std::move(applies), std::move(derive)};
}

}  // namespace

std::vector<ConsistencyRule> default_consistency_rules(const Vocabulary& vocab) {
  std::vector<ConsistencyRule> rules;

  // Interaction: yes needs both of its existence sub-questions; no
  // propagates to the questions built on it.
  rules.push_back(rule(
      "Interaction", "Yes",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.qtype == QT::Interaction && q.prediction().is_yes() && !q.children.empty();
      },
      children_yes));
  rules.push_back(rule(
      "Interaction", "No",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.qtype == QT::Interaction && q.prediction().is_no();
      },
      upward_from_no));

  // First/Last: the returned element is one of the child's candidates.
  for (const char* pos : {"First", "Last"}) {
    for (const char* kind : {"Object", "Action"}) {
      const std::string r = std::string("query_") + (pos[0] == 'F' ? "first" : "last");
      const bool action = kind[0] == 'A';
      rules.push_back(rule(
          pos, kind,
          [r, action](const PredictionRecord& q, const RecordSet& rs) {
            if (q.rule != r || !single_name(q.prediction())) return false;
            const auto kids = rs.children_of(q);
            return kids.size() == 1 && kids[0] && (kids[0]->qtype == QT::Action) == action;
          },
          [](const PredictionRecord& q, const RecordSet& rs) {
            const auto kids = rs.children_of(q);
            return Checks{{kids[0], member(q.prediction().name(), kids[0])}};
          }));
    }
  }

  // Action after/before: a returned action comes from the candidate set and
  // the anchor grounds an interval.
  for (const char* dir : {"After", "Before"}) {
    const std::string r = std::string("actions_") + (dir[0] == 'A' ? "after" : "before");
    rules.push_back(rule(
        "Action", dir,
        [r](const PredictionRecord& q, const RecordSet&) {
          return q.rule == r && single_name(q.prediction()).has_value();
        },
        [](const PredictionRecord& q, const RecordSet& rs) {
          const auto kids = rs.children_of(q);
          Checks out;
          if (kids.size() == 2) out.push_back({kids[0], member(q.prediction().name(), kids[0])});
          if (!kids.empty()) out.push_back({kids.back(), grounded(kids.back())});
          return out;
        }));
  }

  // Object after/before/while/between: a returned object means the relation
  // holds somewhere and every anchor grounds an interval.
  for (const char* loc : {"After", "Before", "While", "Between"}) {
    std::string r = std::string("objects_") + loc;
    std::transform(r.begin(), r.end(), r.begin(), ::tolower);
    rules.push_back(rule(
        "Object", loc,
        [r](const PredictionRecord& q, const RecordSet&) {
          return q.rule == r && !member_names(q.prediction()).empty();
        },
        [](const PredictionRecord& q, const RecordSet& rs) {
          const auto kids = rs.children_of(q);
          Checks out;
          for (std::size_t i = 0; i < kids.size(); ++i) {
            out.push_back({kids[i], i == 0 ? says_yes(kids[i]) : grounded(kids[i])});
          }
          return out;
        }));
  }

  // Equals: the compared names agree exactly when the parent says yes.
  auto same_entity = [](const PredictionRecord& q, const RecordSet& rs) {
    const auto kids = rs.children_of(q);
    if (kids.size() != 2 || !kids[0] || !kids[1]) return false;
    const auto a = single_name(kids[0]->prediction());
    const auto b = single_name(kids[1]->prediction());
    return a && b && *a == *b;
  };
  rules.push_back(rule(
      "Equals", "Yes",
      [](const PredictionRecord& q, const RecordSet&) {
        return is_rule(q, {"object_equals", "action_equals"}) && q.prediction().is_yes();
      },
      [same_entity](const PredictionRecord& q, const RecordSet& rs) {
        return Checks{{&q, same_entity(q, rs)}};
      }));
  rules.push_back(rule(
      "Equals", "No",
      [](const PredictionRecord& q, const RecordSet&) {
        return is_rule(q, {"object_equals", "action_equals"}) && q.prediction().is_no();
      },
      [same_entity](const PredictionRecord& q, const RecordSet& rs) {
        return Checks{{&q, !same_entity(q, rs)}};
      }));

  // And / Xor over two yes/no children.
  rules.push_back(rule(
      "And", "Yes",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "conjunction_and" && q.prediction().is_yes();
      },
      children_yes));
  rules.push_back(rule(
      "And", "No",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "conjunction_and" && q.prediction().is_no();
      },
      [](const PredictionRecord& q, const RecordSet& rs) {
        const auto kids = rs.children_of(q);
        return Checks{{&q, !(kids.size() == 2 && says_yes(kids[0]) && says_yes(kids[1]))}};
      }));
  auto differ = [](const PredictionRecord& q, const RecordSet& rs) {
    const auto kids = rs.children_of(q);
    if (kids.size() != 2 || !kids[0] || !kids[1]) return std::optional<bool>();
    const Answer a = kids[0]->prediction();
    const Answer b = kids[1]->prediction();
    if (!a.is_binary() || !b.is_binary()) return std::optional<bool>();
    return std::optional<bool>(a != b);
  };
  rules.push_back(rule(
      "Xor", "Yes",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "conjunction_xor" && q.prediction().is_yes();
      },
      [differ](const PredictionRecord& q, const RecordSet& rs) {
        return Checks{{&q, differ(q, rs).value_or(false)}};
      }));
  rules.push_back(rule(
      "Xor", "No",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "conjunction_xor" && q.prediction().is_no();
      },
      [differ](const PredictionRecord& q, const RecordSet& rs) {
        const auto d = differ(q, rs);
        return Checks{{&q, d.has_value() && !*d}};
      }));

  // Choose: the returned option is one whose condition holds.
  auto option_child_yes = [](const PredictionRecord& q, const RecordSet& rs) {
    const auto kids = rs.children_of(q);
    const std::string pick = q.prediction().name();
    Checks out;
    for (std::size_t k = 0; k < q.args.size() && k < kids.size(); ++k) {
      if (q.args[k] == pick) {
        out.push_back({kids[k], says_yes(kids[k])});
        break;
      }
    }
    if (out.empty()) out.push_back({&q, false});
    return out;
  };
  rules.push_back(rule(
      "Choose", "Temporal",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "or" && single_name(q.prediction()).has_value();
      },
      [](const PredictionRecord& q, const RecordSet& rs) {
        const auto kids = rs.children_of(q);
        const std::size_t k = q.prediction().name() == "after" ? 0 : 1;
        if (k >= kids.size()) return Checks{{&q, false}};
        return Checks{{kids[k], says_yes(kids[k])}};
      }));
  const Vocabulary* v = &vocab;
  auto object_options = [v](const PredictionRecord& q) {
    return q.args.size() == 2 && v->is_object(q.args[0]) && v->is_object(q.args[1]);
  };
  rules.push_back(rule(
      "Choose", "Object",
      [object_options](const PredictionRecord& q, const RecordSet&) {
        return q.rule == "choose" && object_options(q) && single_name(q.prediction()).has_value();
      },
      option_child_yes));
  rules.push_back(rule(
      "Choose", "Action",
      [object_options](const PredictionRecord& q, const RecordSet&) {
        if (!single_name(q.prediction())) return false;
        return (q.rule == "choose" && !object_options(q)) ||
               is_rule(q, {"choose_action_shorter", "choose_action_longer"});
      },
      [option_child_yes](const PredictionRecord& q, const RecordSet& rs) {
        if (q.rule == "choose") return option_child_yes(q, rs);
        const auto kids = rs.children_of(q);
        const std::string pick = q.prediction().name();
        bool found = false;
        for (const auto* c : kids) found = found || member(pick, c);
        return Checks{{&q, found}};
      }));

  // Temporal localizers over interactions, then over existence questions.
  for (const char* loc : {"After", "Before", "While", "Between"}) {
    std::string r = std::string("interaction_temporal_") + loc;
    std::transform(r.begin(), r.end(), r.begin(), ::tolower);
    rules.push_back(rule(
        loc, "Yes",
        [r](const PredictionRecord& q, const RecordSet&) {
          return q.qtype == QT::InteractionTemporalLoc && q.rule == r && q.prediction().is_yes();
        },
        target_yes));
    rules.push_back(rule(
        loc, "No",
        [r](const PredictionRecord& q, const RecordSet&) {
          return q.qtype == QT::InteractionTemporalLoc && q.rule == r && q.prediction().is_no();
        },
        upward_from_no));
  }
  rules.push_back(rule(
      "Object", "Yes",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.qtype == QT::ExistsTemporalLoc && q.prediction().is_yes();
      },
      target_yes));
  rules.push_back(rule(
      "Object", "No",
      [](const PredictionRecord& q, const RecordSet&) {
        return q.qtype == QT::ExistsTemporalLoc && q.prediction().is_no();
      },
      upward_from_no));
  return rules;
}

}  // namespace stqa
