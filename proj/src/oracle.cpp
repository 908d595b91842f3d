#include "stqa/oracle.hpp"

#include <algorithm>
#include <climits>

namespace stqa {

namespace {

struct Row {
  Frame frame;
  RelationTriple triple;
};

// Selection masks over the materialized rows and actions of the scene.
struct Den {
  Answer answer;
  std::optional<std::string> error;
  std::vector<char> rows;
  std::vector<char> acts;
};

class Oracle {
 public:
  Oracle(const SceneRepresentation& scene, const Vocabulary& vocab) : scene_(scene), vocab_(vocab) {
    for (Frame f = 1; f <= scene.frame_count; ++f) {
      for (const auto& t : scene.static_sr.frames[f - 1]) rows_.push_back({f, t});
    }
    acts_ = scene.dynamic_sr.actions;
  }

  Den eval(const ProgramNode& n, std::vector<OracleNodeAnswer>& out) {
    std::vector<Den> kids;
    for (const auto& c : n.children) kids.push_back(eval(c, out));
    Den d = blank();
    bool child_failed = false;
    for (const auto& k : kids) child_failed = child_failed || k.error.has_value();
    if (child_failed) {
      d.error = "PropagatedError";
    } else {
      apply(n, kids, d);
    }
    if (d.error) d.answer = Answer::none();
    out.push_back({d.answer, d.error});
    return d;
  }

 private:
  Den blank() const {
    Den d;
    d.rows.assign(rows_.size(), 0);
    d.acts.assign(acts_.size(), 0);
    return d;
  }

  static bool any(const std::vector<char>& v) {
    return std::find(v.begin(), v.end(), 1) != v.end();
  }

  static bool has_items(const Den& d) { return any(d.rows) || any(d.acts); }

  // Frames of the anchor: every frame touched by a selected row or action.
  bool anchor_span(const Den& d, Frame& lo, Frame& hi) const {
    lo = INT_MAX;
    hi = INT_MIN;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!d.rows[i]) continue;
      lo = std::min(lo, rows_[i].frame);
      hi = std::max(hi, rows_[i].frame);
    }
    for (std::size_t i = 0; i < acts_.size(); ++i) {
      if (!d.acts[i]) continue;
      lo = std::min(lo, acts_[i].t_start);
      hi = std::max(hi, acts_[i].t_end);
    }
    return lo != INT_MAX;
  }

  // in[f] for f in 1..T says whether frame f lies in the localizer window.
  // Returns false when some anchor is ungrounded.
  bool window(const std::string& rule, const std::vector<Den>& kids, std::size_t first_anchor,
              std::vector<char>& in) const {
    in.assign(scene_.frame_count + 1, 0);
    std::vector<std::pair<Frame, Frame>> spans;
    for (std::size_t i = first_anchor; i < kids.size(); ++i) {
      Frame lo, hi;
      if (!anchor_span(kids[i], lo, hi)) return false;
      spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    for (Frame f = 1; f <= scene_.frame_count; ++f) {
      bool ok = false;
      if (rule.ends_with("_after")) ok = f > spans[0].second;
      else if (rule.ends_with("_before")) ok = f < spans[0].first;
      else if (rule.ends_with("_while")) ok = spans[0].first <= f && f <= spans[0].second;
      else ok = f > spans[0].second && f < spans[1].first;
      in[f] = ok;
    }
    return true;
  }

  Den within(const Den& target, const std::vector<char>& in) const {
    Den d = blank();
    for (std::size_t i = 0; i < rows_.size(); ++i) d.rows[i] = target.rows[i] && in[rows_[i].frame];
    for (std::size_t i = 0; i < acts_.size(); ++i) {
      if (!target.acts[i]) continue;
      for (Frame f = acts_[i].t_start; f <= acts_[i].t_end; ++f) {
        if (f >= 1 && f <= scene_.frame_count && in[f]) d.acts[i] = 1;
      }
    }
    return d;
  }

  // Objects of the selected rows by (earliest frame, name).
  std::vector<std::string> objects_in(const Den& d) const {
    std::vector<std::pair<Frame, std::string>> seen;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!d.rows[i]) continue;
      const auto& name = rows_[i].triple.object;
      bool earlier = false;
      for (std::size_t j = 0; j < rows_.size(); ++j) {
        if (d.rows[j] && rows_[j].triple.object == name && rows_[j].frame < rows_[i].frame) {
          earlier = true;
        }
      }
      std::pair<Frame, std::string> p{rows_[i].frame, name};
      if (!earlier && std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::string> out;
    for (auto& p : seen) out.push_back(p.second);
    return out;
  }

  std::vector<ActionInstance> selected(const std::vector<char>& mask) const {
    std::vector<ActionInstance> out;
    for (std::size_t i = 0; i < acts_.size(); ++i) {
      if (mask[i]) out.push_back(acts_[i]);
    }
    std::sort(out.begin(), out.end(), action_order);
    return out;
  }

  void select_action(Den& d, const ActionInstance& a) const {
    for (std::size_t i = 0; i < acts_.size(); ++i) {
      if (acts_[i] == a) d.acts[i] = 1;
    }
  }

  static std::string bottom_literal(const ProgramNode& n, const std::string& rule) {
    if (n.rule == rule) return n.args.at(0);
    return bottom_literal(n.children.at(0), rule);
  }

  void apply(const ProgramNode& n, const std::vector<Den>& k, Den& d) {
    const std::string& r = n.rule;
    if (r == "filter_object" || r == "filter_relation") {
      const std::string& name = n.args[0];
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& t = rows_[i].triple;
        d.rows[i] = r == "filter_object" ? (t.subject == name || t.object == name) : t.relation == name;
      }
      std::vector<std::string> names;
      if (any(d.rows)) names.push_back(name);
      d.answer = Answer::set(r == "filter_object" ? AnswerKind::ObjectSet : AnswerKind::RelationSet,
                             names);
    } else if (r == "query_object" || r == "query_relation") {
      d.rows = k[0].rows;
      d.acts = k[0].acts;
      d.answer = Answer::binary(has_items(d));
    } else if (r == "query_interaction") {
      const std::string o = bottom_literal(n.children[1], "filter_object");
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        d.rows[i] = k[0].rows[i] && k[1].rows[i] && rows_[i].triple.object == o;
      }
      d.answer = Answer::binary(any(d.rows));
    } else if (r.starts_with("interaction_temporal_")) {
      std::vector<char> in;
      if (window(r, k, 1, in)) d = within(k[0], in);
      if (!k[0].answer.is_binary()) {
        d.error = "TypeMismatch";
        return;
      }
      d.answer = Answer::binary(k[0].answer.is_yes() && has_items(d));
    } else if (r.starts_with("objects_")) {
      std::vector<char> in;
      if (window(r, k, 1, in)) d = within(k[0], in);
      d.acts.assign(acts_.size(), 0);
      auto names = objects_in(d);
      if (!n.args.empty()) {
        d.answer = Answer::set(AnswerKind::ObjectSet, names);
      } else if (names.empty()) {
        d = blank();
        d.answer = Answer::none();
      } else {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
          d.rows[i] = d.rows[i] && rows_[i].triple.object == names[0];
        }
        d.answer = Answer::object(names[0]);
      }
    } else if (r == "actions_after" || r == "actions_before") {
      const bool two = n.children.size() == 2;
      Frame lo, hi;
      if (!anchor_span(k[two ? 1 : 0], lo, hi)) {
        d.answer = Answer::none();
        return;
      }
      std::vector<char> pool = two ? k[0].acts : std::vector<char>(acts_.size(), 1);
      std::vector<ActionInstance> ok;
      for (const auto& a : selected(pool)) {
        if (r == "actions_after" ? a.t_start > hi : a.t_end < lo) ok.push_back(a);
      }
      if (ok.empty()) {
        d.answer = Answer::none();
        return;
      }
      // nearest boundary first, then the global action order
      std::stable_sort(ok.begin(), ok.end(), [&](const ActionInstance& a, const ActionInstance& b) {
        return r == "actions_after" ? a.t_start < b.t_start : a.t_end > b.t_end;
      });
      select_action(d, ok[0]);
      d.answer = Answer::action(ok[0].action);
    } else if (r == "longest_action" || r == "shortest_action") {
      auto cands = selected(k[0].acts);
      if (cands.empty()) {
        d.answer = Answer::none();
        return;
      }
      int best = cands[0].duration();
      for (const auto& a : cands) {
        best = r == "longest_action" ? std::max(best, a.duration()) : std::min(best, a.duration());
      }
      for (const auto& a : cands) {
        if (a.duration() == best) {
          select_action(d, a);
          d.answer = Answer::action(a.action);
          break;
        }
      }
    } else if (r == "filter_actions") {
      for (std::size_t i = 0; i < acts_.size(); ++i) {
        const auto& a = acts_[i];
        bool keep;
        if (n.reads_scene) {
          keep = n.args.empty() || a.action == n.args[0];
        } else {
          const auto objs = member_names(k[0].answer);
          keep = !a.object.empty() && std::count(objs.begin(), objs.end(), a.object) > 0;
          if (keep && !n.args.empty()) {
            const std::string& v = n.args[0];
            keep = a.action == v || (a.action.size() > v.size() && a.action.compare(0, v.size(), v) == 0 &&
                                     a.action[v.size()] == ' ');
          }
        }
        d.acts[i] = keep;
      }
      std::vector<std::string> names;
      for (const auto& a : selected(d.acts)) {
        if (std::count(names.begin(), names.end(), a.action) == 0) names.push_back(a.action);
      }
      d.answer = Answer::set(AnswerKind::ActionSet, names);
    } else if (r == "query_subject_relation") {
      d.rows = k[0].rows;
      auto names = objects_in(d);
      if (names.empty()) {
        d = blank();
        d.answer = Answer::none();
      } else {
        d.answer = Answer::set(AnswerKind::ObjectSet, names);
      }
    } else if (r == "choose" || r == "or") {
      if (!k[0].answer.is_binary() || !k[1].answer.is_binary()) {
        d.error = "TypeMismatch";
        return;
      }
      const int yes = k[0].answer.is_yes() + k[1].answer.is_yes();
      if (yes == 2) d.error = "AmbiguousChoice";
      if (yes == 0) d.error = "NoValidChoice";
      if (yes != 1) return;
      const std::size_t idx = k[0].answer.is_yes() ? 0 : 1;
      d.rows = k[idx].rows;
      d.acts = k[idx].acts;
      if (r == "or") {
        d.answer = Answer::time(idx == 0 ? "after" : "before");
      } else {
        const std::string& opt = n.args[idx];
        d.answer = vocab_.is_object(opt) ? Answer::object(opt) : Answer::action(opt);
      }
    } else if (r == "choose_action_shorter" || r == "choose_action_longer") {
      auto a = selected(k[0].acts);
      auto b = selected(k[1].acts);
      if (a.empty() || b.empty()) {
        d.error = "NoValidChoice";
        return;
      }
      const ActionInstance& x = a[0];
      const ActionInstance& y = b[0];
      select_action(d, x);
      select_action(d, y);
      const bool shorter = r == "choose_action_shorter";
      bool pick_x;
      if (x.duration() == y.duration()) pick_x = !action_order(y, x);
      else pick_x = shorter ? x.duration() < y.duration() : x.duration() > y.duration();
      d.answer = Answer::action(pick_x ? x.action : y.action);
    } else if (r == "object_equals" || r == "action_equals") {
      for (const auto& c : k) {
        if (!c.answer.is_none() && !c.answer.is_name()) {
          d.error = "TypeMismatch";
          return;
        }
      }
      for (std::size_t i = 0; i < rows_.size(); ++i) d.rows[i] = k[0].rows[i] || k[1].rows[i];
      for (std::size_t i = 0; i < acts_.size(); ++i) d.acts[i] = k[0].acts[i] || k[1].acts[i];
      d.answer = Answer::binary(!k[0].answer.is_none() && !k[1].answer.is_none() &&
                                k[0].answer.values == k[1].answer.values);
    } else if (r == "conjunction_and" || r == "conjunction_xor") {
      if (!k[0].answer.is_binary() || !k[1].answer.is_binary()) {
        d.error = "TypeMismatch";
        return;
      }
      for (std::size_t i = 0; i < rows_.size(); ++i) d.rows[i] = k[0].rows[i] || k[1].rows[i];
      for (std::size_t i = 0; i < acts_.size(); ++i) d.acts[i] = k[0].acts[i] || k[1].acts[i];
      const bool a = k[0].answer.is_yes();
      const bool b = k[1].answer.is_yes();
      d.answer = Answer::binary(r == "conjunction_and" ? a && b : a != b);
    } else if (r == "query_first" || r == "query_last") {
      const bool first = r == "query_first";
      if (n.children[0].qtype == QuestionType::Action) {
        auto cands = selected(k[0].acts);
        if (cands.empty()) {
          d.answer = Answer::none();
          return;
        }
        const auto& pick = first ? cands.front() : cands.back();
        select_action(d, pick);
        d.answer = Answer::action(pick.action);
      } else {
        auto names = objects_in(k[0]);
        if (names.empty()) {
          d.answer = Answer::none();
          return;
        }
        const std::string pick = first ? names.front() : names.back();
        for (std::size_t i = 0; i < rows_.size(); ++i) {
          d.rows[i] = k[0].rows[i] && rows_[i].triple.object == pick;
        }
        d.answer = Answer::object(pick);
      }
    } else {
      d.error = "UnknownToken";
    }
  }

  const SceneRepresentation& scene_;
  const Vocabulary& vocab_;
  std::vector<Row> rows_;
  std::vector<ActionInstance> acts_;
};

}  // namespace

OracleResult oracle_answer(const ProgramNode& program, const SceneRepresentation& scene,
                           const Vocabulary& vocab) {
  Oracle oracle(scene, vocab);
  OracleResult out;
  oracle.eval(program, out.nodes);
  out.root = out.nodes.back().answer;
  return out;
}

}  // namespace stqa
