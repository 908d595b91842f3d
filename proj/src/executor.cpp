#include "stqa/executor.hpp"

#include <stdexcept>

namespace stqa {

namespace {

class Runner {
 public:
  Runner(const ProgramNode& root, const SceneRepresentation& scene, Trace& trace,
         const ExecuteOptions& options)
      : scene_(scene),
        vocab_(options.vocab ? *options.vocab : Vocabulary::standard()),
        trace_(trace),
        memoize_(options.memoize),
        keys_(node_keys(root)) {}

  // Returns the key of `node`; keys are consumed in post-order.
  std::string run(const ProgramNode& node) {
    const std::size_t size = subtree_size(node);
    std::string key = keys_.at(next_ + size - 1);
    if (memoize_ && trace_.contains(key)) {
      next_ += size;
      return key;
    }
    std::vector<std::string> child_keys;
    for (const auto& c : node.children) child_keys.push_back(run(c));
    ++next_;

    TraceEntry entry{key, node.rule, node.qtype, child_keys, std::nullopt, std::nullopt};
    std::vector<const IntermediateResult*> inputs;
    for (const auto& k : child_keys) {
      const TraceEntry* c = trace_.find(k);
      if (!c->result) {
        entry.failure = NodeFailure{RuleErrorKind::Propagated, "child " + k + " failed"};
        break;
      }
      inputs.push_back(&*c->result);
    }
    if (!entry.failure) {
      try {
        const RuleHandle rule = get_rule(token_of(node), node.rule);
        entry.result = rule(RuleContext{scene_, vocab_, node, std::move(inputs)});
      } catch (const RuleError& e) {
        entry.failure = NodeFailure{e.kind(), e.what()};
      }
    }
    // Without memoization a cached entry is recomputed and must agree.
    if (const TraceEntry* cached = trace_.find(key)) {
      if (!(*cached == entry)) throw std::logic_error("trace entry disagrees with recomputation: " + key);
      return key;
    }
    trace_.insert(std::move(entry));
    return key;
  }

 private:
  const SceneRepresentation& scene_;
  const Vocabulary& vocab_;
  Trace& trace_;
  bool memoize_;
  std::vector<std::string> keys_;
  std::size_t next_ = 0;
};

}  // namespace

const TraceEntry* Trace::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void Trace::insert(TraceEntry entry) {
  if (contains(entry.key)) throw std::logic_error("duplicate trace key " + entry.key);
  index_.emplace(entry.key, entries_.size());
  entries_.push_back(std::move(entry));
}

Trace execute(const ProgramNode& program, const SceneRepresentation& scene, Trace trace_in,
              const ExecuteOptions& options) {
  Runner(program, scene, trace_in, options).run(program);
  return trace_in;
}

ExecutionOutcome run_program(const ProgramNode& program, const SceneRepresentation& scene,
                             const ExecuteOptions& options) {
  ExecutionOutcome out;
  out.trace = execute(program, scene, {}, options);
  out.root_key = node_keys(program).back();
  out.root_answer = out.trace.find(out.root_key)->answer();
  for (const auto& e : out.trace.entries()) {
    if (e.failure) out.errors.emplace_back(e.key, *e.failure);
  }
  return out;
}

std::vector<SubquestionAnswer> answers_by_subquestion(const ExecutionOutcome& outcome) {
  std::vector<SubquestionAnswer> rows;
  for (const auto& e : outcome.trace.entries()) rows.push_back({e.key, e.qtype, e.answer()});
  return rows;
}

}  // namespace stqa
