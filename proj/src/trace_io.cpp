#include <algorithm>
#include <sstream>

#include "stqa/executor.hpp"

namespace stqa {

namespace {

std::string evidence_summary(const Evidence& e) {
  if (e.empty()) return "none";
  std::ostringstream out;
  if (!e.triples.empty()) {
    Frame lo = e.triples.front().frame;
    Frame hi = lo;
    for (const auto& t : e.triples) {
      lo = std::min(lo, t.frame);
      hi = std::max(hi, t.frame);
    }
    out << e.triples.size() << (e.triples.size() == 1 ? " triple" : " triples") << " @ frames " << lo
        << ".." << hi;
  }
  if (!e.actions.empty()) {
    if (!e.triples.empty()) out << "; ";
    for (std::size_t i = 0; i < e.actions.size(); ++i) {
      const auto& a = e.actions[i];
      if (i) out << ", ";
      out << a.action << " [" << a.t_start << "," << a.t_end << "]";
    }
  }
  return out.str();
}

}  // namespace

std::string trace_to_text(const Trace& trace) {
  std::ostringstream out;
  std::size_t i = 0;
  for (const auto& e : trace.entries()) {
    out << ++i << "\t" << e.rule << "\t"
        << (e.qtype ? std::string(to_string(*e.qtype)) : std::string("internal")) << "\t";
    if (e.result) {
      out << e.result->answer.to_string() << "\t" << evidence_summary(e.result->evidence);
    } else {
      out << "ERROR " << to_string(e.failure->kind) << ": " << e.failure->message << "\t-";
    }
    out << "\t" << e.key << "\n";
  }
  return out.str();
}

nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : trace.entries()) {
    nlohmann::json j;
    j["key"] = e.key;
    j["rule"] = e.rule;
    j["qtype"] = e.qtype ? nlohmann::json(std::string(to_string(*e.qtype))) : nlohmann::json(nullptr);
    j["children"] = e.child_keys;
    if (e.result) {
      j["answer"] = to_json(e.result->answer);
      j["evidence"] = to_json(e.result->evidence);
    } else {
      j["answer"] = "None";
      j["error"] = {{"kind", std::string(to_string(e.failure->kind))},
                    {"message", e.failure->message}};
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace stqa
