#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stqa/answer.hpp"
#include "stqa/program.hpp"
#include "stqa/scene.hpp"

namespace stqa {

struct OracleNodeAnswer {
  Answer answer;               // None when `error` is set
  std::optional<std::string> error;  // "AmbiguousChoice", "NoValidChoice", ...

  bool operator==(const OracleNodeAnswer&) const = default;
};

struct OracleResult {
  Answer root;
  /// Aligned with decompose(program): one entry per node, post-order.
  std::vector<OracleNodeAnswer> nodes;
};

/// Reference evaluator: enumerates every (frame, triple) and action of the
/// scene and evaluates each node from the set and interval definitions
/// directly. Deliberately independent of the rule engine.
OracleResult oracle_answer(const ProgramNode& program, const SceneRepresentation& scene,
                           const Vocabulary& vocab = Vocabulary::standard());

}  // namespace stqa
