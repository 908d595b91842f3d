#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stqa/vocabulary.hpp"

namespace stqa {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitIo = 3 };

int cmd_validate(const std::vector<std::string>& paths, const Vocabulary& vocab, std::ostream& out,
                 std::ostream& err);

struct ExecuteRequest {
  std::string scene;      // with programs or questions
  std::string programs;
  std::string questions;
  std::string manifest;   // alternative: a corpus manifest
  std::string out_dir;
  bool memoize = false;
  int jobs = 1;
};

int cmd_execute(const ExecuteRequest& req, const Vocabulary& vocab, std::ostream& out,
                std::ostream& err);

struct MetricsRequest {
  std::string predictions;
  std::string out_dir;  // optional: report.txt and report.json
  bool weighted_ic = false;
  bool json = false;  // print the JSON report instead of the table
};

int cmd_metrics(const MetricsRequest& req, const Vocabulary& vocab, std::ostream& out,
                std::ostream& err);

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, const Vocabulary& vocab, std::ostream& out,
              std::ostream& err);

int cmd_rules(std::ostream& out);

/// Parses global flags and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stqa
