#include "stqa/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "stqa/errors.hpp"
#include "stqa/executor.hpp"
#include "stqa/metrics.hpp"
#include "stqa/program.hpp"
#include "stqa/records.hpp"
#include "stqa/rules.hpp"
#include "stqa/synth.hpp"
#include "stqa/templates.hpp"

namespace stqa {

namespace fs = std::filesystem;

namespace {

// Write to a sibling temp file, then rename into place.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// One unit of batch execution.
struct Job {
  std::string id;
  std::string video_id;
  std::string source;  // program text or question line
  std::optional<ProgramNode> program;
  std::string parse_error;
  const SceneRepresentation* scene = nullptr;
  ExecutionOutcome outcome;
};

// The entries of `program` in post-order, taken from a shared trace. Nodes
// under a memo hit were never keyed for this program; any entry of the same
// subtree stands in for them, relabeled with this program's keys.
ExecutionOutcome outcome_of(const ProgramNode& program, const Trace& shared) {
  std::map<std::string, const TraceEntry*> by_subtree;
  for (const auto& e : shared.entries()) by_subtree.emplace(e.key.substr(0, e.key.rfind('#')), &e);
  const auto nodes = decompose(program);
  const auto keys = node_keys(program);
  std::map<const ProgramNode*, std::string> key_of;
  ExecutionOutcome out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    key_of[nodes[i]] = keys[i];
    const TraceEntry* e = shared.find(keys[i]);
    if (!e) e = by_subtree.at(serialize_program(*nodes[i]));
    TraceEntry copy = *e;
    copy.key = keys[i];
    copy.child_keys.clear();
    for (const auto& c : nodes[i]->children) copy.child_keys.push_back(key_of.at(&c));
    if (copy.failure) out.errors.emplace_back(copy.key, *copy.failure);
    out.trace.insert(std::move(copy));
  }
  out.root_key = keys.back();
  out.root_answer = out.trace.find(out.root_key)->answer();
  return out;
}

// Runs the jobs of one video in order. With memoization they share a trace,
// so repeated sub-questions are computed once per video.
void run_group(const std::vector<Job*>& group, const Vocabulary& vocab, bool memoize,
               const fs::path& trace_dir) {
  ExecuteOptions opts;
  opts.vocab = &vocab;
  opts.memoize = memoize;
  Trace shared;
  for (Job* job : group) {
    if (!job->program) continue;
    if (memoize) {
      shared = execute(*job->program, *job->scene, std::move(shared), opts);
      job->outcome = outcome_of(*job->program, shared);
    } else {
      job->outcome = run_program(*job->program, *job->scene, opts);
    }
    write_atomic(trace_dir / (job->id + ".txt"), trace_to_text(job->outcome.trace));
    write_atomic(trace_dir / (job->id + ".json"), trace_to_json(job->outcome.trace).dump(2) + "\n");
  }
}

void run_jobs(std::vector<Job>& jobs, const Vocabulary& vocab, bool memoize, int threads,
              const fs::path& trace_dir) {
  std::vector<std::vector<Job*>> groups;
  std::map<std::string, std::size_t> group_of;
  for (auto& job : jobs) {
    auto [it, fresh] = group_of.emplace(job.video_id, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&job);
  }
  parallel_for(groups.size(), threads,
               [&](std::size_t i) { run_group(groups[i], vocab, memoize, trace_dir); });
}

std::string failure_text(const NodeFailure& f) {
  return std::string(to_string(f.kind)) + ": " + f.message;
}

// Prediction records for every question node of an executed job.
std::vector<nlohmann::json> job_records(const Job& job) {
  if (!job.program) {
    return {{{"video_id", job.video_id},
             {"question_id", job.id},
             {"qtype", nullptr},
             {"program", job.source},
             {"error", job.parse_error}}};
  }
  const auto nodes = decompose(*job.program);
  const auto keys = node_keys(*job.program);
  std::map<const ProgramNode*, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  std::vector<nlohmann::json> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ProgramNode& n = *nodes[i];
    if (n.is_internal()) continue;
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : n.children) {
      if (!c.is_internal()) children.push_back(job.id + ":" + std::to_string(index.at(&c)));
    }
    const TraceEntry* e = job.outcome.trace.find(keys[i]);
    PredictionRecord r;
    r.video_id = job.video_id;
    r.question_id = job.id + ":" + std::to_string(i);
    r.qtype = *n.qtype;
    r.children = children.get<std::vector<std::string>>();
    r.is_compositional = !r.children.empty();
    r.rule = n.rule;
    r.args = n.args;
    if (e && e->result) r.predicted = e->result->answer;
    if (e && e->failure) r.error = failure_text(*e->failure);
    nlohmann::json j = to_json(r);
    j["program"] = serialize_program(n);
    j["root"] = i + 1 == nodes.size();
    out.push_back(std::move(j));
  }
  return out;
}

int execute_batch(std::vector<Job>& jobs, const ExecuteRequest& req, const Vocabulary& vocab,
                  std::ostream& out) {
  const fs::path dir(req.out_dir);
  const fs::path trace_dir = dir / "traces";
  make_dirs(trace_dir);
  run_jobs(jobs, vocab, req.memoize, req.jobs, trace_dir);
  std::string answers;
  std::size_t failed = 0;
  for (const auto& job : jobs) {
    if (!job.program || !job.outcome.errors.empty()) ++failed;
    for (const auto& r : job_records(job)) answers += r.dump() + "\n";
  }
  write_atomic(dir / "answers.jsonl", answers);
  out << "executed " << jobs.size() << " programs, " << failed << " with errors\n";
  return kExitOk;
}

int execute_manifest(const ExecuteRequest& req, const Vocabulary& vocab, std::ostream& out) {
  const fs::path manifest(req.manifest);
  const fs::path base = manifest.parent_path();
  std::vector<nlohmann::json> rows;
  {
    std::istringstream in(read_text(manifest));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        rows.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest.string() + " line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  // Root rows carry the program and scene of their instance.
  std::vector<Job> jobs;
  std::map<std::string, std::size_t> job_of;
  std::map<std::string, SceneRepresentation> scenes;
  for (const auto& r : rows) {
    if (!r.value("root", false)) continue;
    const std::string inst = r.at("instance").get<std::string>();
    const std::string scene_rel = r.at("scene").get<std::string>();
    if (!scenes.count(scene_rel)) scenes.emplace(scene_rel, load_scene((base / scene_rel).string()));
    Job job;
    job.id = inst;
    job.video_id = r.at("video_id").get<std::string>();
    job.source = r.at("program").get<std::string>();
    job.scene = &scenes.at(scene_rel);
    try {
      job.program = parse_program(job.source, vocab);
    } catch (const ProgramError& e) {
      job.parse_error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    job_of[inst] = jobs.size();
    jobs.push_back(std::move(job));
  }
  const fs::path dir(req.out_dir);
  const fs::path trace_dir = dir / "traces";
  make_dirs(trace_dir);
  run_jobs(jobs, vocab, req.memoize, req.jobs, trace_dir);

  // Fill predictions in manifest order, keeping every other field.
  std::string answers;
  std::vector<std::vector<std::string>> keys(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].program) keys[i] = node_keys(*jobs[i].program);
  }
  for (auto r : rows) {
    const std::string inst = r.value("instance", std::string());
    auto it = job_of.find(inst);
    if (it == job_of.end()) throw FormatError("manifest row without a root: " + r.dump());
    const Job& job = jobs[it->second];
    const std::string qid = r.at("question_id").get<std::string>();
    const std::size_t k = std::stoul(qid.substr(qid.rfind(':') + 1));
    r["predicted"] = nullptr;
    r.erase("error");
    if (!job.program) {
      r["error"] = job.parse_error;
    } else if (k < keys[it->second].size()) {
      const TraceEntry* e = job.outcome.trace.find(keys[it->second][k]);
      if (e && e->result) r["predicted"] = to_json(e->result->answer);
      if (e && e->failure) r["error"] = failure_text(*e->failure);
    }
    answers += r.dump() + "\n";
  }
  write_atomic(dir / "answers.jsonl", answers);
  out << "executed " << jobs.size() << " programs from " << manifest.string() << "\n";
  return kExitOk;
}

std::vector<fs::path> scene_files(const std::string& p, std::ostream& err) {
  const fs::path path(p);
  if (!fs::exists(path)) throw IoError("no such file: " + p);
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) err << "warning: no scene files in " << p << "\n";
  return out;
}

}  // namespace

int cmd_validate(const std::vector<std::string>& paths, const Vocabulary& vocab, std::ostream& out,
                 std::ostream& err) {
  std::size_t checked = 0;
  std::size_t bad = 0;
  for (const auto& p : paths) {
    for (const auto& file : scene_files(p, err)) {
      ++checked;
      SceneRepresentation scene;
      try {
        scene = load_scene(file.string());
      } catch (const FormatError& e) {
        ++bad;
        out << file.string() << ": " << e.what() << "\n";
        continue;
      }
      const auto report = validate_scene(scene, vocab);
      if (report.violations.empty()) continue;
      ++bad;
      for (const auto& v : report.violations) {
        out << file.string() << ": " << v.location << ": " << v.message << "\n";
      }
    }
  }
  out << checked << " scenes checked, " << bad << " invalid\n";
  return bad ? kExitFailure : kExitOk;
}

int cmd_execute(const ExecuteRequest& req, const Vocabulary& vocab, std::ostream& out,
                std::ostream&) {
  if (!req.manifest.empty()) return execute_manifest(req, vocab, out);
  const SceneRepresentation scene = load_scene(req.scene);
  const std::string video_id = fs::path(req.scene).stem().string();
  std::vector<Job> jobs;
  auto add = [&](std::string source) {
    Job job;
    char id[16];
    std::snprintf(id, sizeof id, "p%05zu", jobs.size());
    job.id = id;
    job.video_id = video_id;
    job.source = std::move(source);
    job.scene = &scene;
    jobs.push_back(std::move(job));
    return &jobs.back();
  };
  if (!req.programs.empty()) {
    for (auto& line : read_program_lines(req.programs)) {
      Job* job = add(line);
      try {
        job->program = parse_program(line, vocab);
      } catch (const ProgramError& e) {
        job->parse_error = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }
  } else {
    std::istringstream in(read_text(req.questions));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      Job* job = add(line);
      try {
        job->program = question_to_program(parse_question_line(line), vocab);
      } catch (const ProgramError& e) {
        job->parse_error = std::string(to_string(e.kind())) + ": " + e.what();
      } catch (const Error& e) {
        job->parse_error = e.what();
      }
    }
  }
  return execute_batch(jobs, req, vocab, out);
}

int cmd_metrics(const MetricsRequest& req, const Vocabulary& vocab, std::ostream& out,
                std::ostream&) {
  const RecordSet records(read_records(req.predictions));
  const MetricsReport report = compute_metrics(records, default_consistency_rules(vocab));
  const std::string table = render_report(report, req.weighted_ic);
  const std::string json = report_to_json(report).dump(2) + "\n";
  if (!req.out_dir.empty()) {
    make_dirs(req.out_dir);
    write_atomic(fs::path(req.out_dir) / "report.txt", table);
    write_atomic(fs::path(req.out_dir) / "report.json", json);
  }
  out << (req.json ? json : table);
  return kExitOk;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, const Vocabulary& vocab, std::ostream& out,
              std::ostream&) {
  SynthConfig config = load_synth_config(config_path);
  if (seed) config.seed = *seed;
  config.check(vocab);
  const Corpus corpus = generate_corpus(config, vocab);
  write_corpus(corpus, out_dir);
  out << corpus.scenes.size() << " scenes, " << corpus.instances.size() << " questions\n";
  for (const auto& [t, n] : corpus.type_counts) {
    out << "  " << to_string(t) << "\t" << n;
    auto s = corpus.skipped.find(t);
    if (s != corpus.skipped.end() && s->second) out << "\t(" << s->second << " skipped)";
    out << "\n";
  }
  return kExitOk;
}

int cmd_rules(std::ostream& out) {
  out << "# rules\n";
  for (const auto& s : rule_signatures()) {
    out << s.name << "\t" << (s.args.empty() ? std::string_view("-") : s.args) << " -> " << s.output << "\t" << s.summary << "\n";
  }
  out << "\n# bindings (parent <- children)\n";
  for (const auto& b : rule_bindings()) {
    out << b.rule;
    if (!b.variant.empty()) out << "[" << b.variant << "]";
    out << "\t" << (b.parent ? std::string(to_string(*b.parent)) : std::string("internal")) << " <- (";
    for (std::size_t i = 0; i < b.children.size(); ++i) {
      if (i) out << ", ";
      for (std::size_t k = 0; k < b.children[i].size(); ++k) {
        if (k) out << "|";
        out << to_string(b.children[i][k]);
      }
    }
    out << ")\n";
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-based executor for compositional spatio-temporal question programs"};
  app.require_subcommand(1);
  std::string vocab_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("--vocab", vocab_path, "vocabulary JSON (default: built-in)");
  app.add_option("--seed", seed, "override the synthesis seed");
  app.add_option("--jobs", jobs, "worker threads for batch execution")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check scene files against the scene invariants");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths, "scene files or directories")->required();

  auto* execute = app.add_subcommand("execute", "run programs over a scene, or a corpus manifest");
  ExecuteRequest ereq;
  execute->add_option("--scene", ereq.scene, "scene JSON");
  auto* progs = execute->add_option("--programs", ereq.programs, "one program per line");
  auto* quests = execute->add_option("--questions", ereq.questions, "template question lines");
  auto* mani = execute->add_option("--manifest", ereq.manifest, "corpus manifest.jsonl");
  execute->add_option("--out", ereq.out_dir, "output directory")->required();
  execute->add_flag("--memo", ereq.memoize, "reuse cached sub-question results");
  progs->excludes(quests);
  mani->excludes(progs)->excludes(quests);

  auto* metrics = app.add_subcommand("metrics", "score prediction records");
  MetricsRequest mreq;
  metrics->add_option("predictions", mreq.predictions, "prediction records (JSON lines)")->required();
  metrics->add_option("--out", mreq.out_dir, "write report.txt and report.json here");
  metrics->add_flag("--weighted-ic", mreq.weighted_ic, "overall IC weighted by checks");
  metrics->add_flag("--json", mreq.json, "print the JSON report");

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  std::string config_path;
  std::string synth_out;
  synth->add_option("config", config_path, "synthesis config JSON")->required();
  synth->add_option("--out", synth_out, "corpus directory")->required();

  auto* rules = app.add_subcommand("rules", "print the rule registry");

  try {
    app.parse(argc, argv);
    if (*execute && ereq.manifest.empty() &&
        (ereq.scene.empty() || (ereq.programs.empty() && ereq.questions.empty()))) {
      throw CLI::ValidationError("execute", "needs --manifest, or --scene with --programs or --questions");
    }
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Vocabulary vocab = vocab_path.empty() ? Vocabulary::standard() : Vocabulary::load(vocab_path);
    if (*validate) return cmd_validate(validate_paths, vocab, out, err);
    if (*execute) {
      ereq.jobs = jobs;
      return cmd_execute(ereq, vocab, out, err);
    }
    if (*metrics) return cmd_metrics(mreq, vocab, out, err);
    if (*synth) return cmd_synth(config_path, synth_out, seed, vocab, out, err);
    if (*rules) return cmd_rules(out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace stqa
