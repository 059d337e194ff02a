// Command-line front door: parse a .rev program and run, explore, check,
// audit, or draw it. Exit codes are part of the interface:
//
//   0  success; run: final state is all values; check: determinate
//   1  usage, I/O, parse, or validation failure
//   2  run: deadlock (no rule applies, some expression is not a value)
//   3  run: the global state collapsed to ε
//   4  bounds exceeded (run/diagram), verdict unknown (check)
//   5  check: indeterminate
//   6  audit: some invariant check failed

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "revcalc/analysis.hpp"
#include "revcalc/frontend.hpp"
#include "revcalc/json_io.hpp"

using namespace revcalc;

namespace {

struct Options {
  std::string file;
  std::string mode = "conservative";
  std::string alloc = "canonical";
  std::string merge = "versioned";
  std::string format = "text";
  std::string out;
  std::uint64_t depth = Bounds{}.max_depth;
  std::uint64_t states = Bounds{}.max_states;
  unsigned jobs = 1;
  bool strict = false;
};

void add_common(CLI::App* cmd, Options& o, bool with_format) {
  cmd->add_option("file", o.file, "program file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mode", o.mode, "side-condition reading")
      ->check(CLI::IsMember({"conservative", "relaxed", "weak-fork"}))
      ->capture_default_str();
  cmd->add_option("--alloc", o.alloc, "identifier allocation: canonical or arbitrary:SEED")
      ->capture_default_str();
  cmd->add_option("--merge", o.merge, "join merge policy")
      ->check(CLI::IsMember({"versioned", "cumulative"}))
      ->capture_default_str();
  cmd->add_option("--depth", o.depth, "max transitions along one execution")
      ->capture_default_str();
  cmd->add_option("--states", o.states, "max distinct states kept")->capture_default_str();
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_flag("--strict", o.strict,
                "core grammar only: reject integer literals and '+'");
  if (with_format)
    cmd->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"text", "json", "dot"}))
        ->capture_default_str();
}

ExploreConfig to_config(const Options& o) {
  ExploreConfig cfg;
  if (o.mode == "relaxed")
    cfg.mode = Mode::Relaxed;
  else if (o.mode == "weak-fork")
    cfg.mode = Mode::WeakFork;
  if (o.alloc != "canonical") {
    const std::string prefix = "arbitrary:";
    if (o.alloc.rfind(prefix, 0) != 0)
      throw Error("--alloc must be 'canonical' or 'arbitrary:SEED', got '" + o.alloc + "'");
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(o.alloc.substr(prefix.size()), &used);
      if (used != o.alloc.size() - prefix.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error("--alloc seed is not a number: '" + o.alloc + "'");
    }
    cfg.alloc = AllocPolicy::arbitrary(seed);
  }
  if (o.merge == "cumulative") {
    if (o.strict) throw Error("--merge cumulative needs the integer extension; drop --strict");
    cfg.merge = MergePolicy::cumulative();
  }
  cfg.bounds.max_depth = o.depth;
  cfg.bounds.max_states = o.states;
  cfg.jobs = o.jobs;
  return cfg;
}

Expr load_program(const Options& o) {
  std::ifstream f(o.file, std::ios::binary);
  if (!f) throw Error("cannot read " + o.file);
  std::ostringstream src;
  src << f.rdbuf();
  // integer literals are on by default here so the bundled programs run
  // unflagged; --strict restores the four-value core grammar
  return parse(src.str(), ParseOptions{.integers = !o.strict}).expr;
}

int emit(const Options& o, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    return 0;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << o.out << "\n";
    return 1;
  }
  f << payload;
  return 0;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool all_values(const GlobalState& s) {
  for (const auto& [r, L] : s)
    if (!is_value(L.expr)) return false;
  return true;
}

int cmd_run(const Options& o) {
  ExploreConfig cfg = to_config(o);
  GlobalState s = initial_state(load_program(o), RevId{0});
  Trace t{s, {}};
  bool bounded = false;
  for (std::uint64_t k = 0;; ++k) {
    auto steps = enabled_steps(s, cfg.mode, cfg.alloc, cfg.merge);
    if (steps.empty()) break;
    if (k >= cfg.bounds.max_depth) {
      bounded = true;
      break;
    }
    // canonical scheduling takes the first enabled step; a seeded policy
    // also draws the schedule from the seed so distinct seeds can land in
    // distinct branches
    std::size_t i = 0;
    if (cfg.alloc.kind == AllocPolicy::Kind::Arbitrary)
      i = static_cast<std::size_t>(mix64(cfg.alloc.seed ^ state_hash(s) ^ k) % steps.size());
    t.steps.push_back(steps[i]);
    s = std::move(steps[i].second);
  }

  std::string payload;
  if (o.format == "json")
    payload = trace_json(t, 2);
  else if (o.format == "dot")
    payload = emit_revision_diagram(t);
  else
    payload = show_state(s) + "\n";

  int code = bounded ? 4 : s.empty() ? 3 : all_values(s) ? 0 : 2;
  if (bounded)
    std::cerr << "note: stopped after " << t.steps.size() << " steps with work remaining\n";
  else if (code == 2)
    std::cerr << "note: deadlock, no rule applies\n";
  else if (code == 3)
    std::cerr << "note: the joiner erased itself, global state is ε\n";
  int io = emit(o, payload);
  return io ? io : code;
}

int cmd_check(const Options& o) {
  ExploreConfig cfg = to_config(o);
  DeterminacyVerdict v = check_determinacy(load_program(o), cfg);

  std::string payload;
  if (o.format == "json") {
    nlohmann::ordered_json j;
    switch (v.kind) {
      case DeterminacyVerdict::Kind::Determinate: j["verdict"] = "determinate"; break;
      case DeterminacyVerdict::Kind::Indeterminate: j["verdict"] = "indeterminate"; break;
      case DeterminacyVerdict::Kind::Unknown: j["verdict"] = "unknown"; break;
    }
    if (v.kind == DeterminacyVerdict::Kind::Indeterminate) {
      j["witnesses"] = {nlohmann::ordered_json::parse(trace_json(v.to_left)),
                        nlohmann::ordered_json::parse(trace_json(v.to_right))};
      j["not_equivalent"] = {show_state(v.left), show_state(v.right)};
    }
    payload = j.dump(2) + "\n";
  } else {
    std::ostringstream out;
    switch (v.kind) {
      case DeterminacyVerdict::Kind::Determinate:
        out << "verdict: determinate\n";
        break;
      case DeterminacyVerdict::Kind::Unknown:
        out << "verdict: unknown (bounds exceeded before the space closed)\n";
        break;
      case DeterminacyVerdict::Kind::Indeterminate:
        out << "verdict: indeterminate\n";
        out << "witness A:\n" << show_trace(v.to_left);
        out << "witness B:\n" << show_trace(v.to_right);
        out << "no renaming relates " << show_state(v.left) << " and " << show_state(v.right)
            << "\n";
        break;
    }
    payload = out.str();
  }

  int code = v.kind == DeterminacyVerdict::Kind::Determinate   ? 0
             : v.kind == DeterminacyVerdict::Kind::Indeterminate ? 5
                                                                 : 4;
  int io = emit(o, payload);
  return io ? io : code;
}

int cmd_explore(const Options& o) {
  ExploreConfig cfg = to_config(o);
  ExplorationResult r = explore(load_program(o), cfg);

  std::string payload;
  if (o.format == "json") {
    payload = exploration_json(r, 2);
  } else {
    std::ostringstream out;
    out << "states explored: " << r.state_count << "\n";
    out << "bound exceeded: " << (r.bound_exceeded ? "yes" : "no") << "\n";
    out << "maximal states: " << r.maximal_states.size() << "\n";
    for (const GlobalState& s : r.maximal_states)
      out << (r.terminal_values.count(s) ? "  terminal: " : "  deadlock: ") << show_state(s)
          << "\n";
    payload = out.str();
  }
  int io = emit(o, payload);
  return io ? io : 0;
}

int cmd_audit(const Options& o) {
  ExploreConfig cfg = to_config(o);
  Expr e = load_program(o);

  // a fixed battery of swaps: identifiers the programs allocate early,
  // plus ones no bounded run ever touches
  std::vector<Renaming> swaps = {
      Renaming::identity(),          Renaming::swap_revs(RevId{0}, RevId{1}),
      Renaming::swap_revs(RevId{1}, RevId{2}), Renaming::swap_revs(RevId{1}, RevId{7}),
      Renaming::swap_locs(LocId{0}, LocId{1}), Renaming::swap_locs(LocId{0}, LocId{5}),
      Renaming::swap_locs(LocId{2}, LocId{9}),
  };

  ExplorationResult r = explore(e, cfg);
  std::ostringstream out;
  out << "states explored: " << r.state_count << "\n";
  if (r.bound_exceeded)
    out << "note: bounds exceeded, the audit covers the explored prefix\n";

  struct Check {
    const char* name;
    std::function<bool(Trace*)> run;
  };
  const Check checks[] = {
      {"store subsumption and snapshot access",
       [&](Trace* t) { return check_inductive_invariant(e, cfg, t); }},
      {"conservative/relaxed step agreement",
       [&](Trace* t) { return check_mode_equivalence(e, Mode::Conservative, Mode::Relaxed, cfg, t); }},
      {"renaming commutation",
       [&](Trace* t) { return check_mimicking(e, swaps, cfg, t); }},
      {"strong local confluence",
       [&](Trace* t) { return check_strong_local_confluence(e, cfg, t); }},
  };

  int failures = 0;
  for (const Check& c : checks) {
    Trace bad;
    bool ok = c.run(&bad);
    out << (ok ? "pass: " : "FAIL: ") << c.name << "\n";
    if (!ok) {
      ++failures;
      out << trace_json(bad, 2);
    }
  }
  out << (failures ? "audit: " + std::to_string(failures) + " check(s) failed\n"
                   : "audit: all checks passed\n");

  int io = emit(o, out.str());
  return io ? io : failures ? 6 : 0;
}

int cmd_diagram(const Options& o) {
  ExploreConfig cfg = to_config(o);
  ExplorationResult r = explore(load_program(o), cfg);
  if (r.witness_traces.empty()) {
    std::cerr << "error: no maximal execution within the bounds\n";
    return 4;
  }
  int io = emit(o, emit_revision_diagram(r.witness_traces.begin()->second));
  return io ? io : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"revcalc: execute and analyse revision-calculus programs"};
  app.require_subcommand(1);

  Options o;
  CLI::App* run = app.add_subcommand("run", "evaluate one maximal execution");
  CLI::App* check = app.add_subcommand("check", "decide determinacy up to renaming");
  CLI::App* explore_cmd = app.add_subcommand("explore", "enumerate the reachable state space");
  CLI::App* audit = app.add_subcommand("audit", "run the invariant checkers");
  CLI::App* diagram = app.add_subcommand("diagram", "DOT revision diagram of one execution");
  add_common(run, o, true);
  add_common(check, o, true);
  add_common(explore_cmd, o, true);
  add_common(audit, o, false);
  add_common(diagram, o, false);
  for (CLI::App* cmd : {check, explore_cmd, audit, diagram})
    cmd->add_option("--jobs", o.jobs, "worker threads for exploration")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help and version are successes, misuse is 1
  }

  try {
    if (o.format == "dot" && !run->parsed())
      throw Error("--format dot only applies to 'run' (see 'diagram')");
    if (run->parsed()) return cmd_run(o);
    if (check->parsed()) return cmd_check(o);
    if (explore_cmd->parsed()) return cmd_explore(o);
    if (audit->parsed()) return cmd_audit(o);
    return cmd_diagram(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
