#include "revcalc/json_io.hpp"

#include <json.hpp>
#include <sstream>

#include "revcalc/frontend.hpp"

namespace revcalc {

using ordered_json = nlohmann::ordered_json;

std::string show_store(const Store& st) {
  if (st.empty()) return "ε";
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [l, v] : st) {
    if (!first) out << ", ";
    first = false;
    out << "l" << l.value << " ↦ " << pretty(v);
  }
  out << "}";
  return out.str();
}

std::string show_local(const LocalState& L) {
  return "⟨" + show_store(L.sigma) + ", " + show_store(L.tau) + ", " + pretty(L.expr) + "⟩";
}

std::string show_state(const GlobalState& s) {
  if (s.empty()) return "ε";
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [r, L] : s) {
    if (!first) out << ", ";
    first = false;
    out << "r" << r.value << " ↦ " << show_local(L);
  }
  out << "}";
  return out.str();
}

std::string show_label(const StepLabel& l) {
  std::string out = "r" + std::to_string(l.actor.value) + ": " + rule_name(l.rule);
  if (l.allocated)
    out += (l.rule == Rule::New ? " #l" : " #r") + std::to_string(*l.allocated);
  return out;
}

std::string show_trace(const Trace& t) {
  std::ostringstream out;
  out << show_state(t.initial) << "\n";
  for (const auto& [label, state] : t.steps)
    out << "  --" << show_label(label) << "--> " << show_state(state) << "\n";
  return out.str();
}

namespace {

ordered_json store_to_json(const Store& st) {
  ordered_json out = ordered_json::array();
  for (const auto& [l, v] : st) out.push_back({l.value, pretty(v)});
  return out;
}

ordered_json state_to_json(const GlobalState& s) {
  ordered_json out = ordered_json::array();
  for (const auto& [r, L] : s) {
    ordered_json entry;
    entry["revision"] = r.value;
    entry["snapshot"] = store_to_json(L.sigma);
    entry["written"] = store_to_json(L.tau);
    entry["expr"] = pretty(L.expr);
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json trace_to_json(const Trace& t) {
  ordered_json steps = ordered_json::array();
  for (const auto& [label, state] : t.steps) {
    ordered_json entry;
    entry["rule"] = rule_name(label.rule);
    entry["actor"] = label.actor.value;
    entry["allocated"] = label.allocated ? ordered_json(*label.allocated) : ordered_json(nullptr);
    entry["state"] = state_to_json(state);
    steps.push_back(std::move(entry));
  }
  ordered_json out;
  out["initial"] = state_to_json(t.initial);
  out["steps"] = std::move(steps);
  return out;
}

std::string dump(const ordered_json& j, int indent) {
  return j.dump(indent < 0 ? -1 : indent) + "\n";
}

}  // namespace

std::string state_json(const GlobalState& s, int indent) {
  return dump(state_to_json(s), indent);
}

std::string trace_json(const Trace& t, int indent) { return dump(trace_to_json(t), indent); }

std::string exploration_json(const ExplorationResult& r, int indent) {
  auto states = [](const std::set<GlobalState>& xs) {
    ordered_json out = ordered_json::array();
    for (const GlobalState& s : xs) out.push_back(state_to_json(s));
    return out;
  };
  ordered_json out;
  out["state_count"] = r.state_count;
  out["bound_exceeded"] = r.bound_exceeded;
  out["maximal_states"] = states(r.maximal_states);
  out["terminal_values"] = states(r.terminal_values);
  out["deadlocks"] = states(r.deadlocks);
  return dump(out, indent);
}

}  // namespace revcalc
