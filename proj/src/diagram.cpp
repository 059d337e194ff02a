#include <map>
#include <sstream>

#include "revcalc/analysis.hpp"

namespace revcalc {

namespace {

std::string node_name(RevId r, std::uint32_t k) {
  return "r" + std::to_string(r.value) + "_" + std::to_string(k);
}

}  // namespace

std::string emit_revision_diagram(const Trace& t) {
  // `count` numbers each revision's nodes; an identifier revived by a
  // reusing fork keeps counting where it left off, so names stay unique
  std::map<RevId, std::uint32_t> count;
  std::map<RevId, std::string> tip;  // chain end per live revision
  std::vector<std::string> body;

  auto add_node = [&](RevId r, std::uint32_t k, const std::string& label) {
    std::string name = node_name(r, k);
    body.push_back("  " + name + " [label=\"" + label + "\"];");
    return name;
  };
  auto head_of = [&](RevId r) {
    std::uint32_t k = 0;
    auto it = count.find(r);
    if (it != count.end()) k = ++it->second;
    else count[r] = 0;
    return add_node(r, k, "r" + std::to_string(r.value));
  };

  for (const auto& [r, L] : t.initial) tip[r] = head_of(r);

  const GlobalState* prev = &t.initial;
  for (const auto& [label, state] : t.steps) {
    RevId actor = label.actor;
    bool eps = label.rule == Rule::JoinEps;
    std::string name =
        add_node(actor, ++count[actor], eps ? "ε-collapse" : rule_name(label.rule));
    body.push_back("  " + tip[actor] + " -> " + name + ";");

    if (label.rule == Rule::Fork) {
      RevId child{*label.allocated};
      tip[child] = head_of(child);
      body.push_back("  " + name + " -> " + tip[child] + " [style=dotted];");
    } else if (label.rule == Rule::Join) {
      // the joined revision is read off the redex of the pre-step state
      auto d = decompose(prev->at(actor).expr);
      RevId joinee = d->redex.inner().rev();
      body.push_back("  " + tip[joinee] + " -> " + name + " [style=dotted];");
      tip.erase(joinee);
    }
    tip[actor] = name;
    prev = &state;
  }

  std::ostringstream out;
  out << "digraph revisions {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (const std::string& line : body) out << line << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace revcalc
