#include "revcalc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <thread>
#include <unordered_map>

namespace revcalc {

namespace {

bool all_values(const GlobalState& s) {
  for (const auto& [r, L] : s)
    if (!is_value(L.expr)) return false;
  return true;
}

StepLabel transport(const Renaming& w, const StepLabel& l) {
  StepLabel out = l;
  out.actor = w(l.actor);
  if (l.allocated) {
    if (l.rule == Rule::New)
      out.allocated = w(LocId{*l.allocated}).value;
    else
      out.allocated = w(RevId{*l.allocated}).value;
  }
  return out;
}

// successor lists recomputed on demand, shared across the confluence pairs
class SuccCache {
 public:
  explicit SuccCache(const ExploreConfig& cfg) : cfg_(cfg) {}

  const std::vector<GlobalState>& of(const GlobalState& s) {
    auto& bucket = memo_[state_hash(s)];
    for (auto& [key, succ] : bucket)
      if (key == s) return *succ;
    auto succ = std::make_shared<std::vector<GlobalState>>();
    for (auto& [label, t] : enabled_steps(s, cfg_.mode, cfg_.alloc, cfg_.merge))
      succ->push_back(std::move(t));
    bucket.emplace_back(s, succ);
    return *bucket.back().second;
  }

 private:
  const ExploreConfig& cfg_;
  std::unordered_map<std::uint64_t,
                     std::vector<std::pair<GlobalState, std::shared_ptr<std::vector<GlobalState>>>>>
      memo_;
};

}  // namespace

Trace StateGraph::trace_to(std::uint32_t idx) const {
  std::vector<std::uint32_t> chain;
  for (std::int64_t i = idx; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
    chain.push_back(static_cast<std::uint32_t>(i));
  std::reverse(chain.begin(), chain.end());
  Trace t;
  t.initial = nodes[chain.front()].state;
  for (std::size_t k = 1; k < chain.size(); ++k)
    t.steps.emplace_back(nodes[chain[k]].via, nodes[chain[k]].state);
  return t;
}

StateGraph explore_graph(const GlobalState& s0, const ExploreConfig& cfg) {
  StateGraph g;
  g.nodes.push_back(StateGraph::Node{s0, -1, {}, 0, false, false, {}});

  // stored nodes indexed two ways: syntactic hash for exact duplicates,
  // renaming-invariant fingerprint for candidates to collapse via
  // equivalent()
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_hash;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_shape;
  by_hash[state_hash(s0)].push_back(0);
  by_shape[shape_fingerprint(s0)].push_back(0);

  std::vector<std::uint32_t> frontier{0};
  std::uint64_t depth = 0;

  while (!frontier.empty()) {
    // expansion per node is pure, so a level may fan out across workers;
    // everything order-sensitive happens in the sequential merge below,
    // which walks the frontier in index order regardless of worker count
    std::vector<std::vector<std::pair<StepLabel, GlobalState>>> expansion(frontier.size());
    auto expand = [&](std::size_t i) {
      expansion[i] = enabled_steps(g.nodes[frontier[i]].state, cfg.mode, cfg.alloc, cfg.merge);
    };
    std::size_t workers = std::min<std::size_t>(cfg.jobs ? cfg.jobs : 1, frontier.size());
    if (workers <= 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) expand(i);
    } else {
      std::atomic<std::size_t> cursor{0};
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t i = cursor.fetch_add(1); i < expansion.size();
               i = cursor.fetch_add(1))
            expand(i);
        });
      for (auto& th : pool) th.join();
    }

    std::vector<std::uint32_t> next;
    bool cut_depth = depth >= cfg.bounds.max_depth;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      std::uint32_t n = frontier[i];
      g.nodes[n].expanded = true;
      g.nodes[n].maximal = expansion[i].empty();
      if (expansion[i].empty()) continue;
      if (cut_depth) {
        // successors exist but lie beyond the per-execution bound
        g.bound_exceeded = true;
        continue;
      }
      for (auto& [label, t] : expansion[i]) {
        std::uint64_t h = state_hash(t);
        std::int64_t found = -1;
        for (std::uint32_t j : by_hash[h])
          if (g.nodes[j].state == t) {
            found = j;
            break;
          }
        if (found < 0) {
          std::uint64_t fp = shape_fingerprint(t);
          for (std::uint32_t j : by_shape[fp])
            if (equivalent(g.nodes[j].state, t)) {
              found = j;
              break;
            }
          if (found < 0) {
            if (g.nodes.size() >= cfg.bounds.max_states) {
              // out of state budget: drop the successor, cut the edge
              g.bound_exceeded = true;
              continue;
            }
            found = static_cast<std::int64_t>(g.nodes.size());
            g.nodes.push_back(StateGraph::Node{std::move(t), static_cast<std::int64_t>(n),
                                               label, g.nodes[n].depth + 1, false, false, {}});
            by_hash[h].push_back(static_cast<std::uint32_t>(found));
            by_shape[fp].push_back(static_cast<std::uint32_t>(found));
            next.push_back(static_cast<std::uint32_t>(found));
          }
        }
        g.nodes[n].out.emplace_back(label, static_cast<std::uint32_t>(found));
      }
    }
    frontier = std::move(next);
    ++depth;
  }
  return g;
}

ExplorationResult explore(const Expr& e, const ExploreConfig& cfg) {
  StateGraph g = explore_graph(initial_state(e, RevId{0}), cfg);
  ExplorationResult r;
  r.bound_exceeded = g.bound_exceeded;
  r.state_count = g.nodes.size();
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    const auto& node = g.nodes[i];
    if (!node.maximal) continue;
    r.maximal_states.insert(node.state);
    (all_values(node.state) ? r.terminal_values : r.deadlocks).insert(node.state);
    r.witness_traces.emplace(node.state, g.trace_to(i));
  }
  return r;
}

DeterminacyVerdict check_determinacy(const Expr& e, const ExploreConfig& cfg) {
  StateGraph g = explore_graph(initial_state(e, RevId{0}), cfg);
  std::vector<std::uint32_t> maximal;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].maximal) maximal.push_back(i);

  DeterminacyVerdict v;
  if (maximal.size() >= 2) {
    // stored states are pairwise non-equivalent by construction; a
    // second maximal one is therefore already a counterexample, even if a
    // bound was hit later
    std::uint32_t a = maximal[0];
    std::uint32_t b = maximal[1];
    if (equivalent(g.nodes[a].state, g.nodes[b].state))
      throw Error("check_determinacy: collapse failed to merge equivalent maximal states");
    v.kind = DeterminacyVerdict::Kind::Indeterminate;
    v.left = g.nodes[a].state;
    v.right = g.nodes[b].state;
    v.to_left = g.trace_to(a);
    v.to_right = g.trace_to(b);
  } else if (g.bound_exceeded) {
    v.kind = DeterminacyVerdict::Kind::Unknown;
  } else {
    v.kind = DeterminacyVerdict::Kind::Determinate;
  }
  return v;
}

bool check_S(const LocalState& L) {
  std::set<LocId> have = doms(L);
  for (LocId l : lid(L))
    if (!have.count(l)) return false;
  return true;
}

bool check_S_G(const GlobalState& s) {
  for (const auto& [r, L] : s)
    if (!check_S(L)) return false;
  return true;
}

bool check_A(RevId r, RevId r2, const GlobalState& s) {
  auto it = s.find(r);
  auto it2 = s.find(r2);
  if (it == s.end() || it2 == s.end())
    throw OutOfDomain("check_A: revision not mapped by the state");
  if (!rid(it->second).count(r2)) return true;  // vacuous
  std::set<LocId> have = doms(it->second);
  for (LocId l : lid(it2->second.sigma))
    if (!have.count(l)) return false;
  return true;
}

bool check_A_G(const GlobalState& s) {
  for (const auto& [r, L] : s)
    for (const auto& [r2, L2] : s)
      if (!check_A(r, r2, s)) return false;
  return true;
}

bool check_inductive_invariant(const Expr& e, const ExploreConfig& cfg, Trace* violation) {
  StateGraph g = explore_graph(initial_state(e, RevId{0}), cfg);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (check_S_G(g.nodes[i].state) && check_A_G(g.nodes[i].state)) continue;
    if (violation) *violation = g.trace_to(i);
    return false;
  }
  return true;
}

bool check_strong_local_confluence(const Expr& e, const ExploreConfig& cfg, Trace* violation) {
  StateGraph g = explore_graph(initial_state(e, RevId{0}), cfg);
  SuccCache succ(cfg);

  // s₂ and s₂′ close when some pair at most one step below each is
  // equivalent; zero further steps included
  auto closes = [&](const GlobalState& x, const GlobalState& y) {
    if (equivalent(x, y)) return true;
    for (const GlobalState& b : succ.of(y))
      if (equivalent(x, b)) return true;
    for (const GlobalState& a : succ.of(x)) {
      if (equivalent(a, y)) return true;
      for (const GlobalState& b : succ.of(y))
        if (equivalent(a, b)) return true;
    }
    return false;
  };

  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    if (!node.expanded || node.maximal) continue;
    const std::vector<GlobalState>& branches = succ.of(node.state);
    for (std::size_t i = 0; i < branches.size(); ++i)
      for (std::size_t j = i + 1; j < branches.size(); ++j)
        if (!closes(branches[i], branches[j])) {
          if (violation) *violation = g.trace_to(n);
          return false;
        }
  }
  return true;
}

bool check_mimicking(const Expr& e, const std::vector<Renaming>& renamings,
                     const ExploreConfig& cfg, Trace* violation) {
  for (const Renaming& w : renamings)
    if (!w.bijective()) throw PreconditionError("check_mimicking: renaming is not bijective");

  StateGraph g = explore_graph(initial_state(e, RevId{0}), cfg);
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    auto fail = [&] {
      if (violation) *violation = g.trace_to(n);
      return false;
    };
    for (const Renaming& w : renamings) {
      GlobalState sw = rename(w, node.state);
      auto here = enabled_steps(node.state, cfg.mode, cfg.alloc, cfg.merge);
      auto there = enabled_steps(sw, cfg.mode, cfg.alloc, cfg.merge);
      if (here.size() != there.size()) return fail();
      Renaming wi = w.inverse();
      try {
        // transporting a label through the renaming replays to exactly the
        // renamed successor, in both directions
        for (const auto& [label, t] : here)
          if (step(sw, transport(w, label), cfg.mode, cfg.merge) != rename(w, t)) return fail();
        for (const auto& [label, t] : there)
          if (step(node.state, transport(wi, label), cfg.mode, cfg.merge) != rename(wi, t))
            return fail();
      } catch (const NotEnabled&) {
        return fail();
      }
    }
  }
  return true;
}

bool check_mode_equivalence(const Expr& e, Mode a, Mode b, const ExploreConfig& cfg,
                            Trace* violation) {
  ExploreConfig ca = cfg;
  ca.mode = a;
  StateGraph g = explore_graph(initial_state(e, RevId{0}), ca);
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    auto fail = [&] {
      if (violation) *violation = g.trace_to(n);
      return false;
    };
    auto sa = enabled_steps(node.state, a, cfg.alloc, cfg.merge);
    auto sb = enabled_steps(node.state, b, cfg.alloc, cfg.merge);
    if (sa.size() != sb.size()) return fail();
    for (std::size_t i = 0; i < sa.size(); ++i) {
      if (!(sa[i].first == sb[i].first)) return fail();
      if (sa[i].second != sb[i].second && !equivalent(sa[i].second, sb[i].second)) return fail();
    }
  }
  return true;
}

}  // namespace revcalc
