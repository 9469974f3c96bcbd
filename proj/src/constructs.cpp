#include "snpkit/constructs.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "snpkit/errors.hpp"

namespace snpkit {

namespace {

// Tarjan strongly connected components.
struct Scc {
  std::vector<int> comp;  // neuron -> component id
  std::vector<std::vector<int>> members;
};

Scc tarjan(const SystemDescription& sys) {
  const int m = static_cast<int>(sys.neurons.size());
  Scc out;
  out.comp.assign(static_cast<size_t>(m), -1);
  std::vector<int> index(static_cast<size_t>(m), -1), low(static_cast<size_t>(m), 0);
  std::vector<char> on_stack(static_cast<size_t>(m), 0);
  std::vector<int> stack;
  int next_index = 0;

  std::function<void(int)> strongconnect = [&](int v) {
    index[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = next_index++;
    stack.push_back(v);
    on_stack[static_cast<size_t>(v)] = 1;
    for (int w : sys.out_neighbors(v)) {
      if (index[static_cast<size_t>(w)] < 0) {
        strongconnect(w);
        low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(w)]);
      } else if (on_stack[static_cast<size_t>(w)]) {
        low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], index[static_cast<size_t>(w)]);
      }
    }
    if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
      std::vector<int> comp_members;
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[static_cast<size_t>(w)] = 0;
        out.comp[static_cast<size_t>(w)] = static_cast<int>(out.members.size());
        comp_members.push_back(w);
        if (w == v) break;
      }
      std::sort(comp_members.begin(), comp_members.end());
      out.members.push_back(std::move(comp_members));
    }
  };
  for (int v = 0; v < m; ++v)
    if (index[static_cast<size_t>(v)] < 0) strongconnect(v);
  return out;
}

std::string synapse_text(const SystemDescription& sys, int f, int t) {
  return sys.neurons[static_cast<size_t>(f)].id + " -> " + sys.neurons[static_cast<size_t>(t)].id;
}

}  // namespace

RoutingGraph classify_constructs(const SystemDescription& sys) {
  RoutingGraph rg;
  Scc scc = tarjan(sys);
  auto same_cycle = [&](int f, int t) { return scc.comp[static_cast<size_t>(f)] == scc.comp[static_cast<size_t>(t)] &&
                                               scc.members[static_cast<size_t>(scc.comp[static_cast<size_t>(f)])].size() > 1; };

  std::set<std::pair<int, int>> covered;
  auto cover = [&](int f, int t) { covered.insert({f, t}); };

  // Cycles first so branch counting below can ignore cycle edges; the
  // nontrivial components must be simple cycles.
  std::vector<Construct> iterations, splits, joins, sequentials;
  for (const auto& members : scc.members) {
    if (members.size() < 2) continue;
    IterationConstruct it;
    std::set<int> mem(members.begin(), members.end());
    // each member needs exactly one successor and one predecessor inside
    for (int v : members) {
      std::vector<int> succ;
      for (int w : sys.out_neighbors(v))
        if (mem.count(w)) succ.push_back(w);
      std::vector<int> pred;
      for (int w : sys.in_neighbors(v))
        if (mem.count(w)) pred.push_back(w);
      if (succ.size() != 1 || pred.size() != 1) {
        std::string offending;
        for (int u : members)
          for (int w : sys.out_neighbors(u))
            if (mem.count(w)) offending += (offending.empty() ? "" : ", ") + synapse_text(sys, u, w);
        throw Error("unclassifiable topology: strongly connected component is not a simple cycle (" +
                    offending + ")");
      }
    }
    // walk the cycle from the smallest member
    int start = members.front();
    int v = start;
    do {
      it.cycle.push_back(v);
      int next = -1;
      for (int w : sys.out_neighbors(v))
        if (mem.count(w)) next = w;
      cover(v, next);
      v = next;
    } while (v != start);
    // taps: every edge leaving the cycle
    for (int u : members)
      for (int w : sys.out_neighbors(u))
        if (!mem.count(w)) {
          it.taps.push_back(w);
          cover(u, w);
        }
    std::sort(it.taps.begin(), it.taps.end());
    it.taps.erase(std::unique(it.taps.begin(), it.taps.end()), it.taps.end());
    iterations.emplace_back(std::move(it));
  }

  const int m = static_cast<int>(sys.neurons.size());
  // Branch points over non-cycle edges.
  for (int v = 0; v < m; ++v) {
    std::vector<int> children;
    for (int w : sys.out_neighbors(v))
      if (!same_cycle(v, w)) children.push_back(w);
    if (children.size() >= 2) {
      for (int w : children) cover(v, w);
      splits.emplace_back(SplitConstruct{v, std::move(children)});
    }
  }
  for (int v = 0; v < m; ++v) {
    std::vector<int> parents;
    for (int w : sys.in_neighbors(v))
      if (!same_cycle(w, v)) parents.push_back(w);
    if (parents.size() >= 2) {
      for (int w : parents) cover(w, v);
      std::vector<int> out;
      for (int w : sys.out_neighbors(v))
        if (!same_cycle(v, w)) out.push_back(w);
      int child = -1;
      if (out.size() == 1) {
        child = out[0];
        cover(v, child);
      }
      joins.emplace_back(JoinConstruct{std::move(parents), v, child});
    }
  }

  // Residual degree-1 chains.
  auto uncovered_out = [&](int v) {
    std::vector<int> out;
    for (int w : sys.out_neighbors(v))
      if (!covered.count({v, w})) out.push_back(w);
    return out;
  };
  auto uncovered_in = [&](int v) {
    std::vector<int> in;
    for (int w : sys.in_neighbors(v))
      if (!covered.count({w, v})) in.push_back(w);
    return in;
  };
  for (int v = 0; v < m; ++v) {
    if (uncovered_out(v).size() != 1) continue;
    if (uncovered_in(v).size() == 1) continue;  // not a chain head
    std::vector<int> path{v};
    int cur = v;
    while (true) {
      auto out = uncovered_out(cur);
      if (out.size() != 1) break;
      int next = out[0];
      cover(cur, next);
      path.push_back(next);
      if (uncovered_in(next).size() > 0) break;  // merged elsewhere; stop here
      cur = next;
    }
    sequentials.emplace_back(SequentialConstruct{std::move(path)});
  }

  for (auto& [f, t] : sys.synapses) {
    if (!covered.count({f, t}))
      throw Error("unclassifiable topology: synapse " + synapse_text(sys, f, t) +
                  " not covered by any construct");
  }

  for (auto& c : splits) rg.constructs.push_back(std::move(c));
  for (auto& c : joins) rg.constructs.push_back(std::move(c));
  for (auto& c : iterations) rg.constructs.push_back(std::move(c));
  for (auto& c : sequentials) rg.constructs.push_back(std::move(c));

  rg.selected_synapses = sys.synapses;
  std::set<int> sel;
  for (auto& [f, t] : sys.synapses) {
    sel.insert(f);
    sel.insert(t);
  }
  rg.selected_neurons.assign(sel.begin(), sel.end());
  return rg;
}

std::string construct_to_text(const SystemDescription& sys, const Construct& c) {
  auto id = [&](int i) { return sys.neurons[static_cast<size_t>(i)].id; };
  auto list = [&](const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + id(v[i]);
    return out;
  };
  std::ostringstream out;
  if (auto* s = std::get_if<SequentialConstruct>(&c)) {
    out << "sequential path=" << list(s->path);
  } else if (auto* it = std::get_if<IterationConstruct>(&c)) {
    out << "iteration cycle=" << list(it->cycle) << " taps=" << list(it->taps);
  } else if (auto* sp = std::get_if<SplitConstruct>(&c)) {
    out << "split parent=" << id(sp->parent) << " children=" << list(sp->children);
  } else if (auto* j = std::get_if<JoinConstruct>(&c)) {
    out << "join parents=" << list(j->parents) << " junction=" << id(j->junction);
    if (j->child >= 0) out << " child=" << id(j->child);
  }
  return out.str();
}

}  // namespace snpkit
