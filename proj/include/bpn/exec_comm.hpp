#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bpn/net.hpp"

namespace bpn {

/// Raw representative of an execution before normalization.
struct FiringSequence {
  Marking start;
  std::vector<std::string> steps;
};

class InvalidSequenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CodDomMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Markings before each position: result[i] is the marking seq[i] fires in.
inline std::vector<Marking> prefix_markings(const PetriNet& net, const Marking& dom,
                                            const std::vector<std::string>& seq) {
  std::vector<Marking> ms;
  ms.reserve(seq.size() + 1);
  Marking m = dom;
  ms.push_back(m);
  for (const auto& u : seq) {
    const Transition& t = net.transition(u);
    auto rest = diff(m, t.pre);
    if (!rest)
      throw InvalidSequenceError("step " + u + " not enabled at " + m.str());
    m = *rest + t.post;
    ms.push_back(m);
  }
  return ms;
}

inline std::string seq_key(const std::vector<std::string>& seq) {
  std::string k;
  for (const auto& s : seq) {
    k += s;
    k += ';';
  }
  return k;
}

/// Adjacent firings u,v may be exchanged exactly when they are jointly
/// enabled: pre(u) + pre(v) <= marking. This is the exchange derivable from
/// the interchange law; mere validity of the swapped sequence is weaker and
/// identifies too much (two loop firings a->a from {a:1} commute sequentially
/// but are distinct composites).
inline bool exchangeable(const PetriNet& net, const Marking& before, const std::string& u,
                         const std::string& v) {
  return leq(net.transition(u).pre + net.transition(v).pre, before);
}

/// Lexicographically least member of the exchange class of seq. Explores the
/// closure with a visited set; desk-scale classes are small. Throws if the
/// class exceeds max_states.
inline std::vector<std::string> lexmin_exchange_class(const PetriNet& net, const Marking& dom,
                                                      std::vector<std::string> seq,
                                                      std::size_t max_states = 500000) {
  if (seq.size() < 2) return seq;
  std::vector<std::string> best = seq;
  std::unordered_set<std::string> visited;
  std::deque<std::vector<std::string>> frontier;
  visited.insert(seq_key(seq));
  frontier.push_back(std::move(seq));
  while (!frontier.empty()) {
    std::vector<std::string> cur = frontier.front();
    frontier.pop_front();
    if (std::lexicographical_compare(cur.begin(), cur.end(), best.begin(), best.end()))
      best = cur;
    std::vector<Marking> ms = prefix_markings(net, dom, cur);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      if (cur[i] == cur[i + 1]) continue;
      if (!exchangeable(net, ms[i], cur[i], cur[i + 1])) continue;
      std::vector<std::string> next = cur;
      std::swap(next[i], next[i + 1]);
      std::string key = seq_key(next);
      if (visited.insert(std::move(key)).second) {
        if (visited.size() > max_states)
          throw std::runtime_error("exchange class exceeds state cap");
        frontier.push_back(std::move(next));
      }
    }
  }
  return best;
}

struct LayerState {
  std::vector<Multiset> layers;       // occurrence counts per layer
  std::vector<Multiset> ins, outs;    // joint pre/post per layer
};

inline bool layers_valid(const Marking& dom, const LayerState& st) {
  Marking m = dom;
  for (std::size_t j = 0; j < st.layers.size(); ++j) {
    auto rest = diff(m, st.ins[j]);
    if (!rest) return false;
    m = *rest + st.outs[j];
  }
  return true;
}

inline void add_to_layer(const PetriNet& net, LayerState& st, std::size_t j,
                         const std::string& u) {
  const Transition& t = net.transition(u);
  st.layers[j].add(u);
  st.ins[j] = st.ins[j] + t.pre;
  st.outs[j] = st.outs[j] + t.post;
}

inline void remove_from_layer(const PetriNet& net, LayerState& st, std::size_t j,
                              const std::string& u) {
  const Transition& t = net.transition(u);
  st.layers[j] = *diff(st.layers[j], Multiset::single(u));
  st.ins[j] = *diff(st.ins[j], t.pre);
  st.outs[j] = *diff(st.outs[j], t.post);
}

/// Greedy layering of a valid sequence: each occurrence goes to the earliest
/// layer keeping the whole simultaneous replay valid, followed by a repair
/// scan so that no occurrence can move to any earlier layer (Foata form).
inline std::vector<Multiset> foata_layers(const PetriNet& net, const Marking& dom,
                                          const std::vector<std::string>& seq) {
  LayerState st;
  for (const auto& u : seq) {
    bool placed = false;
    for (std::size_t j = 0; j < st.layers.size() && !placed; ++j) {
      add_to_layer(net, st, j, u);
      if (layers_valid(dom, st))
        placed = true;
      else
        remove_from_layer(net, st, j, u);
    }
    if (!placed) {
      st.layers.emplace_back();
      st.ins.emplace_back();
      st.outs.emplace_back();
      add_to_layer(net, st, st.layers.size() - 1, u);
      if (!layers_valid(dom, st)) throw InvalidSequenceError("sequence replay failed");
    }
  }
  // Repair: later insertions can produce tokens that free earlier slots.
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t j = 1; j < st.layers.size() && !moved; ++j) {
      std::vector<std::string> names;
      for (const auto& [u, _] : st.layers[j].entries()) names.push_back(u);
      for (const auto& u : names) {
        for (std::size_t i = 0; i < j && !moved; ++i) {
          remove_from_layer(net, st, j, u);
          add_to_layer(net, st, i, u);
          if (layers_valid(dom, st)) {
            moved = true;
          } else {
            remove_from_layer(net, st, i, u);
            add_to_layer(net, st, j, u);
          }
        }
        if (moved) break;
      }
    }
    if (moved) {
      // drop layers emptied by the move
      LayerState compact;
      for (std::size_t j = 0; j < st.layers.size(); ++j)
        if (!st.layers[j].empty()) {
          compact.layers.push_back(st.layers[j]);
          compact.ins.push_back(st.ins[j]);
          compact.outs.push_back(st.outs[j]);
        }
      st = std::move(compact);
    }
  }
  return st.layers;
}

}  // namespace detail

/// Execution in the collective-token philosophy. Equality of executions is
/// decided by a canonical representative sequence: the lexicographically
/// least member of the exchange class (adjacent jointly-enabled firings
/// commute). The layered schedule is derived from it and satisfies the
/// earliest-firing property: no occurrence can move to an earlier layer and
/// keep the simultaneous replay valid.
struct CommMorphism {
  Multiset dom, cod;
  std::vector<Multiset> layers;
  std::vector<std::string> canon;  // canonical representative sequence

  std::string key() const {
    std::ostringstream oss;
    oss << dom.str() << '|';
    for (const auto& u : canon) oss << u << ';';
    return oss.str();
  }
};

inline CommMorphism comm_identity(const Multiset& m) { return {m, m, {}, {}}; }

inline CommMorphism comm_of_sequence(const PetriNet& net, const FiringSequence& seq) {
  std::vector<Marking> ms = detail::prefix_markings(net, seq.start, seq.steps);
  std::vector<std::string> canon = detail::lexmin_exchange_class(net, seq.start, seq.steps);
  return {seq.start, ms.back(), detail::foata_layers(net, seq.start, canon), canon};
}

inline bool comm_equal(const CommMorphism& f, const CommMorphism& g) {
  return f.dom == g.dom && f.cod == g.cod && f.layers == g.layers;
}

inline CommMorphism comm_compose(const PetriNet& net, const CommMorphism& f,
                                 const CommMorphism& g) {
  if (f.cod != g.dom)
    throw CodDomMismatchError("cod " + f.cod.str() + " does not match dom " + g.dom.str());
  std::vector<std::string> seq = f.canon;
  seq.insert(seq.end(), g.canon.begin(), g.canon.end());
  return comm_of_sequence(net, {f.dom, std::move(seq)});
}

inline CommMorphism comm_tensor(const PetriNet& net, const CommMorphism& f,
                                const CommMorphism& g) {
  std::vector<std::string> seq = f.canon;
  seq.insert(seq.end(), g.canon.begin(), g.canon.end());
  return comm_of_sequence(net, {f.dom + g.dom, std::move(seq)});
}

/// Multiset counting how many times each transition generator occurs.
inline Multiset chi(const CommMorphism& f) {
  Multiset out;
  for (const auto& layer : f.layers) out = out + layer;
  return out;
}

/// Simultaneous replay of a layered schedule; empty when some layer's joint
/// pre is not covered.
inline std::optional<Marking> replay_layers(const PetriNet& net, const Marking& dom,
                                            const std::vector<Multiset>& layers) {
  Marking m = dom;
  for (const auto& layer : layers) {
    Multiset in, out;
    for (const auto& [u, n] : layer.entries()) {
      const Transition& t = net.transition(u);
      in = in + scale(t.pre, n);
      out = out + scale(t.post, n);
    }
    auto rest = diff(m, in);
    if (!rest) return std::nullopt;
    m = *rest + out;
  }
  return m;
}

/// All distinct executions with the given dom and at most max_firings
/// generator occurrences, in canonical-key order.
inline std::vector<CommMorphism> enumerate_comm(const PetriNet& net, const Multiset& dom,
                                                std::size_t max_firings) {
  std::set<std::string> seen;
  std::vector<CommMorphism> out;
  std::deque<CommMorphism> frontier;
  CommMorphism id = comm_identity(dom);
  seen.insert(id.key());
  out.push_back(id);
  frontier.push_back(std::move(id));
  for (std::size_t level = 1; level <= max_firings; ++level) {
    std::deque<CommMorphism> next;
    while (!frontier.empty()) {
      CommMorphism f = std::move(frontier.front());
      frontier.pop_front();
      for (const auto& t : net.transitions()) {
        if (!leq(t.pre, f.cod)) continue;
        std::vector<std::string> seq = f.canon;
        seq.push_back(t.name);
        CommMorphism g = comm_of_sequence(net, {f.dom, std::move(seq)});
        if (seen.insert(g.key()).second) {
          out.push_back(g);
          next.push_back(std::move(g));
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(),
            [](const CommMorphism& a, const CommMorphism& b) { return a.key() < b.key(); });
  return out;
}

}  // namespace bpn
