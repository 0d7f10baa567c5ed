#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpn/multiset.hpp"

namespace bpn {

/// Ordered list of place names. Concatenation is the monoidal product of the
/// individual-token object monoid; the empty list is the unit.
using ObjectString = std::vector<std::string>;

inline std::string str(const ObjectString& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += s[i];
  }
  out += ']';
  return out;
}

inline ObjectString concat(const ObjectString& a, const ObjectString& b) {
  ObjectString out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Multiset to_multiset(const ObjectString& s) {
  Multiset m;
  for (const auto& sym : s) m.add(sym);
  return m;
}

/// Multiplicity-expanded, sorted by place name.
inline ObjectString sorted_expansion(const Multiset& m) {
  ObjectString out;
  for (const auto& [sym, n] : m.entries()) {
    Count k = n;
    while (k > 0) {
      out.push_back(sym);
      --k;
    }
  }
  return out;
}

struct Transition {
  std::string name;
  Multiset pre, post;
  // Orderings chosen for the generator's dom/cod in the individual-token
  // category. Sorted expansion for loaded nets; the bounding transform
  // installs its interleaved convention here.
  ObjectString pre_order, post_order;
};

class NotEnabledError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PetriNet {
 public:
  PetriNet() = default;

  PetriNet(std::vector<std::string> places, std::vector<Transition> transitions)
      : places_(std::move(places)), transitions_(std::move(transitions)) {
    std::set<std::string> seen_places(places_.begin(), places_.end());
    if (seen_places.size() != places_.size())
      throw std::invalid_argument("duplicate place name");
    std::set<std::string> seen_names;
    for (auto& t : transitions_) {
      if (!seen_names.insert(t.name).second)
        throw std::invalid_argument("duplicate transition name: " + t.name);
      for (const auto& m : {t.pre, t.post})
        for (const auto& [sym, _] : m.entries())
          if (!seen_places.count(sym))
            throw std::invalid_argument("transition " + t.name + " uses unknown place " + sym);
      if (t.pre_order.empty() && !t.pre.empty()) t.pre_order = sorted_expansion(t.pre);
      if (t.post_order.empty() && !t.post.empty()) t.post_order = sorted_expansion(t.post);
      if (to_multiset(t.pre_order) != t.pre || to_multiset(t.post_order) != t.post)
        throw std::invalid_argument("transition " + t.name + " port order mismatches multiset");
    }
  }

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  bool has_place(const std::string& p) const {
    return std::find(places_.begin(), places_.end(), p) != places_.end();
  }

  const Transition& transition(const std::string& name) const {
    for (const auto& t : transitions_)
      if (t.name == name) return t;
    throw std::invalid_argument("unknown transition: " + name);
  }

  bool has_transition(const std::string& name) const {
    for (const auto& t : transitions_)
      if (t.name == name) return true;
    return false;
  }

 private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
};

using Marking = Multiset;

inline bool enabled(const PetriNet& net, const Marking& m, const std::string& u) {
  return leq(net.transition(u).pre, m);
}

/// Marking after firing u; throws NotEnabledError if u is not enabled.
inline Marking fire(const PetriNet& net, const Marking& m, const std::string& u) {
  const Transition& t = net.transition(u);
  auto rest = diff(m, t.pre);
  if (!rest) throw NotEnabledError("transition " + u + " not enabled at " + m.str());
  return *rest + t.post;
}

struct ReachabilityGraph {
  struct Edge {
    Marking from;
    std::string transition;
    Marking to;
    bool operator<(const Edge& o) const {
      if (from != o.from) return from < o.from;
      if (transition != o.transition) return transition < o.transition;
      return to < o.to;
    }
    bool operator==(const Edge& o) const {
      return from == o.from && transition == o.transition && to == o.to;
    }
  };
  std::set<Marking> nodes;
  std::set<Edge> edges;
  bool truncated = false;     // some firing was cut off by the token bound
  bool state_capped = false;  // BPN_MAX_STATES stopped the search
  Count bound = 0;            // the token cutoff in force
};

/// BFS over firings from m0, keeping markings whose total token count does not
/// exceed max_tokens. Deterministic: node and edge sets are canonically
/// ordered. The environment variable BPN_MAX_STATES, when set, caps the number
/// of explored nodes (sets the truncated flag if hit).
inline ReachabilityGraph explore(const PetriNet& net, const Marking& m0, const Count& max_tokens) {
  if (m0.total() > max_tokens)
    throw std::invalid_argument("initial marking exceeds exploration bound");
  std::size_t max_states = 0;
  if (const char* env = std::getenv("BPN_MAX_STATES")) max_states = std::strtoull(env, nullptr, 10);

  ReachabilityGraph g;
  g.bound = max_tokens;
  std::deque<Marking> frontier;
  g.nodes.insert(m0);
  frontier.push_back(m0);
  while (!frontier.empty()) {
    Marking m = frontier.front();
    frontier.pop_front();
    for (const auto& t : net.transitions()) {
      if (!leq(t.pre, m)) continue;
      Marking next = *diff(m, t.pre) + t.post;
      if (next.total() > max_tokens) {
        g.truncated = true;
        continue;
      }
      g.edges.insert({m, t.name, next});
      if (g.nodes.insert(next).second) {
        if (max_states != 0 && g.nodes.size() > max_states) {
          g.nodes.erase(next);
          g.edges.erase({m, t.name, next});
          g.state_capped = true;
          continue;
        }
        frontier.push_back(next);
      }
    }
  }
  return g;
}

enum class Boundedness { Bounded, Unbounded, Unknown };

/// Checks whether every reachable marking keeps every place count <= k.
/// Exploration is cut off at max_tokens_override when positive, otherwise at
/// (k+1)*|places|. With the default cutoff any truncated marking already
/// violates k-boundedness by pigeonhole, so Unknown cannot occur.
inline Boundedness is_k_bounded(const PetriNet& net, const Marking& m0, const Count& k,
                                const Count& max_tokens_override = 0) {
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  Count cutoff = max_tokens_override > 0
                     ? max_tokens_override
                     : (k + 1) * Count(static_cast<unsigned>(net.places().size()));
  if (m0.max_count() > k) return Boundedness::Unbounded;
  if (m0.total() > cutoff) return Boundedness::Unknown;
  ReachabilityGraph g = explore(net, m0, cutoff);
  for (const auto& m : g.nodes)
    if (m.max_count() > k) return Boundedness::Unbounded;
  if (g.state_capped) return Boundedness::Unknown;
  if (g.truncated) {
    // With the default cutoff a cut-off successor has total more than
    // (k+1)*|places|, hence some place count exceeds k by pigeonhole.
    if (max_tokens_override == 0) return Boundedness::Unbounded;
    return Boundedness::Unknown;
  }
  return Boundedness::Bounded;
}

}  // namespace bpn
