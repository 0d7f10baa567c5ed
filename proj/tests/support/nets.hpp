#pragma once

#include <random>
#include <string>
#include <vector>

#include "bpn/multiset.hpp"
#include "bpn/net.hpp"

namespace bpn::testing {

/// The running two-transition example: t1 consumes a and b producing c,
/// t2 consumes c producing two b.
inline PetriNet n0() {
  Transition t1{"t1", parse_multiset("{a:1,b:1}"), parse_multiset("{c:1}"), {}, {}};
  Transition t2{"t2", parse_multiset("{c:1}"), parse_multiset("{b:2}"), {}, {}};
  return PetriNet({"a", "b", "c"}, {t1, t2});
}

inline Marking n0_marking() { return parse_multiset("{a:1,b:1,c:1}"); }

/// Two generators f: A -> B and g: B -> C on distinct tokens; the pair of
/// composites that differ as diagrams but agree as collective executions.
inline PetriNet fg_net() {
  Transition f{"f", parse_multiset("{A:1}"), parse_multiset("{B:1}"), {}, {}};
  Transition g{"g", parse_multiset("{B:1}"), parse_multiset("{C:1}"), {}, {}};
  return PetriNet({"A", "B", "C"}, {f, g});
}

/// Anti-token example net: u1 moves p2 to p3, u2 consumes p1 and p3.
inline PetriNet knowledge_net() {
  Transition u1{"u1", parse_multiset("{p2:1}"), parse_multiset("{p3:1}"), {}, {}};
  Transition u2{"u2", parse_multiset("{p1:1,p3:1}"), Multiset{}, {}, {}};
  return PetriNet({"p1", "p2", "p3"}, {u1, u2});
}

struct RandomNetOptions {
  std::size_t max_places = 5;
  std::size_t max_transitions = 5;
  int max_weight = 3;
  // probability (out of 100) that a place participates in a given pre/post
  int arc_density = 45;
};

inline PetriNet random_net(std::mt19937_64& rng, const RandomNetOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> nplaces(1, opt.max_places);
  std::uniform_int_distribution<std::size_t> ntrans(1, opt.max_transitions);
  std::uniform_int_distribution<int> weight(1, opt.max_weight);
  std::uniform_int_distribution<int> pct(0, 99);
  std::size_t np = nplaces(rng), nt = ntrans(rng);
  std::vector<std::string> places;
  for (std::size_t i = 0; i < np; ++i) places.push_back("p" + std::to_string(i));
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < nt; ++i) {
    Multiset pre, post;
    for (const auto& p : places) {
      if (pct(rng) < opt.arc_density) pre.add(p, weight(rng));
      if (pct(rng) < opt.arc_density) post.add(p, weight(rng));
    }
    ts.push_back({"t" + std::to_string(i), pre, post, {}, {}});
  }
  return PetriNet(places, ts);
}

inline Marking random_marking(std::mt19937_64& rng, const PetriNet& net, int max_per_place = 3) {
  std::uniform_int_distribution<int> d(0, max_per_place);
  Marking m;
  for (const auto& p : net.places()) m.add(p, d(rng));
  return m;
}

/// Uniformly chosen enabled firing, if any.
inline std::optional<std::string> random_firing(std::mt19937_64& rng, const PetriNet& net,
                                                const Marking& m) {
  std::vector<std::string> enabled_names;
  for (const auto& t : net.transitions())
    if (leq(t.pre, m)) enabled_names.push_back(t.name);
  if (enabled_names.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> d(0, enabled_names.size() - 1);
  return enabled_names[d(rng)];
}

inline std::vector<std::string> random_walk(std::mt19937_64& rng, const PetriNet& net,
                                            Marking m, std::size_t max_len) {
  std::vector<std::string> steps;
  for (std::size_t i = 0; i < max_len; ++i) {
    auto u = random_firing(rng, net, m);
    if (!u) break;
    steps.push_back(*u);
    m = fire(net, m, *u);
  }
  return steps;
}

}  // namespace bpn::testing
