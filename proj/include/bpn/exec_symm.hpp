#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpn/net.hpp"

namespace bpn {

class InterfaceMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Execution in the individual-token philosophy: an acyclic port graph with
/// ordered interfaces. Boxes are transition occurrences, wires are tokens.
/// Box ids are local bookkeeping and never part of equality; symmetries are
/// pure rewirings with no boxes.
struct Diagram {
  struct Endpoint {
    enum class Kind : std::uint8_t { DiagIn, DiagOut, BoxIn, BoxOut };
    Kind kind;
    int box;   // -1 for interface endpoints
    int port;  // interface position or box port index

    bool operator==(const Endpoint& o) const {
      return kind == o.kind && box == o.box && port == o.port;
    }
    bool operator<(const Endpoint& o) const {
      if (kind != o.kind) return kind < o.kind;
      if (box != o.box) return box < o.box;
      return port < o.port;
    }
  };
  struct Box {
    std::string name;
    ObjectString in_ports, out_ports;
    bool operator==(const Box& o) const {
      return name == o.name && in_ports == o.in_ports && out_ports == o.out_ports;
    }
  };
  struct Wire {
    Endpoint from;  // DiagIn or BoxOut
    Endpoint to;    // DiagOut or BoxIn
    bool operator<(const Wire& o) const {
      if (!(from == o.from)) return from < o.from;
      return to < o.to;
    }
  };

  ObjectString inputs, outputs;
  std::vector<Box> boxes;
  std::vector<Wire> wires;

  std::string label(const Endpoint& e) const {
    switch (e.kind) {
      case Endpoint::Kind::DiagIn: return inputs.at(e.port);
      case Endpoint::Kind::DiagOut: return outputs.at(e.port);
      case Endpoint::Kind::BoxIn: return boxes.at(e.box).in_ports.at(e.port);
      case Endpoint::Kind::BoxOut: return boxes.at(e.box).out_ports.at(e.port);
    }
    throw std::logic_error("bad endpoint");
  }
};

namespace detail {

using EP = Diagram::Endpoint;

inline EP diag_in(int i) { return {EP::Kind::DiagIn, -1, i}; }
inline EP diag_out(int i) { return {EP::Kind::DiagOut, -1, i}; }
inline EP box_in(int b, int p) { return {EP::Kind::BoxIn, b, p}; }
inline EP box_out(int b, int p) { return {EP::Kind::BoxOut, b, p}; }

/// Structural validity: label-preserving bijective wiring, acyclic box graph.
inline void check_diagram(const Diagram& d) {
  std::set<EP> froms, tos;
  for (const auto& w : d.wires) {
    if (w.from.kind != EP::Kind::DiagIn && w.from.kind != EP::Kind::BoxOut)
      throw std::logic_error("wire source must be a diagram input or box output");
    if (w.to.kind != EP::Kind::DiagOut && w.to.kind != EP::Kind::BoxIn)
      throw std::logic_error("wire sink must be a diagram output or box input");
    if (d.label(w.from) != d.label(w.to))
      throw std::logic_error("wire labels mismatch: " + d.label(w.from) + " vs " + d.label(w.to));
    if (!froms.insert(w.from).second) throw std::logic_error("duplicate wire source");
    if (!tos.insert(w.to).second) throw std::logic_error("duplicate wire sink");
  }
  std::size_t expected = d.inputs.size();
  for (const auto& b : d.boxes) expected += b.out_ports.size();
  if (froms.size() != expected) throw std::logic_error("unmatched wire sources");
  std::size_t expected_to = d.outputs.size();
  for (const auto& b : d.boxes) expected_to += b.in_ports.size();
  if (tos.size() != expected_to) throw std::logic_error("unmatched wire sinks");

  // acyclicity of the induced box graph
  std::vector<std::vector<int>> succ(d.boxes.size());
  for (const auto& w : d.wires)
    if (w.from.kind == EP::Kind::BoxOut && w.to.kind == EP::Kind::BoxIn)
      succ[w.from.box].push_back(w.to.box);
  std::vector<int> state(d.boxes.size(), 0);
  std::function<void(int)> visit = [&](int b) {
    if (state[b] == 1) throw std::logic_error("cyclic wiring between boxes");
    if (state[b] == 2) return;
    state[b] = 1;
    for (int s : succ[b]) visit(s);
    state[b] = 2;
  };
  for (std::size_t b = 0; b < d.boxes.size(); ++b) visit(static_cast<int>(b));
}

inline std::string ep_token(const EP& e, const std::vector<int>& box_rank) {
  std::ostringstream oss;
  switch (e.kind) {
    case EP::Kind::DiagIn: oss << "i" << e.port; break;
    case EP::Kind::DiagOut: oss << "o" << e.port; break;
    case EP::Kind::BoxIn: oss << "b" << box_rank[e.box] << "." << e.port; break;
    case EP::Kind::BoxOut: oss << "p" << box_rank[e.box] << "." << e.port; break;
  }
  return oss.str();
}

inline std::string serialize_with_order(const Diagram& d, const std::vector<int>& box_rank) {
  std::vector<int> order(d.boxes.size());
  for (std::size_t b = 0; b < d.boxes.size(); ++b) order[box_rank[b]] = static_cast<int>(b);
  std::ostringstream oss;
  oss << "I" << str(d.inputs) << "O" << str(d.outputs) << "B[";
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r) oss << ',';
    oss << d.boxes[order[r]].name;
  }
  oss << "]W[";
  std::vector<std::string> ws;
  ws.reserve(d.wires.size());
  for (const auto& w : d.wires)
    ws.push_back(ep_token(w.from, box_rank) + ">" + ep_token(w.to, box_rank));
  std::sort(ws.begin(), ws.end());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) oss << ',';
    oss << ws[i];
  }
  oss << ']';
  return oss.str();
}

/// Canonical labeling by iterative refinement with individualization
/// backtracking; interface positions are rigid anchors. Returns the minimum
/// serialization over admissible box orders.
inline std::string canonical_key(const Diagram& d) {
  const std::size_t n = d.boxes.size();
  if (n == 0) {
    return serialize_with_order(d, {});
  }
  // per-box neighbor structure, precomputed
  std::vector<std::vector<EP>> in_src(n), out_snk(n);
  for (std::size_t b = 0; b < n; ++b) {
    in_src[b].resize(d.boxes[b].in_ports.size());
    out_snk[b].resize(d.boxes[b].out_ports.size());
  }
  for (const auto& w : d.wires) {
    if (w.to.kind == EP::Kind::BoxIn) in_src[w.to.box][w.to.port] = w.from;
    if (w.from.kind == EP::Kind::BoxOut) out_snk[w.from.box][w.from.port] = w.to;
  }

  auto refine = [&](std::vector<std::string> colors) {
    while (true) {
      std::vector<std::string> sig(n);
      for (std::size_t b = 0; b < n; ++b) {
        std::ostringstream oss;
        oss << colors[b] << '#' << d.boxes[b].name << '<';
        for (const auto& src : in_src[b]) {
          if (src.kind == EP::Kind::DiagIn)
            oss << 'D' << src.port << ';';
          else
            oss << 'S' << colors[src.box] << '.' << src.port << ';';
        }
        oss << "><";
        for (const auto& snk : out_snk[b]) {
          if (snk.kind == EP::Kind::DiagOut)
            oss << 'E' << snk.port << ';';
          else
            oss << 'T' << colors[snk.box] << '.' << snk.port << ';';
        }
        oss << '>';
        sig[b] = oss.str();
      }
      std::vector<std::string> sorted = sig;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      std::vector<std::string> next(n);
      for (std::size_t b = 0; b < n; ++b) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), sig[b]);
        next[b] = std::to_string(it - sorted.begin());
      }
      if (next == colors) return colors;
      colors = std::move(next);
    }
  };

  std::string best;
  std::function<void(std::vector<std::string>)> search = [&](std::vector<std::string> colors) {
    colors = refine(std::move(colors));
    // group boxes by color
    std::map<std::string, std::vector<int>> classes;
    for (std::size_t b = 0; b < n; ++b) classes[colors[b]].push_back(static_cast<int>(b));
    // find first class (in color order, colors are numeric strings) with >1
    const std::vector<int>* split = nullptr;
    std::vector<std::pair<long, const std::vector<int>*>> ranked;
    for (const auto& [c, members] : classes) ranked.push_back({std::stol(c), &members});
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [_, members] : ranked)
      if (members->size() > 1) {
        split = members;
        break;
      }
    if (!split) {
      std::vector<int> rank(n);
      std::vector<std::pair<long, int>> by_color;
      for (std::size_t b = 0; b < n; ++b) by_color.push_back({std::stol(colors[b]), static_cast<int>(b)});
      std::sort(by_color.begin(), by_color.end());
      for (std::size_t r = 0; r < n; ++r) rank[by_color[r].second] = static_cast<int>(r);
      std::string s = serialize_with_order(d, rank);
      if (best.empty() || s < best) best = s;
      return;
    }
    for (int b : *split) {
      std::vector<std::string> branched = colors;
      branched[b] = "-1";  // individualize: sorts before all refined ranks
      search(std::move(branched));
    }
  };

  std::vector<std::string> init(n, "0");
  search(std::move(init));
  return best;
}

}  // namespace detail

inline Diagram sym_identity(const ObjectString& s) {
  Diagram d;
  d.inputs = s;
  d.outputs = s;
  for (std::size_t i = 0; i < s.size(); ++i)
    d.wires.push_back({detail::diag_in(static_cast<int>(i)), detail::diag_out(static_cast<int>(i))});
  return d;
}

/// Block swap: inputs s.t, outputs t.s.
inline Diagram sym_symmetry(const ObjectString& s, const ObjectString& t) {
  Diagram d;
  d.inputs = concat(s, t);
  d.outputs = concat(t, s);
  const int ns = static_cast<int>(s.size()), nt = static_cast<int>(t.size());
  for (int i = 0; i < ns; ++i) d.wires.push_back({detail::diag_in(i), detail::diag_out(nt + i)});
  for (int j = 0; j < nt; ++j) d.wires.push_back({detail::diag_in(ns + j), detail::diag_out(j)});
  return d;
}

/// Arbitrary relabel-preserving rewiring: outputs[perm[i]] = inputs[i].
inline Diagram sym_permutation(const ObjectString& s, const std::vector<int>& perm) {
  Diagram d;
  d.inputs = s;
  d.outputs.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) d.outputs[perm[i]] = s[i];
  for (std::size_t i = 0; i < s.size(); ++i)
    d.wires.push_back({detail::diag_in(static_cast<int>(i)), detail::diag_out(perm[i])});
  return d;
}

inline Diagram sym_generator(const PetriNet& net, const std::string& u) {
  const Transition& t = net.transition(u);
  Diagram d;
  d.inputs = t.pre_order;
  d.outputs = t.post_order;
  d.boxes.push_back({t.name, t.pre_order, t.post_order});
  for (std::size_t i = 0; i < t.pre_order.size(); ++i)
    d.wires.push_back({detail::diag_in(static_cast<int>(i)), detail::box_in(0, static_cast<int>(i))});
  for (std::size_t j = 0; j < t.post_order.size(); ++j)
    d.wires.push_back({detail::box_out(0, static_cast<int>(j)), detail::diag_out(static_cast<int>(j))});
  return d;
}

/// Vertical composition: glue f's output interface to g's input interface.
inline Diagram sym_compose(const Diagram& f, const Diagram& g) {
  if (f.outputs != g.inputs)
    throw InterfaceMismatchError("cannot compose: " + str(f.outputs) + " vs " + str(g.inputs));
  using detail::EP;
  Diagram d;
  d.inputs = f.inputs;
  d.outputs = g.outputs;
  d.boxes = f.boxes;
  const int off = static_cast<int>(f.boxes.size());
  for (const auto& b : g.boxes) d.boxes.push_back(b);

  // where does g route its input position i?
  std::vector<EP> g_in_sink(g.inputs.size());
  for (const auto& w : g.wires)
    if (w.from.kind == EP::Kind::DiagIn) g_in_sink[w.from.port] = w.to;

  auto shift_g = [&](EP e) {
    if (e.kind == EP::Kind::BoxIn || e.kind == EP::Kind::BoxOut) e.box += off;
    return e;
  };
  for (const auto& w : f.wires) {
    if (w.to.kind == EP::Kind::DiagOut)
      d.wires.push_back({w.from, shift_g(g_in_sink[w.to.port])});
    else
      d.wires.push_back(w);
  }
  for (const auto& w : g.wires)
    if (w.from.kind != EP::Kind::DiagIn) d.wires.push_back({shift_g(w.from), shift_g(w.to)});
  detail::check_diagram(d);
  return d;
}

/// Horizontal composition: interfaces concatenated, parts side by side.
inline Diagram sym_tensor(const Diagram& f, const Diagram& g) {
  using detail::EP;
  Diagram d;
  d.inputs = concat(f.inputs, g.inputs);
  d.outputs = concat(f.outputs, g.outputs);
  d.boxes = f.boxes;
  const int off = static_cast<int>(f.boxes.size());
  for (const auto& b : g.boxes) d.boxes.push_back(b);
  const int in_off = static_cast<int>(f.inputs.size());
  const int out_off = static_cast<int>(f.outputs.size());
  auto shift = [&](EP e) {
    switch (e.kind) {
      case EP::Kind::DiagIn: e.port += in_off; break;
      case EP::Kind::DiagOut: e.port += out_off; break;
      default: e.box += off; break;
    }
    return e;
  };
  d.wires = f.wires;
  for (const auto& w : g.wires) d.wires.push_back({shift(w.from), shift(w.to)});
  detail::check_diagram(d);
  return d;
}

/// Canonical serialization; equal strings exactly for equal morphisms of the
/// free symmetric category (interfaces fixed, boxes matched up to relabeling).
inline std::string sym_key(const Diagram& d) { return detail::canonical_key(d); }

inline bool sym_equal(const Diagram& f, const Diagram& g) {
  if (f.inputs != g.inputs || f.outputs != g.outputs) return false;
  if (f.boxes.size() != g.boxes.size() || f.wires.size() != g.wires.size()) return false;
  return sym_key(f) == sym_key(g);
}

inline Multiset chi_sym(const Diagram& f) {
  Multiset out;
  for (const auto& b : f.boxes) out.add(b.name);
  return out;
}

namespace detail {

inline std::vector<std::vector<int>> all_permutations(std::size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

}  // namespace detail

/// All iso-classes of diagrams with the given input string and at most
/// max_boxes boxes, each reported once, in canonical-key order.
inline std::vector<Diagram> enumerate_sym(const PetriNet& net, const ObjectString& dom,
                                          std::size_t max_boxes) {
  std::map<std::string, Diagram> seen;
  std::deque<Diagram> frontier;
  for (const auto& perm : detail::all_permutations(dom.size())) {
    Diagram d = sym_permutation(dom, perm);
    if (seen.emplace(sym_key(d), d).second) frontier.push_back(d);
  }
  for (std::size_t level = 1; level <= max_boxes; ++level) {
    std::deque<Diagram> next;
    while (!frontier.empty()) {
      Diagram d = std::move(frontier.front());
      frontier.pop_front();
      for (const auto& t : net.transitions()) {
        const ObjectString& s = t.pre_order;
        if (s.size() > d.outputs.size()) continue;
        for (std::size_t p = 0; p + s.size() <= d.outputs.size(); ++p) {
          if (!std::equal(s.begin(), s.end(), d.outputs.begin() + p)) continue;
          ObjectString left(d.outputs.begin(), d.outputs.begin() + p);
          ObjectString right(d.outputs.begin() + p + s.size(), d.outputs.end());
          Diagram step = sym_tensor(sym_tensor(sym_identity(left), sym_generator(net, t.name)),
                                    sym_identity(right));
          Diagram e = sym_compose(d, step);
          for (const auto& perm : detail::all_permutations(e.outputs.size())) {
            Diagram candidate = sym_compose(e, sym_permutation(e.outputs, perm));
            if (seen.emplace(sym_key(candidate), candidate).second) next.push_back(candidate);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<Diagram> out;
  out.reserve(seen.size());
  for (auto& [_, d] : seen) out.push_back(std::move(d));
  return out;
}

}  // namespace bpn
