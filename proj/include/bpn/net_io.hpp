#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "bpn/bounding.hpp"
#include "bpn/exec_symm.hpp"
#include "bpn/net.hpp"

namespace bpn {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetFile {
  PetriNet net;
  std::optional<Marking> marking;
};

namespace detail {

inline Multiset multiset_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object of counts");
  Multiset out;
  for (const auto& [sym, v] : j.items()) {
    if (v.is_number_unsigned()) {
      out.add(sym, Count(v.get<std::uint64_t>()));
    } else if (v.is_string()) {
      out.add(sym, Count(v.get<std::string>()));
    } else {
      throw ParseError(where + ": count of " + sym + " must be a non-negative integer");
    }
  }
  return out;
}

inline nlohmann::json multiset_to_json(const Multiset& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [sym, n] : m.entries()) {
    if (n <= Count(std::numeric_limits<std::uint64_t>::max()))
      j[sym] = static_cast<std::uint64_t>(n);
    else
      j[sym] = n.str();
  }
  return j;
}

}  // namespace detail

/// Parses the net file format: a JSON object with `places`, `transitions`
/// (each {name, in, out}) and an optional `marking`. Place names ending in
/// the reserved anti-place suffixes are rejected unless allow_signed is set
/// (bounded nets written by this library use them).
inline NetFile load_net(const std::string& text, bool allow_signed = false) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("net file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("net file: top level must be an object");
  if (!j.contains("places") || !j["places"].is_array())
    throw ParseError("net file: missing places array");
  std::vector<std::string> places;
  for (const auto& p : j["places"]) {
    if (!p.is_string()) throw ParseError("net file: place names must be strings");
    places.push_back(p.get<std::string>());
    if (!allow_signed && has_signed_suffix(places.back()))
      throw ParseError("net file: place name '" + places.back() +
                       "' uses a reserved +/- suffix");
  }
  std::vector<Transition> transitions;
  if (j.contains("transitions")) {
    if (!j["transitions"].is_array()) throw ParseError("net file: transitions must be an array");
    for (const auto& t : j["transitions"]) {
      if (!t.is_object() || !t.contains("name") || !t["name"].is_string())
        throw ParseError("net file: each transition needs a name");
      Transition tr;
      tr.name = t["name"].get<std::string>();
      if (t.contains("in")) tr.pre = detail::multiset_from_json(t["in"], "transition " + tr.name);
      if (t.contains("out"))
        tr.post = detail::multiset_from_json(t["out"], "transition " + tr.name);
      transitions.push_back(std::move(tr));
    }
  }
  NetFile out;
  try {
    out.net = PetriNet(std::move(places), std::move(transitions));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("net file: ") + e.what());
  }
  if (j.contains("marking")) {
    Marking m = detail::multiset_from_json(j["marking"], "marking");
    for (const auto& [sym, _] : m.entries())
      if (!out.net.has_place(sym)) throw ParseError("marking uses unknown place " + sym);
    out.marking = std::move(m);
  }
  return out;
}

inline std::string save_net(const PetriNet& net,
                            const std::optional<Marking>& marking = std::nullopt) {
  nlohmann::json j;
  j["places"] = net.places();
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : net.transitions()) {
    nlohmann::json tj;
    tj["name"] = t.name;
    tj["in"] = detail::multiset_to_json(t.pre);
    tj["out"] = detail::multiset_to_json(t.post);
    j["transitions"].push_back(std::move(tj));
  }
  if (marking) j["marking"] = detail::multiset_to_json(*marking);
  return j.dump(2) + "\n";
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// Places as circles (token count in the label), transitions as squares,
/// arcs weighted by multiplicities; anti-places and their arcs in red.
inline std::string export_dot(const PetriNet& net, const Marking* marking = nullptr) {
  std::ostringstream oss;
  oss << "digraph net {\n  rankdir=LR;\n";
  for (const auto& p : net.places()) {
    bool anti = has_signed_suffix(p) && p.back() == '-';
    oss << "  \"" << detail::dot_escape(p) << "\" [shape=circle";
    if (marking && marking->contains(p)) oss << ", label=\"" << detail::dot_escape(p) << "\\n"
                                             << marking->count(p) << "\"";
    if (anti) oss << ", color=red, fontcolor=red";
    oss << "];\n";
  }
  for (const auto& t : net.transitions())
    oss << "  \"t:" << detail::dot_escape(t.name) << "\" [shape=box, label=\""
        << detail::dot_escape(t.name) << "\"];\n";
  for (const auto& t : net.transitions()) {
    for (const auto& [p, n] : t.pre.entries()) {
      oss << "  \"" << detail::dot_escape(p) << "\" -> \"t:" << detail::dot_escape(t.name) << "\"";
      bool anti = has_signed_suffix(p) && p.back() == '-';
      if (n > 1 || anti) {
        oss << " [";
        if (n > 1) oss << "label=\"" << n << "\"";
        if (n > 1 && anti) oss << ", ";
        if (anti) oss << "color=red";
        oss << "]";
      }
      oss << ";\n";
    }
    for (const auto& [p, n] : t.post.entries()) {
      oss << "  \"t:" << detail::dot_escape(t.name) << "\" -> \"" << detail::dot_escape(p) << "\"";
      bool anti = has_signed_suffix(p) && p.back() == '-';
      if (n > 1 || anti) {
        oss << " [";
        if (n > 1) oss << "label=\"" << n << "\"";
        if (n > 1 && anti) oss << ", ";
        if (anti) oss << "color=red";
        oss << "]";
      }
      oss << ";\n";
    }
  }
  oss << "}\n";
  return oss.str();
}

inline std::string export_dot(const ReachabilityGraph& g) {
  std::ostringstream oss;
  oss << "digraph reachability {\n  rankdir=LR;\n";
  for (const auto& m : g.nodes)
    oss << "  \"" << detail::dot_escape(m.str()) << "\" [shape=ellipse];\n";
  for (const auto& e : g.edges)
    oss << "  \"" << detail::dot_escape(e.from.str()) << "\" -> \""
        << detail::dot_escape(e.to.str()) << "\" [label=\"" << detail::dot_escape(e.transition)
        << "\"];\n";
  oss << "}\n";
  return oss.str();
}

/// Boxes as records with ranked ports, interfaces as ordered terminals.
inline std::string export_dot(const Diagram& d) {
  using EP = Diagram::Endpoint;
  std::ostringstream oss;
  oss << "digraph diagram {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < d.inputs.size(); ++i)
    oss << "  in" << i << " [shape=plaintext, label=\"" << detail::dot_escape(d.inputs[i])
        << "\"];\n";
  for (std::size_t i = 0; i < d.outputs.size(); ++i)
    oss << "  out" << i << " [shape=plaintext, label=\"" << detail::dot_escape(d.outputs[i])
        << "\"];\n";
  for (std::size_t b = 0; b < d.boxes.size(); ++b) {
    const auto& box = d.boxes[b];
    oss << "  box" << b << " [shape=record, label=\"{{";
    for (std::size_t p = 0; p < box.in_ports.size(); ++p) {
      if (p) oss << '|';
      oss << "<i" << p << ">" << detail::dot_escape(box.in_ports[p]);
    }
    oss << "}|" << detail::dot_escape(box.name) << "|{";
    for (std::size_t p = 0; p < box.out_ports.size(); ++p) {
      if (p) oss << '|';
      oss << "<o" << p << ">" << detail::dot_escape(box.out_ports[p]);
    }
    oss << "}}\"];\n";
  }
  auto node = [](const EP& e) {
    std::ostringstream n;
    switch (e.kind) {
      case EP::Kind::DiagIn: n << "in" << e.port; break;
      case EP::Kind::DiagOut: n << "out" << e.port; break;
      case EP::Kind::BoxIn: n << "box" << e.box << ":i" << e.port; break;
      case EP::Kind::BoxOut: n << "box" << e.box << ":o" << e.port; break;
    }
    return n.str();
  };
  std::vector<std::string> lines;
  for (const auto& w : d.wires) lines.push_back("  " + node(w.from) + " -> " + node(w.to) + ";\n");
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) oss << l;
  oss << "}\n";
  return oss.str();
}

}  // namespace bpn
