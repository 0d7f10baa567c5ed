#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bpn/bounding.hpp"
#include "bpn/span_semantics.hpp"

namespace bpn {

/// Finite truncation of an execution category: markings or strings up to the
/// token bound, executions up to the firing bound.
inline EnumeratedCategory truncate_exec(const PetriNet& net, Philosophy phil,
                                        const Bounds& bounds) {
  EnumeratedCategory cat;
  auto base = std::make_shared<BaseCat>(BaseCat{phil, net});
  cat.objects = base->objects(bounds);
  std::sort(cat.objects.begin(), cat.objects.end());
  for (std::size_t i = 0; i < cat.objects.size(); ++i)
    cat.object_index[cat.objects[i].key()] = i;
  for (std::size_t i = 0; i < cat.objects.size(); ++i) {
    for (const auto& f : base->morphisms_from(cat.objects[i], bounds)) {
      Elem cod = base->cod(f);
      auto it = cat.object_index.find(cod.key());
      if (it == cat.object_index.end()) continue;
      cat.homs[{i, it->second}].push_back(f);
    }
  }
  for (auto& [_, v] : cat.homs) std::sort(v.begin(), v.end());
  std::size_t max_firings = bounds.firing_bound;
  cat.compose = [base, max_firings](const Elem& f, const Elem& g) -> std::optional<Elem> {
    Elem fg = base->compose(f, g);
    if (base->chi_of(fg).total() > Count(static_cast<unsigned>(max_firings)))
      return std::nullopt;
    return fg;
  };
  cat.identity = [base](const Elem& obj) { return base->identity(obj); };
  cat.dom_of = [base](const Elem& f) { return base->dom(f); };
  cat.cod_of = [base](const Elem& f) { return base->cod(f); };
  cat.oplus = [base](const Elem& a, const Elem& b) -> std::optional<Elem> {
    return base->oplus(a, b);
  };
  return cat;
}

/// Witness of an isomorphism between two enumerated categories: mutually
/// inverse object and morphism maps, with the per-law check results.
struct IsoWitness {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t objects_matched = 0;
  std::size_t hom_sets_checked = 0;
  std::size_t morphisms_matched = 0;
  std::size_t composites_checked = 0;
  std::map<std::string, std::string> object_forward, object_backward;
  std::map<std::string, std::string> morphism_forward, morphism_backward;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }

  std::string summary() const {
    std::ostringstream oss;
    oss << (ok ? "ISO" : "FAILED") << ": objects=" << objects_matched
        << " hom-sets=" << hom_sets_checked << " morphisms=" << morphisms_matched
        << " composites=" << composites_checked;
    if (!ok) oss << " failures=" << failures.size();
    return oss.str();
  }
};

namespace detail {

/// Generic bijective-functor check between two enumerated categories along
/// explicit object/morphism maps, recording the witness.
inline void check_iso(const EnumeratedCategory& A, const EnumeratedCategory& B,
                      const std::function<Elem(const Elem&)>& object_map,
                      const std::function<Elem(const Elem&)>& morphism_map, IsoWitness& w) {
  // objects: total, injective, surjective
  std::map<std::string, std::string> seen;
  for (const auto& X : A.objects) {
    Elem img = object_map(X);
    if (!B.object_index.count(img.key())) {
      w.expect(false, "object image missing: " + X.key() + " -> " + img.key());
      continue;
    }
    auto [it, fresh] = seen.emplace(img.key(), X.key());
    w.expect(fresh, "object map not injective at " + X.key());
    w.object_forward[X.key()] = img.key();
    w.object_backward[img.key()] = X.key();
    ++w.objects_matched;
  }
  w.expect(seen.size() == B.objects.size(),
           "object counts differ: " + std::to_string(seen.size()) + " vs " +
               std::to_string(B.objects.size()));

  // hom-sets: bijective by sorted key lists
  std::size_t b_morphisms = 0;
  for (const auto& [_, v] : B.homs) b_morphisms += v.size();
  std::size_t mapped = 0;
  for (const auto& [key, amors] : A.homs) {
    const Elem& X = A.objects[key.first];
    const Elem& Y = A.objects[key.second];
    Elem bx = object_map(X), by = object_map(Y);
    std::vector<std::string> image_keys;
    for (const auto& h : amors) {
      Elem img = morphism_map(h);
      image_keys.push_back(img.key());
      w.morphism_forward[h.key()] = img.key();
      w.morphism_backward[img.key()] = h.key();
    }
    std::sort(image_keys.begin(), image_keys.end());
    w.expect(std::adjacent_find(image_keys.begin(), image_keys.end()) == image_keys.end(),
             "morphism map not injective on hom " + X.key() + " -> " + Y.key());
    std::vector<std::string> b_keys;
    if (B.object_index.count(bx.key()) && B.object_index.count(by.key()))
      for (const auto& h : B.hom(bx, by)) b_keys.push_back(h.key());
    std::sort(b_keys.begin(), b_keys.end());
    if (image_keys != b_keys) {
      w.expect(false, "hom-set mismatch at " + X.key() + " -> " + Y.key() + " (" +
                          std::to_string(image_keys.size()) + " vs " +
                          std::to_string(b_keys.size()) + ")");
    }
    mapped += image_keys.size();
    ++w.hom_sets_checked;
  }
  w.morphisms_matched = mapped;
  w.expect(mapped == b_morphisms, "morphism totals differ: " + std::to_string(mapped) + " vs " +
                                      std::to_string(b_morphisms));

  // identities
  for (const auto& X : A.objects) {
    Elem img = object_map(X);
    if (!B.object_index.count(img.key())) continue;
    w.expect(morphism_map(A.identity(X)) == B.identity(img),
             "identity not preserved at " + X.key());
  }

  // composition wherever the composite stays within bounds
  for (const auto& [kf, fs] : A.homs) {
    for (const auto& [kg, gs] : A.homs) {
      if (kf.second != kg.first) continue;
      for (const auto& f : fs) {
        for (const auto& g : gs) {
          auto fg = A.compose(f, g);
          if (!fg) continue;
          // the composite must still live inside the truncation
          bool inside = true;
          {
            Elem d = A.dom_of(*fg), c = A.cod_of(*fg);
            inside = A.object_index.count(d.key()) && A.object_index.count(c.key());
          }
          if (!inside) continue;
          auto bfg = B.compose(morphism_map(f), morphism_map(g));
          if (!bfg) continue;
          w.expect(morphism_map(*fg) == *bfg,
                   "composition not preserved at " + f.key() + " ; " + g.key());
          ++w.composites_checked;
        }
      }
    }
  }
}

}  // namespace detail

/// Theorem check, collective philosophy: the execution category of the
/// bounded net is isomorphic to the total category of the external bound
/// semantics. Objects pair the plus-part with the minus-part; an execution
/// maps to its erased shadow together with its time-reversed anti shadow.
inline IsoWitness verify_theorem_comm(const PetriNet& net, const Bounds& bounds) {
  IsoWitness w;
  PetriNet bn = bound_net(net);
  EnumeratedCategory A = truncate_exec(bn, Philosophy::Comm, bounds);
  EnumeratedCategory B = total_category(external_comm(net), bounds);
  FunctorPresentation eps = counit_presentation(net, Philosophy::Comm);
  PetriNet plain = net;

  auto split = [](const Multiset& signed_marking) {
    Multiset plus, minus;
    for (const auto& [sym, n] : signed_marking.entries()) {
      SignedPlace sp = split_signed(sym);
      if (sp.polarity == Polarity::Fwd)
        plus.add(sp.base, n);
      else
        minus.add(sp.base, n);
    }
    return std::make_pair(plus, minus);
  };
  auto object_map = [split](const Elem& W) {
    auto [plus, minus] = split(W.multiset());
    return Elem::pair(Elem::of(plus), Elem::of(minus));
  };
  auto morphism_map = [&eps, &plain, split](const Elem& h) {
    const CommMorphism& m = h.comm();
    CommMorphism f = apply_presentation(eps, m);
    auto [vplus, vminus] = split(m.cod);
    std::vector<std::string> reversed(m.canon.rbegin(), m.canon.rend());
    CommMorphism g = comm_of_sequence(plain, {vminus, reversed});
    return Elem::pair(Elem::of(f), Elem::of(g));
  };
  detail::check_iso(A, B, object_map, morphism_map, w);

  // object map is a monoid homomorphism on the enumerated objects
  for (const auto& X : A.objects) {
    for (const auto& Y : A.objects) {
      Multiset joined = X.multiset() + Y.multiset();
      if (joined.total() > Count(static_cast<unsigned>(bounds.token_bound))) continue;
      Elem lhs = object_map(Elem::of(joined));
      Elem l = object_map(X), r = object_map(Y);
      Elem rhs = Elem::pair(Elem::of(l.first().multiset() + r.first().multiset()),
                            Elem::of(l.second().multiset() + r.second().multiset()));
      w.expect(lhs == rhs, "object map is not monoidal at " + X.key() + " , " + Y.key());
    }
  }
  return w;
}

/// Theorem check, individual philosophy: the free execution category of the
/// bounded net is isomorphic to the pullback-defined total category of the
/// fibre semantics. Unrolling definitions, an execution maps to its erased
/// shadow paired with itself as a fibre element.
inline IsoWitness verify_theorem_indiv(const PetriNet& net, const Bounds& bounds) {
  IsoWitness w;
  PetriNet bn = bound_net(net);
  EnumeratedCategory A = truncate_exec(bn, Philosophy::Free, bounds);
  EnumeratedCategory B = total_category(external_indiv(net), bounds);
  FunctorPresentation eps = counit_presentation(net, Philosophy::Free);

  auto object_map = [&eps](const Elem& W) {
    return Elem::pair(Elem::of(eps.apply_string(W.string_())), W);
  };
  auto morphism_map = [&eps](const Elem& h) {
    return Elem::pair(Elem::of(apply_presentation(eps, h.diagram())), h);
  };
  detail::check_iso(A, B, object_map, morphism_map, w);

  for (const auto& X : A.objects) {
    for (const auto& Y : A.objects) {
      if (X.string_().size() + Y.string_().size() > bounds.token_bound) continue;
      Elem joined = Elem::of(concat(X.string_(), Y.string_()));
      Elem lhs = object_map(joined);
      Elem l = object_map(X), r = object_map(Y);
      Elem rhs = Elem::pair(Elem::of(concat(l.first().string_(), r.first().string_())),
                            Elem::of(concat(l.second().string_(), r.second().string_())));
      w.expect(lhs == rhs, "object map is not monoidal at " + X.key() + " , " + Y.key());
    }
  }
  return w;
}

struct PullbackReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t commuting_cells = 0;
  std::size_t monicity_pairs = 0;
  bool delta_unique = false;
  bool comultiplication_chain = false;
  bool degenerate_cone = false;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

/// Desk-scale verification of the pullback characterization: the square
/// commutes on enumerated cells, the projections are jointly monic, the
/// comultiplication is the unique generator-wise filler of its cone, the
/// displayed comultiplication equations hold, and the degenerate cone at the
/// unit factors through the pointed unit.
inline PullbackReport check_pullback(const PetriNet& net, const Bounds& bounds) {
  PullbackReport r;
  PetriNet bn = bound_net(net);
  PetriNet bbn = bound_net(bn);
  FunctorPresentation eps = counit_presentation(net, Philosophy::Free);
  LaxSpanFunctor fun = external_indiv(net);

  // (i) commutation: for every enumerated execution g of the bounded net,
  // the span attached to its erasure has g in the tip with legs dom/cod
  EnumeratedCategory A = truncate_exec(bn, Philosophy::Free, bounds);
  for (const auto& [_, hom] : A.homs) {
    for (const auto& g : hom) {
      Diagram erased = apply_presentation(eps, g.diagram());
      SpanRep span = fun.morphism_map(Elem::of(erased));
      bool in_tip = span.tip_contains(g);
      bool legs = in_tip && span.left_leg(g) == Elem::of(g.diagram().inputs) &&
                  span.right_leg(g) == Elem::of(g.diagram().outputs);
      r.expect(in_tip, "square does not commute at " + g.key());
      r.expect(legs, "pointing legs mismatch at " + g.key());
      ++r.commuting_cells;
    }
  }

  // (ii) joint monicity on the assembled total category
  EnumeratedCategory B = total_category(fun, bounds);
  std::set<std::pair<std::string, std::string>> projections;
  for (const auto& [_, hom] : B.homs) {
    for (const auto& m : hom) {
      auto key = std::make_pair(m.first().key(), m.second().key());
      r.expect(projections.insert(key).second,
               "projections fail to be jointly monic at " + m.key());
      ++r.monicity_pairs;
    }
  }

  // (iii) the comultiplication cone: among all object assignments of bounded
  // size whose erasure is the identity, only the comultiplication satisfies
  // every generator's interface equation
  FunctorPresentation delta = comult_presentation(net, Philosophy::Free);
  FunctorPresentation eps1 = counit_presentation(bn, Philosophy::Free);
  {
    std::vector<std::string> bplaces = bn.places();
    // candidate images of each bounded place: fibre elements over it of size
    // at most 2, taken up to the interface symmetries (i.e. as multisets)
    std::map<std::string, std::vector<Multiset>> candidates;
    for (const auto& p : bplaces) {
      std::set<Multiset> cands;
      for (const auto& W : detail::enumerate_strings(bbn.places(), 2))
        if (eps1.apply_string(W) == ObjectString{p}) cands.insert(to_multiset(W));
      candidates[p] = std::vector<Multiset>(cands.begin(), cands.end());
    }
    // solve the per-generator interface equations by backtracking
    std::map<std::string, Multiset> assignment;
    std::size_t solutions = 0;
    std::map<std::string, Multiset> found;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (solutions > 1) return;
      if (i == bplaces.size()) {
        for (const auto& t : bn.transitions()) {
          Multiset lhs_pre, lhs_post;
          for (const auto& sym : t.pre_order) lhs_pre = lhs_pre + assignment[sym];
          for (const auto& sym : t.post_order) lhs_post = lhs_post + assignment[sym];
          if (lhs_pre != bbn.transition(t.name).pre || lhs_post != bbn.transition(t.name).post)
            return;
        }
        ++solutions;
        found = assignment;
        return;
      }
      const std::string& p = bplaces[i];
      for (const auto& cand : candidates[p]) {
        assignment[p] = cand;
        // prune on partial feasibility of every generator equation
        bool feasible = true;
        for (const auto& t : bn.transitions()) {
          Multiset partial;
          bool complete = true;
          for (const auto& sym : t.pre_order) {
            auto it = assignment.find(sym);
            if (it == assignment.end()) {
              complete = false;
              continue;
            }
            partial = partial + it->second;
          }
          const Multiset& target = bbn.transition(t.name).pre;
          if (!leq(partial, target) || (complete && partial != target)) {
            feasible = false;
            break;
          }
        }
        if (feasible) assign(i + 1);
        assignment.erase(p);
        if (solutions > 1) return;
      }
    };
    assign(0);
    bool unique_and_delta = solutions == 1;
    if (unique_and_delta)
      for (const auto& [p, img] : found)
        if (img != to_multiset(delta.object_map.at(p))) unique_and_delta = false;
    r.delta_unique = unique_and_delta;
    r.expect(unique_and_delta, "comultiplication is not the unique cone filler");
  }

  // (iv) the displayed comultiplication equations, projected through the
  // counit one level up
  {
    FunctorPresentation delta_b = comult_presentation(bn, Philosophy::Free);
    FunctorPresentation b_delta = bounding_action(delta);
    FunctorPresentation eps2 = counit_presentation(bbn, Philosophy::Free);
    LawCheckResult lc;
    pipelines_equal({&delta, &delta_b, &eps2}, {&delta}, Philosophy::Free, true, &lc,
                    "alpha;alpha1;eps2");
    pipelines_equal({&delta, &b_delta, &eps2}, {&delta}, Philosophy::Free, false, &lc,
                    "alpha;B(alpha);eps2");
    r.comultiplication_chain = lc.ok;
    for (const auto& fmsg : lc.failures) r.expect(false, fmsg);
  }

  // (v) degenerate cone at the unit: the pointed empty fibre element is the
  // unique factorization object
  {
    SetDesc fibre = fun.object_map(Elem::of(ObjectString{}));
    auto elems = fibre.enumerate(bounds);
    std::size_t hits = 0;
    for (const auto& e : elems)
      if (e == Elem::of(ObjectString{})) ++hits;
    r.degenerate_cone = hits == 1 && !elems.empty();
    r.expect(r.degenerate_cone, "degenerate cone does not factor uniquely");
  }
  return r;
}

/// Triangle check: a presented functor F between two nets' execution
/// categories is a morphism of semantics when the source semantics agrees
/// with F followed by the target semantics, up to the canonical
/// identification of tips (cardinalities, or exact transported keys when a
/// transport is supplied).
inline bool check_semantics_morphism(
    const FunctorPresentation& F, const LaxSpanFunctor& semN, const LaxSpanFunctor& semM,
    const Bounds& bounds, std::size_t max_samples = 16,
    const std::function<Elem(const Elem&)>* transport = nullptr) {
  BaseCat src{F.philosophy, F.source};
  auto apply_object = [&F](const Elem& X) {
    return F.philosophy == Philosophy::Comm ? Elem::of(F.apply_multiset(X.multiset()))
                                            : Elem::of(F.apply_string(X.string_()));
  };
  auto apply_morphism = [&F](const Elem& f) {
    return F.philosophy == Philosophy::Comm ? Elem::of(apply_presentation(F, f.comm()))
                                            : Elem::of(apply_presentation(F, f.diagram()));
  };
  std::size_t samples = 0;
  for (const auto& X : src.objects(bounds)) {
    if (samples >= max_samples) break;
    ++samples;
    auto lhs = semN.object_map(X).enumerate(bounds);
    auto rhs = semM.object_map(apply_object(X)).enumerate(bounds);
    if (transport) {
      std::set<std::string> lhs_keys, rhs_keys;
      for (const auto& e : lhs) lhs_keys.insert((*transport)(e).key());
      for (const auto& e : rhs) rhs_keys.insert(e.key());
      if (lhs_keys != rhs_keys) return false;
    } else if (lhs.size() != rhs.size()) {
      return false;
    }
    for (const auto& f : src.morphisms_from(X, bounds)) {
      auto ltip = semN.morphism_map(f).tip_enumerate(bounds);
      auto rtip = semM.morphism_map(apply_morphism(f)).tip_enumerate(bounds);
      if (transport) {
        std::set<std::string> lhs_keys, rhs_keys;
        for (const auto& e : ltip) lhs_keys.insert((*transport)(e).key());
        for (const auto& e : rtip) rhs_keys.insert(e.key());
        if (lhs_keys != rhs_keys) return false;
      } else if (ltip.size() != rtip.size()) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace bpn
