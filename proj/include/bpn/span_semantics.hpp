#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bpn/bounding.hpp"
#include "bpn/exec_comm.hpp"
#include "bpn/exec_symm.hpp"
#include "bpn/net.hpp"

namespace bpn {

/// Uniform semantic value for the span machinery: an object (multiset or
/// string), a morphism (collective execution or diagram), or a pair. Values
/// compare by canonical key, so iso-classes of diagrams collapse.
class Elem {
 public:
  using Ptr = std::shared_ptr<const Elem>;
  using PairT = std::pair<Ptr, Ptr>;

  Elem() : key_("U") {}

  static Elem of(Multiset m) {
    Elem e;
    e.key_ = "M" + m.str();
    e.value_ = std::move(m);
    return e;
  }
  static Elem of(ObjectString s) {
    Elem e;
    e.key_ = "S" + str(s);
    e.value_ = std::move(s);
    return e;
  }
  static Elem of(CommMorphism f) {
    Elem e;
    e.key_ = "C" + f.key();
    e.value_ = std::move(f);
    return e;
  }
  static Elem of(Diagram d) {
    Elem e;
    e.key_ = "D" + sym_key(d);
    e.value_ = std::move(d);
    return e;
  }
  static Elem pair(Elem a, Elem b) {
    Elem e;
    e.key_ = "(" + a.key_ + "," + b.key_ + ")";
    e.value_ = PairT{std::make_shared<Elem>(std::move(a)), std::make_shared<Elem>(std::move(b))};
    return e;
  }

  const std::string& key() const { return key_; }
  bool operator==(const Elem& o) const { return key_ == o.key_; }
  bool operator<(const Elem& o) const { return key_ < o.key_; }

  bool is_multiset() const { return std::holds_alternative<Multiset>(value_); }
  bool is_string() const { return std::holds_alternative<ObjectString>(value_); }
  bool is_comm() const { return std::holds_alternative<CommMorphism>(value_); }
  bool is_diagram() const { return std::holds_alternative<Diagram>(value_); }
  bool is_pair() const { return std::holds_alternative<PairT>(value_); }

  const Multiset& multiset() const { return std::get<Multiset>(value_); }
  const ObjectString& string_() const { return std::get<ObjectString>(value_); }
  const CommMorphism& comm() const { return std::get<CommMorphism>(value_); }
  const Diagram& diagram() const { return std::get<Diagram>(value_); }
  const PairT& pair_() const { return std::get<PairT>(value_); }
  const Elem& first() const { return *pair_().first; }
  const Elem& second() const { return *pair_().second; }

 private:
  std::variant<std::monostate, Multiset, ObjectString, CommMorphism, Diagram, PairT> value_;
  std::string key_;
};

struct Bounds {
  std::size_t token_bound = 3;   // object size: total tokens or string length
  std::size_t firing_bound = 2;  // morphism size: generator occurrences
};

/// Intensional set: a membership predicate over the (possibly infinite)
/// carrier plus a bounded enumerator.
struct SetDesc {
  std::string name;
  std::function<bool(const Elem&)> contains;
  std::function<std::vector<Elem>(const Bounds&)> enumerate;
};

/// A span with an intensional tip.
struct SpanRep {
  SetDesc left_set, right_set;
  std::function<bool(const Elem&)> tip_contains;
  std::function<std::vector<Elem>(const Bounds&)> tip_enumerate;
  std::function<Elem(const Elem&)> left_leg, right_leg;
};

/// A function between span tips commuting with both legs.
struct Span2Cell {
  std::function<Elem(const Elem&)> map;
};

namespace detail {

inline void enumerate_multisets_rec(const std::vector<std::string>& syms, std::size_t i,
                                    std::size_t budget, Multiset& cur,
                                    std::vector<Multiset>& out) {
  if (i == syms.size()) {
    out.push_back(cur);
    return;
  }
  for (std::size_t k = 0; k <= budget; ++k) {
    Multiset next = cur;
    next.add(syms[i], static_cast<unsigned>(k));
    enumerate_multisets_rec(syms, i + 1, budget - k, next, out);
  }
}

inline std::vector<Multiset> enumerate_multisets(const std::vector<std::string>& syms,
                                                 std::size_t max_total) {
  std::vector<Multiset> out;
  Multiset cur;
  enumerate_multisets_rec(syms, 0, max_total, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<ObjectString> enumerate_strings(const std::vector<std::string>& syms,
                                                   std::size_t max_len) {
  std::vector<ObjectString> out{{}};
  std::vector<ObjectString> frontier{{}};
  for (std::size_t len = 1; len <= max_len && !syms.empty(); ++len) {
    std::vector<ObjectString> next;
    for (const auto& s : frontier)
      for (const auto& sym : syms) {
        ObjectString t = s;
        t.push_back(sym);
        next.push_back(t);
        out.push_back(std::move(t));
      }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Handle on a base execution category, acting on Elems.
struct BaseCat {
  Philosophy philosophy = Philosophy::Comm;
  PetriNet net;

  std::vector<Elem> objects(const Bounds& b) const {
    std::vector<Elem> out;
    if (philosophy == Philosophy::Comm) {
      for (auto& m : detail::enumerate_multisets(net.places(), b.token_bound))
        out.push_back(Elem::of(std::move(m)));
    } else {
      for (auto& s : detail::enumerate_strings(net.places(), b.token_bound))
        out.push_back(Elem::of(std::move(s)));
    }
    return out;
  }

  std::size_t object_size(const Elem& o) const {
    if (o.is_multiset()) return static_cast<std::size_t>(o.multiset().total());
    return o.string_().size();
  }

  Elem dom(const Elem& f) const {
    return f.is_comm() ? Elem::of(f.comm().dom) : Elem::of(f.diagram().inputs);
  }
  Elem cod(const Elem& f) const {
    return f.is_comm() ? Elem::of(f.comm().cod) : Elem::of(f.diagram().outputs);
  }
  Multiset chi_of(const Elem& f) const {
    return f.is_comm() ? chi(f.comm()) : chi_sym(f.diagram());
  }

  Elem identity(const Elem& obj) const {
    return philosophy == Philosophy::Comm ? Elem::of(comm_identity(obj.multiset()))
                                          : Elem::of(sym_identity(obj.string_()));
  }

  Elem compose(const Elem& f, const Elem& g) const {
    return philosophy == Philosophy::Comm
               ? Elem::of(comm_compose(net, f.comm(), g.comm()))
               : Elem::of(sym_compose(f.diagram(), g.diagram()));
  }

  Elem tensor(const Elem& f, const Elem& g) const {
    return philosophy == Philosophy::Comm ? Elem::of(comm_tensor(net, f.comm(), g.comm()))
                                          : Elem::of(sym_tensor(f.diagram(), g.diagram()));
  }

  Elem oplus(const Elem& a, const Elem& b) const {
    return a.is_multiset() ? Elem::of(a.multiset() + b.multiset())
                           : Elem::of(concat(a.string_(), b.string_()));
  }

  std::vector<Elem> morphisms_from(const Elem& obj, const Bounds& b) const {
    std::vector<Elem> out;
    if (philosophy == Philosophy::Comm) {
      for (auto& m : enumerate_comm(net, obj.multiset(), b.firing_bound))
        out.push_back(Elem::of(std::move(m)));
    } else {
      for (auto& d : enumerate_sym(net, obj.string_(), b.firing_bound))
        out.push_back(Elem::of(std::move(d)));
    }
    return out;
  }
};

/// Span-valued lax-monoidal-lax functor with explicit laxator data.
struct LaxSpanFunctor {
  BaseCat base;
  std::function<SetDesc(const Elem&)> object_map;
  std::function<SpanRep(const Elem&)> morphism_map;
  // from the span composite / product span into the image of the composite /
  // tensor; tip elements of those spans are pairs
  std::function<Span2Cell(const Elem&, const Elem&)> comp_laxator;
  std::function<Span2Cell(const Elem&, const Elem&)> mon_laxator;
  // the tip point of F(id_X) marking the identity at (X, x)
  std::function<Elem(const Elem&, const Elem&)> unit_point;
};

/// External bound semantics in the collective philosophy: every object goes
/// to the set of all markings, a morphism f goes to the span whose tip holds
/// the executions with the same generator count, with the target leg on the
/// left so anti-token flow is reversed.
inline LaxSpanFunctor external_comm(const PetriNet& net) {
  LaxSpanFunctor F;
  F.base = BaseCat{Philosophy::Comm, net};
  PetriNet n = net;

  auto markings_desc = [n](const std::string& label) {
    SetDesc s;
    s.name = label;
    s.contains = [n](const Elem& e) {
      if (!e.is_multiset()) return false;
      for (const auto& [sym, _] : e.multiset().entries())
        if (!n.has_place(sym)) return false;
      return true;
    };
    s.enumerate = [n](const Bounds& b) {
      std::vector<Elem> out;
      for (auto& m : detail::enumerate_multisets(n.places(), b.token_bound))
        out.push_back(Elem::of(std::move(m)));
      return out;
    };
    return s;
  };

  // the bounded enumeration pairs X with knowledge x so that the combined
  // token count stays within the bound, matching the bounded-net truncation
  F.object_map = [markings_desc, n](const Elem& X) {
    SetDesc s = markings_desc("markings");
    std::size_t used = static_cast<std::size_t>(X.multiset().total());
    s.enumerate = [n, used](const Bounds& b) {
      std::vector<Elem> out;
      if (used > b.token_bound) return out;
      for (auto& m : detail::enumerate_multisets(n.places(), b.token_bound - used))
        out.push_back(Elem::of(std::move(m)));
      return out;
    };
    return s;
  };

  F.morphism_map = [n, markings_desc](const Elem& f) {
    Multiset count = chi(f.comm());
    SpanRep span;
    span.left_set = markings_desc("markings");
    span.right_set = markings_desc("markings");
    span.tip_contains = [count](const Elem& e) { return e.is_comm() && chi(e.comm()) == count; };
    span.tip_enumerate = [n, count](const Bounds& b) {
      std::vector<Elem> out;
      std::size_t size = static_cast<std::size_t>(count.total());
      for (const auto& dom : detail::enumerate_multisets(n.places(), b.token_bound))
        for (const auto& g : enumerate_comm(n, dom, size))
          if (chi(g) == count) out.push_back(Elem::of(g));
      return out;
    };
    span.left_leg = [](const Elem& g) { return Elem::of(g.comm().cod); };   // target
    span.right_leg = [](const Elem& g) { return Elem::of(g.comm().dom); };  // source
    return span;
  };

  // tips compose contravariantly: the second execution happens first
  F.comp_laxator = [n](const Elem&, const Elem&) {
    Span2Cell cell;
    cell.map = [n](const Elem& p) {
      return Elem::of(comm_compose(n, p.second().comm(), p.first().comm()));
    };
    return cell;
  };
  F.mon_laxator = [n](const Elem&, const Elem&) {
    Span2Cell cell;
    cell.map = [n](const Elem& p) {
      return Elem::of(comm_tensor(n, p.first().comm(), p.second().comm()));
    };
    return cell;
  };
  F.unit_point = [](const Elem&, const Elem& x) { return Elem::of(comm_identity(x.multiset())); };
  return F;
}

/// Fibre construction: a functor presented between two execution categories
/// induces a Span-valued lax functor on its target, sending objects to their
/// fibres and morphisms to the spans of morphism-fibres with dom/cod legs.
inline LaxSpanFunctor gamma(const FunctorPresentation& F) {
  validate_presentation(F);
  LaxSpanFunctor G;
  G.base = BaseCat{F.philosophy, F.target};
  auto pres = std::make_shared<FunctorPresentation>(F);
  // per-dom morphism enumerations of the source category are shared across
  // all morphism fibres
  struct Cache {
    std::map<std::string, std::vector<Elem>> source_morphisms;
  };
  auto cache = std::make_shared<Cache>();
  BaseCat source_cat{F.philosophy, F.source};

  auto apply_object = [pres](const Elem& d) {
    return pres->philosophy == Philosophy::Comm ? Elem::of(pres->apply_multiset(d.multiset()))
                                                : Elem::of(pres->apply_string(d.string_()));
  };
  auto apply_morphism = [pres](const Elem& g) {
    return pres->philosophy == Philosophy::Comm
               ? Elem::of(apply_presentation(*pres, g.comm()))
               : Elem::of(apply_presentation(*pres, g.diagram()));
  };
  auto fibre_objects = [pres, apply_object, source_cat](const Elem& X, const Bounds& b) {
    std::vector<Elem> out;
    for (const auto& d : source_cat.objects(b))
      if (apply_object(d) == X) out.push_back(d);
    return out;
  };

  G.object_map = [pres, apply_object, fibre_objects](const Elem& X) {
    SetDesc s;
    s.name = "fibre over " + X.key();
    s.contains = [apply_object, X](const Elem& d) { return apply_object(d) == X; };
    s.enumerate = [fibre_objects, X](const Bounds& b) { return fibre_objects(X, b); };
    return s;
  };

  G.morphism_map = [pres, apply_object, apply_morphism, fibre_objects, source_cat,
                    cache](const Elem& f) {
    SpanRep span;
    Elem domX = source_cat.philosophy == Philosophy::Comm ? Elem::of(f.comm().dom)
                                                          : Elem::of(f.diagram().inputs);
    Elem codX = source_cat.philosophy == Philosophy::Comm ? Elem::of(f.comm().cod)
                                                          : Elem::of(f.diagram().outputs);
    span.left_set.name = "fibre over " + domX.key();
    span.left_set.contains = [apply_object, domX](const Elem& d) {
      return apply_object(d) == domX;
    };
    span.left_set.enumerate = [fibre_objects, domX](const Bounds& b) {
      return fibre_objects(domX, b);
    };
    span.right_set.name = "fibre over " + codX.key();
    span.right_set.contains = [apply_object, codX](const Elem& d) {
      return apply_object(d) == codX;
    };
    span.right_set.enumerate = [fibre_objects, codX](const Bounds& b) {
      return fibre_objects(codX, b);
    };
    span.tip_contains = [apply_morphism, f](const Elem& g) { return apply_morphism(g) == f; };
    span.tip_enumerate = [fibre_objects, source_cat, cache, apply_morphism, domX,
                          f](const Bounds& b) {
      std::vector<Elem> out;
      for (const auto& W : fibre_objects(domX, b)) {
        std::string ck = W.key() + "#" + std::to_string(b.firing_bound);
        auto it = cache->source_morphisms.find(ck);
        if (it == cache->source_morphisms.end())
          it = cache->source_morphisms.emplace(ck, source_cat.morphisms_from(W, b)).first;
        for (const auto& g : it->second)
          if (apply_morphism(g) == f) out.push_back(g);
      }
      return out;
    };
    span.left_leg = [source_cat](const Elem& g) { return source_cat.dom(g); };
    span.right_leg = [source_cat](const Elem& g) { return source_cat.cod(g); };
    return span;
  };

  G.comp_laxator = [source_cat](const Elem&, const Elem&) {
    Span2Cell cell;
    cell.map = [source_cat](const Elem& p) {
      return source_cat.compose(p.first(), p.second());
    };
    return cell;
  };
  G.mon_laxator = [source_cat](const Elem&, const Elem&) {
    Span2Cell cell;
    cell.map = [source_cat](const Elem& p) { return source_cat.tensor(p.first(), p.second()); };
    return cell;
  };
  G.unit_point = [source_cat](const Elem&, const Elem& x) { return source_cat.identity(x); };
  return G;
}

/// External bound semantics in the individual philosophy: the fibre functor
/// of the counit.
inline LaxSpanFunctor external_indiv(const PetriNet& net) {
  return gamma(counit_presentation(net, Philosophy::Free));
}

/// Pullback composition of spans: tip = pairs whose inner legs agree.
inline SpanRep span_compose(const SpanRep& a, const SpanRep& b) {
  SpanRep out;
  out.left_set = a.left_set;
  out.right_set = b.right_set;
  out.tip_contains = [a, b](const Elem& p) {
    if (!p.is_pair()) return false;
    return a.tip_contains(p.first()) && b.tip_contains(p.second()) &&
           a.right_leg(p.first()) == b.left_leg(p.second());
  };
  out.tip_enumerate = [a, b](const Bounds& bounds) {
    std::vector<Elem> out_elems;
    auto lhs = a.tip_enumerate(bounds);
    auto rhs = b.tip_enumerate(bounds);
    std::map<std::string, std::vector<const Elem*>> by_left;
    for (const auto& t : rhs) by_left[b.left_leg(t).key()].push_back(&t);
    for (const auto& s : lhs) {
      auto it = by_left.find(a.right_leg(s).key());
      if (it == by_left.end()) continue;
      for (const Elem* t : it->second) out_elems.push_back(Elem::pair(s, *t));
    }
    std::sort(out_elems.begin(), out_elems.end());
    return out_elems;
  };
  out.left_leg = [a](const Elem& p) { return a.left_leg(p.first()); };
  out.right_leg = [b](const Elem& p) { return b.right_leg(p.second()); };
  return out;
}

/// Product span for the monoidal direction: tip = all pairs, legs
/// are the pointwise monoidal products.
inline SpanRep span_product(const BaseCat& base, const SpanRep& a, const SpanRep& b) {
  SpanRep out;
  out.left_set = a.left_set;
  out.right_set = b.right_set;
  out.tip_contains = [a, b](const Elem& p) {
    return p.is_pair() && a.tip_contains(p.first()) && b.tip_contains(p.second());
  };
  out.tip_enumerate = [a, b](const Bounds& bounds) {
    std::vector<Elem> out_elems;
    for (const auto& s : a.tip_enumerate(bounds))
      for (const auto& t : b.tip_enumerate(bounds)) out_elems.push_back(Elem::pair(s, t));
    std::sort(out_elems.begin(), out_elems.end());
    return out_elems;
  };
  out.left_leg = [base, a, b](const Elem& p) {
    return base.oplus(a.left_leg(p.first()), b.left_leg(p.second()));
  };
  out.right_leg = [base, a, b](const Elem& p) {
    return base.oplus(a.right_leg(p.first()), b.right_leg(p.second()));
  };
  return out;
}

struct CoherenceReport {
  int samples = 0;
  std::vector<std::string> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};

/// Samples composable and tensorable tuples and verifies that the laxators
/// are leg-respecting 2-cells satisfying associativity, interchange
/// compatibility, and the unit laws.
inline CoherenceReport check_lax_coherence(const LaxSpanFunctor& F, std::uint64_t seed,
                                           int sample_count, const Bounds& bounds) {
  CoherenceReport report;
  std::mt19937_64 rng(seed);
  std::vector<Elem> objs = F.base.objects(bounds);
  if (objs.empty()) return report;
  auto pick = [&rng](const std::vector<Elem>& v) -> const Elem& {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
  };
  auto random_morphism_from = [&](const Elem& obj) -> std::optional<Elem> {
    auto ms = F.base.morphisms_from(obj, bounds);
    if (ms.empty()) return std::nullopt;
    return pick(ms);
  };
  auto note = [&report](const std::string& what) { report.counterexamples.push_back(what); };

  for (int i = 0; i < sample_count; ++i) {
    ++report.samples;
    Elem X = pick(objs);
    auto fo = random_morphism_from(X);
    if (!fo) continue;
    Elem f = *fo;
    auto go = random_morphism_from(F.base.cod(f));
    if (!go) continue;
    Elem g = *go;
    Elem fg = F.base.compose(f, g);

    SpanRep sf = F.morphism_map(f), sg = F.morphism_map(g), sfg = F.morphism_map(fg);
    SpanRep comp = span_compose(sf, sg);
    Span2Cell cell = F.comp_laxator(f, g);
    for (const auto& p : comp.tip_enumerate(bounds)) {
      Elem h = cell.map(p);
      if (!sfg.tip_contains(h)) note("composition laxator leaves the target tip at " + p.key());
      if (sfg.left_leg(h) != comp.left_leg(p) || sfg.right_leg(h) != comp.right_leg(p))
        note("composition laxator breaks the legs at " + p.key());
    }

    // unit laws: pre- and post-composing with the pointed identity is nothing
    Elem id_dom = F.base.identity(F.base.dom(f));
    Elem id_cod = F.base.identity(F.base.cod(f));
    SpanRep sid_dom = F.morphism_map(id_dom);
    SpanRep sid_cod = F.morphism_map(id_cod);
    Span2Cell left_unit = F.comp_laxator(id_dom, f);
    Span2Cell right_unit = F.comp_laxator(f, id_cod);
    for (const auto& s : sf.tip_enumerate(bounds)) {
      Elem u = F.unit_point(F.base.dom(f), sf.left_leg(s));
      if (!sid_dom.tip_contains(u)) {
        note("unit point misses the identity tip at " + u.key());
        continue;
      }
      if (left_unit.map(Elem::pair(u, s)) != s) note("left unit law fails at " + s.key());
      Elem v = F.unit_point(F.base.cod(f), sf.right_leg(s));
      if (!sid_cod.tip_contains(v)) {
        note("unit point misses the identity tip at " + v.key());
        continue;
      }
      if (right_unit.map(Elem::pair(s, v)) != s) note("right unit law fails at " + s.key());
    }

    // monoidal laxator on a random tensorable pair
    Elem Y = pick(objs);
    auto ho = random_morphism_from(Y);
    if (!ho) continue;
    Elem h = *ho;
    Elem fh = F.base.tensor(f, h);
    SpanRep sh = F.morphism_map(h), sfh = F.morphism_map(fh);
    SpanRep prod = span_product(F.base, sf, sh);
    Span2Cell mcell = F.mon_laxator(f, h);
    for (const auto& p : prod.tip_enumerate(bounds)) {
      Elem q = mcell.map(p);
      if (!sfh.tip_contains(q)) note("monoidal laxator leaves the target tip at " + p.key());
      if (sfh.left_leg(q) != prod.left_leg(p) || sfh.right_leg(q) != prod.right_leg(p))
        note("monoidal laxator breaks the legs at " + p.key());
    }

    // associativity of the composition laxator on a sampled triple
    auto ko = random_morphism_from(F.base.cod(g));
    if (ko) {
      Elem k = *ko;
      Elem gk = F.base.compose(g, k);
      Span2Cell c_fg = F.comp_laxator(f, g);
      Span2Cell c_fg_k = F.comp_laxator(fg, k);
      Span2Cell c_gk = F.comp_laxator(g, k);
      Span2Cell c_f_gk = F.comp_laxator(f, gk);
      SpanRep sk = F.morphism_map(k);
      SpanRep left_first = span_compose(span_compose(sf, sg), sk);
      for (const auto& p : left_first.tip_enumerate(bounds)) {
        const Elem& st = p.first();
        const Elem& w = p.second();
        Elem lhs = c_fg_k.map(Elem::pair(c_fg.map(st), w));
        Elem rhs = c_f_gk.map(Elem::pair(st.first(), c_gk.map(Elem::pair(st.second(), w))));
        if (lhs != rhs) note("associativity coherence fails at " + p.key());
      }
    }

    // interchange compatibility of the monoidal laxator
    auto k2o = random_morphism_from(F.base.cod(h));
    if (k2o) {
      Elem k2 = *k2o;
      Elem hk = F.base.compose(h, k2);
      SpanRep sk2 = F.morphism_map(k2);
      Span2Cell c_fg2 = F.comp_laxator(f, g);
      Span2Cell c_hk = F.comp_laxator(h, k2);
      Span2Cell m_fh = F.mon_laxator(f, h);
      Span2Cell m_gk = F.mon_laxator(g, k2);
      Span2Cell m_after = F.mon_laxator(fg, hk);
      Span2Cell c_after = F.comp_laxator(fh, F.base.tensor(g, k2));
      for (const auto& sp : span_compose(sf, sg).tip_enumerate(bounds)) {
        for (const auto& wp : span_compose(sh, sk2).tip_enumerate(bounds)) {
          Elem lhs = m_after.map(Elem::pair(c_fg2.map(sp), c_hk.map(wp)));
          Elem rhs = c_after.map(Elem::pair(m_fh.map(Elem::pair(sp.first(), wp.first())),
                                            m_gk.map(Elem::pair(sp.second(), wp.second()))));
          if (lhs != rhs) note("interchange compatibility fails");
        }
      }
    }
  }
  return report;
}

/// Finite truncation of a category, with the composition table realized as a
/// function and escapes flagged rather than fatal.
struct EnumeratedCategory {
  std::vector<Elem> objects;
  std::map<std::string, std::size_t> object_index;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Elem>> homs;
  std::function<std::optional<Elem>(const Elem&, const Elem&)> compose;
  std::function<Elem(const Elem&)> identity;
  std::function<Elem(const Elem&)> dom_of, cod_of;
  std::function<std::optional<Elem>(const Elem&, const Elem&)> oplus;  // optional monoid
  bool escaped = false;  // a composite left the truncation

  std::size_t index_of(const Elem& obj) const {
    auto it = object_index.find(obj.key());
    if (it == object_index.end()) throw std::invalid_argument("object outside truncation");
    return it->second;
  }
  const std::vector<Elem>& hom(const Elem& a, const Elem& b) const {
    static const std::vector<Elem> empty;
    auto it = homs.find({index_of(a), index_of(b)});
    return it == homs.end() ? empty : it->second;
  }
  std::size_t morphism_count() const {
    std::size_t n = 0;
    for (const auto& [_, v] : homs) n += v.size();
    return n;
  }
};

/// Grothendieck construction over a lax span functor: objects are pairs
/// (X, x) with x in the image set of X, morphisms are pairs (f, s) with s a
/// tip element whose legs are the chosen points.
inline EnumeratedCategory total_category(const LaxSpanFunctor& F, const Bounds& bounds) {
  EnumeratedCategory cat;
  auto fp = std::make_shared<LaxSpanFunctor>(F);

  std::vector<Elem> base_objects = F.base.objects(bounds);
  for (const auto& X : base_objects) {
    SetDesc fibre = F.object_map(X);
    for (const auto& x : fibre.enumerate(bounds)) cat.objects.push_back(Elem::pair(X, x));
  }
  std::sort(cat.objects.begin(), cat.objects.end());
  for (std::size_t i = 0; i < cat.objects.size(); ++i)
    cat.object_index[cat.objects[i].key()] = i;

  for (const auto& X : base_objects) {
    for (const auto& f : F.base.morphisms_from(X, bounds)) {
      Elem Y = F.base.cod(f);
      SpanRep span = F.morphism_map(f);
      for (const auto& s : span.tip_enumerate(bounds)) {
        Elem from = Elem::pair(X, span.left_leg(s));
        Elem to = Elem::pair(Y, span.right_leg(s));
        auto fi = cat.object_index.find(from.key());
        auto ti = cat.object_index.find(to.key());
        if (fi == cat.object_index.end() || ti == cat.object_index.end()) continue;
        cat.homs[{fi->second, ti->second}].push_back(Elem::pair(f, s));
      }
    }
  }
  for (auto& [_, v] : cat.homs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  cat.dom_of = [fp](const Elem& m) {
    SpanRep span = fp->morphism_map(m.first());
    return Elem::pair(fp->base.dom(m.first()), span.left_leg(m.second()));
  };
  cat.cod_of = [fp](const Elem& m) {
    SpanRep span = fp->morphism_map(m.first());
    return Elem::pair(fp->base.cod(m.first()), span.right_leg(m.second()));
  };
  cat.identity = [fp](const Elem& obj) {
    return Elem::pair(fp->base.identity(obj.first()), fp->unit_point(obj.first(), obj.second()));
  };
  auto max_firings = bounds.firing_bound;
  cat.compose = [fp, max_firings](const Elem& a, const Elem& b) -> std::optional<Elem> {
    Elem f = a.first(), g = b.first();
    Elem fg = fp->base.compose(f, g);
    if (fp->base.chi_of(fg).total() > Count(static_cast<unsigned>(max_firings)))
      return std::nullopt;
    Span2Cell cell = fp->comp_laxator(f, g);
    return Elem::pair(fg, cell.map(Elem::pair(a.second(), b.second())));
  };
  cat.oplus = nullptr;
  return cat;
}

}  // namespace bpn
