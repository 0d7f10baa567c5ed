#include <catch2/catch_amalgamated.hpp>

#include "bpn/equivalence.hpp"
#include "support/nets.hpp"

using namespace bpn;
using namespace bpn::testing;

TEST_CASE("truncations of the intro net") {
  PetriNet net = n0();
  EnumeratedCategory c = truncate_exec(net, Philosophy::Comm, Bounds{2, 0});
  CHECK(c.objects.size() == 10);  // multisets of size <= 2 over three places
  for (const auto& [key, hom] : c.homs) {
    CHECK(key.first == key.second);
    CHECK(hom.size() == 1);  // identities only at firing bound zero
  }

  PetriNet empty({}, {});
  EnumeratedCategory e = truncate_exec(empty, Philosophy::Comm, Bounds{3, 2});
  CHECK(e.objects.size() == 1);
  CHECK(e.morphism_count() == 1);

  // the intro execution reaches {b:2,c:1} within two firings
  EnumeratedCategory c2 = truncate_exec(net, Philosophy::Comm, Bounds{4, 2});
  Elem from = Elem::of(n0_marking());
  Elem to = Elem::of(parse_multiset("{b:2,c:1}"));
  CHECK_FALSE(c2.hom(from, to).empty());
}

TEST_CASE("theorem holds at desk scale in the collective philosophy") {
  IsoWitness w = verify_theorem_comm(n0(), Bounds{3, 2});
  CAPTURE(w.failures);
  CHECK(w.ok);
  CHECK(w.objects_matched == 84);  // multisets of size <= 3 over six signed places
  CHECK(w.morphisms_matched > w.objects_matched);
  // spot check the object correspondence: a+ c- c- pairs {a} with {c:2}
  Elem bounded_obj = Elem::of(parse_multiset("{a+:1,c-:2}"));
  Elem pair = Elem::pair(Elem::of(parse_multiset("{a:1}")), Elem::of(parse_multiset("{c:2}")));
  REQUIRE(w.object_forward.count(bounded_obj.key()));
  CHECK(w.object_forward.at(bounded_obj.key()) == pair.key());
}

TEST_CASE("theorem holds on the empty net") {
  PetriNet empty({}, {});
  IsoWitness w = verify_theorem_comm(empty, Bounds{2, 2});
  CHECK(w.ok);
  CHECK(w.objects_matched == 1);
  CHECK(w.morphisms_matched == 1);
}

TEST_CASE("theorem holds at desk scale in the individual philosophy") {
  IsoWitness w = verify_theorem_indiv(n0(), Bounds{3, 2});
  CAPTURE(w.failures);
  CHECK(w.ok);
  CHECK(w.objects_matched == 259);  // signed strings of length <= 3
}

TEST_CASE("individual theorem on a single-place net with no transitions") {
  PetriNet net({"p"}, {});
  IsoWitness w = verify_theorem_indiv(net, Bounds{2, 1});
  CAPTURE(w.failures);
  CHECK(w.ok);
  // permutation diagrams on signed strings match on both sides
  CHECK(w.objects_matched == 7);  // strings of length <= 2 over {p+, p-}
}

TEST_CASE("pullback characterization at small bounds") {
  PullbackReport r = check_pullback(n0(), Bounds{2, 1});
  CAPTURE(r.failures);
  CHECK(r.ok);
  CHECK(r.commuting_cells > 0);
  CHECK(r.monicity_pairs > 0);
  CHECK(r.delta_unique);
  CHECK(r.comultiplication_chain);
  CHECK(r.degenerate_cone);
}

TEST_CASE("semantics morphism triangle") {
  PetriNet net = n0();
  Bounds b{2, 1};
  // identity functor against the same semantics
  LaxSpanFunctor sem = external_comm(net);
  FunctorPresentation idp = identity_presentation(net, Philosophy::Comm);
  CHECK(check_semantics_morphism(idp, sem, sem, b));

  // a place renaming with transported semantics
  PetriNet renamed({"x", "y", "z"},
                   {{"t1", parse_multiset("{x:1,y:1}"), parse_multiset("{z:1}"), {}, {}},
                    {"t2", parse_multiset("{z:1}"), parse_multiset("{y:2}"), {}, {}}});
  FunctorPresentation ren;
  ren.philosophy = Philosophy::Comm;
  ren.source = net;
  ren.target = renamed;
  ren.object_map = {{"a", {"x"}}, {"b", {"y"}}, {"c", {"z"}}};
  ren.morphism_map = {{"t1", "t1"}, {"t2", "t2"}};
  validate_presentation(ren);
  LaxSpanFunctor semM = external_comm(renamed);
  std::map<std::string, std::string> dict{{"a", "x"}, {"b", "y"}, {"c", "z"}};
  std::function<Elem(const Elem&)> transport = [&](const Elem& e) -> Elem {
    auto rename_ms = [&](const Multiset& m) {
      Multiset out;
      for (const auto& [sym, n] : m.entries()) out.add(dict.at(sym), n);
      return out;
    };
    if (e.is_multiset()) return Elem::of(rename_ms(e.multiset()));
    const CommMorphism& c = e.comm();
    return Elem::of(comm_of_sequence(renamed, {rename_ms(c.dom), c.canon}));
  };
  CHECK(check_semantics_morphism(ren, sem, semM, b, 16, &transport));

  // collapsing two places against an unrelated semantics is caught by a
  // fibre-size mismatch
  PetriNet squashed({"x", "z"},
                    {{"t1", parse_multiset("{x:2}"), parse_multiset("{z:1}"), {}, {}},
                     {"t2", parse_multiset("{z:1}"), parse_multiset("{x:2}"), {}, {}}});
  FunctorPresentation collapse;
  collapse.philosophy = Philosophy::Comm;
  collapse.source = net;
  collapse.target = squashed;
  collapse.object_map = {{"a", {"x"}}, {"b", {"x"}}, {"c", {"z"}}};
  collapse.morphism_map = {{"t1", "t1"}, {"t2", "t2"}};
  validate_presentation(collapse);
  LaxSpanFunctor semS = external_comm(squashed);
  CHECK_FALSE(check_semantics_morphism(collapse, sem, semS, b));
}

TEST_CASE("both routes to the individual theorem agree") {
  PetriNet net = n0();
  Bounds b{2, 1};
  EnumeratedCategory via_indiv = total_category(external_indiv(net), b);
  EnumeratedCategory via_gamma =
      total_category(gamma(counit_presentation(net, Philosophy::Free)), b);
  REQUIRE(via_indiv.objects.size() == via_gamma.objects.size());
  for (std::size_t i = 0; i < via_indiv.objects.size(); ++i)
    CHECK(via_indiv.objects[i] == via_gamma.objects[i]);
  CHECK(via_indiv.morphism_count() == via_gamma.morphism_count());
}
