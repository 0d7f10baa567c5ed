#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bpn/exec_comm.hpp"
#include "support/nets.hpp"
#include "support/oracle.hpp"

using namespace bpn;
using namespace bpn::testing;

TEST_CASE("identity morphisms") {
  Multiset m = parse_multiset("{a:1}");
  CommMorphism id = comm_identity(m);
  CHECK(id.layers.empty());
  CHECK(chi(id) == Multiset{});
  PetriNet net = n0();
  CommMorphism f = comm_of_sequence(net, {n0_marking(), {"t1"}});
  CHECK(comm_equal(comm_compose(net, comm_identity(f.dom), f), f));
  CHECK(comm_equal(comm_compose(net, f, comm_identity(f.cod)), f));
}

TEST_CASE("normal form merges independent firings into one layer") {
  PetriNet net = n0();
  CommMorphism a = comm_of_sequence(net, {n0_marking(), {"t1", "t2"}});
  CommMorphism b = comm_of_sequence(net, {n0_marking(), {"t2", "t1"}});
  REQUIRE(a.layers.size() == 1);
  CHECK(a.layers[0] == parse_multiset("{t1:1,t2:1}"));
  CHECK(comm_equal(a, b));
  CHECK(a.cod == parse_multiset("{b:2,c:1}"));
}

TEST_CASE("normal form keeps genuinely sequential firings apart") {
  PetriNet net = n0();
  // without the ambient c token, t2 waits for t1's output
  CommMorphism f = comm_of_sequence(net, {parse_multiset("{a:1,b:1}"), {"t1", "t2"}});
  REQUIRE(f.layers.size() == 2);
  CHECK(f.layers[0] == parse_multiset("{t1:1}"));
  CHECK(f.layers[1] == parse_multiset("{t2:1}"));
}

TEST_CASE("two loop firings on one token do not commute") {
  Transition u{"u", parse_multiset("{a:1}"), parse_multiset("{a:1}"), {}, {}};
  Transition v{"v", parse_multiset("{a:1}"), parse_multiset("{a:1}"), {}, {}};
  PetriNet net({"a"}, {u, v});
  Marking m = parse_multiset("{a:1}");
  CommMorphism uv = comm_of_sequence(net, {m, {"u", "v"}});
  CommMorphism vu = comm_of_sequence(net, {m, {"v", "u"}});
  CHECK_FALSE(comm_equal(uv, vu));
  // with two tokens they fire side by side and do commute
  Marking m2 = parse_multiset("{a:2}");
  CHECK(comm_equal(comm_of_sequence(net, {m2, {"u", "v"}}),
                   comm_of_sequence(net, {m2, {"v", "u"}})));
}

TEST_CASE("ambient-token competition still yields one class") {
  // x: a->c, u: c->e, v: c->f; from {a:1,c:1} the executions x,u,v and x,v,u
  // denote the same morphism: whichever of u,v grabs the ambient c first, the
  // other consumes x's output.
  Transition x{"x", parse_multiset("{a:1}"), parse_multiset("{c:1}"), {}, {}};
  Transition u{"u", parse_multiset("{c:1}"), parse_multiset("{e:1}"), {}, {}};
  Transition v{"v", parse_multiset("{c:1}"), parse_multiset("{f:1}"), {}, {}};
  PetriNet net({"a", "c", "e", "f"}, {x, u, v});
  Marking m = parse_multiset("{a:1,c:1}");
  CommMorphism a = comm_of_sequence(net, {m, {"x", "u", "v"}});
  CommMorphism b = comm_of_sequence(net, {m, {"x", "v", "u"}});
  CHECK(comm_equal(a, b));
  CHECK(SwapClosureOracle::equivalent(net, m, {"x", "u", "v"}, {"x", "v", "u"}));
}

TEST_CASE("front extraction may need a detour") {
  // p: z->c, x: z->z, o: z->w from {z:2}: o can only reach the front of
  // p,x,o after p and x exchange, so single-occurrence bubbling is not enough.
  Transition p{"p", parse_multiset("{z:1}"), parse_multiset("{c:1}"), {}, {}};
  Transition x{"x", parse_multiset("{z:1}"), parse_multiset("{z:1}"), {}, {}};
  Transition o{"o", parse_multiset("{z:1}"), parse_multiset("{w:1}"), {}, {}};
  PetriNet net({"z", "c", "w"}, {p, x, o});
  Marking m = parse_multiset("{z:2}");
  CommMorphism a = comm_of_sequence(net, {m, {"p", "x", "o"}});
  CommMorphism b = comm_of_sequence(net, {m, {"o", "x", "p"}});
  CHECK(comm_equal(a, b));
}

TEST_CASE("composition and the mismatch error") {
  PetriNet net = n0();
  CommMorphism f = comm_of_sequence(net, {n0_marking(), {"t1"}});
  CommMorphism g = comm_of_sequence(net, {parse_multiset("{c:2}"), {"t2"}});
  CommMorphism fg = comm_compose(net, f, g);
  REQUIRE(fg.layers.size() == 1);
  CHECK(fg.layers[0] == parse_multiset("{t1:1,t2:1}"));
  CHECK_THROWS_AS(comm_compose(net, g, f), CodDomMismatchError);
}

TEST_CASE("tensor is commutative and interchange holds") {
  PetriNet net = n0();
  CommMorphism f = comm_of_sequence(net, {parse_multiset("{a:1,b:1}"), {"t1"}});
  CommMorphism g = comm_of_sequence(net, {parse_multiset("{c:1}"), {"t2"}});
  CommMorphism fg = comm_tensor(net, f, g);
  REQUIRE(fg.layers.size() == 1);
  CHECK(fg.layers[0] == parse_multiset("{t1:1,t2:1}"));
  CHECK(comm_equal(fg, comm_tensor(net, g, f)));
  CHECK(comm_equal(comm_tensor(net, f, comm_identity(Multiset{})), f));
}

TEST_CASE("chi sums the layers") {
  PetriNet net = n0();
  CommMorphism fg = comm_of_sequence(net, {n0_marking(), {"t1", "t2"}});
  CHECK(chi(fg) == parse_multiset("{t1:1,t2:1}"));
  CHECK(chi(comm_identity(n0_marking())) == Multiset{});
}

TEST_CASE("replay soundness of normal forms") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    PetriNet net = random_net(rng, {4, 4, 2, 40});
    Marking m0 = random_marking(rng, net, 2);
    auto steps = random_walk(rng, net, m0, 5);
    CommMorphism f = comm_of_sequence(net, {m0, steps});
    auto end = replay_layers(net, f.dom, f.layers);
    REQUIRE(end.has_value());
    CHECK(*end == f.cod);
    CHECK(chi(f) == to_multiset(f.canon));
  }
}

TEST_CASE("chi is a homomorphism for composition and tensor") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    PetriNet net = random_net(rng, {4, 4, 2, 40});
    Marking m0 = random_marking(rng, net, 2);
    auto s1 = random_walk(rng, net, m0, 3);
    CommMorphism f = comm_of_sequence(net, {m0, s1});
    auto s2 = random_walk(rng, net, f.cod, 3);
    CommMorphism g = comm_of_sequence(net, {f.cod, s2});
    CHECK(chi(comm_compose(net, f, g)) == chi(f) + chi(g));
    Marking m1 = random_marking(rng, net, 2);
    CommMorphism h = comm_of_sequence(net, {m1, random_walk(rng, net, m1, 3)});
    CHECK(chi(comm_tensor(net, f, h)) == chi(f) + chi(h));
  }
}

TEST_CASE("interchange law on random tensorable composables") {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 100; ++trial) {
    PetriNet net = random_net(rng, {4, 4, 2, 40});
    Marking m0 = random_marking(rng, net, 2), m1 = random_marking(rng, net, 2);
    CommMorphism f = comm_of_sequence(net, {m0, random_walk(rng, net, m0, 2)});
    CommMorphism g = comm_of_sequence(net, {f.cod, random_walk(rng, net, f.cod, 2)});
    CommMorphism h = comm_of_sequence(net, {m1, random_walk(rng, net, m1, 2)});
    CommMorphism k = comm_of_sequence(net, {h.cod, random_walk(rng, net, h.cod, 2)});
    CommMorphism lhs = comm_tensor(net, comm_compose(net, f, g), comm_compose(net, h, k));
    CommMorphism rhs = comm_compose(net, comm_tensor(net, f, h), comm_tensor(net, g, k));
    CHECK(comm_equal(lhs, rhs));
  }
}

TEST_CASE("equality agrees with the brute-force exchange oracle") {
  std::mt19937_64 rng(107);
  PetriNet intro = n0();
  std::vector<std::pair<PetriNet, Marking>> cases;
  cases.push_back({intro, n0_marking()});
  for (int i = 0; i < 8; ++i) {
    PetriNet net = random_net(rng, {4, 4, 2, 45});
    cases.push_back({net, random_marking(rng, net, 2)});
  }
  for (const auto& [net, m0] : cases) {
    auto seqs = all_sequences(net, m0, 4);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      CommMorphism fi = comm_of_sequence(net, {m0, seqs[i]});
      for (std::size_t j = i; j < seqs.size(); ++j) {
        if (seqs[i].size() != seqs[j].size()) continue;
        CommMorphism fj = comm_of_sequence(net, {m0, seqs[j]});
        bool lib = comm_equal(fi, fj);
        bool oracle = SwapClosureOracle::equivalent(net, m0, seqs[i], seqs[j]);
        if (lib != oracle) {
          CAPTURE(m0.str(), seqs[i], seqs[j], lib, oracle);
          FAIL("library equality disagrees with the exchange oracle");
        }
      }
    }
  }
}

TEST_CASE("enumerate_comm on the intro net") {
  PetriNet net = n0();
  auto zero = enumerate_comm(net, n0_marking(), 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].layers.empty());

  // by hand: id, t1, t2, and the one class of {t1 then t2 / t2 then t1};
  // t1;t1 and t2;t2 are not enabled
  auto two = enumerate_comm(net, n0_marking(), 2);
  CHECK(two.size() == 4);
  for (const auto& f : two) {
    auto end = replay_layers(net, f.dom, f.layers);
    REQUIRE(end.has_value());
    CHECK(*end == f.cod);
  }

  PetriNet empty_net({"a"}, {});
  CHECK(enumerate_comm(empty_net, parse_multiset("{a:3}"), 5).size() == 1);
}

TEST_CASE("enumerate_comm matches a direct sequence census") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 10; ++trial) {
    PetriNet net = random_net(rng, {3, 3, 2, 45});
    Marking m0 = random_marking(rng, net, 2);
    auto seqs = all_sequences(net, m0, 3);
    std::set<std::string> keys;
    for (const auto& s : seqs) keys.insert(comm_of_sequence(net, {m0, s}).key());
    auto enumerated = enumerate_comm(net, m0, 3);
    CHECK(enumerated.size() == keys.size());
  }
}
