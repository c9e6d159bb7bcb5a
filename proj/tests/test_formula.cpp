#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"
#include "tdl/mc.hpp"

using namespace tdl;
using F = Formula;

namespace {

F p() { return F::atom("p"); }
F q() { return F::atom("q"); }

// Every structure over worlds 0..n-1 with the given propositions and no
// edges, paired with every team.
template <class Fn>
void each_edgeless(int n, const std::vector<std::string>& props, Fn fn) {
  int bits = n * static_cast<int>(props.size());
  for (int lab = 0; lab < (1 << bits); ++lab) {
    KripkeStructure k;
    for (int w = 0; w < n; ++w) k.add_world("w" + std::to_string(w));
    for (const auto& x : props) k.declare_prop(x);
    for (int b = 0; b < bits; ++b)
      if ((lab >> b) & 1) k.set_label(b / props.size(), props[b % props.size()]);
    for (int m = 0; m < (1 << n); ++m) {
      Team t(n);
      for (int w = 0; w < n; ++w) t[w] = (m >> w) & 1;
      fn(k, t);
    }
  }
}

KripkeStructure random_structure(std::mt19937& rng, int n,
                                 const std::vector<std::string>& props) {
  std::bernoulli_distribution coin(0.4);
  KripkeStructure k;
  for (int w = 0; w < n; ++w) k.add_world("w" + std::to_string(w));
  for (const auto& x : props) k.declare_prop(x);
  for (int w = 0; w < n; ++w) {
    for (int v = 0; v < n; ++v)
      if (coin(rng)) k.add_edge(w, v);
    for (const auto& x : props)
      if (coin(rng)) k.set_label(w, x);
  }
  return k;
}

F random_mdl(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth == 0 ? 3 : 9), prop(0, 1);
  std::string a = prop(rng) ? "p" : "q";
  switch (pick(rng)) {
    case 0: return F::atom(a);
    case 1: return F::neg_atom(a);
    case 2: return F::dep({}, a);
    case 3: return F::top();
    case 4: return F::conj(random_mdl(rng, depth - 1), random_mdl(rng, depth - 1));
    case 5: return F::split_or(random_mdl(rng, depth - 1), random_mdl(rng, depth - 1));
    case 6:
      return F::classical_or(random_mdl(rng, depth - 1), random_mdl(rng, depth - 1));
    case 7: return F::box(random_mdl(rng, depth - 1));
    case 8: return F::dia(random_mdl(rng, depth - 1));
    default: return F::dep({a == "p" ? "q" : "p"}, a);
  }
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  F d = parse("dep(p1,p2;q)");
  CHECK(d.op() == Op::Dep);
  CHECK(d.dets() == std::vector<std::string>{"p1", "p2"});
  CHECK(d.name() == "q");

  CHECK(parse("[]p & <> !q") == F::conj(F::box(p()), F::dia(F::neg_atom("q"))));

  F i = parse("(r1 -> dep(;p1)) -> x");
  CHECK(i == F::impl(F::impl(F::atom("r1"), F::dep({}, "p1")), F::atom("x")));
  // -> associates to the right
  CHECK(parse("a -> b -> c") ==
        F::impl(F::atom("a"), F::impl(F::atom("b"), F::atom("c"))));
}

TEST_CASE("render and parse are inverse") {
  for (const char* s : {"dep(p1,p2;q)", "[]p & <> !q", "(r1 -> dep(;p1)) -> x",
                        "p \\/ (q | !dep(;r))", "<>[](true & false)"}) {
    F f = parse(s);
    CHECK(parse(render(f)) == f);
  }
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    F f = random_mdl(rng, 4);
    CHECK(parse(render(f)) == f);
  }
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse("p &"), ParseError);
  CHECK_THROWS_AS(parse("dep(p;"), ParseError);
  CHECK_THROWS_AS(parse("(p | q"), ParseError);
}

TEST_CASE("dual") {
  CHECK(dual(F::top()) == F::bot());
  CHECK(dual(F::box(F::conj(p(), F::neg_atom("q")))) ==
        F::dia(F::split_or(F::neg_atom("p"), q())));
  F f = F::dia(F::split_or(p(), F::bot()));
  CHECK(dual(dual(f)) == f);
}

TEST_CASE("substitute") {
  CHECK(substitute(F::conj(p(), q()), q(), F::bot()) == F::conj(p(), F::bot()));
  CHECK(substitute(p(), p(), p()) == p());
  F d = F::dep({"p"}, "q");
  CHECK(substitute(F::split_or(d, d), d, F::top()) == F::split_or(F::top(), F::top()));
}

TEST_CASE("signature_of") {
  auto s = signature_of(F::dia(F::dep({"p1", "p2"}, "q")));
  CHECK(s.ops == (kDiamond | kDep));
  CHECK(s.arity == 2);
  s = signature_of(F::top());
  CHECK(s.ops == kTop);
  CHECK(!s.arity);
  s = signature_of(F::split_or(F::classical_or(p(), q()), F::atom("r")));
  CHECK(s.ops == (kDepOr | kClassicalOr));
  CHECK(!s.arity);
}

TEST_CASE("eliminate_const_neg") {
  KripkeStructure k;
  k.add_world("w");
  k.declare_prop("p");
  auto [g, k2] = eliminate_const_neg(F::neg_atom("p"), k);
  CHECK(g == F::atom("p'"));
  auto lab = k2.label(0);
  CHECK(std::find(lab.begin(), lab.end(), "p'") != lab.end());
  CHECK(std::find(lab.begin(), lab.end(), "t") != lab.end());

  auto [h, k3] = eliminate_const_neg(F::top(), k);
  CHECK(h == F::atom("t"));
  for (std::size_t w = 0; w < k3.num_worlds(); ++w) {
    auto l = k3.label(w);
    CHECK(std::find(l.begin(), l.end(), "t") != l.end());
  }

  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto kk = random_structure(rng, 3, {"p", "q"});
    Team t(3);
    for (int w = 0; w < 3; ++w) t[w] = rng() % 2;
    F f = random_mdl(rng, 3);
    auto [f2, kk2] = eliminate_const_neg(f, kk);
    CHECK(eval(kk, t, f) == eval(kk2, t, f2));
  }
}

TEST_CASE("expand_dep_via_classical_or") {
  CHECK(expand_dep_via_classical_or(F::dep({}, "q")) ==
        F::classical_or(q(), F::neg_atom("q")));
  F one = expand_dep_via_classical_or(F::dep({"p"}, "q"));
  F qq = F::classical_or(q(), F::neg_atom("q"));
  CHECK(one == F::split_or(F::conj(p(), qq), F::conj(F::neg_atom("p"), qq)));

  F d2 = F::dep({"p", "q"}, "r");
  F e2 = expand_dep_via_classical_or(d2);
  int disjuncts = 0;
  for_each_preorder(e2, [&](const F& g) {
    if (g.op() == Op::And && g.right().op() == Op::Cor) ++disjuncts;
  });
  CHECK(disjuncts == 4);
  for (int n = 1; n <= 3; ++n)
    each_edgeless(n, {"p", "q", "r"}, [&](const KripkeStructure& k, const Team& t) {
      CHECK(eval(k, t, d2) == eval(k, t, e2));
    });
}

TEST_CASE("distribute_classical_or") {
  F f = F::classical_or(p(), q());
  CHECK(distribute_classical_or(f, 0) == p());
  CHECK(distribute_classical_or(f, 1) == q());
  CHECK(distribute_classical_or(F::dia(f), 0) == F::dia(p()));

  std::mt19937 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto k = random_structure(rng, 3, {"p", "q"});
    Team t(3);
    for (int w = 0; w < 3; ++w) t[w] = rng() % 2;
    F g = random_mdl(rng, 3);
    int n = count_classical_or(g);
    if (n > 6) continue;
    bool any = false;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << n); ++j)
      any = any || eval(k, t, distribute_classical_or(g, j));
    CHECK(any == eval(k, t, g));
  }
}

TEST_CASE("midl_rewrites") {
  CHECK(midl_rewrites(F::neg_atom("p"), MidlRule::NegAsImpl) == F::impl(p(), F::bot()));
  CHECK(midl_rewrites(F::dep({"p1"}, "p2"), MidlRule::DepAsImpl) ==
        F::impl(F::dep({}, "p1"), F::dep({}, "p2")));
  // The rewrite uses the splitting disjunction: with the classical one,
  // the team {!p, q} would satisfy p -> q but not !p \/ q.
  F impl = F::impl(p(), q());
  F rew = midl_rewrites(impl, MidlRule::ImplAsDualOr);
  CHECK(rew == F::split_or(F::neg_atom("p"), q()));
  for (int n = 1; n <= 3; ++n)
    each_edgeless(n, {"p", "q"}, [&](const KripkeStructure& k, const Team& t) {
      CHECK(eval(k, t, impl) == eval(k, t, rew));
    });
}

TEST_CASE("propositions and counts") {
  F f = parse("dep(a;b) & <>(c | !a) & dep(;c)");
  CHECK(propositions_of(f) == std::vector<std::string>{"a", "b", "c"});
  CHECK(count_positive_deps(f) == 2);
  CHECK(count_classical_or(parse("p \\/ (q \\/ r)")) == 2);
  CHECK(F::box(p()).modal_depth() == 1);
  CHECK(box_n(3, p()).modal_depth() == 3);
}
