#include <doctest.h>

#include <chrono>
#include <random>

#include "corpus.hpp"
#include "naive.hpp"
#include "tdl/mc.hpp"
#include "tdl/reductions.hpp"

using namespace tdl;
using F = Formula;

namespace {

const std::vector<std::string> kProps{"p", "q"};

KripkeStructure two_worlds() {
  KripkeStructure k;
  k.add_world("u");
  k.add_world("v");
  k.declare_prop("p");
  k.set_label(0, "p");
  return k;
}

}  // namespace

TEST_CASE("eval examples") {
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto k = corpus::random_kripke(rng, 3, kProps);
    CHECK(eval(k, k.empty_team(), corpus::random_formula(rng, kAllOps, kProps, 4)));
  }
  CHECK(eval(two_worlds(), two_worlds().empty_team(), F::bot()));

  auto k = two_worlds();
  CHECK_FALSE(eval(k, k.full_team(), F::dep({}, "p")));
  CHECK(eval(k, k.singleton(1), F::dep({}, "p")));

  // (-x1 | x2 | x3) & (x2 | -x3 | x4) & (x1 | -x2) as chains, with the
  // dependence disjunction over box^j dep(;p_j).
  CnfInstance c{4, {{-1, 2, 3}, {2, -3, 4}, {1, -2}}};
  auto inst = gen_mc_box_vee(c);
  CHECK(inst.team.count() == 3);
  CHECK(eval(inst.structure, inst.team, inst.formula));
  CHECK(naive::team(inst.structure, inst.team, inst.formula));
}

TEST_CASE("eval agrees with the definitions") {
  std::mt19937 rng(2);
  for (int i = 0; i < 1500; ++i) {
    auto k = corpus::random_kripke(rng, 1 + i % 4, kProps);
    auto t = corpus::random_team(rng, k.num_worlds());
    auto f = corpus::random_formula(rng, kAllOps, kProps, 3);
    CHECK_MESSAGE(eval(k, t, f) == naive::team(k, t, f), render(f));
  }
}

TEST_CASE("unknown propositions and wrong team sizes are errors") {
  auto k = two_worlds();
  CHECK_THROWS(eval(k, k.full_team(), F::atom("zz")));
  CHECK_THROWS(eval(k, Team(5), F::top()));
}

TEST_CASE("dep_holds") {
  KripkeStructure k;
  int w = k.add_world("w");
  int v = k.add_world("v");
  k.declare_prop("p");
  k.declare_prop("q");
  k.set_label(w, "p");
  k.set_label(w, "q");
  k.set_label(v, "p");
  CHECK(dep_holds(k, k.singleton(w), F::dep({"p"}, "q")));
  CHECK_FALSE(dep_holds(k, k.full_team(), F::dep({"p"}, "q")));
  CHECK(dep_holds(k, k.full_team(), F::dep({"q"}, "p")));

  // Literal worlds s_j^0, s_j^1 differ only on q.
  auto inst = gen_mc_diamond(CnfInstance{2, {{1, -2}}});
  const auto& g = inst.structure;
  CHECK_FALSE(dep_holds(g, g.team_of({"s1_0", "s1_1"}), F::dep({"p1", "p2"}, "q")));
  CHECK(dep_holds(g, g.team_of({"s1_0", "s2_1"}), F::dep({"p1", "p2"}, "q")));
}

TEST_CASE("eval_poormans") {
  KripkeStructure k;
  k.add_world("a");
  k.add_world("b");
  k.declare_prop("p");
  k.add_edge(0, 1);
  k.set_label(1, "p");
  F f = F::box(F::dep({}, "p"));
  CHECK(eval_poormans(k, k.full_team(), f) == eval(k, k.full_team(), f));
  F g = F::classical_or(F::box(F::atom("p")), F::conj(F::neg_atom("p"), F::dep({}, "p")));
  CHECK(eval_poormans(k, k.full_team(), g) == eval(k, k.full_team(), g));
  CHECK(eval_poormans(k, k.full_team(), F::top()));
  CHECK_THROWS_AS(eval_poormans(k, k.full_team(), F::dia(F::top())), SignatureError);

  std::mt19937 rng(4);
  std::uint16_t ops = kBox | kAnd | kClassicalOr | kNeg | kDep | kTop | kBot;
  for (int i = 0; i < 600; ++i) {
    auto r = corpus::random_kripke(rng, 1 + i % 5, kProps);
    auto t = corpus::random_team(rng, r.num_worlds());
    auto h = corpus::random_formula(rng, ops, kProps, 4);
    CHECK(eval_poormans(r, t, h) == eval(r, t, h));
  }
}

TEST_CASE("eval_few_deps") {
  std::mt19937 rng(5);
  // No dep atoms: plain check.
  for (int i = 0; i < 100; ++i) {
    auto k = corpus::random_kripke(rng, 3, kProps);
    auto t = corpus::random_team(rng, 3);
    auto f = corpus::random_formula(rng, kBox | kDiamond | kAnd | kDepOr | kNeg, kProps, 3);
    CHECK(eval_few_deps(k, t, f, 0) == eval(k, t, f));
  }
  // <>dep(p;q) on every 4-world structure with two worlds in the team and
  // two successors each.
  F f = F::dia(F::dep({"p"}, "q"));
  for (int lab = 0; lab < 256; ++lab) {
    KripkeStructure k;
    for (int w = 0; w < 4; ++w) k.add_world("w" + std::to_string(w));
    k.declare_prop("p");
    k.declare_prop("q");
    for (int b = 0; b < 8; ++b)
      if ((lab >> b) & 1) k.set_label(b / 2, b % 2 ? "q" : "p");
    k.add_edge(0, 2);
    k.add_edge(0, 3);
    k.add_edge(1, 2);
    k.add_edge(1, 3);
    k.add_edge(1, 1);
    Team t = k.team_of({"w0", "w1"});
    CHECK(eval_few_deps(k, t, f, 1) == eval(k, t, f));
  }
  // Two unary atoms: 2^(2^1) functions each.
  CHECK(few_deps_tuple_count(F::conj(F::dep({"p"}, "q"), F::dep({"q"}, "p"))) == 16);

  auto one = corpus::random_kripke(rng, 1, kProps);
  CHECK_THROWS_AS(eval_few_deps(one, one.full_team(), F::dep({}, "p"), 0), RefusalError);
  CHECK_THROWS_AS(eval_few_deps(one, one.full_team(), F::dep({"p"}, "q"), 0), SignatureError);

  std::uint16_t ops = kBox | kDiamond | kAnd | kDepOr | kClassicalOr | kNeg | kDep | kTop | kBot;
  int ran = 0;
  for (int i = 0; ran < 500; ++i) {
    auto k = corpus::random_kripke(rng, 4 + i % 5, kProps);
    auto t = corpus::random_team(rng, k.num_worlds());
    auto g = corpus::random_formula(rng, ops, kProps, 3);
    if ((std::uint64_t{1} << count_positive_deps(g)) > k.num_worlds()) continue;
    ++ran;
    CHECK(eval_few_deps(k, t, g, 1) == eval(k, t, g));
  }
}

TEST_CASE("eval_vee_bounded") {
  KripkeStructure one;
  one.add_world("w");
  one.declare_prop("p");
  one.declare_prop("q");
  F f = F::split_or(F::dep({}, "p"), F::dep({}, "q"));
  CHECK(eval_vee_bounded(one, one.full_team(), f, 0));
  CHECK(eval(one, one.full_team(), f));

  std::mt19937 rng(6);
  F lem = F::split_or(F::atom("p"), F::neg_atom("p"));
  for (int i = 0; i < 50; ++i) {
    auto k = corpus::random_kripke(rng, 1 + i % 5, kProps);
    CHECK(eval_vee_bounded(k, corpus::random_team(rng, k.num_worlds()), lem, 0));
  }
  CHECK_THROWS_AS(eval_vee_bounded(one, one.full_team(), F::box(F::top()), 1), SignatureError);

  std::uint16_t ops = kDepOr | kNeg | kDep | kTop | kBot;
  for (int i = 0; i < 600; ++i) {
    auto k = corpus::random_kripke(rng, 1 + i % 6, {"p", "q", "r"});
    auto t = corpus::random_team(rng, k.num_worlds());
    auto g = corpus::random_formula(rng, ops, {"p", "q", "r"}, 4, 2);
    CHECK(eval_vee_bounded(k, t, g, 2) == eval(k, t, g));
  }
}

TEST_CASE("eval_nor_unary") {
  std::mt19937 rng(7);
  F f = F::dia(F::classical_or(F::atom("p"), F::atom("q")));
  F g = F::box(F::dia(F::dep({"p"}, "q")));
  F h = F::box(F::classical_or(F::atom("p"), F::classical_or(F::neg_atom("q"), F::atom("q"))));
  for (int i = 0; i < 100; ++i) {
    auto k = corpus::random_kripke(rng, 1 + i % 5, kProps);
    auto t = corpus::random_team(rng, k.num_worlds());
    CHECK(eval_nor_unary(k, t, f) ==
          (eval(k, t, F::dia(F::atom("p"))) || eval(k, t, F::dia(F::atom("q")))));
    CHECK(eval_nor_unary(k, t, g) == eval(k, t, g));
    CHECK(eval_nor_unary(k, t, h) == eval(k, t, h));
  }
  auto k = corpus::random_kripke(rng, 2, kProps);
  CHECK_THROWS_AS(eval_nor_unary(k, k.full_team(), F::conj(F::top(), F::top())), SignatureError);

  std::uint16_t ops = kBox | kDiamond | kClassicalOr | kNeg | kDep | kTop | kBot;
  for (int i = 0; i < 600; ++i) {
    auto r = corpus::random_kripke(rng, 1 + i % 5, kProps);
    auto t = corpus::random_team(rng, r.num_worlds());
    auto e = corpus::random_formula(rng, ops, kProps, 5);
    CHECK(eval_nor_unary(r, t, e) == eval(r, t, e));
  }
}

TEST_CASE("check picks a strategy and agrees with eval") {
  auto k = load_kripke(
               "worlds: a b c d\nprops: p q\nedges: a->b b->c c->d d->a\n"
               "label a: p\nlabel c: q\nteam: a b c d\n")
               .structure;
  Team t = k.full_team();
  struct Case {
    F f;
    const char* strategy;
  };
  std::vector<Case> cases{
      {F::box(F::conj(F::dep({}, "p"), F::neg_atom("q"))), "poormans"},
      {F::split_or(F::dep({}, "p"), F::dep({}, "q")), "vee_bounded"},
      {F::dia(F::classical_or(F::dep({"p"}, "q"), F::atom("p"))), "nor_unary"},
      {F::dia(F::conj(F::dep({"p"}, "q"), F::atom("p"))), "few_deps"},
      {F::impl(F::atom("p"), F::atom("q")), "eval"},
  };
  for (const auto& c : cases) {
    auto r = check(k, t, c.f);
    CHECK(r.strategy == c.strategy);
    CHECK(r.value == eval(k, t, c.f));
  }

  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    auto r = corpus::random_kripke(rng, 1 + i % 6, kProps);
    auto s = corpus::random_team(rng, r.num_worlds());
    auto f = corpus::random_formula(rng, kAllOps, kProps, 4);
    CHECK(check(r, s, f).value == eval(r, s, f));
  }
}

TEST_CASE("poor man's path scales") {
  std::mt19937 rng(10);
  auto k = corpus::random_kripke(rng, 200, kProps, 0.02);
  std::uint16_t ops = kBox | kAnd | kClassicalOr | kNeg | kDep | kTop | kBot;
  F f = corpus::random_formula(rng, ops, kProps, 4);
  for (int d = 0; d < 20; ++d)
    f = d % 2 ? F::box(f) : F::conj(F::box(f), F::classical_or(F::dep({"p"}, "q"), F::atom("p")));
  CHECK(f.modal_depth() >= 20);
  auto t0 = std::chrono::steady_clock::now();
  auto r = check(k, k.full_team(), f);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.strategy == "poormans");
  CHECK(secs < 1.0);
}

TEST_CASE("semantic invariants") {
  std::mt19937 rng(12);
  std::uint16_t ml = kBox | kDiamond | kAnd | kDepOr | kNeg | kTop | kBot;
  for (int i = 0; i < 300; ++i) {
    auto k = corpus::random_kripke(rng, 3, kProps);
    auto t = corpus::random_team(rng, 3);
    auto f = corpus::random_formula(rng, kAllOps & ~kImpl, kProps, 3);
    if (eval(k, t, f))
      naive::any_subteam(t, [&](const Team& s) {
        CHECK(eval(k, s, f));
        return false;
      });
    auto g = corpus::random_formula(rng, ml, kProps, 3);
    bool all = true;
    for (int w : members(t)) {
      bool single = eval(k, k.singleton(w), g);
      CHECK(single == naive::holds(k, w, g));
      all = all && single;
    }
    CHECK(eval(k, t, g) == all);
  }
}

TEST_CASE("extension_of") {
  std::mt19937 rng(13);
  std::uint16_t ml = kBox | kDiamond | kAnd | kDepOr | kNeg | kTop | kBot;
  for (int i = 0; i < 100; ++i) {
    auto k = corpus::random_kripke(rng, 4, kProps);
    auto f = corpus::random_formula(rng, ml, kProps, 3);
    Team e = extension_of(k, f);
    for (int w = 0; w < 4; ++w) CHECK(e[w] == naive::holds(k, w, f));
  }
}
