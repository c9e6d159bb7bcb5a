// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit status
// if any criterion fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "fixture.hpp"
#include "fo_corpus.hpp"
#include "naive.hpp"
#include "tdl/folog.hpp"
#include "tdl/mc.hpp"
#include "tdl/reductions.hpp"
#include "tdl/sat.hpp"

using namespace tdl;
using F = Formula;
using G = FoFormula;

namespace {

struct Tally {
  long checks = 0;
  long violations = 0;
  std::string first;
  std::string note;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (violations++ == 0) first = what;
  }
  template <class Fn>
  void expect_lazy(bool ok, Fn what) {
    ++checks;
    if (ok) return;
    if (violations++ == 0) first = what();
  }
};

// ------------------------------------------------------------- structures

// Every structure over worlds w0..w(n-1) with the given propositions; with
// edges=false only the edgeless ones.
template <class Fn>
void each_kripke(int n, const std::vector<std::string>& props, bool edges, Fn fn) {
  int lbits = n * static_cast<int>(props.size());
  int ebits = edges ? n * n : 0;
  for (std::uint64_t e = 0; e < (std::uint64_t{1} << ebits); ++e)
    for (std::uint64_t lab = 0; lab < (std::uint64_t{1} << lbits); ++lab) {
      KripkeStructure k;
      for (int w = 0; w < n; ++w) k.add_world("w" + std::to_string(w));
      for (const auto& p : props) k.declare_prop(p);
      for (int b = 0; b < ebits; ++b)
        if ((e >> b) & 1) k.add_edge(b / n, b % n);
      for (int b = 0; b < lbits; ++b)
        if ((lab >> b) & 1) k.set_label(b / props.size(), props[b % props.size()]);
      fn(k);
    }
}

std::vector<Team> all_teams(std::size_t n) {
  std::vector<Team> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Team t(n);
    for (std::size_t w = 0; w < n; ++w) t[w] = (m >> w) & 1;
    out.push_back(t);
  }
  return out;
}

bool run(const McInstance& i) { return check(i.structure, i.team, i.formula).value; }

std::string cnf_text(const CnfInstance& c) {
  std::ostringstream s;
  s << c.num_vars << ":";
  for (const auto& cl : c.clauses) {
    s << " (";
    for (std::size_t i = 0; i < cl.size(); ++i) s << (i ? " " : "") << cl[i];
    s << ")";
  }
  return s.str();
}

// The negation of a CNF as a DNF over p1..pn; a tautology iff c is unsat.
F negated_cnf(const CnfInstance& c) {
  std::vector<F> terms;
  for (const auto& cl : c.clauses) {
    std::vector<F> lits;
    for (int l : cl) {
      std::string a = "p" + std::to_string(l > 0 ? l : -l);
      lits.push_back(l > 0 ? F::neg_atom(a) : F::atom(a));
    }
    terms.push_back(conj_all(lits));
  }
  // An empty CNF is valid, so its negation is p1 & !p1.
  if (terms.empty()) return F::conj(F::atom("p1"), F::neg_atom("p1"));
  return classical_or_all(terms);
}

// ------------------------------------------------------------ criterion 1

using CnfGen = McInstance (*)(const CnfInstance&);
const std::vector<std::pair<const char*, CnfGen>> kCnfGens{
    {"wedge-vee", gen_mc_wedge_vee},     {"diamond", gen_mc_diamond},
    {"box-vee", gen_mc_box_vee},         {"diamond-wedge", gen_mc_diamond_wedge},
    {"diamond-vee", gen_mc_diamond_vee}, {"vee-nor", gen_mc_vee_nor},
};

Tally oracle_equivalence() {
  Tally t;
  std::vector<CnfInstance> cnfs;
  for (int n = 1; n <= 3; ++n)
    for (auto& c : corpus::all_cnfs(n, 4)) cnfs.push_back(std::move(c));
  std::size_t exhaustive = cnfs.size();
  std::mt19937 rng(1001);
  for (int i = 0; i < 200; ++i) cnfs.push_back(corpus::random_cnf(rng, 5, 6));

  for (const auto& c : cnfs) {
    bool want = naive::sat(c);
    t.expect(oracle_sat3(c) == want, "oracle_sat3 " + cnf_text(c));
    for (const auto& [name, gen] : kCnfGens)
      t.expect_lazy(run(gen(c)) == want, [&] { return std::string(name) + " " + cnf_text(c); });
    t.expect_lazy(run(gen_mc_pidl_taut(negated_cnf(c))) == !want,
                  [&] { return "pidl-taut " + cnf_text(c); });
  }

  // QBF: n = 2 over two variables, n = 4 over the first three, all with at
  // most four clauses; then random prefixes over up to five variables.
  std::vector<QbfInstance> qbfs;
  for (auto& c : corpus::all_cnfs(2, 4)) qbfs.push_back(corpus::alternating(2, c.clauses));
  for (int n = 1; n <= 3; ++n)
    for (auto& c : corpus::all_cnfs(n, 4)) qbfs.push_back(corpus::alternating(4, c.clauses));
  std::size_t qexhaustive = qbfs.size();
  for (int i = 0; i < 200; ++i) qbfs.push_back(corpus::random_qbf(rng, 5, 5));
  for (const auto& q : qbfs) {
    bool want = naive::qbf(q);
    t.expect(oracle_qbf(q) == want, "oracle_qbf");
    t.expect(run(gen_mc_midl_qbf_sor(q)) == want, "midl-qbf-sor");
    t.expect(run(gen_mc_midl_qbf_diamond(q)) == want, "midl-qbf-diamond");
  }
  t.note = std::to_string(exhaustive) + "+200 CNFs, " + std::to_string(qexhaustive) +
           "+200 QBFs";
  return t;
}

// ------------------------------------------------------------ criterion 2

Tally figure_fixtures() {
  Tally t;
  // Example chains for (-x1 | x2 | x3) & (x2 | -x3 | x4) & (x1 | -x2): true.
  CnfInstance ex{4, {{-1, 2, 3}, {2, -3, 4}, {1, -2}}};
  auto bv = gen_mc_box_vee(ex);
  t.expect(bv.structure.num_worlds() == 19 && bv.structure.num_edges() == 17,
           "box-vee shape");
  t.expect(eval(bv.structure, bv.team, bv.formula), "box-vee example is true");

  // x1 | -x2, x1 | x2 | x3, -x1 | x3: true.
  auto dw = gen_mc_diamond_wedge({3, {{1, -2}, {1, 2, 3}, {-1, 3}}});
  t.expect(dw.structure.num_worlds() == 27 && dw.structure.num_edges() == 49,
           "diamond-wedge shape");
  t.expect(eval(dw.structure, dw.team, dw.formula), "diamond-wedge figure is true");

  // -p2, p2 | -p3, -p1: true.
  auto dv = gen_mc_diamond_vee({3, {{-2}, {2, -3}, {-1}}});
  t.expect(dv.structure.num_worlds() == 15 && dv.structure.num_edges() == 9,
           "diamond-vee shape");
  t.expect(eval(dv.structure, dv.team, dv.formula), "diamond-vee figure is true");

  // forall x1 exists x2 forall x3 exists x4 (-x1 | x2 | x3) & (x1 | -x2 | x4): true.
  auto q = parse_qdimacs(read_fixture("example.qdimacs"));
  auto kq = gen_mc_midl_qbf_sor(q);
  t.expect(kq.structure.num_worlds() == 8 && kq.structure.num_edges() == 0, "K' shape");
  t.expect(eval(kq.structure, kq.team, kq.formula), "K' instance is true");
  return t;
}

// ------------------------------------------------------------ criterion 3

std::vector<F> invariant_corpus(const std::vector<std::string>& props) {
  auto leaves = corpus::literals(props);
  for (const auto& p : props) {
    leaves.push_back(F::dep({}, p));
    leaves.push_back(F::neg_dep({}, p));
    for (const auto& q : props)
      if (q != p) leaves.push_back(F::dep({q}, p));
  }
  return corpus::all_formulas(leaves, kBox | kDiamond | kAnd | kDepOr | kClassicalOr, 1, 1);
}

void check_invariants(Tally& t, const KripkeStructure& k, const std::vector<Team>& teams,
                      const F& f, bool ml) {
  std::vector<char> value(teams.size());
  for (std::size_t i = 0; i < teams.size(); ++i) value[i] = eval(k, teams[i], f);
  t.expect_lazy(value[0], [&] { return "empty team: " + render(f); });
  // teams[i] is the team with bit mask i, so subteams are submasks.
  for (std::size_t i = 0; i < teams.size(); ++i) {
    if (!value[i]) continue;
    for (std::size_t s = i; s; s = (s - 1) & i)
      t.expect_lazy(value[s], [&] { return "downward closure: " + render(f); });
  }
  if (!ml) return;
  std::vector<char> point(k.num_worlds());
  for (std::size_t w = 0; w < k.num_worlds(); ++w) {
    point[w] = naive::holds(k, static_cast<int>(w), f);
    t.expect_lazy(value[std::size_t{1} << w] == point[w],
                  [&] { return "singleton equivalence: " + render(f); });
  }
  for (std::size_t i = 0; i < teams.size(); ++i) {
    bool all = true;
    for (std::size_t w = 0; w < k.num_worlds(); ++w)
      if ((i >> w) & 1) all = all && point[w];
    t.expect_lazy(value[i] == all, [&] { return "flatness: " + render(f); });
  }
}

Tally semantic_invariants() {
  Tally t;
  auto is_ml = [](const F& f) {
    auto s = signature_of(f);
    return s.subset_of(kBox | kDiamond | kAnd | kDepOr | kNeg | kTop | kBot);
  };
  auto fs = invariant_corpus({"p", "q"});
  std::vector<char> ml;
  for (const auto& f : fs) ml.push_back(is_ml(f));
  // Every structure with at most 3 worlds over two propositions, all teams.
  long structures = 0;
  for (int n = 1; n <= 3; ++n) {
    auto teams = all_teams(n);
    each_kripke(n, {"p", "q"}, true, [&](const KripkeStructure& k) {
      ++structures;
      for (std::size_t i = 0; i < fs.size(); ++i) check_invariants(t, k, teams, fs[i], ml[i]);
    });
  }
  auto teams3 = all_teams(3);
  // Deeper formulas over two propositions on random 3-world structures.
  std::mt19937 rng(1003);
  for (int i = 0; i < 3000; ++i) {
    auto k = corpus::random_kripke(rng, 3, {"p", "q"});
    auto f = corpus::random_formula(rng, kAllOps & ~kImpl, {"p", "q"}, 3);
    check_invariants(t, k, teams3, f, is_ml(f));
  }
  t.note = std::to_string(fs.size()) + " formulas on " + std::to_string(structures) +
           " structures";
  return t;
}

// ------------------------------------------------------------ criterion 4

void equivalent_everywhere(Tally& t, const F& a, const F& b, int max_worlds,
                           const std::vector<std::string>& props, const std::string& what) {
  for (int n = 1; n <= max_worlds; ++n) {
    auto teams = all_teams(n);
    // Modal-free formulas only see labels, so edges are enumerated only
    // when a modality occurs.
    bool modal = a.modal_depth() > 0 || b.modal_depth() > 0;
    each_kripke(n, props, modal, [&](const KripkeStructure& k) {
      for (const auto& s : teams)
        t.expect_lazy(eval(k, s, a) == eval(k, s, b), [&] { return what + ": " + render(a); });
    });
  }
}

Tally equivalence_lemmas() {
  Tally t;
  const std::vector<std::string> pq{"p", "q"};
  F q = F::atom("q");
  equivalent_everywhere(t, F::dep({}, "q"), F::classical_or(q, F::neg_atom("q")), 3, pq,
                        "dep(;q) vs q cor !q");

  equivalent_everywhere(t, F::dep({}, "q"), expand_dep_via_classical_or(F::dep({}, "q")), 3, pq,
                        "expansion n=0");
  equivalent_everywhere(t, F::dep({"p"}, "q"), expand_dep_via_classical_or(F::dep({"p"}, "q")), 3,
                        pq, "expansion n=1");
  // Two determinants need a third proposition.
  F d2 = F::dep({"p", "r"}, "q");
  equivalent_everywhere(t, d2, expand_dep_via_classical_or(d2), 3, {"p", "q", "r"},
                        "expansion n=2");

  // The rewrites inside every one-connective context, then on random
  // formulas with one modality over two worlds.
  std::vector<F> neg_inputs, dep_inputs, impl_inputs;
  auto lits = corpus::literals(pq);
  auto ml = corpus::all_formulas(lits, kBox | kDiamond | kAnd | kDepOr, 1, 1);
  for (const auto& a : lits) {
    neg_inputs.push_back(F::conj(F::neg_atom("p"), a));
    neg_inputs.push_back(F::split_or(F::neg_atom("q"), a));
    neg_inputs.push_back(F::classical_or(F::neg_atom("p"), a));
  }
  for (const auto& d : {F::dep({"p"}, "q"), F::dep({"q"}, "p"), F::dep({"p", "q"}, "p")})
    for (const auto& a : lits) {
      dep_inputs.push_back(F::conj(d, a));
      dep_inputs.push_back(F::split_or(d, a));
    }
  for (const auto& a : ml)
    for (const auto& b : lits) impl_inputs.push_back(F::impl(a, b));
  int rules = 0;
  for (auto [rule, inputs] : {std::pair{MidlRule::NegAsImpl, &neg_inputs},
                              std::pair{MidlRule::DepAsImpl, &dep_inputs},
                              std::pair{MidlRule::ImplAsDualOr, &impl_inputs}}) {
    ++rules;
    for (const auto& f : *inputs) {
      F g = midl_rewrites(f, rule);
      int worlds = f.modal_depth() > 0 ? 2 : 3;
      equivalent_everywhere(t, f, g, worlds, pq, "rule " + std::to_string(rules));
      if (f.modal_depth() == 0) {
        equivalent_everywhere(t, F::box(f), F::box(g), 2, pq, "rule under box");
        equivalent_everywhere(t, F::dia(f), F::dia(g), 2, pq, "rule under diamond");
      }
    }
  }
  t.note = std::to_string(neg_inputs.size() + dep_inputs.size() + impl_inputs.size()) +
           " rewrite inputs";
  return t;
}

// ------------------------------------------------------------ criterion 5

Tally fast_paths() {
  Tally t;
  const std::vector<std::string> pq{"p", "q"};
  struct Path {
    const char* name;
    std::uint16_t ops;
    int arity;
    std::function<bool(const KripkeStructure&, const Team&, const F&)> run;
    std::function<bool(const KripkeStructure&, const F&)> admissible;
  };
  auto any = [](const KripkeStructure&, const F&) { return true; };
  std::vector<Path> paths{
      {"poormans", kBox | kAnd | kClassicalOr | kNeg | kDep | kTop | kBot, 1,
       [](auto& k, auto& s, auto& f) { return eval_poormans(k, s, f); }, any},
      {"vee_bounded", kDepOr | kNeg | kDep | kTop | kBot, 1,
       [](auto& k, auto& s, auto& f) { return eval_vee_bounded(k, s, f, 1); }, any},
      {"nor_unary", kBox | kDiamond | kClassicalOr | kNeg | kDep | kTop | kBot, 1,
       [](auto& k, auto& s, auto& f) { return eval_nor_unary(k, s, f); }, any},
      {"few_deps", kBox | kDiamond | kAnd | kDepOr | kClassicalOr | kNeg | kDep | kTop | kBot, 1,
       [](auto& k, auto& s, auto& f) { return eval_few_deps(k, s, f, 1); },
       [](const KripkeStructure& k, const F& f) {
         return (std::uint64_t{1} << count_positive_deps(f)) <= k.num_worlds();
       }},
  };

  std::mt19937 rng(1005);
  std::ostringstream note;
  for (const auto& path : paths) {
    // Seeded random instances.
    int ran = 0;
    for (int i = 0; ran < 600; ++i) {
      auto k = corpus::random_kripke(rng, 1 + i % 6, pq);
      auto s = corpus::random_team(rng, k.num_worlds());
      auto f = corpus::random_formula(rng, path.ops, pq, 4, path.arity);
      if (!path.admissible(k, f)) continue;
      ++ran;
      t.expect_lazy(path.run(k, s, f) == eval(k, s, f),
                    [&] { return std::string(path.name) + ": " + render(f); });
    }
    // Exhaustive: every in-signature formula with one connective, every
    // 2-world structure, every team.
    auto leaves = corpus::literals(pq);
    if (path.ops & kDep)
      for (auto d : {F::dep({}, "p"), F::dep({"p"}, "q"), F::dep({"q"}, "p")})
        leaves.push_back(d);
    auto fs = corpus::all_formulas(leaves, path.ops, 1, 1);
    std::vector<F> ok;
    for (const auto& f : fs)
      if (signature_of(f).subset_of(path.ops)) ok.push_back(f);
    auto teams = all_teams(2);
    long exhaustive = 0;
    each_kripke(2, pq, true, [&](const KripkeStructure& k) {
      for (const auto& f : ok) {
        if (!path.admissible(k, f)) continue;
        for (const auto& s : teams) {
          ++exhaustive;
          t.expect_lazy(path.run(k, s, f) == eval(k, s, f),
                        [&] { return std::string(path.name) + " exhaustive: " + render(f); });
        }
      }
    });
    note << path.name << " " << ran << "+" << exhaustive << "; ";
  }

  auto k = corpus::random_kripke(rng, 200, pq, 0.02);
  F f = corpus::random_formula(rng, paths[0].ops, pq, 4);
  for (int d = 0; d < 20; ++d)
    f = d % 2 ? F::box(f) : F::conj(F::box(f), F::classical_or(F::dep({"p"}, "q"), F::atom("p")));
  auto t0 = std::chrono::steady_clock::now();
  eval_poormans(k, k.full_team(), f);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t.expect(f.modal_depth() >= 20, "smoke instance depth");
  t.expect(secs < 1.0, "poormans on 200 worlds took " + std::to_string(secs) + "s");
  note << "200-world depth-" << f.modal_depth() << " poormans " << static_cast<int>(secs * 1000)
       << "ms";
  t.note = note.str();
  return t;
}

// ------------------------------------------------------------ criterion 6

int search_bound(const F& f) {
  return f.size() >= 4 ? 16 : std::min(16, 1 << f.size());
}

bool phi_T_sat(const F& f) {
  bool found = false;
  translate_phi_T(f, 1, [&](const F& g) {
    found = ladner_sat(g);
    return !found;
  });
  return found;
}

Tally sat_pipeline() {
  Tally t;
  auto lits = corpus::literals({"p", "q"});
  auto ml = corpus::all_formulas(lits, kBox | kDiamond | kAnd | kDepOr, 2, 2);
  for (const auto& f : ml) {
    bool l = ladner_sat(f);
    t.expect_lazy(l == sat_bounded(f, search_bound(f)).has_value(),
                  [&] { return "ladner: " + render(f); });
  }

  auto leaves = lits;
  for (auto d : {F::dep({}, "p"), F::dep({}, "q"), F::dep({"p"}, "q"), F::dep({"q"}, "p")})
    leaves.push_back(d);
  auto mdl = corpus::all_formulas(leaves, kBox | kDiamond | kAnd | kDepOr, 2, 2);
  long tried = 0, skipped = 0;
  for (const auto& f : mdl) {
    int deps = count_positive_deps(f);
    if (deps == 0 || deps > 2) continue;
    int bound = search_bound(f);
    if (!sat_bounded_is_exhaustive(f, bound)) {
      ++skipped;
      continue;
    }
    ++tried;
    t.expect_lazy(phi_T_sat(f) == sat_bounded(f, bound).has_value(),
                  [&] { return "phi_T: " + render(f); });
  }
  t.expect(skipped == 0, std::to_string(skipped) + " formulas exceed the search bound");
  t.note = std::to_string(ml.size()) + " ML, " + std::to_string(tried) + " MDL_1";
  return t;
}

// ------------------------------------------------------------ criterion 7

Tally sat_generators() {
  Tally t;
  std::mt19937 rng(1007);
  int dq = 0, q3 = 0, qc = 0;
  for (int it = 0; it < 40; ++it) {
    DqbfInstance d;
    d.num_vars = 1 + rng() % 3;
    d.num_universals = rng() % (d.num_vars + 1);
    for (int i = d.num_universals + 1; i <= d.num_vars; ++i) {
      std::vector<int> deps;
      for (int u = 1; u <= d.num_universals; ++u)
        if (rng() % 2) deps.push_back(u);
      d.deps.push_back(deps);
    }
    int m = rng() % 4;
    for (int i = 0; i < m; ++i) d.clauses.push_back(corpus::random_clause(rng, d.num_vars, 3));
    bool want = naive::dqbf(d);
    dq += want;
    auto k = clause_tree(d.num_vars, d.clauses);
    t.expect(eval(k, k.singleton(0), gen_sat_dqbf(d)) == want, "dqbf");
  }
  for (int it = 0; it < 40; ++it) {
    QbfInstance q = corpus::random_qbf(rng, 4, 4);
    int n = q.num_vars;
    int a = rng() % (n + 1);
    int b = a + rng() % (n - a + 1);
    q.prefix = {{Quant::Exists, {}}, {Quant::Forall, {}}, {Quant::Exists, {}}};
    for (int v = 1; v <= n; ++v) q.prefix[v <= a ? 0 : v <= b ? 1 : 2].vars.push_back(v);
    bool want = naive::qbf(q);
    q3 += want;
    auto k = qbf3_tree(q);
    t.expect(eval(k, k.singleton(0), gen_sat_qbf3(q)) == want, "qbf3");
  }
  for (int it = 0; it < 30; ++it) {
    QcspInstance q;
    q.num_vars = 3 + rng() % 2;
    q.num_universals = rng() % 3;
    int m = rng() % 3;
    for (int i = 0; i < m; ++i) {
      std::vector<int> vs;
      for (int v = 1; v <= q.num_vars; ++v) vs.push_back(v);
      std::shuffle(vs.begin(), vs.end(), rng);
      q.clauses.push_back({vs[0], vs[1], vs[2]});
    }
    // The formula is satisfiable iff the QCSP instance is false.
    F h = gen_sat_qcsp(q);
    bool satisfiable = false;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << count_classical_or(h)) && !satisfiable; ++i)
      satisfiable = ladner_sat(distribute_classical_or(h, i));
    bool want = naive::qcsp(q);
    qc += want;
    t.expect(satisfiable != want, "qcsp");
  }
  t.expect(dq > 0 && dq < 40 && q3 > 0 && q3 < 40 && qc > 0 && qc < 30,
           "corpus lacks true or false instances");
  t.note = "40 dqbf, 40 qbf3, 30 qcsp";
  return t;
}

// ------------------------------------------------------------ criterion 8

Tally first_order_suite() {
  Tally t;
  auto fs = fo_corpus::two_variable_corpus();
  for (int n = 1; n <= 2; ++n)
    fo_corpus::each_structure(n, [&](const FoStructure& a) {
      for (const auto& x : fo_corpus::all_teams(a, {"x", "y"}))
        for (const auto& f : fs) {
          bool v = fo_eval(a, x, f);
          G g = translate_d2_to_if2(f);
          t.expect_lazy(fo_eval(a, x, g) == v, [&] { return "d2->if2: " + render(f); });
          t.expect_lazy(fo_eval(a, x, translate_if2_to_d3(g)) == v,
                        [&] { return "if2->d3: " + render(f); });
        }
    });

  for (auto text : {"dep(x;y)", "E y. (dep(x;y) & P(y))", "dep(;x) | P(x)"}) {
    G f = parse_fo(text);
    auto e = translate_d_to_eso(f);
    for (int mp = 0; mp < 4; ++mp) {
      auto s = fo_universe(2);
      s.declare("P", 1);
      for (int i = 0; i < 2; ++i)
        if ((mp >> i) & 1) s.add_tuple("P", {i});
      for (const auto& x : fo_corpus::all_teams(s, e.team_vars))
        t.expect(fo_eval(s, x, f) == eso_holds(s, x, e), std::string("eso: ") + text);
    }
  }

  std::set<std::string> names;
  for (const auto& [name, c] : grid_conjuncts()) names.insert(name);
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n) {
      auto a = gen_grid(m, n);
      t.expect(fo_models(a, gen_phi_grid()), "grid formula on a grid");
      for (auto rel : {"H", "V"})
        for (const auto& e : a.relations.at(rel).tuples) {
          auto b = a;
          b.relations[rel].tuples.erase(e);
          auto failed = failed_grid_conjuncts(b);
          bool named = !failed.empty();
          for (const auto& c : failed) named = named && names.count(c);
          t.expect(named, "mutant without a named failing conjunct");
          t.expect(!fo_models(b, gen_phi_grid()), "mutant satisfies the grid formula");
        }
    }

  std::vector<Tile> tiles;
  for (int m = 0; m < 16; ++m)
    tiles.push_back({m & 1 ? "b" : "a", m & 2 ? "b" : "a", m & 4 ? "b" : "a", m & 8 ? "b" : "a"});
  auto sq = gen_grid(1, 1);
  int sets = 0;
  for (int i = -1; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) {
      TileSet ts;
      if (i >= 0) ts.tiles.push_back(tiles[i]);
      ts.tiles.push_back(tiles[j]);
      if (i < 0 && j == 0) {
        TileSet none;
        t.expect(!tile_bruteforce(sq, none, std::nullopt) &&
                     !expansion_exists(sq, tile_relations(none), gen_phi_tiling(none)),
                 "empty tile set");
      }
      ++sets;
      for (auto border : {std::optional<std::string>{}, std::optional<std::string>{"a"},
                          std::optional<std::string>{"b"}}) {
        G phi = gen_phi_tiling(ts);
        if (border) phi = G::conj(phi, gen_phi_border(ts, *border));
        t.expect(expansion_exists(sq, tile_relations(ts), phi) ==
                     tile_bruteforce(sq, ts, border).has_value(),
                 "tiling");
      }
    }
  t.note = std::to_string(fs.size()) + " FO formulas, " + std::to_string(sets + 1) + " tile sets";
  return t;
}

// ------------------------------------------------------------ criterion 9

struct TableRow {
  std::string pattern;
  std::string cls;
};

struct Table {
  std::string name;
  Problem problem;
  bool bounded;
  std::vector<std::uint16_t> columns;
  std::vector<TableRow> rows;
};

std::vector<Table> load_tables(const std::string& text) {
  std::vector<Table> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::string head;
    s >> head;
    if (head == "table") {
      Table t;
      std::string problem, regime;
      s >> t.name >> problem >> regime;
      t.problem = problem == "sat" ? Problem::Sat : Problem::Mc;
      t.bounded = regime == "bounded";
      out.push_back(t);
    } else if (head == "columns") {
      for (std::string c; s >> c;) {
        if (c == "dia") c = "diamond";
        auto k = op_kind_from_name(c);
        if (!k) throw std::runtime_error("unknown column " + c);
        out.back().columns.push_back(*k);
      }
    } else {
      TableRow r{head, ""};
      for (std::string tok; s >> tok;) {
        if (tok == "+" || tok == "-" || tok == "*") r.pattern += tok;
        else r.cls = tok;
      }
      out.back().rows.push_back(r);
    }
  }
  return out;
}

// What the row should print for a fragment it decides.
std::string expected_text(const Table& t, const std::string& cls) {
  std::string v;
  if (cls == "P" || cls == "in-P") v = "in P";
  else if (cls == "Trivial") v = "Trivial";
  else if (cls == "in-NP") v = "Unclassified";
  else if (cls.find("-complete") != std::string::npos) v = cls;
  else v = cls + "-complete";
  return v + " (Table " + t.name + ")";
}

Tally classifier_totality() {
  Tally t;
  auto tables = load_tables(read_fixture("tables.txt"));
  t.expect(tables.size() == 4, "four tables");
  const std::uint16_t universe[] = {kBox, kDiamond, kAnd, kDepOr, kClassicalOr,
                                    kNeg, kTop,     kBot, kDep};
  long verdicts = 0;
  for (const auto& table : tables) {
    std::vector<std::optional<int>> arities;
    if (!table.bounded) arities = {std::nullopt};
    else if (table.problem == Problem::Sat) arities = {3, 4};
    else arities = {1, 3};
    for (auto arity : arities)
      for (int m = 0; m < 512; ++m) {
        std::uint16_t ops = 0;
        for (int b = 0; b < 9; ++b)
          if ((m >> b) & 1) ops |= universe[b];
        const TableRow* row = nullptr;
        for (const auto& r : table.rows) {
          bool ok = true;
          for (std::size_t c = 0; c < table.columns.size() && ok; ++c) {
            bool present = ops & table.columns[c];
            ok = r.pattern[c] == '*' || (r.pattern[c] == '+') == present;
          }
          if (ok) {
            row = &r;
            break;
          }
        }
        auto v = classify(FragmentSignature{ops, arity}, table.problem);
        ++verdicts;
        std::string sig = describe(FragmentSignature{ops, arity});
        t.expect(row != nullptr, table.name + " has no row for " + sig);
        t.expect(!v.citation.empty(), "no citation for " + sig);
        if (!row) continue;
        t.expect(v.text() == expected_text(table, row->cls),
                 table.name + " " + sig + ": got " + v.text());
        if (row->cls == "in-NP") t.expect(v.citation.find("in NP") != std::string::npos,
                                          "in-NP row citation for " + sig);
      }
  }
  t.note = std::to_string(verdicts) + " verdicts";
  return t;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Tally (*run)();
  };
  const Criterion criteria[] = {
      {"oracle equivalence of MC reductions", oracle_equivalence},
      {"figure instances", figure_fixtures},
      {"semantic invariants", semantic_invariants},
      {"equivalence lemmas", equivalence_lemmas},
      {"fast-path conformance", fast_paths},
      {"satisfiability pipeline", sat_pipeline},
      {"SAT reduction generators", sat_generators},
      {"first-order suite", first_order_suite},
      {"classifier totality", classifier_totality},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    auto t0 = std::chrono::steady_clock::now();
    Tally t;
    try {
      t = c.run();
    } catch (const std::exception& e) {
      t.violations = 1;
      t.first = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = t.violations == 0;
    failed += !ok;
    std::cout << "criterion " << index << ": " << (ok ? "PASS" : "FAIL") << "  " << c.name
              << "  checks=" << t.checks << " violations=" << t.violations;
    std::printf("  %.1fs", secs);
    if (!t.note.empty()) std::cout << "  [" << t.note << "]";
    if (!ok) std::cout << "  first: " << t.first;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
