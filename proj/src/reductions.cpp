#include "tdl/reductions.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>

namespace tdl {

namespace {

std::string num(const char* stem, int j) { return stem + std::to_string(j); }
std::string num(const char* stem, int a, int b) {
  return stem + std::to_string(a) + "_" + std::to_string(b);
}

int var_of(int lit) { return lit < 0 ? -lit : lit; }

void check_clauses(int num_vars, const std::vector<Clause>& clauses,
                   std::size_t width) {
  if (num_vars < 0) throw ReductionError("negative variable count");
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (clauses[i].size() > width)
      throw ReductionError("clause " + std::to_string(i + 1) + " has " +
                           std::to_string(clauses[i].size()) +
                           " literals, at most " + std::to_string(width) +
                           " allowed");
    for (int l : clauses[i])
      if (l == 0 || var_of(l) > num_vars)
        throw ReductionError("literal " + std::to_string(l) +
                             " out of range in clause " +
                             std::to_string(i + 1));
  }
}

// Drops repeated literals and clauses containing both x and not x.
std::vector<Clause> tidy(const std::vector<Clause>& clauses) {
  std::vector<Clause> out;
  for (const auto& c : clauses) {
    Clause d;
    bool taut = false;
    for (int l : c) {
      if (std::find(d.begin(), d.end(), -l) != d.end()) taut = true;
      if (std::find(d.begin(), d.end(), l) == d.end()) d.push_back(l);
    }
    if (!taut) out.push_back(std::move(d));
  }
  return out;
}

bool clause_true(const Clause& c, const std::vector<char>& val) {
  for (int l : c)
    if ((l > 0) == static_cast<bool>(val[var_of(l)])) return true;
  return false;
}

bool cnf_true(const std::vector<Clause>& cs, const std::vector<char>& val) {
  return std::all_of(cs.begin(), cs.end(),
                     [&](const Clause& c) { return clause_true(c, val); });
}

// Index j of an atom named p<j>, or 0.
int p_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'p') return 0;
  int j = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i])) || j > 1000000)
      return 0;
    j = j * 10 + (name[i] - '0');
  }
  return j;
}

Formula map_atoms(const Formula& f,
                  const std::function<std::string(const std::string&)>& fn) {
  return transform(
      f, [](const Formula&) { return std::optional<Formula>{}; },
      [&](const Formula& g, const Formula* a, const Formula* b) {
        switch (g.op()) {
          case Op::Atom: return Formula::atom(fn(g.name()));
          case Op::NegAtom: return Formula::neg_atom(fn(g.name()));
          case Op::Top:
          case Op::Bot: return g;
          case Op::And:
          case Op::Or:
          case Op::Cor: return Formula::with_children(g, *a, *b);
          default:
            throw ReductionError("not a propositional NNF formula: " +
                                 render(g));
        }
      });
}

void require_propositional(const Formula& f) {
  map_atoms(f, [](const std::string& s) { return s; });
}

Formula literal(int l) {
  return l > 0 ? Formula::atom(num("p", l)) : Formula::neg_atom(num("p", -l));
}

// Atoms become r_i -> (neg) p_i and disjunction becomes classical.
Formula arrow_translation(const Formula& f,
                          const std::map<std::string, int>& index) {
  return transform(
      f, [](const Formula&) { return std::optional<Formula>{}; },
      [&](const Formula& g, const Formula* a, const Formula* b) {
        switch (g.op()) {
          case Op::Atom:
          case Op::NegAtom: {
            int i = index.at(g.name());
            Formula p = g.op() == Op::Atom ? Formula::atom(num("p", i))
                                           : Formula::neg_atom(num("p", i));
            return Formula::impl(Formula::atom(num("r", i)), p);
          }
          case Op::Top:
          case Op::Bot: return g;
          case Op::And: return Formula::conj(*a, *b);
          case Op::Or:
          case Op::Cor: return Formula::classical_or(*a, *b);
          default:
            throw ReductionError("not a propositional NNF formula: " +
                                 render(g));
        }
      });
}

// Worlds s_i labeled {r_i, p_i} and sbar_i labeled {r_i}, i = 1..n.
void add_value_pairs(KripkeStructure& k, int n) {
  for (int i = 1; i <= n; ++i) {
    k.declare_prop(num("r", i));
    k.declare_prop(num("p", i));
  }
  for (int i = 1; i <= n; ++i) {
    int s = k.add_world(num("s", i));
    int sb = k.add_world(num("sbar", i));
    k.set_label(s, num("r", i));
    k.set_label(s, num("p", i));
    k.set_label(sb, num("r", i));
  }
}

std::vector<std::pair<Quant, int>> flat_prefix(const QbfInstance& q) {
  std::vector<char> bound(q.num_vars + 1, 0);
  std::vector<std::pair<Quant, int>> order;
  for (const auto& b : q.prefix)
    for (int v : b.vars) {
      if (v < 1 || v > q.num_vars)
        throw ReductionError("quantified variable " + std::to_string(v) +
                             " out of range");
      if (bound[v])
        throw ReductionError("variable " + std::to_string(v) +
                             " quantified twice");
      bound[v] = 1;
      order.push_back({b.quant, v});
    }
  std::vector<std::pair<Quant, int>> out;
  for (int v = 1; v <= q.num_vars; ++v)
    if (!bound[v]) out.push_back({Quant::Exists, v});
  out.insert(out.end(), order.begin(), order.end());
  return out;
}

void check_qbf(const QbfInstance& q) {
  if (q.matrix) {
    require_propositional(*q.matrix);
    for (const auto& a : propositions_of(*q.matrix)) {
      int j = p_index(a);
      if (j < 1 || j > q.num_vars)
        throw ReductionError("matrix atom '" + a +
                             "' is not p<j> for a declared variable");
    }
  } else {
    check_clauses(q.num_vars, q.clauses, SIZE_MAX);
  }
}

}  // namespace

void validate_cnf(const CnfInstance& c) {
  check_clauses(c.num_vars, c.clauses, 3);
}

CnfInstance normalize_cnf(const CnfInstance& c) {
  validate_cnf(c);
  return {c.num_vars, tidy(c.clauses)};
}

McInstance gen_mc_wedge_vee(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  for (int j = 1; j <= c.num_vars; ++j) {
    k.declare_prop(num("r", j));
    k.declare_prop(num("p", j));
  }
  for (std::size_t i = 0; i < c.clauses.size(); ++i) {
    int w = k.add_world(num("s", static_cast<int>(i) + 1));
    for (int l : c.clauses[i]) {
      k.set_label(w, num("r", var_of(l)));
      if (l > 0) k.set_label(w, num("p", l));
    }
  }
  std::vector<Formula> parts;
  for (int j = 1; j <= c.num_vars; ++j)
    parts.push_back(Formula::conj(Formula::atom(num("r", j)),
                                  Formula::dep({}, num("p", j))));
  out.formula = split_or_all(parts);
  out.team = k.full_team();
  return out;
}

McInstance gen_mc_diamond(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  std::vector<std::string> dets;
  for (int j = 1; j <= c.num_vars; ++j) {
    k.declare_prop(num("p", j));
    dets.push_back(num("p", j));
  }
  k.declare_prop("q");
  const int m = static_cast<int>(c.clauses.size());
  for (int i = 1; i <= m; ++i) k.add_world(num("c", i));
  std::vector<int> pos(c.num_vars + 1), neg(c.num_vars + 1);
  for (int j = 1; j <= c.num_vars; ++j) {
    pos[j] = k.add_world(num("s", j) + "_1");
    neg[j] = k.add_world(num("s", j) + "_0");
    k.set_label(pos[j], num("p", j));
    k.set_label(pos[j], "q");
    k.set_label(neg[j], num("p", j));
  }
  for (int i = 0; i < m; ++i)
    for (int l : c.clauses[i]) k.add_edge(i, l > 0 ? pos[l] : neg[-l]);
  out.formula = Formula::dia(Formula::dep(dets, "q"));
  out.team = k.empty_team();
  for (int i = 0; i < m; ++i) out.team.set(i);
  return out;
}

McInstance gen_mc_box_vee(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  const int n = c.num_vars;
  const int m = static_cast<int>(c.clauses.size());
  for (int j = 1; j <= n; ++j) k.declare_prop(num("p", j));
  for (int i = 1; i <= m; ++i) k.add_world(num("s", i));
  for (int i = 1; i <= m; ++i) {
    // sign[j]: +1 positive, -1 negative, 0 absent
    std::vector<int> sign(n + 2, 0);
    for (int l : c.clauses[i - 1]) sign[var_of(l)] = l > 0 ? 1 : -1;
    std::vector<int> r(n + 1, -1), rbar(n + 1, -1);
    for (int j = 1; j <= n; ++j) {
      r[j] = k.add_world(num("r", i, j));
      if (sign[j] >= 0) k.set_label(r[j], num("p", j));
      // The side node only exists where the variable is absent.
      if (sign[j] == 0) rbar[j] = k.add_world(num("rbar", i, j));
    }
    if (n == 0) continue;
    int s = i - 1;
    k.add_edge(s, r[1]);
    if (sign[1] == 0) k.add_edge(s, rbar[1]);
    for (int j = 1; j < n; ++j) {
      k.add_edge(r[j], r[j + 1]);
      bool here = sign[j] != 0, next = sign[j + 1] != 0;
      if (here && !next) k.add_edge(r[j], rbar[j + 1]);
      if (!here && next) k.add_edge(rbar[j], r[j + 1]);
      if (!here && !next) k.add_edge(rbar[j], rbar[j + 1]);
    }
  }
  std::vector<Formula> parts;
  for (int j = 1; j <= n; ++j)
    parts.push_back(box_n(j, Formula::dep({}, num("p", j))));
  out.formula = split_or_all(parts);
  out.team = k.empty_team();
  for (int i = 0; i < m; ++i) out.team.set(i);
  return out;
}

McInstance gen_mc_diamond_wedge(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  const int n = c.num_vars;
  const int m = static_cast<int>(c.clauses.size());
  for (int j = 1; j <= n; ++j) {
    k.declare_prop(num("r", j));
    k.declare_prop(num("p", j));
  }
  for (int i = 1; i <= m; ++i) k.add_world(num("c", i));
  // s[lev][j], sb[lev][j]: ladder nodes at level lev for variable j.
  std::vector<std::vector<int>> s(n + 1, std::vector<int>(n + 1, -1));
  auto sb = s;
  for (int lev = 1; lev <= n; ++lev)
    for (int j = 1; j <= n; ++j) {
      s[lev][j] = k.add_world(num("s", lev, j));
      sb[lev][j] = k.add_world(num("sbar", lev, j));
    }
  std::vector<int> t(n + 1), tb(n + 1);
  for (int j = 1; j <= n; ++j) {
    t[j] = k.add_world(num("t", j));
    tb[j] = k.add_world(num("tbar", j));
    k.set_label(t[j], num("r", j));
    k.set_label(t[j], num("p", j));
    k.set_label(tb[j], num("r", j));
  }
  for (int i = 0; i < m; ++i)
    for (int l : c.clauses[i]) k.add_edge(i, l > 0 ? s[1][l] : sb[1][-l]);
  for (int lev = 1; lev <= n; ++lev)
    for (int j = 1; j <= n; ++j) {
      if (lev < n) {
        k.add_edge(s[lev][j], s[lev + 1][j]);
        k.add_edge(sb[lev][j], sb[lev + 1][j]);
      }
      // Sinks belong to the level; only the ladder of the level's own
      // variable is forced to its sign.
      k.add_edge(s[lev][j], t[lev]);
      k.add_edge(sb[lev][j], tb[lev]);
      if (j != lev) {
        k.add_edge(s[lev][j], tb[lev]);
        k.add_edge(sb[lev][j], t[lev]);
      }
    }
  std::vector<Formula> parts;
  for (int j = 1; j <= n; ++j)
    parts.push_back(dia_n(j, Formula::conj(Formula::atom(num("r", j)),
                                           Formula::dep({}, num("p", j)))));
  out.formula = Formula::dia(conj_all(parts));
  out.team = k.empty_team();
  for (int i = 0; i < m; ++i) out.team.set(i);
  return out;
}

McInstance gen_mc_diamond_vee(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  const int n = c.num_vars;
  const int m = static_cast<int>(c.clauses.size());
  for (int j = 1; j <= n; ++j) k.declare_prop(num("p", j));
  k.declare_prop("q");
  std::vector<int> starts;
  for (int i = 1; i <= m; ++i) {
    std::vector<int> sign(n + 1, 0);
    for (int l : c.clauses[i - 1]) sign[var_of(l)] = l > 0 ? 1 : -1;
    int prev = -1;
    for (int j = 1; j <= n; ++j) {
      int w = k.add_world(num("c", i, j));
      if (sign[j] == 0) k.set_label(w, "q");
      if (sign[j] > 0) k.set_label(w, num("p", j));
      if (prev >= 0) k.add_edge(prev, w);
      else starts.push_back(w);
      prev = w;
    }
  }
  for (int j = 1; j <= n; ++j) {
    int prev = -1;
    for (int jj = 1; jj <= j; ++jj) {
      int w = k.add_world(num("x", j, jj));
      k.set_label(w, "q");
      if (jj == j) k.set_label(w, num("p", j));
      if (prev >= 0) k.add_edge(prev, w);
      else starts.push_back(w);
      prev = w;
    }
  }
  // With no variables every clause is empty and must fail.
  if (n == 0)
    for (int i = 1; i <= m; ++i) starts.push_back(k.add_world(num("c", i, 1)));
  std::vector<Formula> parts;
  for (int j = 1; j <= n; ++j)
    parts.push_back(dia_n(j - 1, Formula::dep({"q"}, num("p", j))));
  out.formula = split_or_all(parts);
  out.team = k.empty_team();
  for (int w : starts) out.team.set(w);
  return out;
}

McInstance gen_mc_vee_nor(const CnfInstance& input) {
  CnfInstance c = normalize_cnf(input);
  McInstance out;
  KripkeStructure& k = out.structure;
  for (int j = 1; j <= c.num_vars; ++j) {
    k.declare_prop(num("p", j));
    k.declare_prop(num("q", j));
  }
  for (std::size_t i = 0; i < c.clauses.size(); ++i) {
    int w = k.add_world(num("c", static_cast<int>(i) + 1));
    for (int l : c.clauses[i])
      k.set_label(w, l > 0 ? num("p", l) : num("q", -l));
  }
  std::vector<Formula> parts;
  for (int j = 1; j <= c.num_vars; ++j)
    parts.push_back(Formula::classical_or(Formula::atom(num("p", j)),
                                          Formula::atom(num("q", j))));
  out.formula = split_or_all(parts);
  out.team = k.full_team();
  return out;
}

McInstance gen_mc_pidl_taut(const Formula& f) {
  require_propositional(f);
  auto atoms = propositions_of(f);
  std::map<std::string, int> index;
  for (const auto& a : atoms) index.emplace(a, static_cast<int>(index.size()) + 1);
  // A dummy variable keeps the team nonempty when f has no atoms.
  const int n = std::max<int>(1, static_cast<int>(atoms.size()));
  McInstance out;
  add_value_pairs(out.structure, n);
  std::vector<Formula> alpha;
  for (int i = 1; i <= n; ++i)
    alpha.push_back(Formula::impl(Formula::atom(num("r", i)),
                                  Formula::dep({}, num("p", i))));
  out.formula = Formula::impl(conj_all(alpha), arrow_translation(f, index));
  out.team = out.structure.full_team();
  return out;
}

QbfInstance alternate_prefix(const QbfInstance& q) {
  check_qbf(q);
  std::vector<int> rename(q.num_vars + 1, 0);
  int pos = 1;
  for (auto [quant, v] : flat_prefix(q)) {
    Quant expected = pos % 2 == 1 ? Quant::Forall : Quant::Exists;
    if (quant != expected) ++pos;
    rename[v] = pos++;
  }
  int n = pos - 1;
  if (n % 2 == 1) ++n;
  if (n == 0) n = 2;
  QbfInstance out;
  out.num_vars = n;
  for (int i = 1; i <= n; ++i)
    out.prefix.push_back({i % 2 == 1 ? Quant::Forall : Quant::Exists, {i}});
  for (const auto& c : q.clauses) {
    Clause d;
    for (int l : c) d.push_back(l > 0 ? rename[l] : -rename[-l]);
    out.clauses.push_back(std::move(d));
  }
  if (q.matrix)
    out.matrix = map_atoms(*q.matrix, [&](const std::string& a) {
      return num("p", rename[p_index(a)]);
    });
  return out;
}

McInstance gen_mc_midl_qbf_sor(const QbfInstance& input) {
  if (input.matrix)
    throw ReductionError("this construction needs a clause matrix");
  check_clauses(input.num_vars, input.clauses, 3);
  QbfInstance q = alternate_prefix(input);
  q.clauses = tidy(q.clauses);
  // Short clauses are padded with fresh universals placed last; setting
  // them false recovers the original clause.
  std::size_t shortest = 3;
  for (const auto& c : q.clauses) shortest = std::min(shortest, c.size());
  std::vector<int> pads;
  for (std::size_t i = shortest; i < 3; ++i) {
    pads.push_back(q.num_vars + 1);
    q.num_vars += 2;
  }
  for (auto& c : q.clauses)
    for (std::size_t i = 0; c.size() < 3; ++i) c.push_back(pads[i]);
  const int n = q.num_vars;
  const int m = static_cast<int>(q.clauses.size());

  McInstance out;
  KripkeStructure& k = out.structure;
  add_value_pairs(k, n);
  for (int j = 1; j <= m; ++j) {
    k.declare_prop(num("c", j));
    for (int l = 0; l < 3; ++l) k.declare_prop(num("c", j, l));
  }
  for (int j = 1; j <= m; ++j)
    for (int l = 0; l < 3; ++l) {
      int lit = q.clauses[j - 1][l];
      int w = 2 * (var_of(lit) - 1) + (lit > 0 ? 0 : 1);
      k.set_label(w, num("c", j));
      k.set_label(w, num("c", j, l));
    }

  std::vector<Formula> clauses;
  for (int j = 1; j <= m; ++j) {
    Formula d = conj_all({Formula::dep({}, num("c", j, 0)),
                          Formula::dep({}, num("c", j, 1)),
                          Formula::dep({}, num("c", j, 2))});
    clauses.push_back(
        Formula::impl(Formula::atom(num("c", j)), Formula::split_or(d, d)));
  }
  Formula theta = conj_all(clauses);
  auto pick = [](int i) {
    return Formula::conj(Formula::atom(num("r", i)),
                         Formula::dep({}, num("p", i)));
  };
  auto drop = [](int i) {
    return Formula::impl(Formula::atom(num("r", i)),
                         Formula::dep({}, num("p", i)));
  };
  for (int i = n; i >= 1; --i)
    theta = i % 2 == 0 ? Formula::split_or(pick(i), theta)
                       : Formula::impl(drop(i), theta);
  out.formula = theta;
  out.team = k.full_team();
  return out;
}

McInstance gen_mc_midl_qbf_diamond(const QbfInstance& input) {
  QbfInstance q = alternate_prefix(input);
  const int n = q.num_vars;
  McInstance out;
  KripkeStructure& k = out.structure;
  for (int i = 1; i <= n; ++i) {
    k.declare_prop(num("r", i));
    k.declare_prop(num("p", i));
  }
  std::vector<int> s(n + 1), sb(n + 1);
  for (int i = 1; i <= n; ++i) {
    s[i] = k.add_world(num("s", i));
    sb[i] = k.add_world(num("sbar", i));
    k.set_label(s[i], num("r", i));
    k.set_label(s[i], num("p", i));
    k.set_label(sb[i], num("r", i));
    k.add_edge(s[i], s[i]);
    k.add_edge(sb[i], sb[i]);
  }
  out.team = Team(k.num_worlds());
  for (int i = 1; i <= n; i += 2) {
    out.team.set(s[i]);
    out.team.set(sb[i]);
  }
  std::vector<int> heads;
  for (int i = 1; i <= n / 2; ++i) {
    int prev = k.add_world(num("t", i));
    heads.push_back(prev);
    for (int j = 1; j < i; ++j) {
      int w = k.add_world(num("t", i, j));
      k.add_edge(prev, w);
      prev = w;
    }
    k.add_edge(prev, s[2 * i]);
    k.add_edge(prev, sb[2 * i]);
  }
  out.team.resize(k.num_worlds());
  for (int h : heads) out.team.set(h);

  std::map<std::string, int> index;
  for (int i = 1; i <= n; ++i) index.emplace(num("p", i), i);
  Formula theta = Formula::dia(arrow_translation(qbf_matrix(q), index));
  for (int i = n - 1; i >= 1; i -= 2) {
    Formula drop = Formula::impl(Formula::atom(num("r", i)),
                                 Formula::dep({}, num("p", i)));
    theta = Formula::impl(drop, theta);
    if (i > 1) theta = Formula::dia(theta);
  }
  out.formula = theta;
  return out;
}

namespace {

void check_dqbf(const DqbfInstance& d) {
  if (d.num_universals < 0 || d.num_universals > d.num_vars)
    throw ReductionError("bad universal count");
  if (static_cast<int>(d.deps.size()) != d.num_vars - d.num_universals)
    throw ReductionError("one dependency set per existential expected");
  for (const auto& ds : d.deps)
    for (int u : ds)
      if (u < 1 || u > d.num_universals)
        throw ReductionError("dependency on " + std::to_string(u) +
                             ", which is not a universal variable");
  check_clauses(d.num_vars, d.clauses, 3);
}

// Parts (i)-(iii) of the binary-tree encoding, shared by the DQBF and the
// three-block QBF construction.
std::vector<Formula> tree_axioms(int n, const std::vector<Clause>& clauses) {
  std::vector<Formula> parts;
  for (int i = 1; i <= n; ++i) {
    Formula pos = Formula::dia(box_n(n - i, Formula::atom(num("p", i))));
    Formula neg = Formula::dia(box_n(n - i, Formula::neg_atom(num("p", i))));
    parts.push_back(box_n(i - 1, Formula::conj(pos, neg)));
  }
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    std::string f = num("f", static_cast<int>(i) + 1);
    std::vector<Formula> lits;
    std::vector<std::string> vars;
    for (int l : clauses[i]) {
      lits.push_back(literal(-l));
      std::string v = num("p", var_of(l));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    lits.push_back(Formula::atom(f));
    parts.push_back(dia_n(n, conj_all(lits)));
  }
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    std::vector<std::string> vars;
    for (int l : clauses[i]) {
      std::string v = num("p", var_of(l));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    parts.push_back(
        box_n(n, Formula::dep(vars, num("f", static_cast<int>(i) + 1))));
  }
  return parts;
}

std::vector<Formula> no_failed_clause(std::size_t m) {
  std::vector<Formula> out;
  for (std::size_t i = 1; i <= m; ++i)
    out.push_back(Formula::neg_atom(num("f", static_cast<int>(i))));
  return out;
}

}  // namespace

Formula gen_sat_dqbf(const DqbfInstance& d) {
  check_dqbf(d);
  const int n = d.num_vars, k = d.num_universals;
  auto clauses = tidy(d.clauses);
  auto parts = tree_axioms(n, clauses);
  auto leaf = no_failed_clause(clauses.size());
  for (int i = k + 1; i <= n; ++i) {
    std::vector<std::string> dets;
    for (int u : d.deps[i - k - 1]) dets.push_back(num("p", u));
    leaf.push_back(Formula::dep(dets, num("p", i)));
  }
  parts.push_back(box_n(k, dia_n(n - k, conj_all(leaf))));
  return conj_all(parts);
}

namespace {

struct ThreeBlocks {
  int n = 0, k = 0, l = 0;  // exists p1..pk, forall ..pl, exists ..pn
  std::vector<Clause> clauses;
};

ThreeBlocks three_blocks(const QbfInstance& q) {
  if (q.matrix) throw ReductionError("this construction needs a clause matrix");
  check_clauses(q.num_vars, q.clauses, 3);
  std::vector<int> rename(q.num_vars + 1, 0);
  int phase = 0, pos = 0;
  ThreeBlocks out;
  for (auto [quant, v] : flat_prefix(q)) {
    if (quant == Quant::Forall && phase == 0) phase = 1;
    if (quant == Quant::Exists && phase == 1) phase = 2;
    if (quant == Quant::Forall && phase == 2)
      throw ReductionError("prefix is not of the form exists forall exists");
    rename[v] = ++pos;
    if (phase == 0) out.k = pos;
    if (phase <= 1) out.l = pos;
  }
  out.n = q.num_vars;
  for (const auto& c : q.clauses) {
    Clause d;
    for (int lit : c) d.push_back(lit > 0 ? rename[lit] : -rename[-lit]);
    out.clauses.push_back(std::move(d));
  }
  out.clauses = tidy(out.clauses);
  return out;
}

}  // namespace

Formula gen_sat_qbf3(const QbfInstance& q) {
  ThreeBlocks b = three_blocks(q);
  auto parts = tree_axioms(b.n, b.clauses);
  std::vector<Formula> leaf;
  for (int i = 1; i <= b.k; ++i) leaf.push_back(Formula::dep({}, num("p", i)));
  for (auto& f : no_failed_clause(b.clauses.size())) leaf.push_back(f);
  parts.push_back(
      dia_n(b.k, box_n(b.l - b.k, dia_n(b.n - b.l, conj_all(leaf)))));
  return conj_all(parts);
}

KripkeStructure qbf3_tree(const QbfInstance& q) {
  ThreeBlocks b = three_blocks(q);
  return clause_tree(b.n, b.clauses);
}

Formula gen_sat_qcsp(const QcspInstance& input) {
  check_clauses(input.num_vars, input.clauses, 3);
  if (input.num_universals < 0 || input.num_universals > input.num_vars)
    throw ReductionError("bad universal count");
  for (const auto& c : input.clauses) {
    if (c.size() != 3) throw ReductionError("1-in-3 clauses need 3 variables");
    for (int l : c)
      if (l < 0) throw ReductionError("1-in-3 clauses are positive");
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
      throw ReductionError("1-in-3 clause variables must be pairwise distinct");
  }
  // Variables in no clause do not affect the answer; the construction
  // assumes they are absent.
  std::vector<int> rename(input.num_vars + 1, 0);
  std::vector<char> used(input.num_vars + 1, 0);
  for (const auto& c : input.clauses)
    for (int v : c) used[v] = 1;
  int n = 0, k = 0;
  for (int v = 1; v <= input.num_vars; ++v)
    if (used[v]) {
      rename[v] = ++n;
      if (v <= input.num_universals) k = n;
    }
  std::vector<Clause> cs;
  for (const auto& c : input.clauses)
    cs.push_back({rename[c[0]], rename[c[1]], rename[c[2]]});
  const int m = static_cast<int>(cs.size());

  auto nabla = [&](int i, Formula f) {
    for (int j = m - 1; j >= 0; --j) {
      bool in = std::find(cs[j].begin(), cs[j].end(), i) != cs[j].end();
      f = in ? Formula::dia(f) : Formula::box(f);
    }
    return f;
  };
  const Formula p = Formula::atom("p");
  std::vector<Formula> parts;
  for (int i = 1; i <= k; ++i) {
    Formula core = box_n(i - 1, Formula::dia(box_n(k - i, p)));
    parts.push_back(Formula::classical_or(nabla(i, nabla(i, core)),
                                          box_n(2 * m, core)));
  }
  for (int i = k + 1; i <= n; ++i) parts.push_back(nabla(i, nabla(i, box_n(k, p))));
  parts.push_back(box_n(2 * m + k, Formula::bot()));
  return conj_all(parts);
}

KripkeStructure clause_tree(int num_vars, const std::vector<Clause>& input) {
  check_clauses(num_vars, input, SIZE_MAX);
  auto clauses = tidy(input);
  if (num_vars > 20) throw ResourceError("clause tree deeper than 20 levels");
  KripkeStructure k;
  for (int j = 1; j <= num_vars; ++j) k.declare_prop(num("p", j));
  for (std::size_t i = 1; i <= clauses.size(); ++i)
    k.declare_prop(num("f", static_cast<int>(i)));
  // Node names spell the path: bit j is the value of p_j.
  std::vector<std::pair<int, std::string>> level{{k.add_world("v"), ""}};
  for (int d = 0; d < num_vars; ++d) {
    std::vector<std::pair<int, std::string>> next;
    for (const auto& [w, path] : level)
      for (char b : {'1', '0'}) {
        std::string pp = path + b;
        int c = k.add_world("v" + pp);
        k.add_edge(w, c);
        next.push_back({c, pp});
      }
    level = std::move(next);
  }
  for (const auto& [w, path] : level) {
    std::vector<char> val(num_vars + 1, 0);
    for (int j = 1; j <= num_vars; ++j) {
      val[j] = path[j - 1] == '1';
      if (val[j]) k.set_label(w, num("p", j));
    }
    for (std::size_t i = 0; i < clauses.size(); ++i)
      if (!clause_true(clauses[i], val))
        k.set_label(w, num("f", static_cast<int>(i) + 1));
  }
  return k;
}

bool eval_prop(const Formula& f,
               const std::function<bool(const std::string&)>& value) {
  switch (f.op()) {
    case Op::Top: return true;
    case Op::Bot: return false;
    case Op::Atom: return value(f.name());
    case Op::NegAtom: return !value(f.name());
    case Op::And: return eval_prop(f.left(), value) && eval_prop(f.right(), value);
    case Op::Or:
    case Op::Cor: return eval_prop(f.left(), value) || eval_prop(f.right(), value);
    default:
      throw ReductionError("not a propositional NNF formula: " + render(f));
  }
}

Formula cnf_formula(const std::vector<Clause>& clauses) {
  std::vector<Formula> cs;
  for (const auto& c : clauses) {
    std::vector<Formula> lits;
    for (int l : c) lits.push_back(literal(l));
    cs.push_back(classical_or_all(lits));
  }
  return conj_all(cs);
}

Formula qbf_matrix(const QbfInstance& q) {
  return q.matrix ? *q.matrix : cnf_formula(q.clauses);
}

bool oracle_sat3(const CnfInstance& c) {
  check_clauses(c.num_vars, c.clauses, SIZE_MAX);
  if (c.num_vars > 30) throw ResourceError("too many variables for brute force");
  std::vector<char> val(c.num_vars + 1, 0);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << c.num_vars); ++a) {
    for (int j = 1; j <= c.num_vars; ++j) val[j] = (a >> (j - 1)) & 1;
    if (cnf_true(c.clauses, val)) return true;
  }
  return false;
}

bool oracle_qbf(const QbfInstance& q) {
  check_qbf(q);
  auto order = flat_prefix(q);
  std::vector<char> val(q.num_vars + 1, 0);
  std::function<bool(const std::string&)> lookup = [&](const std::string& a) {
    return static_cast<bool>(val[p_index(a)]);
  };
  std::function<bool(std::size_t)> game = [&](std::size_t i) -> bool {
    if (i == order.size())
      return q.matrix ? eval_prop(*q.matrix, lookup) : cnf_true(q.clauses, val);
    auto [quant, v] = order[i];
    bool any = false, all = true;
    for (char b : {0, 1}) {
      val[v] = b;
      bool r = game(i + 1);
      any = any || r;
      all = all && r;
    }
    return quant == Quant::Exists ? any : all;
  };
  return game(0);
}

bool oracle_dqbf(const DqbfInstance& d) {
  check_dqbf(d);
  const int k = d.num_universals, n = d.num_vars;
  int bits = 0;
  for (const auto& ds : d.deps) bits += 1 << ds.size();
  if (bits > 24 || k > 20)
    throw ResourceError("too many Skolem function tuples for brute force");
  std::vector<char> val(n + 1, 0);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    bool ok = true;
    for (std::uint64_t u = 0; ok && u < (std::uint64_t{1} << k); ++u) {
      for (int j = 1; j <= k; ++j) val[j] = (u >> (j - 1)) & 1;
      int offset = 0;
      for (int i = k + 1; i <= n; ++i) {
        const auto& ds = d.deps[i - k - 1];
        unsigned row = 0;
        for (int x : ds) row = (row << 1) | val[x];
        val[i] = (code >> (offset + row)) & 1;
        offset += 1 << ds.size();
      }
      ok = cnf_true(d.clauses, val);
    }
    if (ok) return true;
  }
  return false;
}

bool oracle_taut(const Formula& f) {
  require_propositional(f);
  auto atoms = propositions_of(f);
  if (atoms.size() > 30) throw ResourceError("too many atoms for a truth table");
  std::set<std::string> on;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << atoms.size()); ++a) {
    on.clear();
    for (std::size_t j = 0; j < atoms.size(); ++j)
      if ((a >> j) & 1) on.insert(atoms[j]);
    if (!eval_prop(f, [&](const std::string& s) { return on.count(s) > 0; }))
      return false;
  }
  return true;
}

bool oracle_qcsp(const QcspInstance& q) {
  check_clauses(q.num_vars, q.clauses, SIZE_MAX);
  const int k = q.num_universals, e = q.num_vars - q.num_universals;
  if (k < 0 || e < 0) throw ReductionError("bad universal count");
  if (q.num_vars > 30) throw ResourceError("too many variables for brute force");
  std::vector<char> val(q.num_vars + 1, 0);
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << k); ++u) {
    for (int j = 1; j <= k; ++j) val[j] = (u >> (j - 1)) & 1;
    bool found = false;
    for (std::uint64_t x = 0; !found && x < (std::uint64_t{1} << e); ++x) {
      for (int j = 1; j <= e; ++j) val[k + j] = (x >> (j - 1)) & 1;
      found = std::all_of(q.clauses.begin(), q.clauses.end(), [&](const Clause& c) {
        int ones = 0;
        for (int v : c) ones += val[v];
        return ones == 1;
      });
    }
    if (!found) return false;
  }
  return true;
}

namespace {

struct DimacsReader {
  int num_vars = -1;
  std::vector<Clause> clauses;
  std::vector<QuantBlock> prefix;
  std::vector<std::pair<int, std::vector<int>>> explicit_deps;
  Clause pending;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ReductionError("line " + std::to_string(line_no) + ": " + msg);
  }

  std::vector<int> ints(std::istringstream& in, bool zero_terminated) {
    std::vector<int> out;
    long long x;
    while (in >> x) {
      if (x == 0 && zero_terminated) return out;
      if (x > INT32_MAX || x < -INT32_MAX) fail("number out of range");
      out.push_back(static_cast<int>(x));
    }
    if (!in.eof()) fail("expected an integer");
    if (zero_terminated) fail("missing terminating 0");
    return out;
  }

  void read(const std::string& text, const std::string& kind,
            bool allow_prefix, bool allow_deps) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      ++line_no;
      std::istringstream in(line);
      std::string head;
      if (!(in >> head) || head == "c" || head[0] == 'c' || head == "%") continue;
      if (head == "p") {
        std::string fmt;
        long long nv, nc;
        if (!(in >> fmt >> nv >> nc) || fmt != kind)
          fail("expected 'p " + kind + " <vars> <clauses>'");
        if (nv < 0 || nv > 1000000) fail("bad variable count");
        num_vars = static_cast<int>(nv);
        continue;
      }
      if (num_vars < 0) fail("clause before the problem line");
      if (head == "a" || head == "e") {
        if (!allow_prefix) fail("quantifier line in a plain CNF file");
        if (!clauses.empty()) fail("quantifier line after clauses");
        auto vs = ints(in, true);
        prefix.push_back({head == "a" ? Quant::Forall : Quant::Exists, vs});
        continue;
      }
      if (head == "d") {
        if (!allow_deps) fail("dependency line outside a DQBF file");
        auto vs = ints(in, true);
        if (vs.empty()) fail("empty dependency line");
        explicit_deps.push_back({vs[0], {vs.begin() + 1, vs.end()}});
        continue;
      }
      std::istringstream all(line);
      long long x;
      while (all >> x) {
        if (x == 0) {
          clauses.push_back(pending);
          pending.clear();
        } else {
          if (x > INT32_MAX || x < -INT32_MAX) fail("number out of range");
          pending.push_back(static_cast<int>(x));
        }
      }
      if (!all.eof()) fail("expected an integer literal");
    }
    if (num_vars < 0) fail("missing problem line");
    if (!pending.empty()) clauses.push_back(pending);
    for (const auto& c : clauses)
      for (int l : c)
        if (var_of(l) > num_vars) fail("literal " + std::to_string(l) + " out of range");
    for (const auto& b : prefix)
      for (int v : b.vars)
        if (v < 1 || v > num_vars) fail("variable " + std::to_string(v) + " out of range");
  }
};

}  // namespace

CnfInstance parse_dimacs(const std::string& text) {
  DimacsReader r;
  r.read(text, "cnf", false, false);
  return {r.num_vars, r.clauses};
}

QbfInstance parse_qdimacs(const std::string& text) {
  DimacsReader r;
  r.read(text, "cnf", true, false);
  QbfInstance q;
  q.num_vars = r.num_vars;
  q.prefix = r.prefix;
  q.clauses = r.clauses;
  check_qbf(q);
  return q;
}

DqbfInstance parse_dqdimacs(const std::string& text) {
  DimacsReader r;
  r.read(text, "cnf", true, true);
  // Existentials from 'e' lines depend on every universal before them;
  // 'd' lines name their dependencies; unquantified variables are constants.
  std::vector<int> universals;
  std::vector<std::pair<int, std::vector<int>>> exist;
  std::vector<char> seen(r.num_vars + 1, 0);
  auto mark = [&](int v) {
    if (v < 1 || v > r.num_vars) throw ReductionError("variable out of range");
    if (seen[v]) throw ReductionError("variable " + std::to_string(v) + " quantified twice");
    seen[v] = 1;
  };
  for (const auto& b : r.prefix)
    for (int v : b.vars) {
      mark(v);
      if (b.quant == Quant::Forall) universals.push_back(v);
      else exist.push_back({v, universals});
    }
  for (const auto& [v, ds] : r.explicit_deps) {
    mark(v);
    for (int u : ds)
      if (std::find(universals.begin(), universals.end(), u) == universals.end())
        throw ReductionError("variable " + std::to_string(v) +
                             " depends on non-universal " + std::to_string(u));
    exist.push_back({v, ds});
  }
  for (int v = 1; v <= r.num_vars; ++v)
    if (!seen[v]) exist.push_back({v, {}});
  std::vector<int> rename(r.num_vars + 1, 0);
  int next = 0;
  for (int u : universals) rename[u] = ++next;
  for (const auto& e : exist) rename[e.first] = ++next;
  DqbfInstance d;
  d.num_universals = static_cast<int>(universals.size());
  d.num_vars = r.num_vars;
  for (const auto& [v, ds] : exist) {
    std::vector<int> nd;
    for (int u : ds) nd.push_back(rename[u]);
    d.deps.push_back(nd);
  }
  for (const auto& c : r.clauses) {
    Clause nc;
    for (int l : c) nc.push_back(l > 0 ? rename[l] : -rename[-l]);
    d.clauses.push_back(nc);
  }
  check_dqbf(d);
  return d;
}

QcspInstance parse_qcsp(const std::string& text) {
  QbfInstance q = parse_qdimacs(text);
  // Universals must come first; they are renumbered to x_1..x_k.
  std::vector<int> rename(q.num_vars + 1, 0);
  int next = 0;
  bool seen_exists = false;
  for (const auto& [quant, v] : flat_prefix(q)) {
    if (quant == Quant::Forall && seen_exists)
      throw ReductionError("a 1-in-3 QCSP prefix is forall then exists");
    seen_exists = seen_exists || quant == Quant::Exists;
    rename[v] = ++next;
  }
  QcspInstance out;
  out.num_vars = q.num_vars;
  for (const auto& b : q.prefix)
    if (b.quant == Quant::Forall) out.num_universals += static_cast<int>(b.vars.size());
  for (const auto& c : q.clauses) {
    Clause nc;
    for (int l : c) {
      if (l < 0) throw ReductionError("1-in-3 clauses are positive");
      nc.push_back(rename[l]);
    }
    out.clauses.push_back(nc);
  }
  return out;
}

std::string write_dimacs(const CnfInstance& c) {
  std::ostringstream out;
  out << "p cnf " << c.num_vars << ' ' << c.clauses.size() << '\n';
  for (const auto& cl : c.clauses) {
    for (int l : cl) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

std::string write_qdimacs(const QbfInstance& q) {
  if (q.matrix) throw ReductionError("QDIMACS needs a clause matrix");
  std::ostringstream out;
  out << "p cnf " << q.num_vars << ' ' << q.clauses.size() << '\n';
  for (const auto& b : q.prefix) {
    if (b.vars.empty()) continue;
    out << (b.quant == Quant::Forall ? 'a' : 'e');
    for (int v : b.vars) out << ' ' << v;
    out << " 0\n";
  }
  for (const auto& cl : q.clauses) {
    for (int l : cl) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace tdl
