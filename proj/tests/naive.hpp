#pragma once

// Definition-level evaluators written independently of the library's
// evaluators, used as oracles on small structures.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"
#include "tdl/reductions.hpp"

namespace naive {

using tdl::Formula;
using tdl::KripkeStructure;
using tdl::Op;
using tdl::Team;

inline bool has_prop(const KripkeStructure& k, int w, const std::string& p) {
  auto l = k.label(w);
  return std::find(l.begin(), l.end(), p) != l.end();
}

// Pointwise modal logic: K, w |= f. Dep atoms and the classical disjunction
// are not part of plain ML.
inline bool holds(const KripkeStructure& k, int w, const Formula& f) {
  switch (f.op()) {
    case Op::Top: return true;
    case Op::Bot: return false;
    case Op::Atom: return has_prop(k, w, f.name());
    case Op::NegAtom: return !has_prop(k, w, f.name());
    case Op::And: return holds(k, w, f.left()) && holds(k, w, f.right());
    case Op::Or: return holds(k, w, f.left()) || holds(k, w, f.right());
    case Op::Box:
      for (int v : k.successors(w))
        if (!holds(k, v, f.sub())) return false;
      return true;
    case Op::Dia:
      for (int v : k.successors(w))
        if (holds(k, v, f.sub())) return true;
      return false;
    default: return false;
  }
}

inline std::vector<int> worlds_of(const Team& t) {
  std::vector<int> out;
  for (std::size_t w = 0; w < t.size(); ++w)
    if (t[w]) out.push_back(static_cast<int>(w));
  return out;
}

// Calls fn on every subteam of t.
template <class Fn>
bool any_subteam(const Team& t, Fn fn) {
  auto ws = worlds_of(t);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << ws.size()); ++m) {
    Team s(t.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
      if ((m >> i) & 1) s.set(ws[i]);
    if (fn(s)) return true;
  }
  return false;
}

// Team semantics straight from the definitions, with every subteam, split
// and successor team enumerated.
inline bool team(const KripkeStructure& k, const Team& t, const Formula& f) {
  auto ws = worlds_of(t);
  switch (f.op()) {
    case Op::Top: return true;
    case Op::Bot: return ws.empty();
    case Op::NegDep: return ws.empty();
    case Op::Atom:
      for (int w : ws)
        if (!has_prop(k, w, f.name())) return false;
      return true;
    case Op::NegAtom:
      for (int w : ws)
        if (has_prop(k, w, f.name())) return false;
      return true;
    case Op::Dep:
      for (int a : ws)
        for (int b : ws) {
          bool agree = true;
          for (const auto& d : f.dets())
            agree = agree && has_prop(k, a, d) == has_prop(k, b, d);
          if (agree && has_prop(k, a, f.name()) != has_prop(k, b, f.name()))
            return false;
        }
      return true;
    case Op::And: return team(k, t, f.left()) && team(k, t, f.right());
    case Op::Cor: return team(k, t, f.left()) || team(k, t, f.right());
    case Op::Or:
      return any_subteam(t, [&](const Team& s) {
        return team(k, s, f.left()) && team(k, t - s, f.right());
      });
    case Op::Impl:
      return !any_subteam(t, [&](const Team& s) {
        return team(k, s, f.left()) && !team(k, s, f.right());
      });
    case Op::Box: {
      Team img(t.size());
      for (int w : ws)
        for (int v : k.successors(w)) img.set(v);
      return team(k, img, f.sub());
    }
    case Op::Dia: {
      Team img(t.size());
      for (int w : ws)
        for (int v : k.successors(w)) img.set(v);
      return any_subteam(img, [&](const Team& s) {
        for (int w : ws) {
          bool hit = false;
          for (int v : k.successors(w)) hit = hit || s[v];
          if (!hit) return false;
        }
        return team(k, s, f.sub());
      });
    }
  }
  return false;
}

inline bool clauses_hold(const std::vector<tdl::Clause>& cs, std::uint64_t bits) {
  for (const auto& c : cs) {
    bool sat = false;
    for (int l : c) {
      bool v = (bits >> ((l > 0 ? l : -l) - 1)) & 1;
      sat = sat || (l > 0 ? v : !v);
    }
    if (!sat) return false;
  }
  return true;
}

inline bool sat(const tdl::CnfInstance& c) {
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << c.num_vars); ++b)
    if (clauses_hold(c.clauses, b)) return true;
  return false;
}

// Clause-matrix QBF by recursion over the prefix; unlisted variables are
// existential and outermost.
inline bool qbf(const tdl::QbfInstance& q) {
  std::vector<std::pair<bool, int>> order;  // (universal, var)
  std::vector<char> listed(q.num_vars + 1, 0);
  for (const auto& b : q.prefix)
    for (int v : b.vars) listed[v] = 1;
  for (int v = 1; v <= q.num_vars; ++v)
    if (!listed[v]) order.push_back({false, v});
  for (const auto& b : q.prefix)
    for (int v : b.vars) order.push_back({b.quant == tdl::Quant::Forall, v});
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t bits) -> bool {
    if (i == order.size()) return clauses_hold(q.clauses, bits);
    auto [uni, v] = order[i];
    bool a = self(self, i + 1, bits);
    bool b = self(self, i + 1, bits | (std::uint64_t{1} << (v - 1)));
    return uni ? a && b : a || b;
  };
  return rec(rec, 0, 0);
}

// Skolem functions enumerated as truth tables over the listed universals.
inline bool dqbf(const tdl::DqbfInstance& d) {
  int k = d.num_universals, e = d.num_vars - k;
  std::vector<int> width(e);
  int total = 0;
  for (int i = 0; i < e; ++i) {
    width[i] = 1 << d.deps[i].size();
    total += width[i];
  }
  for (std::uint64_t f = 0; f < (std::uint64_t{1} << total); ++f) {
    bool ok = true;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << k) && ok; ++u) {
      std::uint64_t bits = u;
      int off = 0;
      for (int i = 0; i < e; ++i) {
        int row = 0;
        for (std::size_t j = 0; j < d.deps[i].size(); ++j)
          row |= static_cast<int>((u >> (d.deps[i][j] - 1)) & 1) << j;
        if ((f >> (off + row)) & 1) bits |= std::uint64_t{1} << (k + i);
        off += width[i];
      }
      ok = clauses_hold(d.clauses, bits);
    }
    if (ok) return true;
  }
  return false;
}

// forall x_1..x_k exists x_{k+1}..x_n, each clause exactly one true.
inline bool qcsp(const tdl::QcspInstance& q) {
  int k = q.num_universals, e = q.num_vars - k;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << k); ++u) {
    bool found = false;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << e) && !found; ++x) {
      std::uint64_t bits = u | (x << k);
      bool all = true;
      for (const auto& c : q.clauses) {
        int ones = 0;
        for (int v : c) ones += (bits >> (v - 1)) & 1;
        all = all && ones == 1;
      }
      found = all;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace naive
