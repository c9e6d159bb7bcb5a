#include "tdl/mc.hpp"

#include <unordered_map>
#include <unordered_set>

namespace tdl {

namespace {

struct PNode {
  Op op;
  int a = -1;
  int b = -1;
  int prop = -1;  // atom, or the determined proposition of a dep atom
  std::vector<int> dets;
  bool flat = false;
  bool ext_leaf = false;  // dep atom replaced by a guessed function
  Team ext;
  Team env;  // every satisfying team lies inside env
};

// Children always precede their parents; the root is the last node.
struct Program {
  std::vector<PNode> nodes;
  int root() const { return static_cast<int>(nodes.size()) - 1; }
};

int prop_id(const KripkeStructure& k, const std::string& p) {
  auto id = k.prop_index(p);
  if (!id) throw KripkeError("unknown proposition '" + p + "'");
  return *id;
}

Program compile(const KripkeStructure& k, const Formula& f, bool deps_as_ext,
                bool share) {
  Program prog;
  std::unordered_map<const Node*, int> seen;
  std::vector<std::pair<const Formula*, bool>> stack{{&f, false}};
  std::vector<int> results;
  while (!stack.empty()) {
    auto [g, expanded] = stack.back();
    stack.pop_back();
    if (!expanded) {
      if (share) {
        auto it = seen.find(g->id());
        if (it != seen.end()) {
          results.push_back(it->second);
          continue;
        }
      }
      if (!g->is_leaf()) {
        stack.push_back({g, true});
        if (g->is_binary()) stack.push_back({&g->right(), false});
        stack.push_back({&g->left(), false});
        continue;
      }
    }
    PNode n;
    n.op = g->op();
    switch (n.op) {
      case Op::Top:
      case Op::Bot:
        n.flat = true;
        break;
      case Op::Atom:
      case Op::NegAtom:
        n.prop = prop_id(k, g->name());
        n.flat = true;
        break;
      case Op::Dep:
      case Op::NegDep:
        n.prop = prop_id(k, g->name());
        for (const auto& d : g->dets()) n.dets.push_back(prop_id(k, d));
        // A negated dep atom holds on the empty team only.
        n.flat = n.op == Op::NegDep;
        n.ext_leaf = deps_as_ext && n.op == Op::Dep;
        n.flat = n.flat || n.ext_leaf;
        break;
      default:
        if (g->is_binary()) {
          n.b = results.back();
          results.pop_back();
        }
        n.a = results.back();
        results.pop_back();
        {
          bool fa = prog.nodes[n.a].flat;
          bool fb = n.b < 0 || prog.nodes[n.b].flat;
          n.flat = n.op != Op::Cor && fa && fb;
        }
        break;
    }
    int idx = static_cast<int>(prog.nodes.size());
    prog.nodes.push_back(std::move(n));
    if (share) seen.emplace(g->id(), idx);
    results.push_back(idx);
  }
  return prog;
}

// Fills `ext` for every flat node. Ext leaves must already be set.
void compute_exts(const KripkeStructure& k, Program& prog) {
  const std::size_t n = k.num_worlds();
  for (auto& node : prog.nodes) {
    if (!node.flat || node.ext_leaf) continue;
    switch (node.op) {
      case Op::Top:
        node.ext = Team(n);
        node.ext.set();
        break;
      case Op::Bot:
      case Op::NegDep:
        node.ext = Team(n);
        break;
      case Op::Atom:
        node.ext = k.extension(node.prop);
        break;
      case Op::NegAtom:
        node.ext = ~k.extension(node.prop);
        break;
      case Op::And:
        node.ext = prog.nodes[node.a].ext & prog.nodes[node.b].ext;
        break;
      case Op::Or:
        node.ext = prog.nodes[node.a].ext | prog.nodes[node.b].ext;
        break;
      case Op::Impl:
        node.ext = ~prog.nodes[node.a].ext | prog.nodes[node.b].ext;
        break;
      case Op::Box:
      case Op::Dia: {
        const Team& sub = prog.nodes[node.a].ext;
        node.ext = Team(n);
        for (std::size_t w = 0; w < n; ++w) {
          const Team& s = k.successor_set(static_cast<int>(w));
          bool ok = node.op == Op::Box ? s.is_subset_of(sub) : s.intersects(sub);
          node.ext.set(w, ok);
        }
        break;
      }
      default:
        break;
    }
  }
  for (auto& node : prog.nodes) {
    if (node.flat) {
      node.env = node.ext;
      continue;
    }
    switch (node.op) {
      case Op::And:
        node.env = prog.nodes[node.a].env & prog.nodes[node.b].env;
        break;
      case Op::Or:
      case Op::Cor:
        node.env = prog.nodes[node.a].env | prog.nodes[node.b].env;
        break;
      case Op::Dia:
        node.env = Team(n);
        for (std::size_t w = 0; w < n; ++w)
          node.env.set(w, k.successor_set(static_cast<int>(w)).any());
        break;
      default:
        node.env = Team(n);
        node.env.set();
        break;
    }
  }
}

// Blocks of t on which all determinants agree.
std::vector<Team> dep_blocks(const KripkeStructure& k, const Team& t,
                             const std::vector<int>& dets) {
  std::vector<Team> blocks{t};
  for (int d : dets) {
    std::vector<Team> next;
    for (const auto& b : blocks) {
      Team in = b & k.extension(d);
      Team out = b - in;
      if (in.any()) next.push_back(std::move(in));
      if (out.any()) next.push_back(std::move(out));
    }
    blocks = std::move(next);
  }
  return blocks;
}

bool dep_check(const KripkeStructure& k, const Team& t,
               const std::vector<int>& dets, int q) {
  const Team& qe = k.extension(q);
  for (const auto& b : dep_blocks(k, t, dets))
    if (b.intersects(qe) && !b.is_subset_of(qe)) return false;
  return true;
}

void check_team(const KripkeStructure& k, const Team& t) {
  if (t.size() != k.num_worlds())
    throw KripkeError("team does not belong to this structure");
}

void require_cap(std::size_t size, std::size_t cap, const char* what) {
  if (size > cap)
    throw ResourceError(std::string(what) + " over a team of size " +
                        std::to_string(size) + " exceeds the cap of " +
                        std::to_string(cap));
}

class Evaluator {
 public:
  Evaluator(const KripkeStructure& k, const Program& p, const EvalConfig& cfg)
      : k_(k), p_(p), cfg_(cfg), memo_(p.nodes.size()) {}

  bool sat(int i, const Team& t) {
    if (t.none()) return true;
    const PNode& n = p_.nodes[i];
    if (n.flat) return t.is_subset_of(n.ext);
    if (cfg_.memoize) {
      auto it = memo_[i].find(t);
      if (it != memo_[i].end()) return it->second;
    }
    bool r = compute(n, t);
    if (cfg_.memoize) memo_[i].emplace(t, r);
    return r;
  }

 private:
  bool compute(const PNode& n, const Team& t) {
    switch (n.op) {
      case Op::Dep:
        return dep_check(k_, t, n.dets, n.prop);
      case Op::And:
        return sat(n.a, t) && sat(n.b, t);
      case Op::Cor:
        return sat(n.a, t) || sat(n.b, t);
      case Op::Box:
        return sat(n.a, image(k_, t));
      case Op::Dia:
        return diamond(n, t);
      case Op::Or:
        return split(n, t);
      case Op::Impl:
        return implication(n, t);
      default:
        throw FormulaError("unexpected node in evaluator");
    }
  }

  bool diamond(const PNode& n, const Team& t) {
    bool found = false;
    // Minimal covering teams suffice since every formula is downward closed.
    minimal_diamond_teams(
        k_, t,
        [&](const Team& cand) {
          found = sat(n.a, cand);
          return !found;
        },
        true, cfg_.diamond_cap);
    return found;
  }

  bool split(const PNode& n, const Team& t) {
    const PNode& l = p_.nodes[n.a];
    const PNode& r = p_.nodes[n.b];
    // A flat disjunct takes every world it can; by downward closure the
    // other disjunct then faces the smallest possible remainder. The same
    // holds for any maximal subteam of one disjunct.
    if (l.flat) return sat(n.b, t - l.ext);
    if (r.flat) return sat(n.a, t - r.ext);
    int side = direct(n.b) ? n.b : direct(n.a) ? n.a : -1;
    if (side >= 0) {
      int other = side == n.a ? n.b : n.a;
      for (const auto& y : maximal(side, t))
        if (sat(other, t - y)) return true;
      return false;
    }
    auto ms = members(t);
    require_cap(ms.size(), cfg_.split_cap, "splitting");
    const std::uint64_t limit = std::uint64_t{1} << ms.size();
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      Team y(t.size());
      for (std::size_t j = 0; j < ms.size(); ++j)
        if ((mask >> j) & 1) y.set(ms[j]);
      if (sat(n.a, y) && sat(n.b, t - y)) return true;
    }
    return false;
  }

  bool implication(const PNode& n, const Team& t) {
    const PNode& a = p_.nodes[n.a];
    if (a.flat) return sat(n.b, t & a.ext);
    for (const auto& s : maximal(n.a, t))
      if (!sat(n.b, s)) return false;
    return true;
  }

  // Nodes whose maximal satisfying subteams are built without search.
  bool direct(int i) const {
    const PNode& n = p_.nodes[i];
    if (n.flat || n.op == Op::Dep) return true;
    if (n.op == Op::And) return direct(n.a) && direct(n.b);
    if (n.op == Op::Impl) return p_.nodes[n.a].flat && direct(n.b);
    return false;
  }

  // Contains every maximal subteam of t satisfying node i.
  std::vector<Team> maximal(int i, const Team& t) {
    const PNode& n = p_.nodes[i];
    if (n.flat) return {t & n.ext};
    if (n.op == Op::Dep) {
      std::vector<Team> out{Team(t.size())};
      const Team& qe = k_.extension(n.prop);
      for (const auto& b : dep_blocks(k_, t, n.dets)) {
        Team in = b & qe;
        Team rest = b - in;
        if (in.none() || rest.none()) {
          for (auto& o : out) o |= b;
          continue;
        }
        require_cap(out.size() * 2, std::size_t{1} << cfg_.split_cap,
                    "dep subteam enumeration");
        std::vector<Team> next;
        for (const auto& o : out) {
          next.push_back(o | in);
          next.push_back(o | rest);
        }
        out = std::move(next);
      }
      return out;
    }
    if (n.op == Op::And && direct(i)) {
      // A team satisfying both sits inside one maximal team of each.
      auto left = maximal(n.a, t);
      std::unordered_set<Team> seen;
      std::vector<Team> out;
      for (const auto& y : maximal(n.b, t))
        for (const auto& x : left) {
          Team c = x & y;
          if (seen.insert(c).second) out.push_back(std::move(c));
        }
      return out;
    }
    if (n.op == Op::Impl && p_.nodes[n.a].flat && direct(n.b)) {
      const Team& e = p_.nodes[n.a].ext;
      Team outside = t - e;
      auto out = maximal(n.b, t & e);
      for (auto& o : out) o |= outside;
      return out;
    }
    // Walk down from the largest candidate, one world at a time; a failing
    // team is expanded unless a satisfying team already contains it.
    std::vector<Team> found;
    std::vector<Team> frontier{t & n.env};
    std::size_t visited = 0;
    const std::size_t budget = std::size_t{1} << cfg_.split_cap;
    while (!frontier.empty()) {
      std::unordered_set<Team> next;
      for (const auto& s : frontier) {
        bool covered = false;
        for (const auto& f : found)
          if (s.is_subset_of(f)) {
            covered = true;
            break;
          }
        if (covered) continue;
        if (++visited > budget)
          throw ResourceError("subteam search exceeds " +
                              std::to_string(budget) + " candidates");
        if (sat(i, s)) {
          found.push_back(s);
          continue;
        }
        for (auto w = s.find_first(); w != Team::npos; w = s.find_next(w)) {
          Team c = s;
          c.reset(w);
          next.insert(std::move(c));
        }
      }
      frontier.assign(next.begin(), next.end());
    }
    return found;
  }

  const KripkeStructure& k_;
  const Program& p_;
  const EvalConfig& cfg_;
  std::vector<std::unordered_map<Team, bool>> memo_;
};

bool run(const KripkeStructure& k, const Team& t, Program& prog,
         const EvalConfig& cfg) {
  compute_exts(k, prog);
  Evaluator ev(k, prog, cfg);
  return ev.sat(prog.root(), t);
}

// Signature whitelists of the fast paths.
constexpr std::uint16_t kPoormansOps =
    kBox | kAnd | kClassicalOr | kNeg | kDep | kTop | kBot;
constexpr std::uint16_t kVeeOps = kDepOr | kNeg | kDep | kTop | kBot;
constexpr std::uint16_t kNorUnaryOps =
    kBox | kDiamond | kClassicalOr | kNeg | kDep | kTop | kBot;

void require_signature(const Formula& f, std::uint16_t allowed,
                       const char* who) {
  auto sig = signature_of(f);
  if (!sig.subset_of(allowed))
    throw SignatureError(std::string(who) + " does not accept signature " +
                         describe(sig));
}

// 2^l <= |S|, for l positive dep atoms.
bool few_enough(int l, std::size_t worlds) {
  return l < 63 && (std::uint64_t{1} << l) <= worlds;
}

struct DepSlot {
  int node;
  int width;  // 2^arity truth-table entries
  std::vector<std::uint32_t> row;  // truth-table row of each world
  Team q;
};

bool few_deps_core(const KripkeStructure& k, const Team& t, const Formula& f,
                   const EvalConfig& cfg) {
  if (t.none()) return true;
  Program prog = compile(k, f, true, false);
  std::vector<DepSlot> slots;
  int bits = 0;
  for (int i = 0; i < static_cast<int>(prog.nodes.size()); ++i) {
    const PNode& n = prog.nodes[i];
    if (!n.ext_leaf) continue;
    if (n.dets.size() > 5)
      throw ResourceError("dep atom of arity " + std::to_string(n.dets.size()) +
                          " is too wide for function enumeration");
    DepSlot s{i, 1 << n.dets.size(), {}, k.extension(n.prop)};
    for (std::size_t w = 0; w < k.num_worlds(); ++w) {
      std::uint32_t r = 0;
      for (int d : n.dets) r = (r << 1) | (k.holds(static_cast<int>(w), d) ? 1 : 0);
      s.row.push_back(r);
    }
    bits += s.width;
    slots.push_back(std::move(s));
  }
  if (bits >= 40)
    throw ResourceError("too many function tuples (2^" + std::to_string(bits) +
                        ")");
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t code = 0; code < total; ++code) {
    int offset = 0;
    for (const auto& s : slots) {
      std::uint64_t table = (code >> offset) & ((std::uint64_t{1} << s.width) - 1);
      offset += s.width;
      Team& e = prog.nodes[s.node].ext;
      e = Team(k.num_worlds());
      for (std::size_t w = 0; w < k.num_worlds(); ++w)
        e.set(w, (((table >> s.row[w]) & 1) != 0) == s.q.test(w));
    }
    if (run(k, t, prog, cfg)) return true;
  }
  return false;
}

}  // namespace

bool eval(const KripkeStructure& k, const Team& t, const Formula& f,
          const EvalConfig& cfg) {
  check_team(k, t);
  Program prog = compile(k, f, false, true);
  return run(k, t, prog, cfg);
}

bool dep_holds(const KripkeStructure& k, const Team& t, const Formula& atom) {
  if (atom.op() != Op::Dep && atom.op() != Op::NegDep)
    throw FormulaError("dep_holds expects a dependence atom");
  check_team(k, t);
  std::vector<int> dets;
  for (const auto& d : atom.dets()) dets.push_back(prop_id(k, d));
  return dep_check(k, t, dets, prop_id(k, atom.name()));
}

Team extension_of(const KripkeStructure& k, const Formula& f) {
  Program prog = compile(k, f, false, true);
  for (const auto& n : prog.nodes)
    if (!n.flat || n.op == Op::NegDep)
      throw FormulaError("extension_of expects a plain modal formula");
  compute_exts(k, prog);
  return prog.nodes.back().ext;
}

bool eval_poormans(const KripkeStructure& k, const Team& t, const Formula& f) {
  require_signature(f, kPoormansOps, "eval_poormans");
  check_team(k, t);
  Program prog = compile(k, f, false, false);
  const int n = static_cast<int>(prog.nodes.size());
  // Every node is evaluated on exactly one team: push teams down, then
  // combine truth values bottom-up.
  std::vector<Team> team(n);
  team[n - 1] = t;
  for (int i = n - 1; i >= 0; --i) {
    const PNode& p = prog.nodes[i];
    switch (p.op) {
      case Op::And:
      case Op::Cor:
        team[p.a] = team[i];
        team[p.b] = team[i];
        break;
      case Op::Box:
        team[p.a] = image(k, team[i]);
        break;
      default:
        break;
    }
  }
  std::vector<char> val(n);
  for (int i = 0; i < n; ++i) {
    const PNode& p = prog.nodes[i];
    const Team& ti = team[i];
    switch (p.op) {
      case Op::Top: val[i] = 1; break;
      case Op::Bot:
      case Op::NegDep: val[i] = ti.none(); break;
      case Op::Atom: val[i] = ti.is_subset_of(k.extension(p.prop)); break;
      case Op::NegAtom: val[i] = !ti.intersects(k.extension(p.prop)); break;
      case Op::Dep: val[i] = dep_check(k, ti, p.dets, p.prop); break;
      case Op::And: val[i] = val[p.a] && val[p.b]; break;
      case Op::Cor: val[i] = val[p.a] || val[p.b]; break;
      case Op::Box: val[i] = val[p.a]; break;
      default: throw FormulaError("unexpected node in eval_poormans");
    }
  }
  return val[n - 1];
}

std::uint64_t few_deps_tuple_count(const Formula& f) {
  std::uint64_t bits = 0;
  for_each_preorder(f, [&](const Formula& g) {
    if (g.op() != Op::Dep) return;
    std::size_t a = g.dets().size();
    bits += a >= 63 ? 64 : (std::uint64_t{1} << a);
  });
  if (bits >= 64) return UINT64_MAX;
  return std::uint64_t{1} << bits;
}

bool eval_few_deps(const KripkeStructure& k, const Team& t, const Formula& f,
                   int arity_k) {
  auto sig = signature_of(f);
  if (sig.has(kImpl)) throw SignatureError("eval_few_deps expects an MDL formula");
  if (sig.arity && *sig.arity > arity_k)
    throw SignatureError("dep arity " + std::to_string(*sig.arity) +
                         " exceeds the bound " + std::to_string(arity_k));
  check_team(k, t);
  int l = count_positive_deps(f);
  if (l > 0 && !few_enough(l, k.num_worlds()))
    throw RefusalError(std::to_string(l) + " dep atoms exceed log2 of " +
                       std::to_string(k.num_worlds()) + " worlds");
  return few_deps_core(k, t, f, EvalConfig{});
}

bool eval_vee_bounded(const KripkeStructure& k, const Team& t,
                      const Formula& f, int arity_k) {
  require_signature(f, kVeeOps, "eval_vee_bounded");
  auto sig = signature_of(f);
  if (sig.arity && *sig.arity > arity_k)
    throw SignatureError("dep arity " + std::to_string(*sig.arity) +
                         " exceeds the bound " + std::to_string(arity_k));
  check_team(k, t);
  for (const auto& p : propositions_of(f)) prop_id(k, p);
  int l = count_positive_deps(f);
  // Each dep disjunct can absorb at least half of what is left.
  if (!few_enough(l, k.num_worlds())) return true;
  return few_deps_core(k, t, f, EvalConfig{});
}

bool eval_nor_unary(const KripkeStructure& k, const Team& t, const Formula& f) {
  require_signature(f, kNorUnaryOps, "eval_nor_unary");
  check_team(k, t);
  for (const auto& p : propositions_of(f)) prop_id(k, p);
  // Every root-to-leaf path gives one disjunct of the distributed formula.
  std::vector<std::pair<const Formula*, std::vector<Op>>> stack{{&f, {}}};
  while (!stack.empty()) {
    auto [g, prefix] = std::move(stack.back());
    stack.pop_back();
    if (g->op() == Op::Cor) {
      stack.push_back({&g->right(), prefix});
      stack.push_back({&g->left(), std::move(prefix)});
      continue;
    }
    if (g->is_unary()) {
      prefix.push_back(g->op());
      stack.push_back({&g->left(), std::move(prefix)});
      continue;
    }
    Formula path = *g;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
      path = *it == Op::Box ? Formula::box(path) : Formula::dia(path);
    if (few_deps_core(k, t, path, EvalConfig{})) return true;
  }
  return false;
}

CheckResult check(const KripkeStructure& k, const Team& t, const Formula& f,
                  const EvalConfig& cfg) {
  check_team(k, t);
  for (const auto& p : propositions_of(f)) prop_id(k, p);
  auto sig = signature_of(f);
  int arity = sig.arity.value_or(0);
  if (sig.subset_of(kPoormansOps)) return {eval_poormans(k, t, f), "poormans"};
  int l = count_positive_deps(f);
  bool affordable = few_deps_tuple_count(f) <= kFewDepsBudget;
  if (sig.subset_of(kVeeOps) &&
      (!few_enough(l, k.num_worlds()) || affordable))
    return {eval_vee_bounded(k, t, f, arity), "vee_bounded"};
  if (sig.subset_of(kNorUnaryOps) && arity <= 4)
    return {eval_nor_unary(k, t, f), "nor_unary"};
  if (!sig.has(kImpl) && (l == 0 || few_enough(l, k.num_worlds())) &&
      affordable && arity <= 5)
    return {few_deps_core(k, t, f, cfg), "few_deps"};
  return {eval(k, t, f, cfg), "eval"};
}

}  // namespace tdl
