#include "tdl/sat.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

namespace tdl {

// ------------------------------------------------------------ bounded search

namespace {

struct DepthProfile {
  std::vector<int> diamonds;  // diamonds per modal depth
  int depth = 0;
  bool has_impl = false;
};

DepthProfile profile(const Formula& f) {
  DepthProfile p;
  p.depth = f.modal_depth();
  p.diamonds.assign(p.depth + 1, 0);
  std::vector<std::pair<const Formula*, int>> stack{{&f, 0}};
  while (!stack.empty()) {
    auto [g, d] = stack.back();
    stack.pop_back();
    if (g->op() == Op::Dia) ++p.diamonds[d];
    if (g->op() == Op::Impl) p.has_impl = true;
    if (g->is_unary()) stack.push_back({&g->left(), d + 1});
    else if (g->is_binary()) {
      stack.push_back({&g->left(), d});
      stack.push_back({&g->right(), d});
    }
  }
  // With implication the diamond count is only a heuristic branching bound.
  if (p.has_impl)
    for (auto& c : p.diamonds) ++c;
  return p;
}

struct TreeRec {
  std::uint32_t label;
  std::vector<int> kids;  // indices into the next level
  int size;
};

constexpr std::size_t kMaxTrees = 2'000'000;

// All subsets of `pool` with at most `max_kids` members and total size at
// most `budget`, in increasing index order.
void kid_sets(const std::vector<TreeRec>& pool, int max_kids, int budget,
              std::vector<int>& cur, std::size_t from, int used,
              const std::function<void(const std::vector<int>&, int)>& emit) {
  emit(cur, used);
  if (static_cast<int>(cur.size()) == max_kids) return;
  for (std::size_t i = from; i < pool.size(); ++i) {
    if (used + pool[i].size > budget) continue;
    cur.push_back(static_cast<int>(i));
    kid_sets(pool, max_kids, budget, cur, i + 1, used + pool[i].size, emit);
    cur.pop_back();
  }
}

Witness extract(const std::vector<std::vector<TreeRec>>& levels, int root,
                const std::vector<std::string>& props) {
  Witness w;
  KripkeStructure& k = w.structure;
  for (const auto& p : props) k.declare_prop(p);
  // Breadth-first over (level, index), sharing identical subtrees.
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> queue{{0, root}};
  auto world_of = [&](std::pair<int, int> key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = k.add_world("w" + std::to_string(ids.size()));
    ids.emplace(key, id);
    const TreeRec& r = levels[key.first][key.second];
    for (std::size_t p = 0; p < props.size(); ++p)
      if ((r.label >> p) & 1) k.set_label(id, props[p]);
    return id;
  };
  world_of(queue[0]);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    auto key = queue[q];
    int from = ids.at(key);
    const TreeRec& r = levels[key.first][key.second];
    for (int kid : r.kids) {
      std::pair<int, int> ck{key.first + 1, kid};
      bool fresh = !ids.count(ck);
      int to = world_of(ck);
      if (fresh) queue.push_back(ck);
      k.add_edge(from, to);
    }
  }
  w.world = 0;
  return w;
}

}  // namespace

std::int64_t max_tree_size(const Formula& f) {
  DepthProfile p = profile(f);
  std::int64_t total = 1, layer = 1;
  for (int d = 0; d < p.depth; ++d) {
    layer *= p.diamonds[d];
    total += layer;
    if (total > INT32_MAX) return INT32_MAX;
  }
  return total;
}

bool sat_bounded_is_exhaustive(const Formula& f, int max_worlds) {
  return !profile(f).has_impl && max_tree_size(f) <= max_worlds;
}

std::optional<Witness> sat_bounded(const Formula& f, int max_worlds,
                                   const EvalConfig& cfg) {
  if (max_worlds < 1) throw ResourceError("max_worlds must be positive");
  const auto props = propositions_of(f);
  if (props.size() > 12)
    throw ResourceError("too many propositions for bounded search");
  const std::uint32_t labels = 1u << props.size();
  DepthProfile prof = profile(f);
  const int depth = prof.depth;

  std::vector<std::vector<TreeRec>> levels(depth + 1);
  for (int level = depth; level >= 0; --level) {
    auto& out = levels[level];
    if (level == depth) {
      for (std::uint32_t l = 0; l < labels; ++l) out.push_back({l, {}, 1});
      continue;
    }
    // Levels never need more than max_worlds - level nodes.
    const int budget = max_worlds - level - 1;
    std::vector<int> cur;
    std::vector<std::pair<std::vector<int>, int>> sets;
    kid_sets(levels[level + 1], prof.diamonds[level], budget, cur, 0, 0,
             [&](const std::vector<int>& s, int used) {
               sets.emplace_back(s, used);
               if (sets.size() * labels > kMaxTrees)
                 throw ResourceError("bounded search space too large");
             });
    for (std::uint32_t l = 0; l < labels; ++l)
      for (const auto& [s, used] : sets) out.push_back({l, s, used + 1});
  }

  std::vector<int> order(levels[0].size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return levels[0][a].size < levels[0][b].size;
  });
  for (int root : order) {
    if (levels[0][root].size > max_worlds) break;
    Witness w = extract(levels, root, props);
    if (eval(w.structure, w.structure.singleton(w.world), f, cfg)) return w;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- phi^T

namespace {

Formula mk_and(const Formula& a, const Formula& b) {
  if (a.op() == Op::Bot || b.op() == Op::Bot) return Formula::bot();
  if (a.op() == Op::Top) return b;
  if (b.op() == Op::Top) return a;
  return Formula::conj(a, b);
}

Formula mk_or(const Formula& a, const Formula& b) {
  if (a.op() == Op::Bot) return b;
  if (b.op() == Op::Bot) return a;
  return Formula::split_or(a, b);
}

// Full DNF over the rows of `table` whose bit equals `value`.
Formula dnf(const std::vector<std::string>& dets, std::uint64_t table,
            bool value) {
  const std::size_t n = dets.size();
  Formula out = Formula::bot();
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << n); ++row) {
    if ((((table >> row) & 1) != 0) != value) continue;
    Formula term = Formula::top();
    for (std::size_t i = 0; i < n; ++i) {
      bool on = (row >> (n - 1 - i)) & 1;
      term = mk_and(term, on ? Formula::atom(dets[i]) : Formula::neg_atom(dets[i]));
    }
    out = mk_or(out, term);
  }
  return out;
}

}  // namespace

std::uint64_t phi_T_count(const Formula& f) { return few_deps_tuple_count(f); }

void translate_phi_T(const Formula& f, int arity_k,
                     const std::function<bool(const Formula&)>& visit) {
  auto sig = signature_of(f);
  constexpr std::uint16_t allowed =
      kBox | kDiamond | kAnd | kDepOr | kNeg | kTop | kBot | kDep;
  if (!sig.subset_of(allowed))
    throw SignatureError("translate_phi_T does not accept signature " +
                         describe(sig));
  if (sig.arity && *sig.arity > arity_k)
    throw SignatureError("dep arity exceeds the bound");

  std::vector<const Node*> deps;
  std::vector<int> widths;
  int bits = 0;
  for_each_preorder(f, [&](const Formula& g) {
    if (g.op() != Op::Dep) return;
    deps.push_back(g.id());
    widths.push_back(1 << g.dets().size());
    bits += widths.back();
  });
  if (bits >= 64) throw ResourceError("too many function tuples");
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::size_t next = 0;
    int offset = 0;
    Formula g = transform(
        f,
        [&](const Formula& n) -> std::optional<Formula> {
          if (n.op() == Op::NegDep) return Formula::bot();
          if (n.op() != Op::Dep) return std::nullopt;
          std::uint64_t table =
              (code >> offset) & ((std::uint64_t{1} << widths[next]) - 1);
          offset += widths[next];
          ++next;
          Formula alpha = dnf(n.dets(), table, true);
          Formula alpha_bar = dnf(n.dets(), table, false);
          return mk_or(mk_and(alpha, Formula::atom(n.name())),
                       mk_and(alpha_bar, Formula::neg_atom(n.name())));
        },
        nullptr);
    if (!visit(g)) return;
  }
}

// ------------------------------------------------------------------ Ladner

namespace {

class Tableau {
 public:
  explicit Tableau(const Formula& f) {
    if (!is_plain_ml(f)) throw SignatureError("ladner_sat expects plain ML");
    root_ = intern(f);
    for (const auto& p : propositions_of(f)) props_.push_back(p);
  }

  bool decide() { return satisfiable({root_}); }

  std::optional<Witness> model() {
    if (!decide()) return std::nullopt;
    Witness w;
    for (const auto& p : props_) w.structure.declare_prop(p);
    build_ = &w.structure;
    w.world = build({root_});
    build_ = nullptr;
    return w;
  }

 private:
  struct Entry {
    Op op;
    std::string name;
    int a = -1;
    int b = -1;
  };

  struct State {
    std::vector<int> pending;
    std::map<std::string, bool> lits;
    std::set<int> boxes;
    std::set<int> dias;
  };

  int intern(const Formula& f) {
    std::unordered_map<const Node*, int> done;
    std::vector<std::pair<const Formula*, bool>> stack{{&f, false}};
    while (!stack.empty()) {
      auto [g, expanded] = stack.back();
      stack.pop_back();
      if (done.count(g->id())) continue;
      if (!expanded && !g->is_leaf()) {
        stack.push_back({g, true});
        if (g->is_binary()) stack.push_back({&g->right(), false});
        stack.push_back({&g->left(), false});
        continue;
      }
      int a = g->is_leaf() ? -1 : done.at(g->left().id());
      int b = g->is_binary() ? done.at(g->right().id()) : -1;
      auto key = std::make_tuple(static_cast<int>(g->op()), g->name(), a, b);
      auto it = ids_.find(key);
      int id;
      if (it != ids_.end()) {
        id = it->second;
      } else {
        id = static_cast<int>(entries_.size());
        entries_.push_back({g->op(), g->name(), a, b});
        ids_.emplace(key, id);
      }
      done.emplace(g->id(), id);
    }
    return done.at(f.id());
  }

  static std::vector<int> normalize(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  bool satisfiable(std::vector<int> gamma) {
    gamma = normalize(std::move(gamma));
    auto it = memo_.find(gamma);
    if (it != memo_.end()) return it->second;
    State s;
    s.pending = gamma;
    bool r = expand(std::move(s), nullptr);
    memo_.emplace(std::move(gamma), r);
    return r;
  }

  int build(std::vector<int> gamma) {
    State s;
    s.pending = normalize(std::move(gamma));
    int world = -1;
    expand(std::move(s), &world);
    return world;
  }

  bool expand(State s, int* world) {
    while (!s.pending.empty()) {
      int i = s.pending.back();
      s.pending.pop_back();
      const Entry& e = entries_[i];
      switch (e.op) {
        case Op::Top:
          break;
        case Op::Bot:
          return false;
        case Op::Atom:
        case Op::NegAtom: {
          bool sign = e.op == Op::Atom;
          auto [it, fresh] = s.lits.emplace(e.name, sign);
          if (!fresh && it->second != sign) return false;
          break;
        }
        case Op::And:
          s.pending.push_back(e.a);
          s.pending.push_back(e.b);
          break;
        case Op::Or: {
          State left = s;
          left.pending.push_back(e.a);
          if (expand(std::move(left), world)) return true;
          s.pending.push_back(e.b);
          return expand(std::move(s), world);
        }
        case Op::Box:
          s.boxes.insert(e.a);
          break;
        case Op::Dia:
          s.dias.insert(e.a);
          break;
        default:
          throw SignatureError("ladner_sat expects plain ML");
      }
    }
    std::vector<std::vector<int>> children;
    for (int d : s.dias) {
      std::vector<int> child(s.boxes.begin(), s.boxes.end());
      child.push_back(d);
      if (!satisfiable(child)) return false;
      children.push_back(std::move(child));
    }
    if (world) {
      KripkeStructure& k = *build_;
      int w = k.add_world("w" + std::to_string(k.num_worlds()));
      for (const auto& [name, sign] : s.lits)
        if (sign) k.set_label(w, name);
      for (auto& c : children) k.add_edge(w, build(std::move(c)));
      *world = w;
    }
    return true;
  }

  std::vector<Entry> entries_;
  std::map<std::tuple<int, std::string, int, int>, int> ids_;
  std::map<std::vector<int>, bool> memo_;
  std::vector<std::string> props_;
  KripkeStructure* build_ = nullptr;
  int root_ = 0;
};

}  // namespace

bool ladner_sat(const Formula& f) { return Tableau(f).decide(); }

std::optional<Witness> ladner_sat_model(const Formula& f) {
  return Tableau(f).model();
}

// ---------------------------------------------------------------- rewrites

Formula monotone_rewrite(const Formula& f) {
  if (signature_of(f).has(kNeg))
    throw SignatureError("monotone_rewrite expects a negation-free formula");
  return transform(f,
                   [](const Formula& n) -> std::optional<Formula> {
                     if (n.op() == Op::Atom || n.op() == Op::Dep)
                       return Formula::atom("t");
                     return std::nullopt;
                   },
                   nullptr);
}

Formula one_modality_simplify(const Formula& f) {
  auto sig = signature_of(f);
  if (sig.has(kBox) && sig.has(kDiamond))
    throw SignatureError("one_modality_simplify expects at most one modality");
  if (sig.has(kImpl))
    throw SignatureError("one_modality_simplify expects an MDL formula");
  return transform(
      f,
      [](const Formula& n) -> std::optional<Formula> {
        if (n.op() == Op::Dep) return Formula::top();
        if (n.op() == Op::NegDep) return Formula::bot();
        return std::nullopt;
      },
      [](const Formula& n, const Formula* l, const Formula* r) -> Formula {
        if (n.op() == Op::Cor) return Formula::split_or(*l, *r);
        return n.is_leaf() ? n : Formula::with_children(n, *l, r ? *r : Formula());
      });
}

bool wedge_free_sat(const Formula& f) {
  auto sig = signature_of(f);
  if (sig.has(kAnd)) throw SignatureError("wedge_free_sat expects no conjunction");
  if (sig.has(kImpl)) throw SignatureError("wedge_free_sat expects an MDL formula");
  // Top-level disjunctions of either kind; a diamond opens a new round.
  std::vector<const Formula*> rounds{&f};
  while (!rounds.empty()) {
    std::vector<const Formula*> next;
    for (const Formula* start : rounds) {
      std::vector<const Formula*> stack{start};
      while (!stack.empty()) {
        const Formula* g = stack.back();
        stack.pop_back();
        switch (g->op()) {
          case Op::Or:
          case Op::Cor:
            stack.push_back(&g->left());
            stack.push_back(&g->right());
            break;
          case Op::Box:
          case Op::Top:
          case Op::Atom:
          case Op::NegAtom:
          case Op::Dep:
            return true;
          case Op::Dia:
            next.push_back(&g->left());
            break;
          default:  // Bot and negated dep atoms fail on nonempty teams
            break;
        }
      }
    }
    rounds = std::move(next);
  }
  return false;
}

// -------------------------------------------------------------- classifier

namespace {

struct Row {
  const char* pattern;
  Complexity cls;
  bool complete;
  const char* reason;
};

// SAT columns: box diamond and or neg top bot dep cor.
const std::uint16_t kSatOrder[] = {kBox, kDiamond, kAnd, kDepOr, kNeg,
                                   kTop, kBot,     kDep, kClassicalOr};
// MC columns: box diamond and or neg dep cor.
const std::uint16_t kMcOrder[] = {kBox, kDiamond, kAnd, kDepOr,
                                  kNeg, kDep,     kClassicalOr};
// MIDL columns: box diamond and or cor neg impl dep.
const std::uint16_t kMidlOrder[] = {kBox, kDiamond, kAnd,  kDepOr,
                                    kClassicalOr, kNeg, kImpl, kDep};

const Row kSatUnbounded[] = {
    {"+++*+**+*", Complexity::NEXP, true, "poor man's logic with dep"},
    {"+++++**-*", Complexity::PSPACE, true, "full modal logic without dep"},
    {"++++-*+**", Complexity::PSPACE, true, "negation-free with bot"},
    {"+++-+**-+", Complexity::Sigma2P, true, "poor man's logic with cor"},
    {"+++--*+*+", Complexity::Sigma2P, true, "negation-free poor man with cor"},
    {"+++-+**--", Complexity::coNP, true, "poor man's logic"},
    {"+++--*+*-", Complexity::coNP, true, "negation-free poor man with bot"},
    {"+-+++****", Complexity::NP, true, "box only, with or"},
    {"-++++****", Complexity::NP, true, "diamond only, with or"},
    {"+-+-+***+", Complexity::NP, true, "box only, with cor"},
    {"-++-+***+", Complexity::NP, true, "diamond only, with cor"},
    {"+-+-+***-", Complexity::P, false, "box only, no disjunction"},
    {"-++-+***-", Complexity::P, false, "diamond only, no disjunction"},
    {"+-+*-****", Complexity::P, false, "box only, no negation"},
    {"-++*-****", Complexity::P, false, "diamond only, no negation"},
    {"**-******", Complexity::P, false, "no conjunction"},
    {"****-*-**", Complexity::Trivial, false, "no negation and no bot"},
    {"--+++****", Complexity::NP, true, "propositional satisfiability"},
    {"--+*+***+", Complexity::NP, true, "propositional, cor acts as or"},
    {"--*-****-", Complexity::P, false, "propositional without disjunction"},
    {"--**-****", Complexity::P, false, "propositional without negation"},
};

const Row kSatBounded[] = {
    {"+++++****", Complexity::PSPACE, true, "full modal logic, bounded dep"},
    {"++++-*+**", Complexity::PSPACE, true, "negation-free with bot"},
    {"+++-+**+*", Complexity::Sigma3P, true, "poor man's logic, bounded dep"},
    {"+++-+**-+", Complexity::Sigma2P, true, "poor man's logic with cor"},
    {"+++--*+*+", Complexity::Sigma2P, true, "negation-free poor man with cor"},
    {"+++-+**--", Complexity::coNP, true, "poor man's logic"},
    {"+++--*+*-", Complexity::coNP, true, "negation-free poor man with bot"},
    {"+-+++****", Complexity::NP, true, "box only, with or"},
    {"-++++****", Complexity::NP, true, "diamond only, with or"},
    {"+-+-+***+", Complexity::NP, true, "box only, with cor"},
    {"-++-+***+", Complexity::NP, true, "diamond only, with cor"},
    {"+-+-+***-", Complexity::P, false, "box only, no disjunction"},
    {"-++-+***-", Complexity::P, false, "diamond only, no disjunction"},
    {"+-+*-****", Complexity::P, false, "box only, no negation"},
    {"-++*-****", Complexity::P, false, "diamond only, no negation"},
    {"**-******", Complexity::P, false, "no conjunction"},
    {"****-*-**", Complexity::Trivial, false, "no negation and no bot"},
    {"--+++****", Complexity::NP, true, "propositional satisfiability"},
    {"--+*+***+", Complexity::NP, true, "propositional, cor acts as or"},
    {"--*-****-", Complexity::P, false, "propositional without disjunction"},
    {"--**-****", Complexity::P, false, "propositional without negation"},
};

const Row kMcUnbounded[] = {
    {"**++*+*", Complexity::NP, true, "and with or and dep"},
    {"+**+*+*", Complexity::NP, true, "box with or and dep"},
    {"***+**+", Complexity::NP, true, "or with cor"},
    {"*+***+*", Complexity::NP, true, "diamond with dep"},
    {"*++***+", Complexity::NP, true, "diamond and and with cor"},
    {"---+*+-", Complexity::Unclassified, false,
     "or with dep: in NP, lower bound open"},
    {"**--*-*", Complexity::P, false, "no binary connectives except cor"},
    {"*-*-***", Complexity::P, false, "no diamond and no or"},
    {"*****--", Complexity::P, false, "plain modal logic"},
};

const Row kMcBounded[] = {
    {"**++*+*", Complexity::NP, true, "and with or and dep"},
    {"+**+*+*", Complexity::NP, true, "box with or and dep"},
    {"***+**+", Complexity::NP, true, "or with cor"},
    {"*++**+*", Complexity::NP, true, "diamond and and with bounded dep"},
    {"*++***+", Complexity::NP, true, "diamond and and with cor"},
    {"*+*+*+*", Complexity::NP, true, "diamond and or with bounded dep"},
    {"**--***", Complexity::P, false, "no binary connectives except cor"},
    {"*-*-***", Complexity::P, false, "no diamond and no or"},
    {"---***-", Complexity::P, false, "or with bounded dep"},
    {"*****--", Complexity::P, false, "plain modal logic"},
};

const Row kMidlMc[] = {
    {"**++**++", Complexity::PSPACE, true, "implication with or and dep"},
    {"**+++*+*", Complexity::PSPACE, true, "implication with or and cor"},
    {"*++*+*+*", Complexity::PSPACE, true, "implication with diamond and cor"},
    {"*-+-+*+*", Complexity::coNP, true, "propositional intuitionistic"},
    {"****-**-", Complexity::P, false, "modal logic with implication"},
};

template <std::size_t N, std::size_t C>
std::optional<std::pair<int, const Row*>> match(const Row (&rows)[N],
                                                const std::uint16_t (&cols)[C],
                                                std::uint16_t ops) {
  for (std::size_t r = 0; r < N; ++r) {
    bool ok = true;
    for (std::size_t c = 0; c < C && ok; ++c) {
      bool present = (ops & cols[c]) != 0;
      char p = rows[r].pattern[c];
      ok = p == '*' || (p == '+') == present;
    }
    if (ok) return std::make_pair(static_cast<int>(r + 1), &rows[r]);
  }
  return std::nullopt;
}

ComplexityVerdict from_row(const std::string& table, int index, const Row& r) {
  ComplexityVerdict v;
  v.cls = r.cls;
  v.complete = r.complete;
  v.table = table;
  v.citation = table + " row " + std::to_string(index) + ": " + r.reason;
  return v;
}

ComplexityVerdict unclassified(const std::string& table, const std::string& why) {
  ComplexityVerdict v;
  v.table = table;
  v.citation = table + ": " + why;
  return v;
}

}  // namespace

std::string complexity_name(Complexity c) {
  switch (c) {
    case Complexity::Trivial: return "Trivial";
    case Complexity::P: return "P";
    case Complexity::NP: return "NP";
    case Complexity::coNP: return "coNP";
    case Complexity::Sigma2P: return "Sigma2P";
    case Complexity::Sigma3P: return "Sigma3P";
    case Complexity::PSPACE: return "PSPACE";
    case Complexity::NEXP: return "NEXP";
    case Complexity::Unclassified: return "Unclassified";
  }
  return "?";
}

std::string ComplexityVerdict::text() const {
  std::string s = complexity_name(cls);
  if (complete) s += "-complete";
  else if (cls == Complexity::P) s = "in P";
  return s + " (Table " + table + ")";
}

ComplexityVerdict classify(const FragmentSignature& sig, Problem problem) {
  const bool bounded = sig.arity.has_value();
  if (problem == Problem::Sat) {
    if (sig.has(kImpl))
      return unclassified("MIDL-SAT", "satisfiability with implication is open");
    const std::string table = bounded ? "MDL_k-SAT" : "MDL-SAT";
    auto m = bounded ? match(kSatBounded, kSatOrder, sig.ops)
                     : match(kSatUnbounded, kSatOrder, sig.ops);
    if (!m) return unclassified(table, "no matching row");
    if (bounded && m->second->cls == Complexity::Sigma3P && *sig.arity <= 2)
      return unclassified(table, "in Sigma3P for arity " +
                                     std::to_string(*sig.arity) +
                                     ", lower bound open below arity 3");
    return from_row(table, m->first, *m->second);
  }
  if (sig.has(kImpl)) {
    auto m = match(kMidlMc, kMidlOrder, sig.ops);
    if (!m) return unclassified("MIDL-MC", "no matching row");
    return from_row("MIDL-MC", m->first, *m->second);
  }
  const std::string table = bounded ? "MDL_k-MC" : "MDL-MC";
  auto m = bounded ? match(kMcBounded, kMcOrder, sig.ops)
                   : match(kMcUnbounded, kMcOrder, sig.ops);
  if (!m) return unclassified(table, "no matching row");
  if (bounded && *sig.arity == 0 && m->first == 6)
    return unclassified(table, "hardness of diamond and or needs arity >= 1");
  if (m->second->cls == Complexity::Unclassified)
    return unclassified(table, "row " + std::to_string(m->first) + ": " +
                                   m->second->reason);
  return from_row(table, m->first, *m->second);
}

// ---------------------------------------------------------------- pipeline

namespace {

bool confirms(const std::optional<Witness>& w, const Formula& f,
              const EvalConfig& cfg) {
  if (!w) return false;
  KripkeStructure k = w->structure;
  for (const auto& p : propositions_of(f)) k.declare_prop(p);
  return eval(k, k.singleton(w->world), f, cfg);
}

std::optional<Witness> with_props(std::optional<Witness> w, const Formula& f) {
  if (!w) return w;
  for (const auto& p : propositions_of(f)) w->structure.declare_prop(p);
  return w;
}

// Satisfiability of a cor-free formula via the dep-free translation.
std::optional<bool> via_phi_T(const Formula& f, const SatConfig& cfg,
                              std::optional<Witness>& witness) {
  if (phi_T_count(f) > cfg.phi_T_budget) return std::nullopt;
  bool found = false;
  translate_phi_T(f, signature_of(f).arity.value_or(0), [&](const Formula& g) {
    if (!ladner_sat(g)) return true;
    found = true;
    witness = with_props(ladner_sat_model(g), f);
    return false;
  });
  return found;
}

}  // namespace

SatOutcome sat(const Formula& f, const SatConfig& cfg) {
  SatOutcome out;
  auto sig = signature_of(f);
  auto done = [&](bool answer, std::optional<Witness> w, std::string method) {
    out.answer = answer ? SatAnswer::Sat : SatAnswer::Unsat;
    if (answer && confirms(w, f, cfg.eval)) {
      out.witness = std::move(w);
      for (const auto& p : propositions_of(f))
        out.witness->structure.declare_prop(p);
    }
    out.method = std::move(method);
    return out;
  };

  if (!sig.has(kImpl)) {
    if (!sig.has(kNeg)) {
      Formula g = monotone_rewrite(f);
      if (!signature_of(g).has(kBot)) {
        Witness w;
        w.structure.add_world("w0");
        w.structure.add_edge(0, 0);
        for (const auto& p : propositions_of(f)) w.structure.set_label(0, p);
        return done(true, w, "monotone");
      }
      int cors = count_classical_or(g);
      if (cors <= 16) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << cors); ++i) {
          auto m = ladner_sat_model(distribute_classical_or(g, i));
          if (!m) continue;
          // Every original atom follows t.
          KripkeStructure& k = m->structure;
          for (std::size_t w = 0; w < k.num_worlds(); ++w) {
            int wi = static_cast<int>(w);
            bool t = k.prop_index("t") && k.holds(wi, *k.prop_index("t"));
            for (const auto& p : propositions_of(f)) k.set_label(wi, p, t);
          }
          return done(true, m, "monotone");
        }
        return done(false, std::nullopt, "monotone");
      }
    }
    if (!(sig.has(kBox) && sig.has(kDiamond))) {
      Formula g = one_modality_simplify(f);
      if (sig.has(kBox)) {
        // Intransitive singleton: boxes hold vacuously.
        auto m = ladner_sat_model(g);
        return done(m.has_value(), m, "one_modality");
      }
      auto m = ladner_sat_model(g);
      return done(m.has_value(), with_props(m, f), "one_modality");
    }
    if (!sig.has(kAnd)) {
      bool r = wedge_free_sat(f);
      std::optional<Witness> w;
      if (r && sat_bounded_is_exhaustive(f, cfg.max_worlds))
        w = sat_bounded(f, cfg.max_worlds, cfg.eval);
      return done(r, w, "wedge_free");
    }
    int cors = count_classical_or(f);
    if (cors <= 12) {
      std::uint64_t per = phi_T_count(f);
      if (per <= cfg.phi_T_budget) {
        std::optional<Witness> w;
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << cors); ++i) {
          auto r = via_phi_T(distribute_classical_or(f, i), cfg, w);
          if (r && *r) return done(true, w, "phi_T");
        }
        return done(false, std::nullopt, "phi_T");
      }
    }
  }

  auto w = sat_bounded(f, cfg.max_worlds, cfg.eval);
  if (w) return done(true, w, "bounded");
  if (sat_bounded_is_exhaustive(f, cfg.max_worlds))
    return done(false, std::nullopt, "bounded");
  out.answer = SatAnswer::Unknown;
  out.method = "bounded";
  return out;
}

}  // namespace tdl
