#include "tdl/folog.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace tdl {

// ---------------------------------------------------------------- formulas

FoFormula make_fo(FoNode n) {
  return FoFormula(std::make_shared<const FoNode>(std::move(n)));
}

namespace {

FoNode leaf(FoOp op) {
  FoNode n;
  n.op = op;
  return n;
}

FoFormula literal(FoOp op, std::string name, std::vector<std::string> terms) {
  FoNode n = leaf(op);
  n.name = std::move(name);
  n.terms = std::move(terms);
  return make_fo(std::move(n));
}

FoFormula binary(FoOp op, FoFormula a, FoFormula b) {
  FoNode n = leaf(op);
  n.a = std::move(a);
  n.b = std::move(b);
  return make_fo(std::move(n));
}

FoFormula quantifier(FoOp op, std::string var, FoFormula body,
                     std::set<std::string> slash, int bound) {
  FoNode n = leaf(op);
  n.var = std::move(var);
  n.a = std::move(body);
  n.slash = std::move(slash);
  n.bound = bound;
  return make_fo(std::move(n));
}

bool is_quantifier(FoOp op) {
  return op == FoOp::Exists || op == FoOp::Forall || op == FoOp::CountGe ||
         op == FoOp::CountLt;
}

bool is_binary(FoOp op) {
  return op == FoOp::And || op == FoOp::Or || op == FoOp::Cor;
}

}  // namespace

FoFormula::FoFormula() : FoFormula(top()) {}
FoFormula FoFormula::top() { return make_fo(leaf(FoOp::Top)); }
FoFormula FoFormula::bot() { return make_fo(leaf(FoOp::Bot)); }
FoFormula FoFormula::eq(std::string a, std::string b) {
  return literal(FoOp::Eq, "", {std::move(a), std::move(b)});
}
FoFormula FoFormula::neq(std::string a, std::string b) {
  return literal(FoOp::Neq, "", {std::move(a), std::move(b)});
}
FoFormula FoFormula::rel(std::string name, std::vector<std::string> args) {
  if (args.size() > 2) throw FoError("relation " + name + " has arity > 2");
  return literal(FoOp::Rel, std::move(name), std::move(args));
}
FoFormula FoFormula::neg_rel(std::string name, std::vector<std::string> args) {
  if (args.size() > 2) throw FoError("relation " + name + " has arity > 2");
  return literal(FoOp::NegRel, std::move(name), std::move(args));
}
FoFormula FoFormula::dep(std::vector<std::string> terms) {
  return literal(FoOp::Dep, "", std::move(terms));
}
FoFormula FoFormula::neg_dep(std::vector<std::string> terms) {
  return literal(FoOp::NegDep, "", std::move(terms));
}
FoFormula FoFormula::conj(FoFormula a, FoFormula b) {
  return binary(FoOp::And, std::move(a), std::move(b));
}
FoFormula FoFormula::split_or(FoFormula a, FoFormula b) {
  return binary(FoOp::Or, std::move(a), std::move(b));
}
FoFormula FoFormula::classical_or(FoFormula a, FoFormula b) {
  return binary(FoOp::Cor, std::move(a), std::move(b));
}
FoFormula FoFormula::exists(std::string var, FoFormula body,
                            std::set<std::string> slash) {
  return quantifier(FoOp::Exists, std::move(var), std::move(body),
                    std::move(slash), 0);
}
FoFormula FoFormula::forall(std::string var, FoFormula body,
                            std::set<std::string> slash) {
  return quantifier(FoOp::Forall, std::move(var), std::move(body),
                    std::move(slash), 0);
}
FoFormula FoFormula::count_ge(int bound, std::string var, FoFormula body) {
  return quantifier(FoOp::CountGe, std::move(var), std::move(body), {}, bound);
}
FoFormula FoFormula::count_lt(int bound, std::string var, FoFormula body) {
  return quantifier(FoOp::CountLt, std::move(var), std::move(body), {}, bound);
}

FoOp FoFormula::op() const { return node_->op; }
const std::string& FoFormula::name() const { return node_->name; }
const std::vector<std::string>& FoFormula::terms() const { return node_->terms; }
const std::string& FoFormula::var() const { return node_->var; }
const std::set<std::string>& FoFormula::slash() const { return node_->slash; }
int FoFormula::bound() const { return node_->bound; }
const FoFormula& FoFormula::left() const { return *node_->a; }
const FoFormula& FoFormula::right() const { return *node_->b; }

bool FoFormula::operator==(const FoFormula& o) const {
  if (node_ == o.node_) return true;
  const FoNode& x = *node_;
  const FoNode& y = *o.node_;
  if (x.op != y.op || x.name != y.name || x.terms != y.terms ||
      x.var != y.var || x.slash != y.slash || x.bound != y.bound)
    return false;
  if (x.a.has_value() != y.a.has_value() || x.b.has_value() != y.b.has_value())
    return false;
  if (x.a && *x.a != *y.a) return false;
  if (x.b && *x.b != *y.b) return false;
  return true;
}

FoFormula fo_conj_all(const std::vector<FoFormula>& fs) {
  if (fs.empty()) return FoFormula::top();
  FoFormula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = FoFormula::conj(out, fs[i]);
  return out;
}

FoFormula fo_split_or_all(const std::vector<FoFormula>& fs) {
  if (fs.empty()) return FoFormula::bot();
  FoFormula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i)
    out = FoFormula::split_or(out, fs[i]);
  return out;
}

FoFormula fo_dual(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::Top: return FoFormula::bot();
    case FoOp::Bot: return FoFormula::top();
    case FoOp::Eq: return FoFormula::neq(f.terms()[0], f.terms()[1]);
    case FoOp::Neq: return FoFormula::eq(f.terms()[0], f.terms()[1]);
    case FoOp::Rel: return FoFormula::neg_rel(f.name(), f.terms());
    case FoOp::NegRel: return FoFormula::rel(f.name(), f.terms());
    case FoOp::And:
      return FoFormula::split_or(fo_dual(f.left()), fo_dual(f.right()));
    case FoOp::Or:
      return FoFormula::conj(fo_dual(f.left()), fo_dual(f.right()));
    case FoOp::Exists:
    case FoOp::Forall:
      if (!f.slash().empty()) throw FoError("dual of a slashed quantifier");
      return f.op() == FoOp::Exists
                 ? FoFormula::forall(f.var(), fo_dual(f.body()))
                 : FoFormula::exists(f.var(), fo_dual(f.body()));
    case FoOp::CountGe: return FoFormula::count_lt(f.bound(), f.var(), f.body());
    case FoOp::CountLt: return FoFormula::count_ge(f.bound(), f.var(), f.body());
    default: throw FoError("dual is only defined for first-order formulas");
  }
}

FoFormula fo_implies(const FoFormula& a, const FoFormula& b) {
  return FoFormula::split_or(fo_dual(a), b);
}

namespace {

void collect_free(const FoFormula& f, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  switch (f.op()) {
    case FoOp::Top:
    case FoOp::Bot: return;
    case FoOp::Eq:
    case FoOp::Neq:
    case FoOp::Rel:
    case FoOp::NegRel:
    case FoOp::Dep:
    case FoOp::NegDep:
      for (const auto& t : f.terms())
        if (!bound.count(t)) out.insert(t);
      return;
    case FoOp::And:
    case FoOp::Or:
    case FoOp::Cor:
      collect_free(f.left(), bound, out);
      collect_free(f.right(), bound, out);
      return;
    default: {
      bool had = bound.count(f.var()) > 0;
      bound.insert(f.var());
      collect_free(f.body(), bound, out);
      if (!had) bound.erase(f.var());
    }
  }
}

template <class Pred>
bool any_node(const FoFormula& f, Pred pred) {
  if (pred(f)) return true;
  if (is_binary(f.op())) return any_node(f.left(), pred) || any_node(f.right(), pred);
  if (is_quantifier(f.op())) return any_node(f.body(), pred);
  return false;
}

template <class Fn>
void each_node(const FoFormula& f, Fn fn) {
  fn(f);
  if (is_binary(f.op())) {
    each_node(f.left(), fn);
    each_node(f.right(), fn);
  } else if (is_quantifier(f.op())) {
    each_node(f.body(), fn);
  }
}

}  // namespace

std::set<std::string> free_vars(const FoFormula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> all_vars(const FoFormula& f) {
  std::set<std::string> out;
  each_node(f, [&](const FoFormula& g) {
    if (is_quantifier(g.op())) {
      out.insert(g.var());
      out.insert(g.slash().begin(), g.slash().end());
    } else if (!is_binary(g.op())) {
      out.insert(g.terms().begin(), g.terms().end());
    }
  });
  return out;
}

std::set<std::string> relation_symbols(const FoFormula& f) {
  std::set<std::string> out;
  each_node(f, [&](const FoFormula& g) {
    if (g.op() == FoOp::Rel || g.op() == FoOp::NegRel) out.insert(g.name());
  });
  return out;
}

bool has_slash(const FoFormula& f) {
  return any_node(f, [](const FoFormula& g) {
    return (g.op() == FoOp::Exists || g.op() == FoOp::Forall) &&
           !g.slash().empty();
  });
}

bool has_dep(const FoFormula& f) {
  return any_node(f, [](const FoFormula& g) {
    return g.op() == FoOp::Dep || g.op() == FoOp::NegDep;
  });
}

bool is_first_order(const FoFormula& f) {
  return !any_node(f, [](const FoFormula& g) {
    return g.op() == FoOp::Dep || g.op() == FoOp::NegDep ||
           g.op() == FoOp::Cor ||
           (g.op() == FoOp::Exists && !g.slash().empty());
  });
}

// ------------------------------------------------------------ text syntax

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string render_sub(const FoFormula& f) {
  std::string s = render(f);
  return is_binary(f.op()) ? "(" + s + ")" : s;
}

std::string dep_args(const std::vector<std::string>& t) {
  if (t.empty()) return "dep()";
  std::vector<std::string> dets(t.begin(), t.end() - 1);
  return "dep(" + join(dets, ",") + ";" + t.back() + ")";
}

}  // namespace

std::string render(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::Top: return "true";
    case FoOp::Bot: return "false";
    case FoOp::Eq: return f.terms()[0] + " = " + f.terms()[1];
    case FoOp::Neq: return f.terms()[0] + " != " + f.terms()[1];
    case FoOp::Rel: return f.name() + "(" + join(f.terms(), ",") + ")";
    case FoOp::NegRel: return "!" + f.name() + "(" + join(f.terms(), ",") + ")";
    case FoOp::Dep: return dep_args(f.terms());
    case FoOp::NegDep: return "!" + dep_args(f.terms());
    case FoOp::And: return render_sub(f.left()) + " & " + render_sub(f.right());
    case FoOp::Or: return render_sub(f.left()) + " | " + render_sub(f.right());
    case FoOp::Cor:
      return render_sub(f.left()) + " \\/ " + render_sub(f.right());
    default: break;
  }
  std::string q;
  if (f.op() == FoOp::Exists) q = "E ";
  if (f.op() == FoOp::Forall) q = "A ";
  if (f.op() == FoOp::CountGe) q = "E>=" + std::to_string(f.bound()) + " ";
  if (f.op() == FoOp::CountLt) q = "E<" + std::to_string(f.bound()) + " ";
  q += f.var();
  if (!f.slash().empty())
    q += "/{" + join({f.slash().begin(), f.slash().end()}, ",") + "}";
  return q + ". " + render_sub(f.body());
}

namespace {

class FoParser {
 public:
  explicit FoParser(const std::string& s) : s_(s) {}

  FoFormula run() {
    FoFormula f = impl();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return f;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw FoError("column " + std::to_string(i_ + 1) + ": " + msg);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }
  bool peek(const std::string& t) {
    skip();
    return s_.compare(i_, t.size(), t) == 0;
  }
  bool accept(const std::string& t) {
    if (!peek(t)) return false;
    i_ += t.size();
    return true;
  }
  void expect(const std::string& t) {
    if (!accept(t)) fail("expected '" + t + "'");
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    if (b == i_) fail("expected an identifier");
    return s_.substr(b, i_ - b);
  }
  int number() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
      ++i_;
    if (b == i_) fail("expected a number");
    return std::stoi(s_.substr(b, i_ - b));
  }
  std::vector<std::string> ident_list(char close) {
    std::vector<std::string> out;
    skip();
    if (i_ < s_.size() && s_[i_] == close) return out;
    out.push_back(ident());
    while (accept(",")) out.push_back(ident());
    return out;
  }

  FoFormula impl() {
    FoFormula a = cor();
    if (accept("->")) return fo_implies(a, impl());
    return a;
  }
  FoFormula cor() {
    FoFormula a = por();
    while (accept("\\/")) a = FoFormula::classical_or(a, por());
    return a;
  }
  FoFormula por() {
    FoFormula a = conj();
    while (!peek("||") && accept("|")) a = FoFormula::split_or(a, conj());
    return a;
  }
  FoFormula conj() {
    FoFormula a = unary();
    while (accept("&")) a = FoFormula::conj(a, unary());
    return a;
  }

  std::vector<std::string> dep_terms() {
    expect("(");
    auto first = ident_list(';');
    if (accept(";")) {
      auto det = ident();
      expect(")");
      first.push_back(det);
      return first;
    }
    expect(")");
    return first;
  }

  bool quantifier_ahead() {
    skip();
    if (i_ >= s_.size() || (s_[i_] != 'E' && s_[i_] != 'A')) return false;
    std::size_t j = i_ + 1;
    if (j < s_.size() && ident_char(s_[j])) return false;
    while (j < s_.size() && s_[j] == ' ') ++j;
    return j < s_.size() && s_[j] != '(';
  }

  FoFormula unary() {
    if (accept("(")) {
      FoFormula f = impl();
      expect(")");
      return f;
    }
    if (accept("!")) {
      skip();
      if (accept("(")) {
        FoFormula f = impl();
        expect(")");
        return fo_dual(f);
      }
      std::string id = ident();
      if (id == "dep") return FoFormula::neg_dep(dep_terms());
      if (id == "true") return FoFormula::bot();
      if (id == "false") return FoFormula::top();
      expect("(");
      auto args = ident_list(')');
      expect(")");
      return FoFormula::neg_rel(id, args);
    }
    if (quantifier_ahead()) {
      char q = s_[i_++];
      FoOp op = q == 'E' ? FoOp::Exists : FoOp::Forall;
      int bound = 0;
      if (q == 'E' && accept(">=")) {
        op = FoOp::CountGe;
        bound = number();
      } else if (q == 'E' && accept("<")) {
        op = FoOp::CountLt;
        bound = number();
      }
      std::string v = ident();
      std::set<std::string> slash;
      if (accept("/")) {
        expect("{");
        auto w = ident_list('}');
        expect("}");
        slash.insert(w.begin(), w.end());
        if (op == FoOp::CountGe || op == FoOp::CountLt)
          fail("counting quantifiers take no slash set");
      }
      expect(".");
      FoFormula body = unary();
      return quantifier(op, v, body, slash, bound);
    }
    std::string id = ident();
    if (id == "true") return FoFormula::top();
    if (id == "false") return FoFormula::bot();
    if (id == "dep") return FoFormula::dep(dep_terms());
    if (accept("(")) {
      auto args = ident_list(')');
      expect(")");
      return FoFormula::rel(id, args);
    }
    if (accept("!=")) return FoFormula::neq(id, ident());
    if (accept("=")) return FoFormula::eq(id, ident());
    fail("expected a formula");
  }
};

}  // namespace

FoFormula parse_fo(const std::string& text) { return FoParser(text).run(); }

// -------------------------------------------------------------- structures

int FoStructure::add_element(const std::string& name) {
  if (std::find(universe.begin(), universe.end(), name) != universe.end())
    throw FoError("duplicate element " + name);
  universe.push_back(name);
  return size() - 1;
}

int FoStructure::element(const std::string& name) const {
  auto it = std::find(universe.begin(), universe.end(), name);
  if (it == universe.end()) throw FoError("unknown element " + name);
  return static_cast<int>(it - universe.begin());
}

void FoStructure::declare(const std::string& rel, int arity) {
  auto it = relations.find(rel);
  if (it == relations.end()) {
    relations[rel].arity = arity;
  } else if (it->second.arity != arity) {
    throw FoError("relation " + rel + " used with two arities");
  }
}

void FoStructure::add_tuple(const std::string& rel, std::vector<int> tuple) {
  declare(rel, static_cast<int>(tuple.size()));
  for (int v : tuple)
    if (v < 0 || v >= size()) throw FoError("tuple outside the universe");
  relations[rel].tuples.insert(std::move(tuple));
}

bool FoStructure::holds(const std::string& rel,
                        const std::vector<int>& tuple) const {
  auto it = relations.find(rel);
  if (it == relations.end()) throw FoError("unknown relation " + rel);
  if (it->second.arity != static_cast<int>(tuple.size()))
    throw FoError("relation " + rel + " has arity " +
                  std::to_string(it->second.arity));
  return it->second.tuples.count(tuple) > 0;
}

FoStructure fo_universe(int n) {
  FoStructure a;
  for (int i = 0; i < n; ++i) a.add_element(std::to_string(i));
  return a;
}

FoTeam FoTeam::unit() {
  FoTeam t;
  t.rows.insert(std::vector<int>{});
  return t;
}

FoTeam FoTeam::full(const FoStructure& a, std::vector<std::string> vars) {
  FoTeam t;
  t.vars = std::move(vars);
  std::vector<int> row(t.vars.size(), 0);
  if (a.size() == 0 && !row.empty()) return t;
  while (true) {
    t.rows.insert(row);
    std::size_t i = 0;
    while (i < row.size() && ++row[i] == a.size()) row[i++] = 0;
    if (i == row.size()) break;
  }
  return t;
}

FoTeam restrict_team(const FoTeam& x, const std::vector<std::string>& vars) {
  std::vector<std::size_t> cols;
  for (const auto& v : vars) {
    auto it = std::find(x.vars.begin(), x.vars.end(), v);
    if (it == x.vars.end()) throw FoError("variable " + v + " not in the team");
    cols.push_back(it - x.vars.begin());
  }
  FoTeam out;
  out.vars = vars;
  for (const auto& r : x.rows) {
    std::vector<int> row;
    for (auto c : cols) row.push_back(r[c]);
    out.rows.insert(row);
  }
  return out;
}

// -------------------------------------------------------------- evaluation

namespace {

using Rows = std::vector<std::vector<int>>;

class FoEvaluator {
 public:
  FoEvaluator(const FoStructure& a, const FoEvalConfig& cfg) : a_(a), cfg_(cfg) {}

  bool team(const FoFormula& f, const std::vector<std::string>& vars,
            const Rows& rows) {
    if (rows.empty()) return true;
    if (flat(f)) {
      for (const auto& r : rows)
        if (!point(f, vars, r)) return false;
      return true;
    }
    switch (f.op()) {
      case FoOp::Dep: return dep(f, vars, rows);
      case FoOp::NegDep: return false;
      case FoOp::And:
        return team(f.left(), vars, rows) && team(f.right(), vars, rows);
      case FoOp::Cor:
        return team(f.left(), vars, rows) || team(f.right(), vars, rows);
      case FoOp::Or: return split(f, vars, rows);
      case FoOp::Exists: return exists(f, vars, rows);
      case FoOp::Forall: return forall(f, vars, rows);
      default: break;
    }
    throw FoError("cannot evaluate " + render(f));
  }

 private:
  const FoStructure& a_;
  const FoEvalConfig& cfg_;
  std::unordered_map<const FoNode*, bool> flat_;

  bool flat(const FoFormula& f) {
    auto it = flat_.find(f.id());
    if (it != flat_.end()) return it->second;
    bool v = is_first_order(f);
    flat_[f.id()] = v;
    return v;
  }

  int value(const std::string& t, const std::vector<std::string>& vars,
            const std::vector<int>& row) const {
    for (std::size_t i = vars.size(); i-- > 0;)
      if (vars[i] == t) return row[i];
    auto c = a_.constants.find(t);
    if (c != a_.constants.end()) return c->second;
    throw FoError("unassigned variable " + t);
  }

  std::vector<int> values(const FoFormula& f,
                          const std::vector<std::string>& vars,
                          const std::vector<int>& row) const {
    std::vector<int> out;
    for (const auto& t : f.terms()) out.push_back(value(t, vars, row));
    return out;
  }

  // Tarski semantics on one assignment. Variables may repeat in vars; the
  // last occurrence wins.
  bool point(const FoFormula& f, std::vector<std::string>& vars,
             std::vector<int>& row) {
    switch (f.op()) {
      case FoOp::Top: return true;
      case FoOp::Bot:
      case FoOp::NegDep: return false;
      case FoOp::Dep: return true;
      case FoOp::Eq:
        return value(f.terms()[0], vars, row) == value(f.terms()[1], vars, row);
      case FoOp::Neq:
        return value(f.terms()[0], vars, row) != value(f.terms()[1], vars, row);
      case FoOp::Rel: return a_.holds(f.name(), values(f, vars, row));
      case FoOp::NegRel: return !a_.holds(f.name(), values(f, vars, row));
      case FoOp::And: return point(f.left(), vars, row) && point(f.right(), vars, row);
      case FoOp::Or: return point(f.left(), vars, row) || point(f.right(), vars, row);
      default: break;
    }
    if (!is_quantifier(f.op()) || (f.op() == FoOp::Exists && !f.slash().empty()))
      throw FoError("not a first-order formula: " + render(f));
    int count = 0;
    vars.push_back(f.var());
    row.push_back(0);
    for (int e = 0; e < a_.size(); ++e) {
      row.back() = e;
      if (point(f.body(), vars, row)) ++count;
    }
    vars.pop_back();
    row.pop_back();
    switch (f.op()) {
      case FoOp::Exists: return count > 0;
      case FoOp::Forall: return count == a_.size();
      case FoOp::CountGe: return count >= f.bound();
      default: return count < f.bound();
    }
  }

  bool point(const FoFormula& f, const std::vector<std::string>& vars,
             const std::vector<int>& row) {
    auto v = vars;
    auto r = row;
    return point(f, v, r);
  }

  bool dep(const FoFormula& f, const std::vector<std::string>& vars,
           const Rows& rows) const {
    if (f.terms().empty()) return true;
    std::map<std::vector<int>, int> seen;
    for (const auto& r : rows) {
      auto v = values(f, vars, r);
      int last = v.back();
      v.pop_back();
      auto [it, fresh] = seen.emplace(v, last);
      if (!fresh && it->second != last) return false;
    }
    return true;
  }

  void check_choices(std::uint64_t base, std::size_t n) const {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (base != 0 && total > cfg_.max_choices / base)
        throw ResourceError("team search exceeds the configured bound");
      total *= base;
    }
  }

  bool split(const FoFormula& f, const std::vector<std::string>& vars,
             const Rows& rows) {
    // Downward closure: if one side is flat, its part can be taken maximal.
    for (int side = 0; side < 2; ++side) {
      const FoFormula& a = side == 0 ? f.left() : f.right();
      const FoFormula& b = side == 0 ? f.right() : f.left();
      if (!flat(a)) continue;
      Rows rest;
      for (const auto& r : rows)
        if (!point(a, vars, r)) rest.push_back(r);
      return team(b, vars, rest);
    }
    check_choices(2, rows.size());
    std::uint64_t n = std::uint64_t{1} << rows.size();
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      Rows y, z;
      for (std::size_t i = 0; i < rows.size(); ++i)
        ((mask >> i) & 1 ? y : z).push_back(rows[i]);
      if (team(f.left(), vars, y) && team(f.right(), vars, z)) return true;
    }
    return false;
  }

  // Column of v in vars, appending a fresh column when absent.
  static std::size_t column(std::vector<std::string>& vars,
                            const std::string& v) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it != vars.end()) return it - vars.begin();
    vars.push_back(v);
    return vars.size() - 1;
  }

  static Rows normalize(std::vector<std::vector<int>> rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
  }

  bool forall(const FoFormula& f, const std::vector<std::string>& vars,
              const Rows& rows) {
    auto nv = vars;
    std::size_t c = column(nv, f.var());
    Rows out;
    for (const auto& r : rows)
      for (int e = 0; e < a_.size(); ++e) {
        auto nr = r;
        nr.resize(nv.size());
        nr[c] = e;
        out.push_back(std::move(nr));
      }
    return team(f.body(), nv, normalize(std::move(out)));
  }

  bool exists(const FoFormula& f, const std::vector<std::string>& vars,
              const Rows& rows) {
    // Rows agreeing outside the slash set must receive the same value.
    std::vector<std::size_t> key_cols;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (!f.slash().count(vars[i])) key_cols.push_back(i);
    std::map<std::vector<int>, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<int> key;
      for (auto c : key_cols) key.push_back(rows[i][c]);
      by_key[key].push_back(i);
    }
    std::vector<std::vector<std::size_t>> groups;
    for (auto& [k, g] : by_key) groups.push_back(std::move(g));

    auto nv = vars;
    std::size_t c = column(nv, f.var());
    auto extended = [&](std::size_t i, int e) {
      auto nr = rows[i];
      nr.resize(nv.size());
      nr[c] = e;
      return nr;
    };

    if (flat(f.body())) {
      // Groups are independent of each other.
      for (const auto& g : groups) {
        bool found = false;
        for (int e = 0; e < a_.size() && !found; ++e) {
          found = true;
          for (auto i : g)
            if (!point(f.body(), nv, extended(i, e))) {
              found = false;
              break;
            }
        }
        if (!found) return false;
      }
      return true;
    }

    if (a_.size() == 0) return false;
    check_choices(a_.size(), groups.size());
    std::vector<int> choice(groups.size(), 0);
    while (true) {
      Rows out;
      for (std::size_t g = 0; g < groups.size(); ++g)
        for (auto i : groups[g]) out.push_back(extended(i, choice[g]));
      if (team(f.body(), nv, normalize(std::move(out)))) return true;
      std::size_t g = 0;
      while (g < choice.size() && ++choice[g] == a_.size()) choice[g++] = 0;
      if (g == choice.size()) return false;
    }
  }
};

}  // namespace

bool fo_eval(const FoStructure& a, const FoTeam& x, const FoFormula& f,
             const FoEvalConfig& cfg) {
  for (const auto& v : free_vars(f))
    if (std::find(x.vars.begin(), x.vars.end(), v) == x.vars.end() &&
        !a.constants.count(v))
      throw FoError("free variable " + v + " is not in the team domain");
  for (const auto& r : x.rows)
    if (r.size() != x.vars.size()) throw FoError("assignment of wrong length");
  FoEvaluator ev(a, cfg);
  return ev.team(f, x.vars, Rows(x.rows.begin(), x.rows.end()));
}

bool fo_models(const FoStructure& a, const FoFormula& sentence,
               const FoEvalConfig& cfg) {
  return fo_eval(a, FoTeam::unit(), sentence, cfg);
}

// ------------------------------------------------------------ translations

namespace {

void require_two_vars(const FoFormula& f, const std::set<std::string>& allowed,
                      const char* what) {
  for (const auto& v : all_vars(f))
    if (!allowed.count(v))
      throw FoError(std::string(what) + ": variable " + v + " not allowed");
}

FoFormula rebuild(const FoFormula& f, FoFormula a, std::optional<FoFormula> b) {
  switch (f.op()) {
    case FoOp::And: return FoFormula::conj(std::move(a), std::move(*b));
    case FoOp::Or: return FoFormula::split_or(std::move(a), std::move(*b));
    case FoOp::Cor: return FoFormula::classical_or(std::move(a), std::move(*b));
    default: return quantifier(f.op(), f.var(), std::move(a), f.slash(), f.bound());
  }
}

std::string other(const std::string& v) { return v == "x" ? "y" : "x"; }

FoFormula d2_to_if2(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::Dep: {
      const auto& t = f.terms();
      if (t.empty()) return FoFormula::top();
      std::set<std::string> dets(t.begin(), t.end() - 1);
      const std::string& v = t.back();
      if (dets.count(v)) return FoFormula::top();
      if (dets.empty())
        return FoFormula::exists(other(v), FoFormula::eq("x", "y"), {"x", "y"});
      const std::string& u = *dets.begin();
      return FoFormula::exists(u, FoFormula::eq("x", "y"), {v});
    }
    case FoOp::NegDep: return FoFormula::neq("x", "x");
    case FoOp::CountGe:
    case FoOp::CountLt: throw FoError("counting quantifiers are not in D");
    case FoOp::Exists:
    case FoOp::Forall:
      if (!f.slash().empty()) throw FoError("slashed quantifier in a D formula");
      return rebuild(f, d2_to_if2(f.body()), std::nullopt);
    case FoOp::And:
    case FoOp::Or:
    case FoOp::Cor: return rebuild(f, d2_to_if2(f.left()), d2_to_if2(f.right()));
    default: return f;
  }
}

FoFormula if2_to_d3(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::CountGe:
    case FoOp::CountLt: throw FoError("counting quantifiers are not in IF");
    case FoOp::Forall: return FoFormula::forall(f.var(), if2_to_d3(f.body()));
    case FoOp::Exists: {
      const std::string& v = f.var();
      const std::string o = other(v);
      FoFormula body = if2_to_d3(f.body());
      bool sv = f.slash().count(v) > 0, so = f.slash().count(o) > 0;
      if (!sv && !so) return FoFormula::exists(v, body);
      if (sv && so)
        return FoFormula::exists(v, FoFormula::conj(FoFormula::dep({v}), body));
      if (sv)
        return FoFormula::exists(v, FoFormula::conj(FoFormula::dep({o, v}), body));
      return FoFormula::exists(
          "z", FoFormula::conj(
                   FoFormula::eq(v, "z"),
                   FoFormula::exists(
                       v, FoFormula::conj(FoFormula::dep({"z", v}), body))));
    }
    case FoOp::And:
    case FoOp::Or:
    case FoOp::Cor: return rebuild(f, if2_to_d3(f.left()), if2_to_d3(f.right()));
    default: return f;
  }
}

}  // namespace

FoFormula translate_d2_to_if2(const FoFormula& f) {
  require_two_vars(f, {"x", "y"}, "D2");
  return d2_to_if2(f);
}

FoFormula translate_if2_to_d3(const FoFormula& f) {
  require_two_vars(f, {"x", "y"}, "IF2");
  if (has_dep(f)) throw FoError("dependence atom in an IF formula");
  return if2_to_d3(f);
}

namespace {

class EsoBuilder {
 public:
  explicit EsoBuilder(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string fresh(const std::string& stem) {
    while (true) {
      std::string n = stem + std::to_string(++counter_);
      if (taken_.insert(n).second) return n;
    }
  }

  std::vector<std::pair<std::string, int>> rels;

  static std::vector<std::string> ordered(const std::set<std::string>& s) {
    return {s.begin(), s.end()};
  }

  static FoFormula forall_all(const std::vector<std::string>& vs, FoFormula f) {
    for (std::size_t i = vs.size(); i-- > 0;) f = FoFormula::forall(vs[i], f);
    return f;
  }

  // Sentence saying that the relation r, read over free variables vs, is
  // the relation of a team satisfying f.
  FoFormula tr(const FoFormula& f, const std::string& r) {
    auto vs = ordered(free_vars(f));
    auto guard = FoFormula::neg_rel(r, vs);
    switch (f.op()) {
      case FoOp::Top: return FoFormula::top();
      case FoOp::Bot:
      case FoOp::NegDep: return forall_all(vs, guard);
      case FoOp::Eq:
      case FoOp::Neq:
      case FoOp::Rel:
      case FoOp::NegRel:
        return forall_all(vs, FoFormula::split_or(guard, f));
      case FoOp::Dep: {
        const auto& t = f.terms();
        if (t.empty()) return FoFormula::top();
        std::set<std::string> dets(t.begin(), t.end() - 1);
        if (dets.count(t.back())) return FoFormula::top();
        std::vector<std::string> d(dets.begin(), dets.end());
        return forall_all(
            d, FoFormula::count_lt(2, t.back(), FoFormula::rel(r, vs)));
      }
      case FoOp::And:
      case FoOp::Or:
      case FoOp::Cor: {
        auto s = fresh("S");
        auto t = fresh("T");
        auto ls = ordered(free_vars(f.left()));
        auto rs = ordered(free_vars(f.right()));
        rels.emplace_back(s, static_cast<int>(ls.size()));
        rels.emplace_back(t, static_cast<int>(rs.size()));
        FoFormula parts = FoFormula::conj(tr(f.left(), s), tr(f.right(), t));
        auto sa = FoFormula::rel(s, ls);
        auto ta = FoFormula::rel(t, rs);
        FoFormula link;
        if (f.op() == FoOp::And)
          link = forall_all(vs, FoFormula::split_or(guard, FoFormula::conj(sa, ta)));
        else if (f.op() == FoOp::Or)
          link = forall_all(
              vs, FoFormula::split_or(guard, FoFormula::split_or(sa, ta)));
        else
          link = FoFormula::split_or(
              forall_all(vs, FoFormula::split_or(guard, sa)),
              forall_all(vs, FoFormula::split_or(guard, ta)));
        return FoFormula::conj(parts, link);
      }
      case FoOp::Exists:
      case FoOp::Forall: {
        if (!f.slash().empty()) throw FoError("slashed quantifier in a D formula");
        auto s = fresh("S");
        auto bs = ordered(free_vars(f.body()));
        rels.emplace_back(s, static_cast<int>(bs.size()));
        auto step = FoFormula::split_or(guard, FoFormula::rel(s, bs));
        FoFormula q = f.op() == FoOp::Exists ? FoFormula::exists(f.var(), step)
                                             : FoFormula::forall(f.var(), step);
        return FoFormula::conj(tr(f.body(), s), forall_all(vs, q));
      }
      default: throw FoError("counting quantifiers are not in D");
    }
  }

 private:
  std::set<std::string> taken_;
  int counter_ = 0;
};

}  // namespace

EsoTranslation translate_d_to_eso(const FoFormula& f) {
  if (has_slash(f)) throw FoError("slashed quantifier in a D formula");
  for (const auto& g : {FoOp::CountGe, FoOp::CountLt})
    if (any_node(f, [g](const FoFormula& h) { return h.op() == g; }))
      throw FoError("counting quantifiers are not in D");
  auto taken = relation_symbols(f);
  EsoBuilder b(taken);
  EsoTranslation out;
  out.team_relation = taken.count("R") ? b.fresh("R") : "R";
  auto fv = free_vars(f);
  out.team_vars.assign(fv.begin(), fv.end());
  out.matrix = b.tr(f, out.team_relation);
  out.relations = b.rels;
  return out;
}

bool expansion_exists(const FoStructure& a,
                      const std::vector<std::pair<std::string, int>>& rels,
                      const FoFormula& sentence, std::uint64_t max_expansions) {
  FoStructure e = a;
  std::vector<std::vector<std::vector<int>>> cells;
  std::size_t bits = 0;
  for (const auto& [name, arity] : rels) {
    if (e.relations.count(name)) throw FoError("relation " + name + " exists");
    e.declare(name, arity);
    FoTeam all = FoTeam::full(a, std::vector<std::string>(arity, "_"));
    cells.emplace_back(all.rows.begin(), all.rows.end());
    bits += cells.back().size();
  }
  if (bits >= 63 || (std::uint64_t{1} << bits) > max_expansions)
    throw ResourceError("too many expansions to enumerate");
  std::uint64_t n = std::uint64_t{1} << bits;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    std::size_t bit = 0;
    for (std::size_t r = 0; r < rels.size(); ++r) {
      auto& tuples = e.relations[rels[r].first].tuples;
      tuples.clear();
      for (const auto& c : cells[r])
        if ((mask >> bit++) & 1) tuples.insert(c);
    }
    if (fo_models(e, sentence)) return true;
  }
  return false;
}

bool eso_holds(const FoStructure& a, const FoTeam& x, const EsoTranslation& t) {
  FoStructure e = a;
  if (e.relations.count(t.team_relation))
    throw FoError("relation " + t.team_relation + " exists");
  e.declare(t.team_relation, static_cast<int>(t.team_vars.size()));
  for (const auto& r : restrict_team(x, t.team_vars).rows)
    e.relations[t.team_relation].tuples.insert(r);
  return expansion_exists(e, t.relations, t.matrix);
}

namespace {

struct MdlBuilder {
  int dep_vars = 0;

  static std::string prop_rel(const std::string& p) { return "P_" + p; }

  FoFormula tr(const Formula& f, const std::string& v) {
    const std::string w = other(v);
    switch (f.op()) {
      case Op::Top: return FoFormula::top();
      case Op::Bot:
      case Op::NegDep: return FoFormula::bot();
      case Op::Atom: return FoFormula::rel(prop_rel(f.name()), {v});
      case Op::NegAtom: return FoFormula::neg_rel(prop_rel(f.name()), {v});
      case Op::And: return FoFormula::conj(tr(f.left(), v), tr(f.right(), v));
      case Op::Or: return FoFormula::split_or(tr(f.left(), v), tr(f.right(), v));
      case Op::Cor:
        return FoFormula::classical_or(tr(f.left(), v), tr(f.right(), v));
      case Op::Dia:
        return FoFormula::exists(
            w, FoFormula::conj(FoFormula::rel("R", {v, w}), tr(f.sub(), w)));
      case Op::Box:
        return FoFormula::forall(
            w, FoFormula::split_or(FoFormula::neg_rel("R", {v, w}),
                                   tr(f.sub(), w)));
      case Op::Dep: {
        std::vector<std::string> props = f.dets();
        props.push_back(f.name());
        std::vector<std::string> us;
        std::vector<FoFormula> links;
        for (std::size_t i = 0; i < props.size(); ++i) {
          std::string u = "u" + std::to_string(i + 1);
          us.push_back(u);
          auto p = FoFormula::rel(prop_rel(props[i]), {v});
          auto is_c = FoFormula::rel("C", {u});
          auto is_d = FoFormula::rel("D", {u});
          links.push_back(FoFormula::split_or(FoFormula::conj(is_c, p),
                                              FoFormula::conj(is_d, fo_dual(p))));
        }
        FoFormula body = FoFormula::conj(fo_conj_all(links), FoFormula::dep(us));
        for (std::size_t i = us.size(); i-- > 0;) body = FoFormula::exists(us[i], body);
        return body;
      }
      case Op::Impl: throw FoError("intuitionistic implication is not in MDL");
    }
    throw FoError("unknown connective");
  }
};

}  // namespace

MdlTranslation translate_mdl_to_d2(const Formula& f, const KripkeStructure& k,
                                   const Team& t) {
  if (t.size() != k.num_worlds()) throw FoError("team does not fit the structure");
  MdlTranslation out;
  FoStructure& a = out.structure;
  for (std::size_t w = 0; w < k.num_worlds(); ++w) a.add_element(k.world_name(w));
  if (a.size() < 2) {
    std::string extra = "extra";
    while (std::find(a.universe.begin(), a.universe.end(), extra) != a.universe.end())
      extra += "'";
    a.add_element(extra);
  }
  a.declare("R", 2);
  a.declare("C", 1);
  a.declare("D", 1);
  a.add_tuple("C", {0});
  a.add_tuple("D", {1});
  for (std::size_t w = 0; w < k.num_worlds(); ++w)
    for (int s : k.successors(w)) a.add_tuple("R", {static_cast<int>(w), s});
  std::set<std::string> props(k.props().begin(), k.props().end());
  for (const auto& p : propositions_of(f)) props.insert(p);
  for (const auto& p : props) {
    a.declare(MdlBuilder::prop_rel(p), 1);
    auto idx = k.prop_index(p);
    if (!idx) continue;
    for (int w : members(k.extension(*idx)))
      a.add_tuple(MdlBuilder::prop_rel(p), {w});
  }
  out.team.vars = {"x"};
  for (int w : members(t)) out.team.rows.insert({w});
  MdlBuilder b;
  out.formula = b.tr(f, "x");
  return out;
}

// ------------------------------------------------------------------- grids

FoStructure gen_grid(int m, int n) {
  if (m < 0 || n < 0) throw FoError("grid dimensions must be non-negative");
  FoStructure a;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j)
      a.add_element(std::to_string(i) + "_" + std::to_string(j));
  a.declare("H", 2);
  a.declare("V", 2);
  auto id = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      if (i < m) a.add_tuple("H", {id(i, j), id(i + 1, j)});
      if (j < n) a.add_tuple("V", {id(i, j), id(i, j + 1)});
    }
  return a;
}

std::vector<std::pair<std::string, FoFormula>> grid_conjuncts() {
  using F = FoFormula;
  auto R = [](const std::string& r, const std::string& a, const std::string& b) {
    return F::rel(r, {a, b});
  };
  auto nR = [](const std::string& r, const std::string& a, const std::string& b) {
    return F::neg_rel(r, {a, b});
  };
  std::vector<std::pair<std::string, FoFormula>> out;
  out.emplace_back("SWroot",
                   F::exists("x", F::forall("y", F::conj(nR("V", "y", "x"),
                                                         nR("H", "y", "x")))));
  for (const char* r : {"V", "H"})
    out.emplace_back(std::string("functional(") + r + ")",
                     F::forall("x", F::forall("y", fo_implies(
                                                       R(r, "x", "y"),
                                                       F::exists("x", F::eq("y", "x"),
                                                                 {"y"})))));
  for (const char* r : {"V", "H"})
    out.emplace_back(std::string("injective(") + r + ")",
                     F::forall("x", F::forall("y", fo_implies(
                                                       R(r, "x", "y"),
                                                       F::exists("y", F::eq("x", "y"),
                                                                 {"x"})))));
  out.emplace_back(
      "distinct",
      F::forall("x", F::forall("y", fo_dual(F::conj(R("V", "x", "y"),
                                                     R("H", "x", "y"))))));
  const std::pair<const char*, const char*> pairs[] = {{"V", "H"}, {"H", "V"}};
  for (auto [r, rp] : pairs) {
    auto side = F::split_or(R(rp, "x", "y"), R(rp, "y", "x"));
    out.emplace_back(
        std::string("SWedges(") + r + "," + rp + ")",
        F::forall("x", fo_implies(F::forall("y", nR(r, "y", "x")),
                                  F::forall("y", fo_implies(
                                                     side, F::forall("x", nR(r, "x", "y")))))));
  }
  for (auto [r, rp] : pairs) {
    auto side = F::split_or(R(rp, "x", "y"), R(rp, "y", "x"));
    out.emplace_back(
        std::string("NEedges(") + r + "," + rp + ")",
        F::forall("x", fo_implies(F::forall("y", nR(r, "x", "y")),
                                  F::forall("y", fo_implies(
                                                     side, F::forall("x", nR(r, "y", "x")))))));
  }
  out.emplace_back(
      "join",
      F::forall(
          "x",
          fo_implies(
              F::conj(F::exists("y", R("V", "x", "y")), F::exists("y", R("H", "x", "y"))),
              F::forall("y", fo_implies(F::split_or(R("V", "x", "y"), R("H", "x", "y")),
                                        F::exists("x",
                                                  F::split_or(R("V", "y", "x"),
                                                              R("H", "y", "x")),
                                                  {"y"}))))));
  return out;
}

FoFormula gen_phi_grid() {
  std::vector<FoFormula> fs;
  for (auto& [name, f] : grid_conjuncts()) fs.push_back(f);
  return fo_conj_all(fs);
}

FoFormula gen_phi_infgrid() {
  FoFormula f = gen_phi_grid();
  for (const char* r : {"V", "H"})
    f = FoFormula::conj(
        f, FoFormula::forall("x", FoFormula::exists("y", FoFormula::rel(r, {"x", "y"}))));
  return f;
}

std::vector<std::string> failed_grid_conjuncts(const FoStructure& a) {
  std::vector<std::string> out;
  for (auto& [name, f] : grid_conjuncts())
    if (!fo_models(a, f)) out.push_back(name);
  return out;
}

// ------------------------------------------------------------------ tiling

namespace {

std::string tile_rel(std::size_t i) { return "P" + std::to_string(i); }

FoFormula matching(const TileSet& ts, const char* edge) {
  using F = FoFormula;
  bool right = std::string(edge) == "H";
  std::vector<FoFormula> rows;
  for (std::size_t i = 0; i < ts.tiles.size(); ++i) {
    std::vector<FoFormula> ok;
    for (std::size_t j = 0; j < ts.tiles.size(); ++j) {
      const Tile& a = ts.tiles[i];
      const Tile& b = ts.tiles[j];
      if (right ? a.right == b.left : a.top == b.bottom)
        ok.push_back(F::rel(tile_rel(j), {"y"}));
    }
    rows.push_back(fo_implies(F::rel(tile_rel(i), {"x"}), fo_split_or_all(ok)));
  }
  return fo_implies(F::rel(edge, {"x", "y"}), fo_conj_all(rows));
}

}  // namespace

std::vector<std::pair<std::string, int>> tile_relations(const TileSet& ts) {
  std::vector<std::pair<std::string, int>> out;
  for (std::size_t i = 0; i < ts.tiles.size(); ++i) out.emplace_back(tile_rel(i), 1);
  return out;
}

FoFormula gen_phi_tiling(const TileSet& ts) {
  using F = FoFormula;
  FoFormula psi =
      F::forall("x", F::forall("y", F::conj(matching(ts, "H"), matching(ts, "V"))));
  std::vector<FoFormula> choices;
  for (std::size_t i = 0; i < ts.tiles.size(); ++i) {
    std::vector<FoFormula> parts{F::rel(tile_rel(i), {"x"})};
    for (std::size_t j = 0; j < ts.tiles.size(); ++j)
      if (j != i) parts.push_back(F::neg_rel(tile_rel(j), {"x"}));
    choices.push_back(fo_conj_all(parts));
  }
  FoFormula theta = F::forall("x", fo_split_or_all(choices));
  return F::conj(psi, theta);
}

FoFormula gen_phi_border(const TileSet& ts, const std::string& c) {
  using F = FoFormula;
  auto side = [&](const std::string& r, bool incoming,
                  std::string Tile::*dir) {
    std::vector<FoFormula> ok;
    for (std::size_t i = 0; i < ts.tiles.size(); ++i)
      if (ts.tiles[i].*dir == c) ok.push_back(F::rel(tile_rel(i), {"x"}));
    auto none = incoming ? F::forall("y", F::neg_rel(r, {"y", "x"}))
                         : F::forall("y", F::neg_rel(r, {"x", "y"}));
    return F::forall("x", fo_implies(none, fo_split_or_all(ok)));
  };
  return fo_conj_all({side("V", true, &Tile::bottom), side("H", true, &Tile::left),
                      side("V", false, &Tile::top), side("H", false, &Tile::right)});
}

std::optional<std::vector<int>> tile_bruteforce(
    const FoStructure& a, const TileSet& ts,
    const std::optional<std::string>& border) {
  int n = a.size();
  auto edges = [&](const char* r) {
    std::vector<std::pair<int, int>> out;
    auto it = a.relations.find(r);
    if (it == a.relations.end()) return out;
    if (it->second.arity != 2) throw FoError(std::string(r) + " must be binary");
    for (const auto& t : it->second.tuples) out.emplace_back(t[0], t[1]);
    return out;
  };
  auto h = edges("H");
  auto v = edges("V");
  std::vector<bool> h_in(n), h_out(n), v_in(n), v_out(n);
  for (auto [s, t] : h) h_out[s] = h_in[t] = true;
  for (auto [s, t] : v) v_out[s] = v_in[t] = true;

  std::vector<std::vector<int>> allowed(n);
  for (int e = 0; e < n; ++e)
    for (int i = 0; i < static_cast<int>(ts.tiles.size()); ++i) {
      const Tile& t = ts.tiles[i];
      if (border) {
        const std::string& c = *border;
        if ((!h_in[e] && t.left != c) || (!v_in[e] && t.bottom != c) ||
            (!h_out[e] && t.right != c) || (!v_out[e] && t.top != c))
          continue;
      }
      allowed[e].push_back(i);
    }

  std::vector<int> tiling(n, -1);
  auto consistent = [&](int e) {
    for (auto [s, t] : h)
      if ((s == e || t == e) && tiling[s] >= 0 && tiling[t] >= 0 &&
          ts.tiles[tiling[s]].right != ts.tiles[tiling[t]].left)
        return false;
    for (auto [s, t] : v)
      if ((s == e || t == e) && tiling[s] >= 0 && tiling[t] >= 0 &&
          ts.tiles[tiling[s]].top != ts.tiles[tiling[t]].bottom)
        return false;
    return true;
  };
  std::function<bool(int)> place = [&](int e) {
    if (e == n) return true;
    for (int i : allowed[e]) {
      tiling[e] = i;
      if (consistent(e) && place(e + 1)) return true;
    }
    tiling[e] = -1;
    return false;
  };
  if (!place(0)) return std::nullopt;
  return tiling;
}

// ------------------------------------------------------------- file formats

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::vector<std::string>> tuples(const std::string& s) {
  std::vector<std::vector<std::string>> out;
  std::size_t i = 0;
  while (true) {
    std::size_t open = s.find('(', i);
    if (open == std::string::npos) break;
    if (!trim(s.substr(i, open - i)).empty()) throw FoError("malformed tuple list");
    std::size_t close = s.find(')', open);
    if (close == std::string::npos) throw FoError("unclosed tuple");
    std::vector<std::string> t;
    std::string inner = s.substr(open + 1, close - open - 1);
    if (!trim(inner).empty()) {
      std::stringstream in(inner);
      for (std::string part; std::getline(in, part, ',');) t.push_back(trim(part));
    }
    out.push_back(t);
    i = close + 1;
  }
  if (!trim(s.substr(i)).empty()) throw FoError("malformed tuple list");
  return out;
}

std::string tuple_text(const FoStructure& a, const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "," : "") + a.universe.at(t[i]);
  return s + ")";
}

}  // namespace

LoadedFo load_fo(const std::string& text) {
  LoadedFo out;
  FoStructure& a = out.structure;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_universe = false;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      auto colon = line.find(':');
      if (colon == std::string::npos) throw FoError("missing ':'");
      auto head = words(line.substr(0, colon));
      std::string rest = line.substr(colon + 1);
      if (head.empty()) throw FoError("empty directive");
      if (head[0] == "universe" && head.size() == 1) {
        for (const auto& w : words(rest)) a.add_element(w);
        have_universe = true;
      } else if (head[0] == "rel" && head.size() == 2) {
        if (!have_universe) throw FoError("universe must come first");
        std::string name = head[1];
        std::optional<int> arity;
        auto slash = name.find('/');
        if (slash != std::string::npos) {
          arity = std::stoi(name.substr(slash + 1));
          name = name.substr(0, slash);
        }
        auto ts = tuples(rest);
        if (!arity && ts.empty()) throw FoError("cannot infer the arity of " + name);
        int ar = arity ? *arity : static_cast<int>(ts[0].size());
        if (ar > 2) throw FoError("relation " + name + " has arity > 2");
        a.declare(name, ar);
        for (const auto& t : ts) {
          if (static_cast<int>(t.size()) != ar) throw FoError("tuple of wrong arity");
          std::vector<int> v;
          for (const auto& e : t) v.push_back(a.element(e));
          a.add_tuple(name, v);
        }
      } else if (head[0] == "const" && head.size() == 2) {
        auto w = words(rest);
        if (w.size() != 1) throw FoError("constant needs one element");
        a.constants[head[1]] = a.element(w[0]);
      } else if (head[0] == "team") {
        FoTeam t;
        t.vars.assign(head.begin() + 1, head.end());
        for (const auto& tu : tuples(rest)) {
          if (tu.size() != t.vars.size()) throw FoError("assignment of wrong length");
          std::vector<int> v;
          for (const auto& e : tu) v.push_back(a.element(e));
          t.rows.insert(v);
        }
        out.team = t;
      } else {
        throw FoError("unknown directive " + head[0]);
      }
    }
  } catch (const FoError& e) {
    throw FoError("line " + std::to_string(lineno) + ": " + e.what());
  } catch (const std::invalid_argument&) {
    throw FoError("line " + std::to_string(lineno) + ": bad arity");
  }
  return out;
}

std::string store_fo(const FoStructure& a, const std::optional<FoTeam>& team) {
  std::ostringstream out;
  out << "universe:";
  for (const auto& e : a.universe) out << ' ' << e;
  out << '\n';
  for (const auto& [name, r] : a.relations) {
    out << "rel " << name << '/' << r.arity << ':';
    for (const auto& t : r.tuples) out << ' ' << tuple_text(a, t);
    out << '\n';
  }
  for (const auto& [name, e] : a.constants)
    out << "const " << name << ": " << a.universe.at(e) << '\n';
  if (team) {
    out << "team";
    for (const auto& v : team->vars) out << ' ' << v;
    out << ':';
    for (const auto& r : team->rows) out << ' ' << tuple_text(a, r);
    out << '\n';
  }
  return out.str();
}

TileSet load_tiles(const std::string& text) {
  TileSet ts;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    std::string head = colon == std::string::npos ? "" : trim(line.substr(0, colon));
    auto w = colon == std::string::npos ? std::vector<std::string>{}
                                        : words(line.substr(colon + 1));
    if (head == "tile" && w.size() == 4) {
      ts.tiles.push_back({w[0], w[1], w[2], w[3]});
    } else if (head == "border" && w.size() == 1) {
      ts.border = w[0];
    } else {
      throw FoError("line " + std::to_string(lineno) + ": expected 'tile: t r b l' or 'border: c'");
    }
  }
  return ts;
}

std::string store_tiles(const TileSet& ts) {
  std::ostringstream out;
  for (const auto& t : ts.tiles)
    out << "tile: " << t.top << ' ' << t.right << ' ' << t.bottom << ' ' << t.left
        << '\n';
  if (ts.border) out << "border: " << *ts.border << '\n';
  return out.str();
}

}  // namespace tdl
