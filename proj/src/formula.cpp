#include "tdl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "tdl/kripke.hpp"

namespace tdl {

Formula make_node(Node* n);

// Children are detached before deletion so that destroying a very deep
// formula does not recurse once per level.
void release_node(Node* n) {
  std::vector<std::shared_ptr<const Node>> pending;
  pending.push_back(std::move(n->a.node_));
  pending.push_back(std::move(n->b.node_));
  delete n;
  while (!pending.empty()) {
    std::shared_ptr<const Node> p = std::move(pending.back());
    pending.pop_back();
    if (p && p.use_count() == 1) {
      pending.push_back(std::move(p->a.node_));
      pending.push_back(std::move(p->b.node_));
    }
  }
}

Formula make_node(Node* n) {
  return Formula(std::shared_ptr<const Node>(n, release_node));
}

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  std::size_t i = 1;
  while (i < s.size() && ((s[i] >= 'a' && s[i] <= 'z') ||
                          (s[i] >= '0' && s[i] <= '9') || s[i] == '_'))
    ++i;
  while (i < s.size() && s[i] == '\'') ++i;
  return i == s.size() && s != "true" && s != "false" && s != "dep";
}

void require_name(const std::string& s) {
  if (!valid_ident(s)) throw FormulaError("invalid proposition name '" + s + "'");
}

Formula leaf(Op op, std::string name = {}, std::vector<std::string> dets = {}) {
  return make_node(new Node{op, std::move(name), std::move(dets)});
}

Formula inner(Op op, Formula a, Formula b) {
  auto* n = new Node{op, {}, {}};
  n->a = std::move(a);
  n->b = std::move(b);
  return make_node(n);
}

}  // namespace

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const Formula t = leaf(Op::Top);
  return t;
}

Formula Formula::bot() {
  static const Formula b = leaf(Op::Bot);
  return b;
}

Formula Formula::atom(std::string name) {
  require_name(name);
  return leaf(Op::Atom, std::move(name));
}

Formula Formula::neg_atom(std::string name) {
  require_name(name);
  return leaf(Op::NegAtom, std::move(name));
}

Formula Formula::dep(std::vector<std::string> dets, std::string determined) {
  for (const auto& d : dets) require_name(d);
  require_name(determined);
  return leaf(Op::Dep, std::move(determined), std::move(dets));
}

Formula Formula::neg_dep(std::vector<std::string> dets, std::string determined) {
  for (const auto& d : dets) require_name(d);
  require_name(determined);
  return leaf(Op::NegDep, std::move(determined), std::move(dets));
}

Formula Formula::conj(Formula a, Formula b) {
  return inner(Op::And, std::move(a), std::move(b));
}
Formula Formula::split_or(Formula a, Formula b) {
  return inner(Op::Or, std::move(a), std::move(b));
}
Formula Formula::classical_or(Formula a, Formula b) {
  return inner(Op::Cor, std::move(a), std::move(b));
}
Formula Formula::impl(Formula a, Formula b) {
  return inner(Op::Impl, std::move(a), std::move(b));
}
Formula Formula::box(Formula a) {
  return inner(Op::Box, std::move(a), Formula(nullptr));
}
Formula Formula::dia(Formula a) {
  return inner(Op::Dia, std::move(a), Formula(nullptr));
}

Formula Formula::with_children(const Formula& shape, Formula a, Formula b) {
  if (shape.is_binary()) return inner(shape.op(), std::move(a), std::move(b));
  if (shape.is_unary()) return inner(shape.op(), std::move(a), Formula(nullptr));
  return shape;
}

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<std::string>& Formula::dets() const { return node_->dets; }
const Formula& Formula::left() const { return node_->a; }
const Formula& Formula::right() const { return node_->b; }

bool Formula::is_leaf() const {
  switch (op()) {
    case Op::Top:
    case Op::Bot:
    case Op::Atom:
    case Op::NegAtom:
    case Op::Dep:
    case Op::NegDep:
      return true;
    default:
      return false;
  }
}

bool Formula::is_unary() const { return op() == Op::Box || op() == Op::Dia; }
bool Formula::is_binary() const { return !is_leaf() && !is_unary(); }

std::size_t Formula::size() const {
  std::size_t n = 0;
  for_each_preorder(*this, [&](const Formula&) { ++n; });
  return n;
}

int Formula::modal_depth() const {
  int best = 0;
  std::vector<std::pair<const Formula*, int>> stack{{this, 0}};
  while (!stack.empty()) {
    auto [f, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (f->is_unary()) stack.push_back({&f->left(), d + 1});
    else if (f->is_binary()) {
      stack.push_back({&f->right(), d});
      stack.push_back({&f->left(), d});
    }
  }
  return best;
}

bool Formula::operator==(const Formula& o) const {
  std::vector<std::pair<const Node*, const Node*>> stack{{id(), o.id()}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (x == y) continue;
    if (x->op != y->op || x->name != y->name || x->dets != y->dets) return false;
    if (x->a.node_) stack.push_back({x->a.id(), y->a.id()});
    if (x->b.node_) stack.push_back({x->b.id(), y->b.id()});
  }
  return true;
}

namespace {

Formula fold(const std::vector<Formula>& fs, Op op, const Formula& empty) {
  if (fs.empty()) return empty;
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = inner(op, acc, fs[i]);
  return acc;
}

}  // namespace

Formula conj_all(const std::vector<Formula>& fs) {
  return fold(fs, Op::And, Formula::top());
}
Formula split_or_all(const std::vector<Formula>& fs) {
  return fold(fs, Op::Or, Formula::bot());
}
Formula classical_or_all(const std::vector<Formula>& fs) {
  return fold(fs, Op::Cor, Formula::bot());
}
Formula box_n(int n, Formula f) {
  for (int i = 0; i < n; ++i) f = Formula::box(f);
  return f;
}
Formula dia_n(int n, Formula f) {
  for (int i = 0; i < n; ++i) f = Formula::dia(f);
  return f;
}

ParseError::ParseError(int l, int c, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ", column " +
                         std::to_string(c) + ": " + msg),
      line(l),
      column(c) {}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok {
  LParen,
  RParen,
  Not,
  Box,
  Dia,
  And,
  Or,
  Cor,
  Impl,
  Comma,
  Semi,
  Ident,
  True,
  False,
  Dep,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    int l = line, cc = col;
    auto two = s.compare(i, 2, "[]") == 0   ? Tok::Box
               : s.compare(i, 2, "<>") == 0 ? Tok::Dia
               : s.compare(i, 2, "\\/") == 0 ? Tok::Cor
               : s.compare(i, 2, "->") == 0 ? Tok::Impl
                                            : Tok::End;
    if (two != Tok::End) {
      out.push_back({two, s.substr(i, 2), l, cc});
      advance(2);
      continue;
    }
    Tok one = Tok::End;
    switch (c) {
      case '(': one = Tok::LParen; break;
      case ')': one = Tok::RParen; break;
      case '!': one = Tok::Not; break;
      case '&': one = Tok::And; break;
      case '|': one = Tok::Or; break;
      case ',': one = Tok::Comma; break;
      case ';': one = Tok::Semi; break;
      default: break;
    }
    if (one != Tok::End) {
      out.push_back({one, std::string(1, c), l, cc});
      advance(1);
      continue;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < s.size() && ((s[j] >= 'a' && s[j] <= 'z') ||
                              (s[j] >= '0' && s[j] <= '9') || s[j] == '_'))
        ++j;
      while (j < s.size() && s[j] == '\'') ++j;
      std::string w = s.substr(i, j - i);
      Tok k = w == "true" ? Tok::True
              : w == "false" ? Tok::False
              : w == "dep"   ? Tok::Dep
                             : Tok::Ident;
      out.push_back({k, w, l, cc});
      advance(j - i);
      continue;
    }
    throw ParseError(l, cc, std::string("unknown token '") + c + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

int precedence(Tok t) {
  switch (t) {
    case Tok::Impl: return 1;
    case Tok::Cor: return 2;
    case Tok::Or: return 3;
    case Tok::And: return 4;
    default: return 0;
  }
}

Op binary_op(Tok t) {
  switch (t) {
    case Tok::Impl: return Op::Impl;
    case Tok::Cor: return Op::Cor;
    case Tok::Or: return Op::Or;
    default: return Op::And;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Formula run() {
    bool want_operand = true;
    for (;;) {
      const Token& t = toks_[pos_];
      if (want_operand) {
        switch (t.kind) {
          case Tok::LParen:
          case Tok::Box:
          case Tok::Dia:
            ops_.push_back(t);
            ++pos_;
            continue;
          case Tok::Not: {
            ++pos_;
            operands_.push_back(atom(true));
            break;
          }
          case Tok::Ident:
          case Tok::True:
          case Tok::False:
          case Tok::Dep:
            operands_.push_back(atom(false));
            break;
          case Tok::End:
            throw ParseError(t.line, t.col, "unexpected end of input");
          default:
            throw ParseError(t.line, t.col,
                             "expected a formula but found '" + t.text + "'");
        }
        close_prefixes();
        want_operand = false;
        continue;
      }
      switch (t.kind) {
        case Tok::And:
        case Tok::Or:
        case Tok::Cor:
        case Tok::Impl: {
          int p = precedence(t.kind);
          bool right_assoc = t.kind == Tok::Impl;
          while (!ops_.empty() && precedence(ops_.back().kind) > 0) {
            int q = precedence(ops_.back().kind);
            if (q > p || (q == p && !right_assoc)) reduce();
            else break;
          }
          ops_.push_back(t);
          ++pos_;
          want_operand = true;
          continue;
        }
        case Tok::RParen: {
          while (!ops_.empty() && ops_.back().kind != Tok::LParen) reduce();
          if (ops_.empty()) throw ParseError(t.line, t.col, "unmatched ')'");
          ops_.pop_back();
          ++pos_;
          close_prefixes();
          continue;
        }
        case Tok::End: {
          while (!ops_.empty()) {
            if (ops_.back().kind == Tok::LParen)
              throw ParseError(ops_.back().line, ops_.back().col, "unclosed '('");
            reduce();
          }
          return operands_.back();
        }
        default:
          throw ParseError(t.line, t.col,
                           "expected an operator but found '" + t.text + "'");
      }
    }
  }

 private:
  const Token& expect(Tok k, const char* what) {
    const Token& t = toks_[pos_];
    if (t.kind != k)
      throw ParseError(t.line, t.col,
                       std::string("expected ") + what + " but found '" +
                           (t.kind == Tok::End ? std::string("end of input")
                                               : t.text) +
                           "'");
    ++pos_;
    return t;
  }

  Formula atom(bool negated) {
    const Token& t = toks_[pos_];
    switch (t.kind) {
      case Tok::True:
        ++pos_;
        return negated ? Formula::bot() : Formula::top();
      case Tok::False:
        ++pos_;
        return negated ? Formula::top() : Formula::bot();
      case Tok::Ident:
        ++pos_;
        return negated ? Formula::neg_atom(t.text) : Formula::atom(t.text);
      case Tok::Dep:
        return dep(negated);
      default:
        throw ParseError(t.line, t.col,
                         "negation applies only to atoms, found '" + t.text + "'");
    }
  }

  Formula dep(bool negated) {
    expect(Tok::Dep, "'dep'");
    expect(Tok::LParen, "'('");
    std::vector<std::string> dets;
    if (toks_[pos_].kind == Tok::Semi) {
      ++pos_;
    } else {
      dets.push_back(expect(Tok::Ident, "a proposition").text);
      while (toks_[pos_].kind == Tok::Comma) {
        ++pos_;
        dets.push_back(expect(Tok::Ident, "a proposition").text);
      }
      if (toks_[pos_].kind == Tok::RParen && dets.size() == 1) {
        ++pos_;
        std::string q = dets.front();
        return negated ? Formula::neg_dep({}, q) : Formula::dep({}, q);
      }
      expect(Tok::Semi, "';'");
    }
    std::string q = expect(Tok::Ident, "a proposition").text;
    expect(Tok::RParen, "')'");
    return negated ? Formula::neg_dep(dets, q) : Formula::dep(dets, q);
  }

  void close_prefixes() {
    while (!ops_.empty() &&
           (ops_.back().kind == Tok::Box || ops_.back().kind == Tok::Dia)) {
      Formula f = operands_.back();
      operands_.pop_back();
      operands_.push_back(ops_.back().kind == Tok::Box ? Formula::box(f)
                                                       : Formula::dia(f));
      ops_.pop_back();
    }
  }

  void reduce() {
    Token op = ops_.back();
    ops_.pop_back();
    Formula b = operands_.back();
    operands_.pop_back();
    Formula a = operands_.back();
    operands_.pop_back();
    operands_.push_back(inner(binary_op(op.kind), a, b));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Token> ops_;
  std::vector<Formula> operands_;
};

}  // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

// -------------------------------------------------------------- rendering

namespace {

int node_precedence(const Formula& f) {
  switch (f.op()) {
    case Op::Impl: return 1;
    case Op::Cor: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Box:
    case Op::Dia: return 5;
    default: return 6;
  }
}

std::string render_leaf(const Formula& f) {
  switch (f.op()) {
    case Op::Top: return "true";
    case Op::Bot: return "false";
    case Op::Atom: return f.name();
    case Op::NegAtom: return "!" + f.name();
    default: break;
  }
  std::string s = f.op() == Op::NegDep ? "!dep(" : "dep(";
  for (std::size_t i = 0; i < f.dets().size(); ++i) {
    if (i) s += ',';
    s += f.dets()[i];
  }
  return s + ";" + f.name() + ")";
}

const char* op_text(Op op) {
  switch (op) {
    case Op::And: return " & ";
    case Op::Or: return " | ";
    case Op::Cor: return " \\/ ";
    case Op::Impl: return " -> ";
    case Op::Box: return "[]";
    case Op::Dia: return "<>";
    default: return "";
  }
}

}  // namespace

std::string render(const Formula& f) {
  struct Item {
    const Formula* node;
    int min_prec;
    const char* text;
  };
  std::string out;
  std::vector<Item> stack{{&f, 0, nullptr}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.text) {
      out += it.text;
      continue;
    }
    const Formula& g = *it.node;
    if (g.is_leaf()) {
      out += render_leaf(g);
      continue;
    }
    int p = node_precedence(g);
    bool paren = p < it.min_prec;
    if (paren) {
      out += '(';
      stack.push_back({nullptr, 0, ")"});
    }
    if (g.is_unary()) {
      out += op_text(g.op());
      stack.push_back({&g.left(), 5, nullptr});
      continue;
    }
    bool right_assoc = g.op() == Op::Impl;
    stack.push_back({&g.right(), right_assoc ? p : p + 1, nullptr});
    stack.push_back({nullptr, 0, op_text(g.op())});
    stack.push_back({&g.left(), right_assoc ? p + 1 : p, nullptr});
  }
  return out;
}

// -------------------------------------------------------------- traversal

Formula transform(const Formula& f, const PreFn& pre, const PostFn& post) {
  std::vector<std::pair<const Formula*, bool>> stack{{&f, false}};
  std::vector<Formula> results;
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (!expanded) {
      if (pre) {
        if (auto r = pre(*n)) {
          results.push_back(std::move(*r));
          continue;
        }
      }
      if (n->is_leaf()) {
        results.push_back(post ? post(*n, nullptr, nullptr) : *n);
        continue;
      }
      stack.push_back({n, true});
      if (n->is_binary()) stack.push_back({&n->right(), false});
      stack.push_back({&n->left(), false});
      continue;
    }
    if (n->is_binary()) {
      Formula r = std::move(results.back());
      results.pop_back();
      Formula l = std::move(results.back());
      results.pop_back();
      results.push_back(post ? post(*n, &l, &r)
                             : Formula::with_children(*n, l, r));
    } else {
      Formula l = std::move(results.back());
      results.pop_back();
      results.push_back(post ? post(*n, &l, nullptr)
                             : Formula::with_children(*n, l, Formula()));
    }
  }
  return results.back();
}

void for_each_preorder(const Formula& f,
                       const std::function<void(const Formula&)>& visit) {
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* n = stack.back();
    stack.pop_back();
    visit(*n);
    if (n->is_binary()) stack.push_back(&n->right());
    if (!n->is_leaf()) stack.push_back(&n->left());
  }
}

bool is_plain_ml(const Formula& f) {
  bool ok = true;
  for_each_preorder(f, [&](const Formula& g) {
    switch (g.op()) {
      case Op::Dep:
      case Op::NegDep:
      case Op::Cor:
      case Op::Impl:
        ok = false;
        break;
      default:
        break;
    }
  });
  return ok;
}

Formula dual(const Formula& f) {
  if (!is_plain_ml(f))
    throw FormulaError("dual is defined only for plain modal formulas");
  return transform(f, nullptr,
                   [](const Formula& n, const Formula* l,
                      const Formula* r) -> Formula {
                     switch (n.op()) {
                       case Op::Top: return Formula::bot();
                       case Op::Bot: return Formula::top();
                       case Op::Atom: return Formula::neg_atom(n.name());
                       case Op::NegAtom: return Formula::atom(n.name());
                       case Op::And: return Formula::split_or(*l, *r);
                       case Op::Or: return Formula::conj(*l, *r);
                       case Op::Box: return Formula::dia(*l);
                       case Op::Dia: return Formula::box(*l);
                       default: return n;
                     }
                   });
}

Formula substitute(const Formula& f, const Formula& target,
                   const Formula& replacement) {
  return transform(
      f,
      [&](const Formula& n) -> std::optional<Formula> {
        if (n == target) return replacement;
        return std::nullopt;
      },
      nullptr);
}

// ------------------------------------------------------------- signatures

FragmentSignature signature_of(const Formula& f) {
  FragmentSignature sig;
  for_each_preorder(f, [&](const Formula& g) {
    switch (g.op()) {
      case Op::Top: sig.ops |= kTop; break;
      case Op::Bot: sig.ops |= kBot; break;
      case Op::Atom: break;
      case Op::NegAtom: sig.ops |= kNeg; break;
      case Op::Dep:
      case Op::NegDep: {
        sig.ops |= kDep;
        if (g.op() == Op::NegDep) sig.ops |= kNeg;
        int a = static_cast<int>(g.dets().size());
        sig.arity = std::max(sig.arity.value_or(0), a);
        break;
      }
      case Op::And: sig.ops |= kAnd; break;
      case Op::Or: sig.ops |= kDepOr; break;
      case Op::Cor: sig.ops |= kClassicalOr; break;
      case Op::Impl: sig.ops |= kImpl; break;
      case Op::Box: sig.ops |= kBox; break;
      case Op::Dia: sig.ops |= kDiamond; break;
    }
  });
  return sig;
}

namespace {
const std::pair<OpKind, const char*> kOpNames[] = {
    {kBox, "box"},    {kDiamond, "diamond"}, {kAnd, "and"},
    {kDepOr, "or"},   {kClassicalOr, "cor"}, {kNeg, "neg"},
    {kTop, "top"},    {kBot, "bot"},         {kImpl, "impl"},
    {kDep, "dep"},
};
}  // namespace

std::string op_kind_name(OpKind k) {
  for (const auto& [kind, name] : kOpNames)
    if (kind == k) return name;
  return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& s) {
  static const std::unordered_map<std::string, OpKind> aliases = {
      {"box", kBox},          {"diamond", kDiamond},   {"dia", kDiamond},
      {"and", kAnd},          {"wedge", kAnd},         {"or", kDepOr},
      {"dep-or", kDepOr},     {"vee", kDepOr},         {"cor", kClassicalOr},
      {"classical-or", kClassicalOr},                  {"nor", kClassicalOr},
      {"neg", kNeg},          {"not", kNeg},           {"top", kTop},
      {"bot", kBot},          {"impl", kImpl},         {"dep", kDep},
  };
  auto it = aliases.find(s);
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

std::string describe(const FragmentSignature& sig) {
  std::string s = "{";
  bool first = true;
  for (const auto& [kind, name] : kOpNames) {
    if (!sig.has(kind)) continue;
    if (!first) s += ",";
    s += name;
    first = false;
  }
  s += "}";
  if (sig.arity) s += " arity " + std::to_string(*sig.arity);
  return s;
}

std::vector<std::string> propositions_of(const Formula& f) {
  std::set<std::string> seen;
  for_each_preorder(f, [&](const Formula& g) {
    switch (g.op()) {
      case Op::Atom:
      case Op::NegAtom:
        seen.insert(g.name());
        break;
      case Op::Dep:
      case Op::NegDep:
        seen.insert(g.name());
        seen.insert(g.dets().begin(), g.dets().end());
        break;
      default:
        break;
    }
  });
  return {seen.begin(), seen.end()};
}

int count_positive_deps(const Formula& f) {
  int n = 0;
  for_each_preorder(f, [&](const Formula& g) { n += g.op() == Op::Dep; });
  return n;
}

int count_classical_or(const Formula& f) {
  int n = 0;
  for_each_preorder(f, [&](const Formula& g) { n += g.op() == Op::Cor; });
  return n;
}

// --------------------------------------------------------- transformations

std::pair<Formula, KripkeStructure> eliminate_const_neg(
    const Formula& f, const KripkeStructure& k) {
  for (const auto& p : k.props()) {
    if (p == "t" || p == "f")
      throw FormulaError("proposition '" + p + "' is reserved");
    if (k.prop_index(p + "'"))
      throw FormulaError("primed name '" + p + "'' already in use");
  }
  for (const auto& p : propositions_of(f))
    if (!k.prop_index(p))
      throw FormulaError("unknown proposition '" + p + "'");

  KripkeStructure out;
  for (std::size_t w = 0; w < k.num_worlds(); ++w) out.add_world(k.world_name(w));
  for (std::size_t w = 0; w < k.num_worlds(); ++w)
    for (int v : k.successors(w)) out.add_edge(static_cast<int>(w), v);
  for (const auto& p : k.props()) {
    out.declare_prop(p);
    out.declare_prop(p + "'");
  }
  out.declare_prop("t");
  out.declare_prop("f");
  for (std::size_t w = 0; w < k.num_worlds(); ++w) {
    int wi = static_cast<int>(w);
    for (std::size_t p = 0; p < k.props().size(); ++p) {
      bool on = k.holds(wi, static_cast<int>(p));
      out.set_label(wi, k.props()[p], on);
      out.set_label(wi, k.props()[p] + "'", !on);
    }
    out.set_label(wi, "t");
  }

  Formula g = transform(f, nullptr,
                        [](const Formula& n, const Formula* l,
                           const Formula* r) -> Formula {
                          switch (n.op()) {
                            case Op::Top: return Formula::atom("t");
                            case Op::Bot: return Formula::atom("f");
                            case Op::NegAtom:
                              return Formula::atom(n.name() + "'");
                            default:
                              return n.is_leaf()
                                         ? n
                                         : Formula::with_children(
                                               n, *l, r ? *r : Formula());
                          }
                        });
  return {g, out};
}

Formula expand_dep_via_classical_or(const Formula& a) {
  if (a.op() != Op::Dep)
    throw FormulaError("expected a positive dependence atom");
  const auto& dets = a.dets();
  const std::size_t n = dets.size();
  if (n >= 20) throw FormulaError("dependence atom too wide to expand");
  Formula tail =
      Formula::classical_or(Formula::atom(a.name()), Formula::neg_atom(a.name()));
  std::vector<Formula> disjuncts;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n); ++pattern) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < n; ++i) {
      bool negative = (pattern >> (n - 1 - i)) & 1;
      parts.push_back(negative ? Formula::neg_atom(dets[i])
                               : Formula::atom(dets[i]));
    }
    parts.push_back(tail);
    disjuncts.push_back(conj_all(parts));
  }
  return split_or_all(disjuncts);
}

Formula distribute_classical_or(const Formula& f, std::uint64_t index) {
  if (count_classical_or(f) == 0 && index == 0) return f;
  // Number of classical disjunctions below each node, for skipping.
  std::unordered_map<const Node*, int> below;
  transform(f, nullptr,
            [&](const Formula& n, const Formula* l, const Formula* r) -> Formula {
              int c = n.op() == Op::Cor;
              if (l) c += below[l->id()];
              if (r) c += below[r->id()];
              below[n.id()] = c;
              return n;
            });
  const int total = below[f.id()];
  if (total < 64 && index >= (std::uint64_t{1} << total))
    throw FormulaError("index out of range for " + std::to_string(total) +
                       " classical disjunctions");

  struct Item {
    enum Kind { Visit, Build, Skip } kind;
    const Formula* node;
    int skip;
  };
  std::vector<Item> stack{{Item::Visit, &f, 0}};
  std::vector<Formula> results;
  int counter = 0;
  auto count_of = [&](const Formula& g) { return below.at(g.id()); };
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.kind == Item::Skip) {
      counter += it.skip;
      continue;
    }
    const Formula& n = *it.node;
    if (it.kind == Item::Build) {
      if (n.is_binary()) {
        Formula r = results.back();
        results.pop_back();
        Formula l = results.back();
        results.pop_back();
        results.push_back(Formula::with_children(n, l, r));
      } else {
        Formula l = results.back();
        results.pop_back();
        results.push_back(Formula::with_children(n, l, Formula()));
      }
      continue;
    }
    if (n.is_leaf()) {
      results.push_back(n);
      continue;
    }
    if (n.op() == Op::Cor) {
      int j = counter++;
      bool right = j < 64 && ((index >> j) & 1);
      if (!right) {
        stack.push_back({Item::Skip, nullptr, count_of(n.right())});
        stack.push_back({Item::Visit, &n.left(), 0});
      } else {
        stack.push_back({Item::Visit, &n.right(), 0});
        stack.push_back({Item::Skip, nullptr, count_of(n.left())});
      }
      continue;
    }
    stack.push_back({Item::Build, &n, 0});
    if (n.is_binary()) stack.push_back({Item::Visit, &n.right(), 0});
    stack.push_back({Item::Visit, &n.left(), 0});
  }
  return results.back();
}

Formula midl_rewrites(const Formula& f, MidlRule rule) {
  auto rebuild = [](const Formula& n, const Formula* l, const Formula* r) {
    return n.is_leaf() ? n : Formula::with_children(n, *l, r ? *r : Formula());
  };
  switch (rule) {
    case MidlRule::NegAsImpl:
      return transform(f, nullptr,
                       [&](const Formula& n, const Formula* l,
                           const Formula* r) -> Formula {
                         if (n.op() == Op::NegAtom)
                           return Formula::impl(Formula::atom(n.name()),
                                                Formula::bot());
                         return rebuild(n, l, r);
                       });
    case MidlRule::DepAsImpl:
      return transform(f, nullptr,
                       [&](const Formula& n, const Formula* l,
                           const Formula* r) -> Formula {
                         if (n.op() == Op::Dep && !n.dets().empty()) {
                           std::vector<Formula> ante;
                           for (const auto& d : n.dets())
                             ante.push_back(Formula::dep({}, d));
                           return Formula::impl(conj_all(ante),
                                                Formula::dep({}, n.name()));
                         }
                         return rebuild(n, l, r);
                       });
    case MidlRule::ImplAsDualOr:
      return transform(f, nullptr,
                       [&](const Formula& n, const Formula* l,
                           const Formula* r) -> Formula {
                         if (n.op() == Op::Impl) {
                           if (!is_plain_ml(*l) || !is_plain_ml(*r))
                             throw FormulaError(
                                 "implication arguments must be plain modal "
                                 "formulas");
                           return Formula::split_or(dual(*l), *r);
                         }
                         return rebuild(n, l, r);
                       });
  }
  return f;
}

}  // namespace tdl
