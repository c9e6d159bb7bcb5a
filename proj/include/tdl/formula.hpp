#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdl {

class KripkeStructure;

// Connective of a formula node. Or is the splitting (dependence) disjunction,
// Cor the classical disjunction.
enum class Op : std::uint8_t {
  Top,
  Bot,
  Atom,
  NegAtom,
  Dep,
  NegDep,
  And,
  Or,
  Cor,
  Impl,
  Box,
  Dia,
};

struct Node;

// Immutable NNF formula. Copies share structure.
class Formula {
 public:
  Formula();  // Top

  static Formula top();
  static Formula bot();
  static Formula atom(std::string name);
  static Formula neg_atom(std::string name);
  static Formula dep(std::vector<std::string> dets, std::string determined);
  static Formula neg_dep(std::vector<std::string> dets, std::string determined);
  static Formula conj(Formula a, Formula b);
  static Formula split_or(Formula a, Formula b);
  static Formula classical_or(Formula a, Formula b);
  static Formula impl(Formula a, Formula b);
  static Formula box(Formula a);
  static Formula dia(Formula a);
  // Rebuilds a node of the same kind as `shape` with new children.
  static Formula with_children(const Formula& shape, Formula a, Formula b);

  Op op() const;
  const std::string& name() const;  // atom name or determined proposition
  const std::vector<std::string>& dets() const;
  const Formula& left() const;
  const Formula& right() const;
  const Formula& sub() const { return left(); }

  bool is_leaf() const;
  bool is_unary() const;
  bool is_binary() const;

  const Node* id() const { return node_.get(); }
  std::size_t size() const;
  int modal_depth() const;

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  friend struct Node;
  friend void release_node(Node*);
  friend Formula make_node(Node* n);
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Top;
  std::string name;
  std::vector<std::string> dets;
  mutable Formula a{nullptr};
  mutable Formula b{nullptr};
};

// n-ary helpers, folded to the left. Empty conjunction is Top, empty
// disjunctions are Bot.
Formula conj_all(const std::vector<Formula>& fs);
Formula split_or_all(const std::vector<Formula>& fs);
Formula classical_or_all(const std::vector<Formula>& fs);
Formula box_n(int n, Formula f);
Formula dia_n(int n, Formula f);

struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& msg);
  int line;
  int column;
};

struct FormulaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Formula parse(const std::string& text);
std::string render(const Formula& f);

// Post-order rebuild with an explicit stack. `pre` may replace a node
// without descending into it; `post` receives the node and its rebuilt
// children (null for absent children) and returns the replacement.
using PreFn = std::function<std::optional<Formula>(const Formula&)>;
using PostFn =
    std::function<Formula(const Formula&, const Formula*, const Formula*)>;
Formula transform(const Formula& f, const PreFn& pre, const PostFn& post);

// Visits every node in pre-order, left before right.
void for_each_preorder(const Formula& f,
                       const std::function<void(const Formula&)>& visit);

bool is_plain_ml(const Formula& f);
Formula dual(const Formula& f);
Formula substitute(const Formula& f, const Formula& target,
                   const Formula& replacement);

enum OpKind : std::uint16_t {
  kBox = 1u << 0,
  kDiamond = 1u << 1,
  kAnd = 1u << 2,
  kDepOr = 1u << 3,
  kClassicalOr = 1u << 4,
  kNeg = 1u << 5,
  kTop = 1u << 6,
  kBot = 1u << 7,
  kImpl = 1u << 8,
  kDep = 1u << 9,
};
constexpr std::uint16_t kAllOps = (1u << 10) - 1;

struct FragmentSignature {
  std::uint16_t ops = 0;
  std::optional<int> arity;  // absent means unbounded (or no dep atom)

  bool has(OpKind k) const { return (ops & k) != 0; }
  bool subset_of(std::uint16_t allowed) const { return (ops & ~allowed) == 0; }
  bool operator==(const FragmentSignature&) const = default;
};

FragmentSignature signature_of(const Formula& f);
std::string op_kind_name(OpKind k);
std::optional<OpKind> op_kind_from_name(const std::string& s);
std::string describe(const FragmentSignature& sig);

std::vector<std::string> propositions_of(const Formula& f);
int count_positive_deps(const Formula& f);
int count_classical_or(const Formula& f);

std::pair<Formula, KripkeStructure> eliminate_const_neg(
    const Formula& f, const KripkeStructure& k);

Formula expand_dep_via_classical_or(const Formula& dep_atom);
Formula distribute_classical_or(const Formula& f, std::uint64_t index);

enum class MidlRule { NegAsImpl, DepAsImpl, ImplAsDualOr };
Formula midl_rewrites(const Formula& f, MidlRule rule);

}  // namespace tdl
