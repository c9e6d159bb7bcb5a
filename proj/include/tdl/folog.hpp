#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"

namespace tdl {

struct FoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Or is the splitting disjunction, Cor the classical one. Exists and Forall
// carry an optional slash set; CountGe/CountLt are the counting quantifiers
// with their bound in `bound`.
enum class FoOp : std::uint8_t {
  Top,
  Bot,
  Eq,
  Neq,
  Rel,
  NegRel,
  Dep,
  NegDep,
  And,
  Or,
  Cor,
  Exists,
  Forall,
  CountGe,
  CountLt,
};

struct FoNode;

// Immutable NNF first-order formula over variables and constants as terms.
class FoFormula {
 public:
  FoFormula();  // Top
  static FoFormula top();
  static FoFormula bot();
  static FoFormula eq(std::string a, std::string b);
  static FoFormula neq(std::string a, std::string b);
  static FoFormula rel(std::string name, std::vector<std::string> args);
  static FoFormula neg_rel(std::string name, std::vector<std::string> args);
  // dep(t1..tn): the last term is determined by the others.
  static FoFormula dep(std::vector<std::string> terms);
  static FoFormula neg_dep(std::vector<std::string> terms);
  static FoFormula conj(FoFormula a, FoFormula b);
  static FoFormula split_or(FoFormula a, FoFormula b);
  static FoFormula classical_or(FoFormula a, FoFormula b);
  static FoFormula exists(std::string var, FoFormula body,
                          std::set<std::string> slash = {});
  static FoFormula forall(std::string var, FoFormula body,
                          std::set<std::string> slash = {});
  static FoFormula count_ge(int bound, std::string var, FoFormula body);
  static FoFormula count_lt(int bound, std::string var, FoFormula body);

  FoOp op() const;
  const std::string& name() const;  // relation symbol
  const std::vector<std::string>& terms() const;
  const std::string& var() const;  // bound variable
  const std::set<std::string>& slash() const;
  int bound() const;
  const FoFormula& left() const;
  const FoFormula& right() const;
  const FoFormula& body() const { return left(); }
  const FoNode* id() const { return node_.get(); }

  bool operator==(const FoFormula& o) const;
  bool operator!=(const FoFormula& o) const { return !(*this == o); }

 private:
  explicit FoFormula(std::shared_ptr<const FoNode> n) : node_(std::move(n)) {}
  friend FoFormula make_fo(FoNode n);
  std::shared_ptr<const FoNode> node_;
};

struct FoNode {
  FoOp op = FoOp::Top;
  std::string name;
  std::vector<std::string> terms;
  std::string var;
  std::set<std::string> slash;
  int bound = 0;
  std::optional<FoFormula> a;
  std::optional<FoFormula> b;
};

FoFormula fo_conj_all(const std::vector<FoFormula>& fs);
FoFormula fo_split_or_all(const std::vector<FoFormula>& fs);

// Negation normal form of the negation. Defined for formulas without
// dependence atoms, slashes and classical disjunction.
FoFormula fo_dual(const FoFormula& f);
// a -> b, read as dual(a) | b.
FoFormula fo_implies(const FoFormula& a, const FoFormula& b);

std::set<std::string> free_vars(const FoFormula& f);
// Variables occurring anywhere, bound or free, including slash sets.
std::set<std::string> all_vars(const FoFormula& f);
std::set<std::string> relation_symbols(const FoFormula& f);
// No dependence atoms, slashes or classical disjunction: team truth is
// pointwise.
bool is_first_order(const FoFormula& f);
bool has_slash(const FoFormula& f);
bool has_dep(const FoFormula& f);

// Text syntax: x = y, x != y, P(x,y), !P(x), dep(x;y), !dep(;x), true,
// false, &, | (splitting), \/ (classical), -> (expanded via the dual),
// quantifiers "E x.", "A x.", "E x/{y}.", "E>=2 x.", "E<2 x." applying to
// the following unary formula.
FoFormula parse_fo(const std::string& text);
std::string render(const FoFormula& f);

struct Relation {
  int arity = 0;
  std::set<std::vector<int>> tuples;
};

struct FoStructure {
  std::vector<std::string> universe;  // element names, index is the value
  std::map<std::string, Relation> relations;
  std::map<std::string, int> constants;

  int size() const { return static_cast<int>(universe.size()); }
  int add_element(const std::string& name);
  int element(const std::string& name) const;
  void declare(const std::string& rel, int arity);
  void add_tuple(const std::string& rel, std::vector<int> tuple);
  bool holds(const std::string& rel, const std::vector<int>& tuple) const;
};

// Elements named 0..n-1.
FoStructure fo_universe(int n);

struct FoTeam {
  std::vector<std::string> vars;
  std::set<std::vector<int>> rows;

  static FoTeam unit();  // {empty assignment}
  // Every assignment of the given variables.
  static FoTeam full(const FoStructure& a, std::vector<std::string> vars);
  bool empty() const { return rows.empty(); }
};

// rows restricted to the given variables.
FoTeam restrict_team(const FoTeam& x, const std::vector<std::string>& vars);

struct FoEvalConfig {
  // Largest number of candidate functions tried for one existential
  // quantifier or splits tried for one disjunction.
  std::uint64_t max_choices = std::uint64_t{1} << 20;
};

// Team semantics. Raises FoError when a free variable is missing from the
// team and ResourceError when a search exceeds the configured bound.
bool fo_eval(const FoStructure& a, const FoTeam& x, const FoFormula& f,
             const FoEvalConfig& cfg = {});
// Truth of a sentence, evaluated on the team holding the empty assignment.
bool fo_models(const FoStructure& a, const FoFormula& sentence,
               const FoEvalConfig& cfg = {});

FoFormula translate_d2_to_if2(const FoFormula& f);
FoFormula translate_if2_to_d3(const FoFormula& f);

struct EsoTranslation {
  // Relation holding the team, over team_vars in this order.
  std::string team_relation;
  std::vector<std::string> team_vars;
  // Existentially quantified relations with their arities.
  std::vector<std::pair<std::string, int>> relations;
  FoFormula matrix;  // first-order sentence with counting quantifiers
};

EsoTranslation translate_d_to_eso(const FoFormula& f);

// True when some interpretation of the listed relations makes the sentence
// true in the expansion of a.
bool expansion_exists(const FoStructure& a,
                      const std::vector<std::pair<std::string, int>>& rels,
                      const FoFormula& sentence,
                      std::uint64_t max_expansions = std::uint64_t{1} << 22);

// Whether (a, rel(x)) has an expansion satisfying the translation. The team
// domain must cover t.team_vars.
bool eso_holds(const FoStructure& a, const FoTeam& x, const EsoTranslation& t);

struct MdlTranslation {
  FoStructure structure;
  FoTeam team;
  FoFormula formula;
};

// Worlds become elements 0..n-1 with R for the accessibility relation and
// P_<p> for each proposition. In the dep encoding y_i = c is read as C(y_i)
// with C = {0}; the other truth value is pinned to element 1 through D = {1},
// since "y_i != c" alone lets a team pick different witnesses for false and
// satisfy the dep atom vacuously. An unlabelled extra element is added when
// there is only one world.
MdlTranslation translate_mdl_to_d2(const Formula& f, const KripkeStructure& k,
                                   const Team& t);

// Elements are named i_j for the point (i,j).
FoStructure gen_grid(int m, int n);

std::vector<std::pair<std::string, FoFormula>> grid_conjuncts();
FoFormula gen_phi_grid();
FoFormula gen_phi_infgrid();
// Names of the conjuncts of the grid formula that fail in a.
std::vector<std::string> failed_grid_conjuncts(const FoStructure& a);

struct Tile {
  std::string top, right, bottom, left;
  bool operator==(const Tile&) const = default;
};

struct TileSet {
  std::vector<Tile> tiles;
  std::optional<std::string> border;
};

// Tile i is represented by the unary relation P<i>.
FoFormula gen_phi_tiling(const TileSet& ts);
FoFormula gen_phi_border(const TileSet& ts, const std::string& c);
std::vector<std::pair<std::string, int>> tile_relations(const TileSet& ts);

// A tile index per element, or nothing if a has no (bordered) tiling.
std::optional<std::vector<int>> tile_bruteforce(
    const FoStructure& a, const TileSet& ts,
    const std::optional<std::string>& border);

// "universe: a b", "rel NAME: (a,b) (b,a)", "const c: a" and an optional
// "team x y: (a,b)" line.
struct LoadedFo {
  FoStructure structure;
  std::optional<FoTeam> team;
};
LoadedFo load_fo(const std::string& text);
std::string store_fo(const FoStructure& a,
                     const std::optional<FoTeam>& team = std::nullopt);

// "tile: top right bottom left" lines and an optional "border: c".
TileSet load_tiles(const std::string& text);
std::string store_tiles(const TileSet& ts);

}  // namespace tdl
