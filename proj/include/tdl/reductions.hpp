#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"

namespace tdl {

struct ReductionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Literals are nonzero integers: j stands for x_j, -j for its negation.
using Clause = std::vector<int>;

struct CnfInstance {
  int num_vars = 0;
  std::vector<Clause> clauses;
};

enum class Quant { Forall, Exists };

struct QuantBlock {
  Quant quant;
  std::vector<int> vars;
};

// Variables missing from the prefix are existential and outermost. When
// matrix is set it replaces the clauses; its atoms are named p<j>.
struct QbfInstance {
  int num_vars = 0;
  std::vector<QuantBlock> prefix;
  std::vector<Clause> clauses;
  std::optional<Formula> matrix;
};

// Universals are x_1..x_k, existentials x_{k+1}..x_n; deps[i] lists the
// universals existential x_{k+1+i} may depend on.
struct DqbfInstance {
  int num_universals = 0;
  int num_vars = 0;
  std::vector<std::vector<int>> deps;
  std::vector<Clause> clauses;
};

// 1-in-3 QCSP: universals x_1..x_k, existentials x_{k+1}..x_n, clauses of
// three positive variables of which exactly one must be true.
struct QcspInstance {
  int num_universals = 0;
  int num_vars = 0;
  std::vector<Clause> clauses;
};

struct McInstance {
  KripkeStructure structure;
  Team team;
  Formula formula = Formula::top();
};

// Input hygiene shared by the generators: literals in range, at most three
// per clause. normalize_cnf also drops repeated literals and tautologies,
// which every generator does before building its gadget.
void validate_cnf(const CnfInstance& c);
CnfInstance normalize_cnf(const CnfInstance& c);

McInstance gen_mc_wedge_vee(const CnfInstance& c);
McInstance gen_mc_diamond(const CnfInstance& c);
McInstance gen_mc_box_vee(const CnfInstance& c);
McInstance gen_mc_diamond_wedge(const CnfInstance& c);
McInstance gen_mc_diamond_vee(const CnfInstance& c);
McInstance gen_mc_vee_nor(const CnfInstance& c);
McInstance gen_mc_pidl_taut(const Formula& f);
McInstance gen_mc_midl_qbf_sor(const QbfInstance& q);
McInstance gen_mc_midl_qbf_diamond(const QbfInstance& q);

Formula gen_sat_dqbf(const DqbfInstance& d);
Formula gen_sat_qbf3(const QbfInstance& q);
Formula gen_sat_qcsp(const QcspInstance& q);

// The complete binary tree of depth n whose leaves carry every assignment
// to p1..pn, with f<i> on the leaves falsifying clause i. Clauses are tidied
// the same way the SAT generators tidy them. The root is world 0.
KripkeStructure clause_tree(int num_vars, const std::vector<Clause>& clauses);
// The same tree for gen_sat_qbf3, whose variables follow the prefix order.
KripkeStructure qbf3_tree(const QbfInstance& q);

// Rewrites a QBF so that the prefix strictly alternates forall/exists over
// an even number of variables x_1..x_n, inserting unused variables where
// needed. A matrix formula is renamed accordingly.
QbfInstance alternate_prefix(const QbfInstance& q);

// Propositional evaluation under the given atom valuation. Both
// disjunctions are read classically.
bool eval_prop(const Formula& f,
               const std::function<bool(const std::string&)>& value);

Formula cnf_formula(const std::vector<Clause>& clauses);
Formula qbf_matrix(const QbfInstance& q);

bool oracle_sat3(const CnfInstance& c);
bool oracle_qbf(const QbfInstance& q);
bool oracle_dqbf(const DqbfInstance& d);
bool oracle_taut(const Formula& f);
bool oracle_qcsp(const QcspInstance& q);

CnfInstance parse_dimacs(const std::string& text);
QbfInstance parse_qdimacs(const std::string& text);
DqbfInstance parse_dqdimacs(const std::string& text);
// A QDIMACS file with a forall-exists prefix and positive 3-variable clauses.
QcspInstance parse_qcsp(const std::string& text);

std::string write_dimacs(const CnfInstance& c);
std::string write_qdimacs(const QbfInstance& q);

}  // namespace tdl
