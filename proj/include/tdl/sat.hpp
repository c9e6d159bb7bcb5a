#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"
#include "tdl/mc.hpp"

namespace tdl {

struct Witness {
  KripkeStructure structure;
  int world = 0;
};

// Searches tree-shaped structures of height at most the modal depth, where a
// node at depth L has at most as many children as there are diamonds at
// modal depth L. For MDL this family is complete once max_worlds reaches
// max_tree_size(f).
std::optional<Witness> sat_bounded(const Formula& f, int max_worlds,
                                   const EvalConfig& cfg = {});

// Largest tree sat_bounded can need for f, saturating at INT32_MAX.
std::int64_t max_tree_size(const Formula& f);

// True when sat_bounded(f, max_worlds) returning nothing proves
// unsatisfiability.
bool sat_bounded_is_exhaustive(const Formula& f, int max_worlds);

// Streams the plain modal disjuncts of the dep-free translation, one per
// tuple of Boolean functions for the dep atom occurrences (preorder). The
// visitor returns false to stop.
void translate_phi_T(const Formula& f, int arity_k,
                     const std::function<bool(const Formula&)>& visit);

// Number of disjuncts translate_phi_T produces, saturating at UINT64_MAX.
std::uint64_t phi_T_count(const Formula& f);

// Tableau decision for plain modal logic over all Kripke structures.
bool ladner_sat(const Formula& f);
std::optional<Witness> ladner_sat_model(const Formula& f);

Formula monotone_rewrite(const Formula& f);
Formula one_modality_simplify(const Formula& f);
bool wedge_free_sat(const Formula& f);

enum class Complexity {
  Trivial,
  P,
  NP,
  coNP,
  Sigma2P,
  Sigma3P,
  PSPACE,
  NEXP,
  Unclassified,
};

enum class Problem { Sat, Mc };

struct ComplexityVerdict {
  Complexity cls = Complexity::Unclassified;
  bool complete = false;
  std::string table;     // e.g. "MDL-SAT"
  std::string citation;  // row reference
  std::string text() const;  // e.g. "NEXP-complete (Table MDL-SAT)"
};

std::string complexity_name(Complexity c);

ComplexityVerdict classify(const FragmentSignature& sig, Problem problem);

enum class SatAnswer { Sat, Unsat, Unknown };

struct SatOutcome {
  SatAnswer answer = SatAnswer::Unknown;
  std::optional<Witness> witness;
  std::string method;
};

struct SatConfig {
  int max_worlds = 8;
  std::uint64_t phi_T_budget = std::uint64_t{1} << 16;
  EvalConfig eval;
};

SatOutcome sat(const Formula& f, const SatConfig& cfg = {});

}  // namespace tdl
