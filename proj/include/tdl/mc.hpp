#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"

namespace tdl {

struct EvalConfig {
  bool memoize = true;
  std::size_t split_cap = 20;    // largest team split by | or ->
  std::size_t diamond_cap = 24;  // largest R(T) searched by <>
};

// Raised when a fast path is asked to handle a formula outside its fragment.
struct SignatureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by eval_few_deps when there are more dep atoms than log2|S|.
struct RefusalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generic evaluator for the full language including ->.
bool eval(const KripkeStructure& k, const Team& t, const Formula& f,
          const EvalConfig& cfg = {});

bool dep_holds(const KripkeStructure& k, const Team& t, const Formula& atom);

// Signature within {box, and, cor, neg, dep, top, bot}.
bool eval_poormans(const KripkeStructure& k, const Team& t, const Formula& f);

// Replaces each positive dep atom by a guessed Boolean function.
bool eval_few_deps(const KripkeStructure& k, const Team& t, const Formula& f,
                   int arity_k);

// Number of function tuples eval_few_deps would enumerate for f, saturating
// at UINT64_MAX.
std::uint64_t few_deps_tuple_count(const Formula& f);

// Signature within {or, neg, dep, top, bot}.
bool eval_vee_bounded(const KripkeStructure& k, const Team& t,
                      const Formula& f, int arity_k);

// Signature within {box, diamond, cor, neg, dep, top, bot}.
bool eval_nor_unary(const KripkeStructure& k, const Team& t, const Formula& f);

struct CheckResult {
  bool value;
  std::string strategy;  // poormans, vee_bounded, nor_unary, few_deps, eval
};

// Largest tuple count the dispatcher hands to eval_few_deps.
constexpr std::uint64_t kFewDepsBudget = std::uint64_t{1} << 20;

CheckResult check(const KripkeStructure& k, const Team& t, const Formula& f,
                  const EvalConfig& cfg = {});

// Pointwise modal evaluation of a dep-free, cor-free, impl-free formula:
// the set of worlds w with k,{w} satisfying f.
Team extension_of(const KripkeStructure& k, const Formula& f);

}  // namespace tdl
