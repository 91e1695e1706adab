#pragma once

#include "dpslab/errors.hpp"
#include "dpslab/pattern_roles.hpp"
#include "dpslab/summary.hpp"

namespace dps::nlg {

class UnrealizablePattern : public Error {
 public:
  explicit UnrealizablePattern(const std::string& message) : Error(message) {}
};

// Deterministic template realizer. The sentence plan is:
//   (1) pattern-role sentence with override and pattern-specific clauses,
//   (2) "It is a public class [that implements X].",
//   (3) method inventory sentence,
//   (4) one caller/callee sentence per method, in declaration order.
// Equal input produces byte-equal output. The grammar is documented in
// docs/nlg-grammar.md.
Summary realize(const roles::EnrichedFacts& enriched);

}  // namespace dps::nlg
