#pragma once

#include <string>
#include <vector>

#include "halluc/learners.hpp"

namespace halluc {

/// Builds a learner family from a spec string:
///   memorizer[:default=STR]
///   const:answer=STR
///   echo
///   ngram[:order=K,max_out=N]
///   lister[:max_chars=N]
///   orderfacts
///   enum[:class=MEMBER+MEMBER+...]   (member grammar in enum_learning.hpp)
/// Parameters are comma-separated key=value pairs; the produced family's
/// spec() round-trips through this parser.
FamilyPtr parse_learner_spec(const std::string& spec,
                             const TokenAlphabet& alphabet);

/// The standard zoo in canonical order.
std::vector<FamilyPtr> default_zoo(const TokenAlphabet& alphabet);

}  // namespace halluc
