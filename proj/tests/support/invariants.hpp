#pragma once
// Invariant checks over flows outputs, shared by unit and acceptance tests.

#include <string>
#include <vector>

#include "normstance/corpus.hpp"
#include "normstance/flows.hpp"

namespace normstance::testkit {

// Conditions checked: everything, each source and each assistant type, each
// crossed with each toxicity level.
std::vector<flows::Condition> all_conditions();

// Empty when every flow layer sums to 1 (1e-9), edges out of a node sum to its
// share (1e-9), every nonempty distribution row sums to 100 (1e-6) and every
// difference-matrix column sums to 0 (1e-9).
std::vector<std::string> flow_invariant_violations(const corpus::Corpus& corpus);

}  // namespace normstance::testkit
