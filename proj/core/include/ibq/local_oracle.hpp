#pragma once

#include "ibq/oracle.hpp"
#include "ibq/syntax.hpp"
#include "ibq/tableau.hpp"

namespace ibq {

// Oracle answering from a hidden TBox with the hypertableau engine.
// The handle advertises `gamma` and the hidden TBox's logic profile.
OracleHandle local_oracle(const KnowledgeBase& hidden, const Signature& gamma, OracleType type,
                          TableauOptions opt = {});

}  // namespace ibq
