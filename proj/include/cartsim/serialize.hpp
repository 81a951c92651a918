#pragma once

#include <json.hpp>

#include "cartsim/duel.hpp"
#include "cartsim/pse.hpp"
#include "cartsim/sim.hpp"

namespace cartsim {

using Json = nlohmann::ordered_json;

Json to_json(const RealizedWorld& w);
Json to_json(const StepRecord& r);
Json to_json(const SimulationState& s);
/// Per-step records plus the final state; the history is implied by the records.
Json to_json(const RunResult& r);
Json to_json(const duel::DuelReport& r);

namespace pse {
Json to_json(const PerturbationConfig& p);
Json to_json(const Verdict& v);
Json to_json(const AuditRecord& r);
AuditRecord audit_from_json(const Json& j);
}  // namespace pse

}  // namespace cartsim
