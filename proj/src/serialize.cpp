#include "cartsim/serialize.hpp"

namespace cartsim {

Json to_json(const RealizedWorld& w) { return Json{{"event", w.event_id}, {"world", w.world}}; }

Json to_json(const StepRecord& r) {
    Json j;
    j["t"] = r.t;
    j["event"] = r.event_id;
    j["token"] = r.token;
    j["realized"] = to_json(r.realized);
    j["rng_digest"] = r.rng_digest;
    return j;
}

Json to_json(const SimulationState& s) {
    Json j;
    j["t"] = s.t;
    j["prefix"] = s.prefix;
    j["trajectory"] = s.trajectory;
    Json realized = Json::array();
    for (const auto& w : s.realized) realized.push_back(to_json(w));
    j["realized_worlds"] = std::move(realized);
    return j;
}

Json to_json(const RunResult& r) {
    Json j;
    j["seed"] = r.seed;
    j["rng_algorithm"] = r.rng_algorithm;
    Json steps = Json::array();
    for (const auto& rec : r.records) steps.push_back(to_json(rec));
    j["steps"] = std::move(steps);
    j["final"] = to_json(r.final_state());
    return j;
}

Json to_json(const duel::DuelReport& r) {
    Json j;
    Json table = Json::array();
    for (const auto& s : r.trajectory) table.push_back(Json{{"step", s.step}, {"n", s.n}, {"J1", s.cost1}, {"J2", s.cost2}});
    j["table"] = std::move(table);
    j["final_n"] = r.final_n;
    j["converged"] = r.converged;
    j["steps"] = r.steps.size();
    j["final_J1"] = r.final_cost1;
    j["final_J2"] = r.final_cost2;
    j["agent1_gains_from_solo"] = r.agent1_gains_from_solo;
    j["agent2_gains_from_solo"] = r.agent2_gains_from_solo;
    return j;
}

namespace {

RealizedWorld realized_from_json(const Json& j) {
    return RealizedWorld{j.at("event").get<std::string>(), j.at("world").get<std::string>()};
}

StepRecord step_from_json(const Json& j) {
    return StepRecord{j.at("t").get<std::size_t>(), j.at("event").get<std::string>(),
                      j.at("token").get<std::string>(), realized_from_json(j.at("realized")),
                      j.at("rng_digest").get<std::uint64_t>()};
}

Json steps_to_json(const std::vector<StepRecord>& steps) {
    Json out = Json::array();
    for (const auto& s : steps) out.push_back(to_json(s));
    return out;
}

std::vector<StepRecord> steps_from_json(const Json& j) {
    std::vector<StepRecord> out;
    for (const auto& s : j) out.push_back(step_from_json(s));
    return out;
}

}  // namespace

namespace pse {

Json to_json(const PerturbationConfig& p) {
    Json fidelity = Json::object();
    for (const auto& [from, to] : p.fidelity) fidelity[from] = to;
    return Json{{"fidelity", std::move(fidelity)}, {"fragmentation", p.fragmentation}, {"time_to_live", p.time_to_live}};
}

Json to_json(const Verdict& v) {
    Json j;
    j["decision"] = static_cast<int>(v.decision);
    j["rule"] = v.rule;
    j["span"] = v.span ? Json::array({v.span->first, v.span->second}) : Json(nullptr);
    j["rationale"] = v.rationale;
    return j;
}

Json to_json(const AuditRecord& r) {
    Json j;
    j["status"] = to_string(r.status);
    j["error"] = r.error;
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
    j["prompt"] = r.prompt;
    j["condition"] = r.condition;
    j["input"] = r.input;
    j["partial_input"] = r.partial_input;
    j["perturbation"] = r.perturbation ? to_json(*r.perturbation) : Json(nullptr);
    j["v_partial"] = r.partial_bound;
    j["v_complete"] = r.complete_bound;
    j["seeds"] = Json{{"partial", r.seeds.partial}, {"complete", r.seeds.complete}};
    j["rng_algorithm"] = r.rng_algorithm;
    j["partial_trajectory"] = r.partial_trajectory;
    j["partial_steps"] = steps_to_json(r.partial_steps);
    j["verdict"] = to_json(r.verdict);
    j["complete_trajectory"] = r.complete_trajectory ? Json(*r.complete_trajectory) : Json(nullptr);
    j["complete_steps"] = steps_to_json(r.complete_steps);
    return j;
}

AuditRecord audit_from_json(const Json& j) {
    AuditRecord r;
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") {
        r.status = GateStatus::ok;
    } else if (status == "partial_failed") {
        r.status = GateStatus::partial_failed;
    } else if (status == "complete_failed") {
        r.status = GateStatus::complete_failed;
    } else {
        throw nlohmann::json::other_error::create(501, "unknown status '" + status + "'", &j);
    }
    r.error = j.at("error").get<std::string>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    r.prompt = j.at("prompt").get<std::vector<Token>>();
    r.condition = j.at("condition").get<std::vector<Token>>();
    r.input = j.at("input").get<std::vector<Token>>();
    r.partial_input = j.at("partial_input").get<std::vector<Token>>();
    if (const auto& p = j.at("perturbation"); !p.is_null()) {
        PerturbationConfig cfg;
        for (const auto& [from, to] : p.at("fidelity").items()) cfg.fidelity.emplace(from, to.get<std::string>());
        cfg.fragmentation = p.at("fragmentation").get<std::vector<std::string>>();
        cfg.time_to_live = p.at("time_to_live").get<std::size_t>();
        r.perturbation = std::move(cfg);
    }
    r.partial_bound = j.at("v_partial").get<std::size_t>();
    r.complete_bound = j.at("v_complete").get<std::size_t>();
    r.seeds = GateSeeds{j.at("seeds").at("partial").get<std::uint64_t>(),
                        j.at("seeds").at("complete").get<std::uint64_t>()};
    r.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    r.partial_trajectory = j.at("partial_trajectory").get<std::vector<Token>>();
    r.partial_steps = steps_from_json(j.at("partial_steps"));
    const auto& v = j.at("verdict");
    const int decision = v.at("decision").get<int>();
    if (decision != 0 && decision != 1) {
        throw nlohmann::json::other_error::create(501, "verdict decision must be 0 or 1", &v);
    }
    r.verdict.decision = static_cast<Decision>(decision);
    r.verdict.rule = v.at("rule").get<std::string>();
    if (const auto& span = v.at("span"); !span.is_null()) {
        r.verdict.span = std::make_pair(span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>());
    }
    r.verdict.rationale = v.at("rationale").get<std::string>();
    if (const auto& c = j.at("complete_trajectory"); !c.is_null()) r.complete_trajectory = c.get<std::vector<Token>>();
    r.complete_steps = steps_from_json(j.at("complete_steps"));
    return r;
}

}  // namespace pse

}  // namespace cartsim
