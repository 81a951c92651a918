#include "cartsim/pse.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "cartsim/error.hpp"
#include "cartsim/serialize.hpp"

namespace cartsim::pse {

PerturbationConfig identity_perturbation(const SimulatorHandle& handle, std::size_t time_to_live) {
    PerturbationConfig p;
    for (const auto& t : handle.alphabet().tokens()) p.fidelity.emplace(t, t);
    std::unordered_set<std::string> seen;
    for (const auto& e : handle.space.events()) {
        for (const auto& s : e.simulacra) {
            for (const auto& a : s.actions) {
                if (seen.insert(a).second) p.fragmentation.push_back(a);
            }
        }
    }
    // No simulacrum carries actions: any label leaves them untouched.
    if (p.fragmentation.empty()) p.fragmentation.push_back("*");
    p.time_to_live = time_to_live;
    return p;
}

std::vector<Token> compose_input(const Alphabet& alphabet, std::span<const Token> prompt,
                                 std::span<const Token> condition) {
    std::vector<Token> out;
    out.reserve(prompt.size() + condition.size() + 1);
    auto append = [&](std::span<const Token> part, std::string_view what) {
        for (const auto& t : part) {
            if (t == kSeparatorToken) {
                throw ValidationError(std::string(what) + " contains the reserved separator token");
            }
            if (!alphabet.contains(t)) {
                throw ValidationError(std::string(what) + " token '" + t + "' is not in the alphabet");
            }
            out.push_back(t);
        }
    };
    append(prompt, "prompt");
    out.emplace_back(kSeparatorToken);
    append(condition, "condition");
    return out;
}

SimulatorHandle perturb(const SimulatorHandle& handle, const PerturbationConfig& perturbation) {
    if (perturbation.time_to_live < 1) throw ValidationError("time_to_live must be at least 1");
    if (perturbation.fragmentation.empty()) throw ValidationError("fragmentation mask must not be empty");

    const Alphabet& fine = handle.alphabet();
    for (const auto& [from, to] : perturbation.fidelity) {
        if (!fine.contains(from)) {
            throw ValidationError("fidelity map has token '" + from + "' outside the alphabet");
        }
        if (to.empty() || to == kSeparatorToken) {
            throw ValidationError("fidelity map sends '" + from + "' to an invalid token");
        }
    }
    std::vector<std::size_t> coarse_of(fine.size());
    std::vector<Token> coarse_tokens;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        auto it = perturbation.fidelity.find(fine[i]);
        if (it == perturbation.fidelity.end()) {
            throw ValidationError("fidelity map is not total: no image for token '" + fine[i] + "'");
        }
        auto pos = std::find(coarse_tokens.begin(), coarse_tokens.end(), it->second);
        coarse_of[i] = static_cast<std::size_t>(pos - coarse_tokens.begin());
        if (pos == coarse_tokens.end()) coarse_tokens.push_back(it->second);
    }
    auto coarsen_token = [&](const Token& t) -> Token {
        return t == kSeparatorToken ? t : perturbation.fidelity.at(t);
    };
    auto push_forward = [&](const std::vector<double>& dist) {
        std::vector<double> out(coarse_tokens.size(), 0.0);
        for (std::size_t i = 0; i < dist.size(); ++i) out[coarse_of[i]] += dist[i];
        return out;
    };

    std::vector<TokenSelector::Entry> entries;
    std::set<std::vector<Token>> contexts;
    for (const auto& entry : handle.selector.entries()) {
        TokenSelector::Entry mapped;
        for (const auto& t : entry.context) mapped.context.push_back(coarsen_token(t));
        // Contexts that collide after coarsening keep the first entry.
        if (!contexts.insert(mapped.context).second) continue;
        mapped.distribution = push_forward(entry.distribution);
        entries.push_back(std::move(mapped));
    }
    std::optional<std::vector<double>> fallback;
    if (handle.selector.fallback()) fallback = push_forward(*handle.selector.fallback());

    const std::set<std::string> keep(perturbation.fragmentation.begin(), perturbation.fragmentation.end());
    std::vector<SimEvent> events = handle.space.events();
    for (auto& e : events) {
        for (auto& s : e.simulacra) {
            std::erase_if(s.actions, [&](const std::string& a) { return !keep.contains(a); });
        }
    }

    std::map<Token, Token> input_map;
    if (handle.input_map.empty()) {
        input_map = perturbation.fidelity;
    } else {
        for (const auto& [from, mid] : handle.input_map) input_map.emplace(from, perturbation.fidelity.at(mid));
    }

    return SimulatorHandle{
        EventSpace(std::move(events), handle.space.bound(), handle.space.scorer()),
        TokenSelector(Alphabet(std::move(coarse_tokens)), std::move(entries), std::move(fallback)),
        perturbation.time_to_live,
        std::move(input_map),
        perturbation,
    };
}

std::vector<Token> map_input(const SimulatorHandle& handle, std::span<const Token> input) {
    std::vector<Token> out;
    out.reserve(input.size());
    for (const auto& t : input) {
        if (t == kSeparatorToken || handle.input_map.empty()) {
            out.push_back(t);
            continue;
        }
        auto it = handle.input_map.find(t);
        if (it == handle.input_map.end()) throw ValidationError("input token '" + t + "' has no coarse image");
        out.push_back(it->second);
    }
    return out;
}

RunResult run_partial(const SimulatorHandle& partial, std::span<const Token> input, std::uint64_t seed) {
    for (const auto& t : input) {
        if (t != kSeparatorToken && !partial.alphabet().contains(t)) {
            throw ValidationError("input token '" + t + "' is not in the partial simulator's alphabet");
        }
    }
    if (partial.step_budget < 1) throw ValidationError("partial simulator needs a step budget of at least 1");
    return run(partial.space, partial.selector, partial.step_budget, seed,
               std::vector<Token>(input.begin(), input.end()));
}

std::string_view to_string(Decision d) { return d == Decision::approve ? "approve" : "reject"; }

std::string_view to_string(GateStatus s) {
    switch (s) {
        case GateStatus::ok: return "ok";
        case GateStatus::partial_failed: return "partial_failed";
        case GateStatus::complete_failed: return "complete_failed";
    }
    return "?";
}

std::string_view to_string(Rule::Kind k) {
    switch (k) {
        case Rule::Kind::always: return "always";
        case Rule::Kind::contains: return "contains";
        case Rule::Kind::count_at_least: return "count_at_least";
        case Rule::Kind::realized_world: return "realized_world";
    }
    return "?";
}

Rule::Kind parse_rule_kind(std::string_view name) {
    for (auto k : {Rule::Kind::always, Rule::Kind::contains, Rule::Kind::count_at_least,
                   Rule::Kind::realized_world}) {
        if (to_string(k) == name) return k;
    }
    throw LookupError("unknown rule kind '" + std::string(name) + "'");
}

namespace {

std::string join(std::span<const Token> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string render(const std::string& tmpl, std::string_view decision, const std::string& rule,
                   const std::string& evidence) {
    std::string out = tmpl;
    auto replace_all = [&](std::string_view key, std::string_view value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
            out.replace(pos, key.size(), value);
        }
    };
    replace_all("{decision}", decision);
    replace_all("{rule}", rule);
    replace_all("{evidence}", evidence);
    if (out.empty()) out = std::string(decision) + ": " + evidence;
    return out;
}

struct Match {
    std::optional<std::pair<std::size_t, std::size_t>> span;
    std::string evidence;
};

std::optional<Match> match_rule(const Rule& rule, std::span<const Token> tokens,
                                const std::set<RealizedWorld>& realized) {
    switch (rule.kind) {
        case Rule::Kind::always:
            return Match{std::nullopt, "unconditional"};
        case Rule::Kind::contains: {
            if (rule.pattern.empty()) return std::nullopt;
            auto it = std::search(tokens.begin(), tokens.end(), rule.pattern.begin(), rule.pattern.end());
            if (it == tokens.end()) return std::nullopt;
            const auto first = static_cast<std::size_t>(it - tokens.begin()) + 1;
            const auto last = first + rule.pattern.size() - 1;
            std::string where = first == last ? "position " + std::to_string(first)
                                              : "positions " + std::to_string(first) + "-" + std::to_string(last);
            return Match{std::make_pair(first, last), "'" + join(rule.pattern) + "' at " + where};
        }
        case Rule::Kind::count_at_least: {
            if (rule.pattern.empty()) return std::nullopt;
            std::size_t count = 0;
            std::size_t first = 0;
            std::size_t last = 0;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (tokens[i] != rule.pattern.front()) continue;
                ++count;
                if (!first) first = i + 1;
                last = i + 1;
                if (count >= rule.threshold) break;
            }
            if (count < rule.threshold || count == 0) return std::nullopt;
            return Match{std::make_pair(first, last), "'" + rule.pattern.front() + "' occurs " +
                                                          std::to_string(count) + " times by position " +
                                                          std::to_string(last)};
        }
        case Rule::Kind::realized_world:
            if (!realized.contains(RealizedWorld{rule.event_id, rule.world})) return std::nullopt;
            return Match{std::nullopt, "world '" + rule.world + "' of event '" + rule.event_id + "' realized"};
    }
    return std::nullopt;
}

}  // namespace

Verdict evaluate(const EvaluatorSpec& spec, std::span<const Token> trajectory,
                 const std::set<RealizedWorld>& realized) {
    for (std::size_t k = 0; k < spec.rules.size(); ++k) {
        const Rule& rule = spec.rules[k];
        if (auto m = match_rule(rule, trajectory, realized)) {
            const std::string name = rule.name.empty() ? "rule " + std::to_string(k + 1) : rule.name;
            return Verdict{rule.decision, name, m->span,
                           render(spec.rationale_template, to_string(rule.decision), name, m->evidence)};
        }
    }
    const std::string name{kDefaultRuleName};
    return Verdict{spec.fallback, name, std::nullopt,
                   render(spec.rationale_template, to_string(spec.fallback), name,
                          "no rule matched " + std::to_string(trajectory.size()) + " tokens")};
}

AuditRecord gate(const SimulatorHandle& partial, const EvaluatorSpec& evaluator, const SimulatorHandle& complete,
                 std::span<const Token> prompt, std::span<const Token> condition, GateSeeds seeds,
                 const GateOptions& options) {
    if (partial.bound() > complete.bound()) {
        throw ConfigError("partial simulator bound " + std::to_string(partial.bound()) +
                          " exceeds complete simulator bound " + std::to_string(complete.bound()));
    }
    for (const auto& t : complete.alphabet().tokens()) {
        const Token mapped = partial.input_map.empty() ? t
                             : partial.input_map.contains(t) ? partial.input_map.at(t)
                                                             : Token{};
        if (mapped.empty() || !partial.alphabet().contains(mapped)) {
            throw ConfigError("complete-simulator token '" + t + "' has no image in the partial alphabet");
        }
    }

    std::size_t tick = 0;
    auto now = [&]() { return options.clock ? options.clock() : "logical:" + std::to_string(tick++); };
    auto notify = [&](std::string_view phase) {
        if (options.observer) options.observer(phase);
    };

    AuditRecord record;
    record.started_at = now();
    record.prompt.assign(prompt.begin(), prompt.end());
    record.condition.assign(condition.begin(), condition.end());
    record.input = compose_input(complete.alphabet(), prompt, condition);
    record.perturbation = partial.perturbation;
    record.partial_bound = partial.bound();
    record.complete_bound = complete.bound();
    record.seeds = seeds;

    // Fail closed: any error before a verdict rejects.
    try {
        record.partial_input = map_input(partial, record.input);
        notify("partial");
        const RunResult run = run_partial(partial, record.partial_input, seeds.partial);
        record.partial_trajectory = run.final_state().trajectory;
        record.partial_steps = run.records;
        notify("evaluate");
        record.verdict = evaluate(evaluator, record.partial_trajectory, run.final_state().realized);
    } catch (const Error& e) {
        record.status = GateStatus::partial_failed;
        record.error = e.what();
        record.verdict = Verdict{Decision::reject, "partial-failure", std::nullopt,
                                 std::string("reject: partial run failed: ") + e.what()};
    }

    if (record.verdict.decision == Decision::approve) {
        record.complete_trajectory.emplace();
        try {
            notify("complete");
            const RunResult run = cartsim::run(complete.space, complete.selector, complete.step_budget,
                                               seeds.complete, record.input);
            *record.complete_trajectory = run.final_state().trajectory;
            record.complete_steps = run.records;
        } catch (const Error& e) {
            record.status = GateStatus::complete_failed;
            record.error = e.what();
        }
    }
    record.finished_at = now();
    return record;
}

std::string audit_export(const AuditRecord& record) { return to_json(record).dump(); }

AuditRecord audit_import(std::string_view text) {
    try {
        return audit_from_json(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed audit record: ") + e.what());
    }
}

void append_audit_log(const std::filesystem::path& path, const AuditRecord& record) {
    const std::string line = audit_export(record) + "\n";
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot open audit log '" + path.string() + "'");
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw Error("failed writing audit log '" + path.string() + "'");
}

}  // namespace cartsim::pse
