#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartsim/sim.hpp"

namespace cartsim::pse {

/// The three perturbation axes of a partial simulation.
struct PerturbationConfig {
    /// Fidelity: total map from the handle's alphabet onto a coarser one.
    std::map<Token, Token> fidelity;
    /// Fragmentation: simulacrum action labels that survive; others are dropped.
    std::vector<std::string> fragmentation;
    /// Time-to-live: step budget of the partial run.
    std::size_t time_to_live = 1;

    friend bool operator==(const PerturbationConfig&, const PerturbationConfig&) = default;
};

/// A simulator: event space (carrying v), token selector and step budget.
struct SimulatorHandle {
    EventSpace space;
    TokenSelector selector;
    std::size_t step_budget = 0;
    /// Maps tokens of the unperturbed alphabet onto this handle's alphabet;
    /// empty means identity.
    std::map<Token, Token> input_map;
    /// Set by perturb(); recorded in audits.
    std::optional<PerturbationConfig> perturbation;

    std::size_t bound() const noexcept { return space.bound(); }
    const Alphabet& alphabet() const noexcept { return selector.alphabet(); }
};

/// Identity coarsening, every action label kept, the given TTL.
PerturbationConfig identity_perturbation(const SimulatorHandle& handle, std::size_t time_to_live);

/// prompt, separator, condition. Throws ValidationError on tokens outside the
/// alphabet (the separator included).
std::vector<Token> compose_input(const Alphabet& alphabet, std::span<const Token> prompt,
                                 std::span<const Token> condition);

/// Builds the partial simulator P from a complete one.
SimulatorHandle perturb(const SimulatorHandle& handle, const PerturbationConfig& perturbation);

/// Maps an input through the handle's input_map; the separator passes through.
std::vector<Token> map_input(const SimulatorHandle& handle, std::span<const Token> input);

/// Runs P for its step budget with `input` pre-loaded as context.
RunResult run_partial(const SimulatorHandle& partial, std::span<const Token> input, std::uint64_t seed);

enum class Decision : int { reject = 0, approve = 1 };

struct Rule {
    enum class Kind {
        always,          // matches unconditionally
        contains,        // contiguous token pattern occurs
        count_at_least,  // pattern[0] occurs at least `threshold` times
        realized_world,  // (event_id, world) was realized
    };

    std::string name;
    Kind kind = Kind::always;
    std::vector<Token> pattern;
    std::size_t threshold = 1;
    std::string event_id;
    std::string world;
    Decision decision = Decision::reject;

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rules; the first match decides, otherwise `fallback`. The
/// rationale template may use {decision}, {rule} and {evidence}.
struct EvaluatorSpec {
    std::vector<Rule> rules;
    Decision fallback = Decision::approve;
    std::string rationale_template = "{decision} by rule '{rule}': {evidence}";
};

inline constexpr std::string_view kDefaultRuleName = "default";

struct Verdict {
    Decision decision = Decision::reject;
    std::string rule;
    /// One-based inclusive token positions of the evidence, when positional.
    std::optional<std::pair<std::size_t, std::size_t>> span;
    std::string rationale;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

Verdict evaluate(const EvaluatorSpec& spec, std::span<const Token> trajectory,
                 const std::set<RealizedWorld>& realized = {});

struct GateSeeds {
    std::uint64_t partial = 0;
    std::uint64_t complete = 0;

    friend bool operator==(const GateSeeds&, const GateSeeds&) = default;
};

enum class GateStatus { ok, partial_failed, complete_failed };

struct AuditRecord {
    std::vector<Token> prompt;
    std::vector<Token> condition;
    std::vector<Token> input;
    std::vector<Token> partial_input;
    std::optional<PerturbationConfig> perturbation;
    std::size_t partial_bound = 0;
    std::size_t complete_bound = 0;
    GateSeeds seeds;
    std::string rng_algorithm{SimRng::kAlgorithm};
    std::vector<Token> partial_trajectory;
    std::vector<StepRecord> partial_steps;
    Verdict verdict;
    /// Present exactly when the verdict approved.
    std::optional<std::vector<Token>> complete_trajectory;
    std::vector<StepRecord> complete_steps;
    GateStatus status = GateStatus::ok;
    std::string error;
    std::string started_at;
    std::string finished_at;

    friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

using GateOutcome = AuditRecord;

struct GateOptions {
    /// Timestamp source. Defaults to a logical clock ("logical:0", ...), which
    /// keeps audits reproducible.
    std::function<std::string()> clock;
    /// Called with "partial", "evaluate" or "complete" right before each phase.
    std::function<void(std::string_view)> observer;
};

/// compose -> partial run -> evaluate -> complete run on approval. Throws
/// ConfigError when v_P > v_S or the alphabets are incompatible; runtime
/// errors are recorded in the audit (a failed partial phase rejects).
AuditRecord gate(const SimulatorHandle& partial, const EvaluatorSpec& evaluator, const SimulatorHandle& complete,
                 std::span<const Token> prompt, std::span<const Token> condition, GateSeeds seeds,
                 const GateOptions& options = {});

/// Single-line JSON with a fixed field order.
std::string audit_export(const AuditRecord& record);
/// Throws ValidationError on malformed records.
AuditRecord audit_import(std::string_view text);
/// Appends one exported record plus newline in a single write.
void append_audit_log(const std::filesystem::path& path, const AuditRecord& record);

std::string_view to_string(Decision d);
std::string_view to_string(GateStatus s);
std::string_view to_string(Rule::Kind k);
Rule::Kind parse_rule_kind(std::string_view name);

}  // namespace cartsim::pse
