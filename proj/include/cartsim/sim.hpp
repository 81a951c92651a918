#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartsim/labels.hpp"
#include "cartsim/object.hpp"

namespace cartsim {

using Token = std::string;

/// Reserved token joining a prompt and its condition. It may appear in
/// selector contexts but never in an alphabet.
inline constexpr std::string_view kSeparatorToken = "\xE2\x9F\x82";  // U+27C2

/// Ordered, non-empty set of tokens.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<Token> tokens);

    std::size_t size() const noexcept { return tokens_.size(); }
    const Token& operator[](std::size_t i) const { return tokens_[i]; }
    bool contains(std::string_view t) const { return tokens_.contains(t); }
    std::size_t index_of(std::string_view t) const { return tokens_.index_of(t); }
    const std::vector<Token>& tokens() const noexcept { return tokens_.labels(); }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    LabelIndex tokens_;
};

/// A simulacrum: an identifier, the action labels it carries and a free-form
/// description. Only the body (actions + description) is scored.
struct Simulacrum {
    std::string id;
    std::vector<std::string> actions;
    std::string description;

    friend bool operator==(const Simulacrum&, const Simulacrum&) = default;
};

/// Canonical body encoding, netstring style:
///   "sim:" { "a" <len> ":" <label> "," } "d" <len> ":" <description> ","
std::string canonical_form(const Simulacrum& s);
/// Inverse of canonical_form; throws ValidationError on malformed input.
Simulacrum parse_canonical(std::string_view bytes, std::string id = {});
/// Length of the canonical form of an empty body.
inline constexpr std::size_t kCanonicalHeaderLength = 8;

/// Deterministic complexity proxy over canonical bytes.
using ComplexityScorer = std::function<std::size_t(std::string_view canonical)>;
std::size_t byte_length_scorer(std::string_view canonical);

struct SimEvent {
    std::string id;
    CartesianObject object;
    std::vector<Simulacrum> simulacra;
    double weight = 1.0;
    /// Drives which world the event realizes when selected; uniform when absent.
    std::optional<BehaviorProfile> profile;
};

/// Events together with the simulator's complexity bound v.
class EventSpace {
public:
    /// Throws ValidationError on duplicate ids, negative weights, events
    /// without simulacra, or a profile that does not cover every agent.
    EventSpace(std::vector<SimEvent> events, std::size_t bound, ComplexityScorer scorer = byte_length_scorer);

    const std::vector<SimEvent>& events() const noexcept { return events_; }
    std::size_t bound() const noexcept { return bound_; }
    const ComplexityScorer& scorer() const noexcept { return scorer_; }
    const SimEvent& event(std::string_view id) const;

    std::size_t complexity(const Simulacrum& s) const;
    /// Max over the event's simulacra.
    std::size_t complexity(const SimEvent& e) const;

    /// Distinct simulacrum ids across all events, first-appearance order.
    std::vector<std::string> sample_space() const;
    /// The largest complexity over the sample space.
    std::size_t max_complexity() const;

    EventSpace with_bound(std::size_t bound) const;

private:
    std::vector<SimEvent> events_;
    std::size_t bound_;
    ComplexityScorer scorer_;
};

std::size_t complexity(const Simulacrum& s, const ComplexityScorer& scorer = byte_length_scorer);
std::size_t complexity(const SimEvent& e, const ComplexityScorer& scorer = byte_length_scorer);

/// Events with complexity <= v, original order.
std::vector<const SimEvent*> admissible_events(const EventSpace& space, std::size_t v);

/// Seeded generator. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; uniforms are built from the top 53 bits so results
/// do not depend on the library's distribution implementations.
class SimRng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64/u53";

    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform();
    /// Index drawn proportionally to non-negative weights with positive total.
    std::size_t weighted_index(std::span<const double> weights);
    /// FNV-1a digest of the engine's serialized state.
    std::uint64_t state_digest() const;

private:
    std::mt19937_64 engine_;
};

const SimEvent& select_event(const EventSpace& space, std::size_t v, SimRng& rng);
const SimEvent& select_event(const EventSpace& space, std::size_t v, std::uint64_t seed);

struct RealizedWorld {
    std::string event_id;
    std::string world;

    friend auto operator<=>(const RealizedWorld&, const RealizedWorld&) = default;
};

struct SimulationState {
    std::size_t t = 0;
    /// Pre-loaded context (e.g. a prompt); visible to token selection but not
    /// counted in t.
    std::vector<Token> prefix;
    std::vector<Token> trajectory;
    std::set<RealizedWorld> realized;

    friend bool operator==(const SimulationState&, const SimulationState&) = default;
};

SimulationState initial_state(std::vector<Token> prefix = {});

/// Table-driven token selection: the entry whose context is the longest
/// suffix of (prefix + trajectory) wins, otherwise the default.
class TokenSelector {
public:
    struct Entry {
        std::vector<Token> context;
        std::vector<double> distribution;
    };

    /// Distributions are validated and renormalized. Contexts must be
    /// non-empty and use alphabet tokens or the separator.
    TokenSelector(Alphabet alphabet, std::vector<Entry> entries, std::optional<std::vector<double>> fallback);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const std::optional<std::vector<double>>& fallback() const noexcept { return fallback_; }

private:
    Alphabet alphabet_;
    std::vector<Entry> entries_;
    std::optional<std::vector<double>> fallback_;
};

/// Throws SelectionError when nothing matches and there is no default.
const std::vector<double>& token_distribution(const TokenSelector& selector, const SimulationState& state);

struct StepRecord {
    std::size_t t = 0;
    std::string event_id;
    Token token;
    RealizedWorld realized;
    std::uint64_t rng_digest = 0;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct StepResult {
    SimulationState state;
    StepRecord record;
};

/// One forward-pass step: select an admissible event under the space's bound,
/// realize one of its worlds, then append a token sampled from the selector.
StepResult advance(const SimulationState& state, const TokenSelector& selector, const EventSpace& space,
                   SimRng& rng);
SimulationState step(const SimulationState& state, const TokenSelector& selector, const EventSpace& space,
                     std::uint64_t seed);

struct RunResult {
    std::uint64_t seed = 0;
    std::string rng_algorithm{SimRng::kAlgorithm};
    std::vector<SimulationState> history;  // steps + 1 states, starting at t = 0
    std::vector<StepRecord> records;

    const SimulationState& final_state() const { return history.back(); }
};

RunResult run(const EventSpace& space, const TokenSelector& selector, std::size_t steps, std::uint64_t seed,
              std::vector<Token> prefix = {});

}  // namespace cartsim
