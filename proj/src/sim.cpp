#include "cartsim/sim.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include "cartsim/error.hpp"

namespace cartsim {

Alphabet::Alphabet(std::vector<Token> tokens) : tokens_(std::move(tokens), "token") {
    if (tokens_.empty()) throw ValidationError("alphabet must not be empty");
    if (tokens_.contains(kSeparatorToken)) {
        throw ValidationError("alphabet must not contain the reserved separator token");
    }
}

std::string canonical_form(const Simulacrum& s) {
    std::string out = "sim:";
    for (const auto& a : s.actions) {
        out += 'a';
        out += std::to_string(a.size());
        out += ':';
        out += a;
        out += ',';
    }
    out += 'd';
    out += std::to_string(s.description.size());
    out += ':';
    out += s.description;
    out += ',';
    return out;
}

namespace {

// Reads "<tag><len>:<bytes>," at `pos`.
std::string read_field(std::string_view bytes, std::size_t& pos) {
    const auto colon = bytes.find(':', pos + 1);
    if (colon == std::string_view::npos) throw ValidationError("canonical form: missing length terminator");
    std::size_t len = 0;
    const auto* first = bytes.data() + pos + 1;
    const auto* last = bytes.data() + colon;
    auto [ptr, ec] = std::from_chars(first, last, len);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ValidationError("canonical form: bad length field");
    }
    const auto body = colon + 1;
    if (body + len >= bytes.size() || bytes[body + len] != ',') {
        throw ValidationError("canonical form: field overruns input");
    }
    pos = body + len + 1;
    return std::string(bytes.substr(body, len));
}

}  // namespace

Simulacrum parse_canonical(std::string_view bytes, std::string id) {
    if (bytes.substr(0, 4) != "sim:") throw ValidationError("canonical form: missing 'sim:' header");
    Simulacrum s;
    s.id = std::move(id);
    std::size_t pos = 4;
    while (pos < bytes.size() && bytes[pos] == 'a') s.actions.push_back(read_field(bytes, pos));
    if (pos >= bytes.size() || bytes[pos] != 'd') throw ValidationError("canonical form: missing description");
    s.description = read_field(bytes, pos);
    if (pos != bytes.size()) throw ValidationError("canonical form: trailing bytes");
    return s;
}

std::size_t byte_length_scorer(std::string_view canonical) { return canonical.size(); }

std::size_t complexity(const Simulacrum& s, const ComplexityScorer& scorer) { return scorer(canonical_form(s)); }

std::size_t complexity(const SimEvent& e, const ComplexityScorer& scorer) {
    std::size_t best = 0;
    for (const auto& s : e.simulacra) best = std::max(best, complexity(s, scorer));
    return best;
}

EventSpace::EventSpace(std::vector<SimEvent> events, std::size_t bound, ComplexityScorer scorer)
    : events_(std::move(events)), bound_(bound), scorer_(std::move(scorer)) {
    if (!scorer_) throw ValidationError("complexity scorer must be callable");
    std::unordered_set<std::string> ids;
    for (const auto& e : events_) {
        if (e.id.empty()) throw ValidationError("event with empty id");
        if (!ids.insert(e.id).second) throw ValidationError("duplicate event id '" + e.id + "'");
        if (!(e.weight >= 0.0)) throw ValidationError("event '" + e.id + "' has a negative weight");
        if (e.simulacra.empty()) throw ValidationError("event '" + e.id + "' has no simulacra");
        if (e.profile) {
            for (std::size_t j = 1; j <= e.object.agent_count(); ++j) {
                const auto& d = e.profile->agent(AgentIndex{j});
                if (!d || d->size() != e.object.actions(AgentIndex{j}).size()) {
                    throw ValidationError("event '" + e.id + "': profile does not cover agent " +
                                          std::to_string(j));
                }
            }
            if (e.profile->env().size() != e.object.envs().size()) {
                throw ValidationError("event '" + e.id + "': profile does not cover the environment");
            }
        }
    }
}

const SimEvent& EventSpace::event(std::string_view id) const {
    for (const auto& e : events_) {
        if (e.id == id) return e;
    }
    throw LookupError("unknown event '" + std::string(id) + "'");
}

std::size_t EventSpace::complexity(const Simulacrum& s) const { return cartsim::complexity(s, scorer_); }
std::size_t EventSpace::complexity(const SimEvent& e) const { return cartsim::complexity(e, scorer_); }

std::vector<std::string> EventSpace::sample_space() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& e : events_) {
        for (const auto& s : e.simulacra) {
            if (seen.insert(s.id).second) out.push_back(s.id);
        }
    }
    return out;
}

std::size_t EventSpace::max_complexity() const {
    std::size_t best = 0;
    for (const auto& e : events_) best = std::max(best, complexity(e));
    return best;
}

EventSpace EventSpace::with_bound(std::size_t bound) const {
    EventSpace copy = *this;
    copy.bound_ = bound;
    return copy;
}

std::vector<const SimEvent*> admissible_events(const EventSpace& space, std::size_t v) {
    std::vector<const SimEvent*> out;
    for (const auto& e : space.events()) {
        if (space.complexity(e) <= v) out.push_back(&e);
    }
    return out;
}

double SimRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t SimRng::weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw SelectionError("weights have no positive mass");
    const double x = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (x < acc) return i;
    }
    return last_positive;
}

std::uint64_t SimRng::state_digest() const {
    std::ostringstream os;
    os << engine_;
    const std::string text = os.str();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x00000100000001b3ULL;
    }
    return hash;
}

const SimEvent& select_event(const EventSpace& space, std::size_t v, SimRng& rng) {
    const auto admissible = admissible_events(space, v);
    if (admissible.empty()) {
        throw SelectionError("no event has complexity within the bound " + std::to_string(v));
    }
    std::vector<double> weights;
    weights.reserve(admissible.size());
    for (const auto* e : admissible) weights.push_back(e->weight);
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw SelectionError("admissible events carry zero total weight");
    return *admissible[rng.weighted_index(weights)];
}

const SimEvent& select_event(const EventSpace& space, std::size_t v, std::uint64_t seed) {
    SimRng rng(seed);
    return select_event(space, v, rng);
}

SimulationState initial_state(std::vector<Token> prefix) {
    SimulationState s;
    s.prefix = std::move(prefix);
    return s;
}

TokenSelector::TokenSelector(Alphabet alphabet, std::vector<Entry> entries,
                             std::optional<std::vector<double>> fallback)
    : alphabet_(std::move(alphabet)), entries_(std::move(entries)), fallback_(std::move(fallback)) {
    auto check = [&](std::vector<double>& dist, const std::string& what) {
        if (dist.size() != alphabet_.size()) {
            throw ValidationError(what + ": distribution has " + std::to_string(dist.size()) +
                                  " entries, alphabet has " + std::to_string(alphabet_.size()));
        }
        validate_distribution(dist, what);
        double sum = 0.0;
        for (double p : dist) sum += p;
        for (double& p : dist) p /= sum;
    };
    if (fallback_) check(*fallback_, "default distribution");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        auto& entry = entries_[k];
        const std::string what = "selector entry " + std::to_string(k);
        if (entry.context.empty()) throw ValidationError(what + ": context must not be empty");
        for (const auto& t : entry.context) {
            if (t != kSeparatorToken && !alphabet_.contains(t)) {
                throw ValidationError(what + ": context token '" + t + "' is not in the alphabet");
            }
        }
        check(entry.distribution, what);
    }
}

const std::vector<double>& token_distribution(const TokenSelector& selector, const SimulationState& state) {
    const std::vector<double>* best = nullptr;
    std::size_t best_len = 0;
    const std::size_t total = state.prefix.size() + state.trajectory.size();
    auto at = [&](std::size_t i) -> const Token& {
        return i < state.prefix.size() ? state.prefix[i] : state.trajectory[i - state.prefix.size()];
    };
    for (const auto& entry : selector.entries()) {
        const std::size_t len = entry.context.size();
        if (len <= best_len || len > total) continue;
        bool match = true;
        for (std::size_t k = 0; k < len && match; ++k) match = at(total - len + k) == entry.context[k];
        if (match) {
            best = &entry.distribution;
            best_len = len;
        }
    }
    if (best) return *best;
    if (selector.fallback()) return *selector.fallback();
    throw SelectionError("no selector entry matches the trajectory and there is no default");
}

namespace {

std::size_t sample_from(SimRng& rng, const std::vector<double>& dist) { return rng.weighted_index(dist); }

// Samples one cell of the event's object and returns its world label.
std::string realize_world(const SimEvent& event, SimRng& rng) {
    const auto& obj = event.object;
    std::vector<ActionId> joint;
    for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
        const std::size_t n = obj.actions(AgentIndex{j}).size();
        if (event.profile) {
            joint.push_back(ActionId{sample_from(rng, *event.profile->agent(AgentIndex{j}))});
        } else {
            joint.push_back(ActionId{std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)))});
        }
    }
    const std::size_t ne = obj.envs().size();
    const EnvId e{event.profile ? sample_from(rng, event.profile->env())
                                : std::min(ne - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(ne)))};
    return obj.worlds()[obj.joint_outcome(joint, e).value];
}

}  // namespace

StepResult advance(const SimulationState& state, const TokenSelector& selector, const EventSpace& space,
                   SimRng& rng) {
    const SimEvent& event = select_event(space, space.bound(), rng);
    RealizedWorld realized{event.id, realize_world(event, rng)};
    const auto& dist = token_distribution(selector, state);
    const Token& token = selector.alphabet()[rng.weighted_index(dist)];

    StepResult out{state, {}};
    out.state.t = state.t + 1;
    out.state.trajectory.push_back(token);
    out.state.realized.insert(realized);
    out.record = StepRecord{out.state.t, event.id, token, std::move(realized), rng.state_digest()};
    return out;
}

SimulationState step(const SimulationState& state, const TokenSelector& selector, const EventSpace& space,
                     std::uint64_t seed) {
    SimRng rng(seed);
    return advance(state, selector, space, rng).state;
}

RunResult run(const EventSpace& space, const TokenSelector& selector, std::size_t steps, std::uint64_t seed,
              std::vector<Token> prefix) {
    RunResult result;
    result.seed = seed;
    result.history.reserve(steps + 1);
    result.records.reserve(steps);
    result.history.push_back(initial_state(std::move(prefix)));
    SimRng rng(seed);
    for (std::size_t k = 0; k < steps; ++k) {
        auto next = advance(result.history.back(), selector, space, rng);
        result.history.push_back(std::move(next.state));
        result.records.push_back(std::move(next.record));
    }
    return result;
}

}  // namespace cartsim
