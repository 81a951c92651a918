#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cartsim/duel.hpp"
#include "cartsim/error.hpp"
#include "cartsim/frame.hpp"
#include "cartsim/object.hpp"
#include "cartsim/pse.hpp"
#include "cartsim/sim.hpp"

namespace cartsim {

inline constexpr int kScenarioVersion = 1;

/// A scenario file problem. `path` is a JSON pointer to the first offending
/// field ("" for whole-file problems).
class ScenarioError : public Error {
public:
    enum class Kind { missing_file, parse, unknown_version, dangling_reference, invariant };

    ScenarioError(Kind kind, std::string path, const std::string& detail);

    Kind kind() const noexcept { return kind_; }
    const std::string& path() const noexcept { return path_; }

private:
    Kind kind_;
    std::string path_;
};

std::string_view to_string(ScenarioError::Kind kind);

struct NamedProfile {
    std::string object;
    BehaviorProfile profile;
};

struct Simulation {
    std::string space;
    std::string selector;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
};

struct Pipeline {
    pse::SimulatorHandle partial;
    pse::SimulatorHandle complete;
    std::string evaluator;
    std::vector<Token> prompt;
    std::vector<Token> condition;
    pse::GateSeeds seeds;
};

struct Scenario {
    int version = kScenarioVersion;
    std::map<std::string, CartesianFrame> frames;
    std::map<std::string, CartesianObject> objects;
    std::map<std::string, NamedProfile> profiles;
    std::map<std::string, EventSpace> event_spaces;
    std::map<std::string, TokenSelector> selectors;
    std::map<std::string, Simulation> simulations;
    std::map<std::string, duel::DuelConfig> duels;
    std::map<std::string, pse::EvaluatorSpec> evaluators;
    std::map<std::string, Pipeline> pipelines;
};

/// Reads and fully validates a scenario. Relative paths that do not exist are
/// retried under $CARTSIM_SCENARIO_DIR when it is set.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text);

/// Looks `name` up in one section; throws ScenarioError(dangling_reference).
template <class Map>
const typename Map::mapped_type& lookup(const Map& section, std::string_view section_name, std::string_view name) {
    auto it = section.find(std::string(name));
    if (it == section.end()) {
        throw ScenarioError(ScenarioError::Kind::dangling_reference, "/" + std::string(section_name),
                            "no entry named '" + std::string(name) + "'");
    }
    return it->second;
}

}  // namespace cartsim
