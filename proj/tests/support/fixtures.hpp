#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cartsim/frame.hpp"
#include "cartsim/object.hpp"
#include "cartsim/sim.hpp"
#include "oracles.hpp"

namespace fixtures {

inline std::vector<std::string> labels(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

/// The 3x3 frame with nine distinct worlds, a_i . e_j = w_{3(i-1)+j}.
inline cartsim::CartesianFrame example_frame() {
    return cartsim::CartesianFrame::from_labels(labels("a", 3), labels("e", 3), labels("w", 9));
}

/// Two agents, A1 = {u, d}, A2 = {l, r}, E = {e}:
/// (u,l) -> w1, (u,r) -> w2, (d,l) -> w3, (d,r) -> w4.
inline cartsim::CartesianObject two_agent_object() {
    return cartsim::CartesianObject::from_labels({{"u", "d"}, {"l", "r"}}, {"e"}, {"w1", "w2", "w3", "w4"});
}

inline oracle::PlainFrame to_plain(const cartsim::CartesianFrame& f) {
    oracle::PlainFrame p{static_cast<int>(f.actions().size()), static_cast<int>(f.envs().size()),
                         static_cast<int>(f.worlds().size()), {}};
    for (auto w : f.table()) p.out.push_back(static_cast<int>(w.value));
    return p;
}

inline oracle::PlainObject to_plain(const cartsim::CartesianObject& o) {
    oracle::PlainObject p;
    for (std::size_t j = 1; j <= o.agent_count(); ++j) {
        p.sizes.push_back(static_cast<int>(o.actions(cartsim::AgentIndex{j}).size()));
    }
    p.envs = static_cast<int>(o.envs().size());
    p.worlds = static_cast<int>(o.worlds().size());
    for (auto w : o.table()) p.table.push_back(static_cast<int>(w.value));
    return p;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random frame with 0..max_actions actions, 1..max_envs envs, 1..max_worlds worlds.
inline cartsim::CartesianFrame random_frame(std::mt19937_64& rng, int max_actions = 4, int max_envs = 4,
                                            int max_worlds = 10, int min_actions = 0) {
    const int na = uniform_int(rng, min_actions, max_actions);
    const int ne = uniform_int(rng, 1, max_envs);
    const int nw = uniform_int(rng, 1, max_worlds);
    std::vector<std::string> matrix;
    for (int k = 0; k < na * ne; ++k) matrix.push_back("w" + std::to_string(uniform_int(rng, 1, nw)));
    return cartsim::CartesianFrame::from_labels(labels("a", na), labels("e", ne), matrix, labels("w", nw));
}

inline cartsim::CartesianObject random_object(std::mt19937_64& rng, int agents, int max_actions = 3,
                                              int max_envs = 3, int max_worlds = 8) {
    std::vector<std::vector<std::string>> sets;
    int cells = 1;
    for (int j = 1; j <= agents; ++j) {
        const int n = uniform_int(rng, 1, max_actions);
        sets.push_back(labels("a" + std::to_string(j) + "_", n));
        cells *= n;
    }
    const int ne = uniform_int(rng, 1, max_envs);
    const int nw = uniform_int(rng, 1, max_worlds);
    cells *= ne;
    std::vector<std::string> table;
    for (int k = 0; k < cells; ++k) table.push_back("w" + std::to_string(uniform_int(rng, 1, nw)));
    return cartsim::CartesianObject::from_labels(std::move(sets), labels("e", ne), table, labels("w", nw));
}

/// Random distribution of size n; `full_support` keeps every entry positive.
inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, bool full_support) {
    std::uniform_real_distribution<double> u(full_support ? 0.05 : 0.0, 1.0);
    std::vector<double> d(n);
    double sum = 0.0;
    for (auto& x : d) {
        x = u(rng);
        if (!full_support && u(rng) < 0.3) x = 0.0;
        sum += x;
    }
    if (sum == 0.0) {
        d[0] = 1.0;
        sum = 1.0;
    }
    for (auto& x : d) x /= sum;
    return d;
}

inline cartsim::Simulacrum simulacrum(std::string id, std::vector<std::string> actions, std::string description) {
    return cartsim::Simulacrum{std::move(id), std::move(actions), std::move(description)};
}

/// An event over a 1x1 object with one world named after the event.
inline cartsim::SimEvent trivial_event(const std::string& id, double weight,
                                       std::vector<cartsim::Simulacrum> simulacra) {
    return cartsim::SimEvent{id, cartsim::CartesianObject::from_labels({{"act"}}, {"env"}, {id + ":w"}),
                             std::move(simulacra), weight, std::nullopt};
}

/// Selector emitting `token` with certainty from any state.
inline cartsim::TokenSelector degenerate_selector(const std::vector<std::string>& alphabet, const std::string& token) {
    std::vector<double> d(alphabet.size(), 0.0);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (alphabet[i] == token) d[i] = 1.0;
    }
    return cartsim::TokenSelector(cartsim::Alphabet(alphabet), {}, d);
}

}  // namespace fixtures
