#include "cartsim/duel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cartsim/error.hpp"

namespace cartsim::duel {

void DuelConfig::validate() const {
    if (k < 2) throw ValidationError("duel needs at least 2 environment states");
    if (p1.size() != k || p2.size() != k) {
        throw ValidationError("preference vectors must have length k = " + std::to_string(k));
    }
    preferred_index(p1);
    preferred_index(p2);
    if (!(xi >= 0.0 && xi <= 1.0)) throw ValidationError("xi must lie in [0, 1]");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
    if (!(n0 >= 1.0 && n0 <= static_cast<double>(k))) throw ValidationError("n0 must lie in [1, k]");
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
}

std::vector<double> encode_state(double n, std::size_t k) {
    if (k < 1 || !(n >= 1.0 && n <= static_cast<double>(k))) {
        throw ValidationError("state index " + std::to_string(n) + " outside [1, " + std::to_string(k) + "]");
    }
    std::vector<double> probs(k, 0.0);
    const double floor_n = std::floor(n);
    const double frac = n - floor_n;
    const auto lo = static_cast<std::size_t>(floor_n) - 1;
    probs[lo] = 1.0 - frac;
    if (frac > 0.0) probs[lo + 1] = frac;
    return probs;
}

std::size_t preferred_index(const std::vector<double>& p) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 1.0) {
            if (index != 0) throw ValidationError("preference vector has more than one 1 entry");
            index = i + 1;
        } else if (p[i] != 0.0) {
            throw ValidationError("preference vector entries must be 0 or 1");
        }
    }
    if (index == 0) throw ValidationError("preference vector has no 1 entry");
    return index;
}

namespace {

const std::vector<double>& preference(int agent, const DuelConfig& config) {
    if (agent == 1) return config.p1;
    if (agent == 2) return config.p2;
    throw ValidationError("duel agents are numbered 1 and 2, got " + std::to_string(agent));
}

double clamp_index(double n, const DuelConfig& config) { return std::clamp(n, 1.0, static_cast<double>(config.k)); }

}  // namespace

double cost(int agent, double n, const DuelConfig& config) {
    return std::abs(n - static_cast<double>(preferred_index(preference(agent, config))));
}

double delta(int agent, double n, const DuelConfig& config) {
    const auto& p = preference(agent, config);
    const double target = static_cast<double>(preferred_index(p));
    switch (config.rule) {
        case UpdateRule::attraction:
            return config.eta * (target - n);
        case UpdateRule::preference_dot: {
            const auto enc = encode_state(n, config.k);
            double dot = 0.0;
            for (std::size_t i = 0; i < enc.size(); ++i) dot += p[i] * enc[i];
            const double dir = target > n ? 1.0 : (target < n ? -1.0 : 0.0);
            return config.eta * dot * dir;
        }
    }
    return 0.0;
}

double combined_update(double n, const DuelConfig& config) {
    return clamp_index(n + config.xi * delta(1, n, config) + (1.0 - config.xi) * delta(2, n, config), config);
}

double solo_update(int agent, double n, const DuelConfig& config) {
    return clamp_index(n + delta(agent, n, config), config);
}

DuelReport run(const DuelConfig& config) {
    config.validate();
    DuelReport report;
    double n = config.n0;
    report.trajectory.push_back({0, n, cost(1, n, config), cost(2, n, config)});
    for (std::size_t s = 1; s <= config.max_steps; ++s) {
        const double next = combined_update(n, config);
        DuelStep st;
        st.step = s;
        st.n = n;
        st.n_next = next;
        const double weights[2] = {config.xi, 1.0 - config.xi};
        for (int agent = 1; agent <= 2; ++agent) {
            Counterfactual& cf = agent == 1 ? st.agent1 : st.agent2;
            cf.combined_cost = cost(agent, next, config);
            cf.solo_cost = cost(agent, solo_update(agent, n, config), config);
            cf.scaled_cost = cost(agent, clamp_index(n + weights[agent - 1] * delta(agent, n, config), config), config);
        }
        report.steps.push_back(st);
        report.trajectory.push_back({s, next, cost(1, next, config), cost(2, next, config)});
        const bool done = std::abs(next - n) < config.tolerance;
        n = next;
        if (done) {
            report.converged = true;
            break;
        }
    }
    report.final_n = n;
    report.final_cost1 = cost(1, n, config);
    report.final_cost2 = cost(2, n, config);
    report.agent1_gains_from_solo = cost(1, solo_update(1, n, config), config) < report.final_cost1;
    report.agent2_gains_from_solo = cost(2, solo_update(2, n, config), config) < report.final_cost2;
    return report;
}

}  // namespace cartsim::duel
