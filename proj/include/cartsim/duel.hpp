#pragma once

#include <cstddef>
#include <vector>

namespace cartsim::duel {

/// How each optimizer's step is computed.
enum class UpdateRule {
    /// delta_i = eta * (n*_i - n): linear attraction toward the preferred index.
    attraction,
    /// delta_i = eta * (p_i . encode(n)) * sign(n*_i - n): the literal
    /// preference-dot-encoding form. It vanishes once n is a full index away
    /// from n*_i, so dynamics stall; kept for comparison.
    preference_dot,
};

struct DuelConfig {
    std::size_t k = 3;
    std::vector<double> p1{1.0, 0.0, 0.0};
    std::vector<double> p2{0.0, 0.0, 1.0};
    double xi = 0.5;    // optimizing power of agent 1
    double eta = 0.5;   // step size
    double n0 = 2.0;
    std::size_t max_steps = 10'000;
    double tolerance = 1e-9;
    UpdateRule rule = UpdateRule::attraction;

    /// Throws ValidationError on any broken invariant.
    void validate() const;
};

/// Probability over the k states for fractional n: floor gets 1 - frac(n),
/// ceil gets frac(n).
std::vector<double> encode_state(double n, std::size_t k);

/// One-based index of the single 1 entry.
std::size_t preferred_index(const std::vector<double>& p);

/// J^i(n) = |n - n*_i| for agent 1 or 2.
double cost(int agent, double n, const DuelConfig& config);
double delta(int agent, double n, const DuelConfig& config);
/// clamp(n + xi * delta_1 + (1 - xi) * delta_2, 1, k).
double combined_update(double n, const DuelConfig& config);
/// clamp(n + delta_i, 1, k): agent i acting alone.
double solo_update(int agent, double n, const DuelConfig& config);

struct DuelSample {
    std::size_t step = 0;
    double n = 0.0;
    double cost1 = 0.0;
    double cost2 = 0.0;
};

/// Per-step counterfactual for one agent: its cost if the other optimizer had
/// no influence, next to its cost under the combined update. The printed
/// comparison point n + xi * delta_i is recorded as well.
struct Counterfactual {
    double combined_cost = 0.0;
    double solo_cost = 0.0;
    double scaled_cost = 0.0;

    bool prefers_solo() const noexcept { return solo_cost <= combined_cost; }
};

struct DuelStep {
    std::size_t step = 0;
    double n = 0.0;
    double n_next = 0.0;
    Counterfactual agent1;
    Counterfactual agent2;
};

struct DuelReport {
    std::vector<DuelSample> trajectory;  // includes step 0
    std::vector<DuelStep> steps;
    double final_n = 0.0;
    bool converged = false;
    double final_cost1 = 0.0;
    double final_cost2 = 0.0;
    /// Whether each agent's final cost would drop had the other had zero influence.
    bool agent1_gains_from_solo = false;
    bool agent2_gains_from_solo = false;
};

/// Iterates combined_update until |n' - n| < tolerance or max_steps.
DuelReport run(const DuelConfig& config);

}  // namespace cartsim::duel
