#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cartsim/frame.hpp"
#include "cartsim/labels.hpp"

namespace cartsim {

/// One-based agent index, matching the A^1 ... A^n numbering.
struct AgentIndex {
    std::size_t value = 1;

    friend constexpr auto operator<=>(AgentIndex, AgentIndex) = default;
};

/// Certainty threshold in [0, 1]; construction validates the range.
class Theta {
public:
    explicit Theta(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// An n-agent Cartesian object: one action set per agent over a shared
/// environment, with a joint outcome table flattened row-major along the axes
/// (agent 1, ..., agent n, env); the environment varies fastest.
class CartesianObject {
public:
    /// Throws ValidationError unless n >= 1, every agent and E are non-empty,
    /// and the table covers the full product with worlds from W.
    CartesianObject(std::vector<LabelIndex> agents, LabelIndex envs, LabelIndex worlds, std::vector<WorldId> table);

    static CartesianObject from_labels(std::vector<std::vector<std::string>> agents,
                                       std::vector<std::string> envs,
                                       const std::vector<std::string>& table,
                                       std::optional<std::vector<std::string>> worlds = std::nullopt);

    /// The one-agent object with the same table. Throws ValidationError if the
    /// frame has no actions.
    static CartesianObject from_frame(const CartesianFrame& frame);

    std::size_t agent_count() const noexcept { return agents_.size(); }
    const LabelIndex& actions(AgentIndex i) const;
    const LabelIndex& envs() const noexcept { return envs_; }
    const LabelIndex& worlds() const noexcept { return worlds_; }
    std::span<const WorldId> table() const noexcept { return table_; }
    std::size_t cell_count() const noexcept { return table_.size(); }

    /// Throws LookupError for indices outside 1..n.
    void check_agent(AgentIndex i) const;

    /// Xi: one action per agent plus an environment state.
    WorldId joint_outcome(std::span<const ActionId> joint, EnvId e) const;
    WorldId joint_outcome(std::span<const std::string> joint, std::string_view env) const;

    /// Per-axis coordinates of a flat cell index: agent actions, then env.
    std::vector<std::size_t> coordinates(std::size_t cell) const;

    WorldSet world_set(std::span<const std::string> labels) const;
    std::vector<std::string> labels_of(const WorldSet& s) const;

    friend bool operator==(const CartesianObject&, const CartesianObject&) = default;

private:
    std::vector<LabelIndex> agents_;
    LabelIndex envs_;
    LabelIndex worlds_;
    std::vector<WorldId> table_;
};

/// Independent distributions over each agent's actions and over E. Agents may
/// be left unspecified; operators requiring them raise ValidationError.
class BehaviorProfile {
public:
    BehaviorProfile() = default;

    /// Distributions must be non-negative and sum to 1 within 1e-9; they are
    /// renormalized to sum exactly as computed. `agents[j]` is agent j+1.
    BehaviorProfile(std::vector<std::optional<std::vector<double>>> agents, std::vector<double> env);

    /// Uniform over every agent and over E.
    static BehaviorProfile uniform(const CartesianObject& obj);

    const std::optional<std::vector<double>>& agent(AgentIndex i) const;
    const std::vector<double>& env() const noexcept { return env_; }
    std::size_t agent_slots() const noexcept { return agents_.size(); }

private:
    std::vector<std::optional<std::vector<double>>> agents_;
    std::vector<double> env_;
};

/// Throws ValidationError naming what is missing or wrongly sized.
void validate_distribution(std::span<const double> dist, std::string_view what);

std::vector<std::pair<AgentIndex, std::string>> agents_star(const CartesianObject& obj);

bool ensure_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s);
bool prevent_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s);
bool ctrl_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s);
bool obs_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s);
WorldSet image_n(const CartesianObject& obj, AgentIndex i);
bool inevitable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s);

/// Pr(outcome in S | agent i plays `a`) under the profile for the other
/// agents and E. Returns exactly 1 only when no positive-mass outcome falls
/// outside S, and exactly 0 only when none falls inside.
double conditional_probability(const CartesianObject& obj, AgentIndex i, ActionId a, const WorldSet& s,
                               const BehaviorProfile& profile);

/// Exists an action of agent i reaching S with probability >= theta.
bool manageable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s, const BehaviorProfile& profile,
                  Theta theta);
/// Worlds w whose best conditional probability over agent i's actions is
/// strictly above theta.
WorldSet vimage_n(const CartesianObject& obj, AgentIndex i, const BehaviorProfile& profile, Theta theta);
bool viable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s, const BehaviorProfile& profile,
              Theta theta);

/// Appends agent n+1 with `new_actions`. `extension` lists the new world label
/// for every cell of the extended product, flattened along (agent 1, ...,
/// agent n, new agent, env). Labels not in W are added as fresh worlds in
/// first-appearance order.
CartesianObject extend_with_agent(const CartesianObject& obj, std::vector<std::string> new_actions,
                                  const std::vector<std::string>& extension);

/// The extension table that leaves every outcome unchanged whatever the new
/// agent does.
std::vector<std::string> inert_extension(const CartesianObject& obj, std::size_t new_action_count);

/// Folds every other agent into the environment. Columns enumerate (other
/// agents in order, env) with env fastest and are labelled "(x,y,e)"; a
/// one-agent object keeps its environment labels.
CartesianFrame as_frame(const CartesianObject& obj, AgentIndex i);

}  // namespace cartsim
