#include "cartsim/object.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cartsim/error.hpp"

namespace cartsim {

Theta::Theta(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ValidationError("theta must lie in [0, 1], got " + std::to_string(value));
    }
}

CartesianObject::CartesianObject(std::vector<LabelIndex> agents, LabelIndex envs, LabelIndex worlds,
                                 std::vector<WorldId> table)
    : agents_(std::move(agents)), envs_(std::move(envs)), worlds_(std::move(worlds)), table_(std::move(table)) {
    if (agents_.empty()) throw ValidationError("an object needs at least one agent");
    for (std::size_t j = 0; j < agents_.size(); ++j) {
        if (agents_[j].empty()) {
            throw ValidationError("agent " + std::to_string(j + 1) + " has no actions");
        }
    }
    if (envs_.empty()) throw ValidationError("an object needs at least one environment state");
    std::size_t cells = envs_.size();
    for (const auto& a : agents_) cells *= a.size();
    if (table_.size() != cells) {
        throw ValidationError("joint outcome table has " + std::to_string(table_.size()) + " entries, expected " +
                              std::to_string(cells));
    }
    for (auto w : table_) {
        if (w.value >= worlds_.size()) {
            throw ValidationError("joint outcome names world index " + std::to_string(w.value) + " outside W");
        }
    }
}

CartesianObject CartesianObject::from_labels(std::vector<std::vector<std::string>> agents,
                                             std::vector<std::string> envs, const std::vector<std::string>& table,
                                             std::optional<std::vector<std::string>> worlds) {
    if (!worlds) {
        worlds.emplace();
        std::unordered_map<std::string, bool> seen;
        for (const auto& label : table) {
            if (seen.emplace(label, true).second) worlds->push_back(label);
        }
    }
    LabelIndex world_index(std::move(*worlds), "world");
    std::vector<WorldId> ids;
    ids.reserve(table.size());
    for (const auto& label : table) {
        if (!world_index.contains(label)) {
            throw ValidationError("joint outcome names world '" + label + "' which is not in W");
        }
        ids.push_back(WorldId{world_index.index_of(label)});
    }
    std::vector<LabelIndex> agent_index;
    for (std::size_t j = 0; j < agents.size(); ++j) {
        agent_index.emplace_back(std::move(agents[j]), "action of agent " + std::to_string(j + 1));
    }
    return CartesianObject(std::move(agent_index), LabelIndex(std::move(envs), "environment"),
                           std::move(world_index), std::move(ids));
}

CartesianObject CartesianObject::from_frame(const CartesianFrame& frame) {
    return CartesianObject({frame.actions()}, frame.envs(), frame.worlds(),
                           std::vector<WorldId>(frame.table().begin(), frame.table().end()));
}

void CartesianObject::check_agent(AgentIndex i) const {
    if (i.value < 1 || i.value > agents_.size()) {
        throw LookupError("unknown agent " + std::to_string(i.value) + " (object has " +
                          std::to_string(agents_.size()) + ")");
    }
}

const LabelIndex& CartesianObject::actions(AgentIndex i) const {
    check_agent(i);
    return agents_[i.value - 1];
}

WorldId CartesianObject::joint_outcome(std::span<const ActionId> joint, EnvId e) const {
    if (joint.size() != agents_.size()) {
        throw ValidationError("joint action has " + std::to_string(joint.size()) + " entries, object has " +
                              std::to_string(agents_.size()) + " agents");
    }
    std::size_t cell = 0;
    for (std::size_t j = 0; j < joint.size(); ++j) {
        if (joint[j].value >= agents_[j].size()) {
            throw ValidationError("action index " + std::to_string(joint[j].value) + " is foreign to agent " +
                                  std::to_string(j + 1));
        }
        cell = cell * agents_[j].size() + joint[j].value;
    }
    if (e.value >= envs_.size()) throw ValidationError("unknown environment index " + std::to_string(e.value));
    return table_[cell * envs_.size() + e.value];
}

WorldId CartesianObject::joint_outcome(std::span<const std::string> joint, std::string_view env) const {
    if (joint.size() != agents_.size()) {
        throw ValidationError("joint action has " + std::to_string(joint.size()) + " entries, object has " +
                              std::to_string(agents_.size()) + " agents");
    }
    std::vector<ActionId> ids;
    for (std::size_t j = 0; j < joint.size(); ++j) {
        if (!agents_[j].contains(joint[j])) {
            throw ValidationError("action '" + joint[j] + "' is foreign to agent " + std::to_string(j + 1));
        }
        ids.push_back(ActionId{agents_[j].index_of(joint[j])});
    }
    return joint_outcome(ids, EnvId{envs_.index_of(env)});
}

std::vector<std::size_t> CartesianObject::coordinates(std::size_t cell) const {
    std::vector<std::size_t> coords(agents_.size() + 1);
    coords.back() = cell % envs_.size();
    cell /= envs_.size();
    for (std::size_t j = agents_.size(); j-- > 0;) {
        coords[j] = cell % agents_[j].size();
        cell /= agents_[j].size();
    }
    return coords;
}

WorldSet CartesianObject::world_set(std::span<const std::string> labels) const {
    WorldSet s(worlds_.size());
    for (const auto& label : labels) {
        if (!worlds_.contains(label)) {
            throw ValidationError("world '" + label + "' is not in the object's world set");
        }
        s.insert(WorldId{worlds_.index_of(label)});
    }
    return s;
}

std::vector<std::string> CartesianObject::labels_of(const WorldSet& s) const {
    std::vector<std::string> out;
    for (auto w : s.members()) out.push_back(worlds_[w.value]);
    return out;
}

void validate_distribution(std::span<const double> dist, std::string_view what) {
    if (dist.empty()) throw ValidationError(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (double p : dist) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError(std::string(what) + ": negative or non-finite probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(std::string(what) + ": probabilities sum to " + std::to_string(sum) + ", not 1");
    }
}

namespace {

std::vector<double> normalized(std::vector<double> dist, std::string_view what) {
    validate_distribution(dist, what);
    const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    for (double& p : dist) p /= sum;
    return dist;
}

}  // namespace

BehaviorProfile::BehaviorProfile(std::vector<std::optional<std::vector<double>>> agents, std::vector<double> env)
    : agents_(std::move(agents)), env_(normalized(std::move(env), "environment distribution")) {
    for (std::size_t j = 0; j < agents_.size(); ++j) {
        if (agents_[j]) {
            agents_[j] = normalized(std::move(*agents_[j]), "distribution of agent " + std::to_string(j + 1));
        }
    }
}

BehaviorProfile BehaviorProfile::uniform(const CartesianObject& obj) {
    std::vector<std::optional<std::vector<double>>> agents;
    for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
        const auto n = obj.actions(AgentIndex{j}).size();
        agents.emplace_back(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }
    const auto ne = obj.envs().size();
    return BehaviorProfile(std::move(agents), std::vector<double>(ne, 1.0 / static_cast<double>(ne)));
}

const std::optional<std::vector<double>>& BehaviorProfile::agent(AgentIndex i) const {
    static const std::optional<std::vector<double>> none;
    if (i.value < 1 || i.value > agents_.size()) return none;
    return agents_[i.value - 1];
}

std::vector<std::pair<AgentIndex, std::string>> agents_star(const CartesianObject& obj) {
    std::vector<std::pair<AgentIndex, std::string>> out;
    for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
        for (const auto& label : obj.actions(AgentIndex{j})) out.emplace_back(AgentIndex{j}, label);
    }
    return out;
}

namespace {

void check_set(const CartesianObject& obj, const WorldSet& s) {
    if (s.universe() != obj.worlds().size()) {
        throw ValidationError("world set has universe of " + std::to_string(s.universe()) +
                              " worlds but the object has " + std::to_string(obj.worlds().size()));
    }
}

// Layout of the table as seen from agent i: every cell is base + a * stride
// where `base` ranges over the cells with agent i's coordinate at 0.
struct AgentView {
    std::size_t actions = 0;
    std::size_t stride = 0;
    std::vector<std::size_t> bases;

    AgentView(const CartesianObject& obj, AgentIndex i) {
        obj.check_agent(i);
        actions = obj.actions(i).size();
        stride = obj.envs().size();
        for (std::size_t j = i.value + 1; j <= obj.agent_count(); ++j) stride *= obj.actions(AgentIndex{j}).size();
        const std::size_t block = stride * actions;
        for (std::size_t outer = 0; outer < obj.cell_count(); outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) bases.push_back(outer + inner);
        }
    }

    std::size_t cell(std::size_t base, std::size_t a) const { return base + a * stride; }
};

std::vector<WorldSet> rows_of(const CartesianObject& obj, AgentIndex i) {
    const AgentView view(obj, i);
    std::vector<WorldSet> rows(view.actions, WorldSet(obj.worlds().size()));
    for (std::size_t a = 0; a < view.actions; ++a) {
        for (auto base : view.bases) rows[a].insert(obj.table()[view.cell(base, a)]);
    }
    return rows;
}

// Product weight of the other agents' actions and env at a context base.
std::vector<double> context_weights(const CartesianObject& obj, AgentIndex i, const BehaviorProfile& profile) {
    for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
        if (j == i.value) continue;
        const auto& dist = profile.agent(AgentIndex{j});
        if (!dist) throw ValidationError("behavior profile has no distribution for agent " + std::to_string(j));
        if (dist->size() != obj.actions(AgentIndex{j}).size()) {
            throw ValidationError("distribution for agent " + std::to_string(j) + " has " +
                                  std::to_string(dist->size()) + " entries, agent has " +
                                  std::to_string(obj.actions(AgentIndex{j}).size()) + " actions");
        }
    }
    if (profile.env().size() != obj.envs().size()) {
        throw ValidationError("environment distribution has " + std::to_string(profile.env().size()) +
                              " entries, object has " + std::to_string(obj.envs().size()) + " states");
    }
    const AgentView view(obj, i);
    std::vector<double> weights;
    weights.reserve(view.bases.size());
    for (auto base : view.bases) {
        const auto coords = obj.coordinates(base);
        double w = profile.env()[coords.back()];
        for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
            if (j != i.value) w *= (*profile.agent(AgentIndex{j}))[coords[j - 1]];
        }
        weights.push_back(w);
    }
    return weights;
}

template <class Pred>
double probability_of(const CartesianObject& obj, AgentIndex i, ActionId a, const std::vector<double>& weights,
                      Pred in_event) {
    const AgentView view(obj, i);
    double inside = 0.0;
    bool any_outside = false;
    for (std::size_t k = 0; k < view.bases.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        if (in_event(obj.table()[view.cell(view.bases[k], a.value)])) {
            inside += weights[k];
        } else {
            any_outside = true;
        }
    }
    if (!any_outside) return inside > 0.0 ? 1.0 : 0.0;
    return std::min(inside, std::nextafter(1.0, 0.0));
}

}  // namespace

bool ensure_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s) {
    check_set(obj, s);
    for (const auto& row : rows_of(obj, i)) {
        if (row.is_subset_of(s)) return true;
    }
    return false;
}

bool prevent_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s) {
    check_set(obj, s);
    for (const auto& row : rows_of(obj, i)) {
        if (!row.intersects(s)) return true;
    }
    return false;
}

bool ctrl_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s) {
    return ensure_n(obj, i, s) && prevent_n(obj, i, s);
}

bool obs_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s) {
    check_set(obj, s);
    const AgentView view(obj, i);
    const auto table = obj.table();
    for (std::size_t a0 = 0; a0 < view.actions; ++a0) {
        for (std::size_t a1 = 0; a1 < view.actions; ++a1) {
            bool found = false;
            for (std::size_t a = 0; a < view.actions && !found; ++a) {
                found = std::all_of(view.bases.begin(), view.bases.end(), [&](std::size_t base) {
                    const WorldId w = table[view.cell(base, a)];
                    return s.contains(w) ? w == table[view.cell(base, a0)] : w == table[view.cell(base, a1)];
                });
            }
            if (!found) return false;
        }
    }
    return true;
}

WorldSet image_n(const CartesianObject& obj, AgentIndex i) {
    obj.check_agent(i);
    WorldSet s(obj.worlds().size());
    for (auto w : obj.table()) s.insert(w);
    return s;
}

bool inevitable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s) {
    check_set(obj, s);
    return !obj.actions(i).empty() && image_n(obj, i).is_subset_of(s);
}

double conditional_probability(const CartesianObject& obj, AgentIndex i, ActionId a, const WorldSet& s,
                               const BehaviorProfile& profile) {
    check_set(obj, s);
    if (a.value >= obj.actions(i).size()) {
        throw ValidationError("action index " + std::to_string(a.value) + " is foreign to agent " +
                              std::to_string(i.value));
    }
    const auto weights = context_weights(obj, i, profile);
    return probability_of(obj, i, a, weights, [&](WorldId w) { return s.contains(w); });
}

bool manageable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s, const BehaviorProfile& profile,
                  Theta theta) {
    check_set(obj, s);
    const auto weights = context_weights(obj, i, profile);
    for (std::size_t a = 0; a < obj.actions(i).size(); ++a) {
        if (probability_of(obj, i, ActionId{a}, weights, [&](WorldId w) { return s.contains(w); }) >=
            theta.value()) {
            return true;
        }
    }
    return false;
}

WorldSet vimage_n(const CartesianObject& obj, AgentIndex i, const BehaviorProfile& profile, Theta theta) {
    const auto weights = context_weights(obj, i, profile);
    WorldSet out(obj.worlds().size());
    for (std::size_t w = 0; w < obj.worlds().size(); ++w) {
        for (std::size_t a = 0; a < obj.actions(i).size(); ++a) {
            const double p = probability_of(obj, i, ActionId{a}, weights, [&](WorldId x) { return x.value == w; });
            if (p > theta.value()) {
                out.insert(WorldId{w});
                break;
            }
        }
    }
    return out;
}

bool viable_n(const CartesianObject& obj, AgentIndex i, const WorldSet& s, const BehaviorProfile& profile,
              Theta theta) {
    check_set(obj, s);
    return !obj.actions(i).empty() && vimage_n(obj, i, profile, theta).is_subset_of(s);
}

CartesianObject extend_with_agent(const CartesianObject& obj, std::vector<std::string> new_actions,
                                  const std::vector<std::string>& extension) {
    if (new_actions.empty()) throw ValidationError("the new agent needs at least one action");
    const std::size_t expected = obj.cell_count() * new_actions.size();
    if (extension.size() != expected) {
        throw ValidationError("extension map covers " + std::to_string(extension.size()) + " cells, expected " +
                              std::to_string(expected));
    }
    std::vector<std::string> worlds = obj.worlds().labels();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t w = 0; w < worlds.size(); ++w) index.emplace(worlds[w], w);
    std::vector<WorldId> table;
    table.reserve(expected);
    for (std::size_t c = 0; c < extension.size(); ++c) {
        const auto& label = extension[c];
        if (label.empty()) throw ValidationError("extension map has no world for cell " + std::to_string(c));
        auto [it, fresh] = index.emplace(label, worlds.size());
        if (fresh) worlds.push_back(label);
        table.push_back(WorldId{it->second});
    }
    std::vector<LabelIndex> agents;
    for (std::size_t j = 1; j <= obj.agent_count(); ++j) agents.push_back(obj.actions(AgentIndex{j}));
    agents.emplace_back(std::move(new_actions), "action of agent " + std::to_string(obj.agent_count() + 1));
    return CartesianObject(std::move(agents), obj.envs(), LabelIndex(std::move(worlds), "world"), std::move(table));
}

std::vector<std::string> inert_extension(const CartesianObject& obj, std::size_t new_action_count) {
    const std::size_t ne = obj.envs().size();
    std::vector<std::string> out;
    out.reserve(obj.cell_count() * new_action_count);
    for (std::size_t prefix = 0; prefix < obj.cell_count() / ne; ++prefix) {
        for (std::size_t k = 0; k < new_action_count; ++k) {
            for (std::size_t e = 0; e < ne; ++e) out.push_back(obj.worlds()[obj.table()[prefix * ne + e].value]);
        }
    }
    return out;
}

CartesianFrame as_frame(const CartesianObject& obj, AgentIndex i) {
    const AgentView view(obj, i);
    std::vector<std::string> columns;
    if (obj.agent_count() == 1) {
        columns = obj.envs().labels();
    } else {
        for (auto base : view.bases) {
            const auto coords = obj.coordinates(base);
            std::string label = "(";
            for (std::size_t j = 1; j <= obj.agent_count(); ++j) {
                if (j == i.value) continue;
                label += obj.actions(AgentIndex{j})[coords[j - 1]] + ",";
            }
            label += obj.envs()[coords.back()] + ")";
            columns.push_back(std::move(label));
        }
    }
    std::vector<WorldId> table;
    table.reserve(obj.cell_count());
    for (std::size_t a = 0; a < view.actions; ++a) {
        for (auto base : view.bases) table.push_back(obj.table()[view.cell(base, a)]);
    }
    return CartesianFrame(obj.actions(i), LabelIndex(std::move(columns), "environment"), obj.worlds(),
                          std::move(table));
}

}  // namespace cartsim
