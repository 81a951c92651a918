#include "cartsim/frame.hpp"

#include <string>
#include <unordered_map>

#include "cartsim/error.hpp"

namespace cartsim {

WorldSet WorldSet::full(std::size_t universe) {
    WorldSet s(universe);
    s.bits_.set();
    return s;
}

WorldSet WorldSet::from_mask(std::size_t universe, std::uint64_t mask) {
    if (universe > 64) {
        throw SizeError("bitmask world sets support at most 64 worlds, got " + std::to_string(universe));
    }
    WorldSet s(universe);
    for (std::size_t i = 0; i < universe; ++i) {
        if ((mask >> i) & 1U) s.bits_.set(i);
    }
    return s;
}

void WorldSet::insert(WorldId w) {
    if (w.value >= bits_.size()) {
        throw ValidationError("world index " + std::to_string(w.value) + " outside universe of " +
                              std::to_string(bits_.size()));
    }
    bits_.set(w.value);
}

void WorldSet::erase(WorldId w) {
    if (w.value < bits_.size()) bits_.reset(w.value);
}

bool WorldSet::is_subset_of(const WorldSet& other) const {
    if (other.universe() != universe()) {
        throw ValidationError("world sets over different universes");
    }
    return bits_.is_subset_of(other.bits_);
}

bool WorldSet::intersects(const WorldSet& other) const {
    if (other.universe() != universe()) {
        throw ValidationError("world sets over different universes");
    }
    return bits_.intersects(other.bits_);
}

WorldSet WorldSet::complement() const {
    WorldSet s = *this;
    s.bits_.flip();
    return s;
}

std::vector<WorldId> WorldSet::members() const {
    std::vector<WorldId> out;
    out.reserve(size());
    for (auto i = bits_.find_first(); i != boost::dynamic_bitset<>::npos; i = bits_.find_next(i)) {
        out.push_back(WorldId{i});
    }
    return out;
}

std::uint64_t WorldSet::to_mask() const {
    if (universe() > 64) {
        throw SizeError("bitmask world sets support at most 64 worlds, got " + std::to_string(universe()));
    }
    std::uint64_t mask = 0;
    for (auto w : members()) mask |= std::uint64_t{1} << w.value;
    return mask;
}

CartesianFrame::CartesianFrame(LabelIndex actions, LabelIndex envs, LabelIndex worlds,
                               std::vector<WorldId> outcome)
    : actions_(std::move(actions)),
      envs_(std::move(envs)),
      worlds_(std::move(worlds)),
      outcome_(std::move(outcome)) {
    if (envs_.empty()) {
        throw ValidationError("a frame needs at least one environment state");
    }
    if (outcome_.size() != actions_.size() * envs_.size()) {
        throw ValidationError("outcome table has " + std::to_string(outcome_.size()) + " entries, expected " +
                              std::to_string(actions_.size() * envs_.size()));
    }
    for (auto w : outcome_) {
        if (w.value >= worlds_.size()) {
            throw ValidationError("outcome names world index " + std::to_string(w.value) + " outside W");
        }
    }
}

CartesianFrame CartesianFrame::from_labels(std::vector<std::string> actions, std::vector<std::string> envs,
                                           const std::vector<std::string>& matrix,
                                           std::optional<std::vector<std::string>> worlds) {
    if (!worlds) {
        worlds.emplace();
        std::unordered_map<std::string, bool> seen;
        for (const auto& label : matrix) {
            if (seen.emplace(label, true).second) worlds->push_back(label);
        }
    }
    LabelIndex world_index(std::move(*worlds), "world");
    std::vector<WorldId> table;
    table.reserve(matrix.size());
    for (const auto& label : matrix) {
        if (!world_index.contains(label)) {
            throw ValidationError("outcome names world '" + label + "' which is not in W");
        }
        table.push_back(WorldId{world_index.index_of(label)});
    }
    return CartesianFrame(LabelIndex(std::move(actions), "action"), LabelIndex(std::move(envs), "environment"),
                          std::move(world_index), std::move(table));
}

WorldId CartesianFrame::outcome(ActionId a, EnvId e) const {
    if (a.value >= actions_.size()) throw LookupError("unknown action index " + std::to_string(a.value));
    if (e.value >= envs_.size()) throw LookupError("unknown environment index " + std::to_string(e.value));
    return outcome_[a.value * envs_.size() + e.value];
}

WorldId CartesianFrame::outcome(std::string_view action, std::string_view env) const {
    return outcome(ActionId{actions_.index_of(action)}, EnvId{envs_.index_of(env)});
}

WorldSet CartesianFrame::row(ActionId a) const {
    WorldSet s(worlds_.size());
    for (std::size_t e = 0; e < envs_.size(); ++e) s.insert(outcome(a, EnvId{e}));
    return s;
}

WorldSet CartesianFrame::world_set(std::span<const std::string> labels) const {
    WorldSet s(worlds_.size());
    for (const auto& label : labels) {
        if (!worlds_.contains(label)) {
            throw ValidationError("world '" + label + "' is not in the frame's world set");
        }
        s.insert(WorldId{worlds_.index_of(label)});
    }
    return s;
}

std::vector<std::string> CartesianFrame::labels_of(const WorldSet& s) const {
    std::vector<std::string> out;
    for (auto w : s.members()) out.push_back(worlds_[w.value]);
    return out;
}

FrameOperator parse_frame_operator(std::string_view name) {
    if (name == "ensure") return FrameOperator::ensure;
    if (name == "prevent") return FrameOperator::prevent;
    if (name == "control" || name == "ctrl") return FrameOperator::control;
    if (name == "observe" || name == "obs") return FrameOperator::observe;
    if (name == "inevitable") return FrameOperator::inevitable;
    throw LookupError("unknown operator '" + std::string(name) + "'");
}

std::string_view to_string(FrameOperator op) {
    switch (op) {
        case FrameOperator::ensure: return "ensure";
        case FrameOperator::prevent: return "prevent";
        case FrameOperator::control: return "control";
        case FrameOperator::observe: return "observe";
        case FrameOperator::inevitable: return "inevitable";
    }
    return "?";
}

namespace {

void check_universe(const CartesianFrame& frame, const WorldSet& s) {
    if (s.universe() != frame.worlds().size()) {
        throw ValidationError("world set has universe of " + std::to_string(s.universe()) +
                              " worlds but the frame has " + std::to_string(frame.worlds().size()));
    }
}

}  // namespace

WorldSet image(const CartesianFrame& frame) {
    WorldSet s(frame.worlds().size());
    for (auto w : frame.table()) s.insert(w);
    return s;
}

bool ensures(const CartesianFrame& frame, const WorldSet& s) {
    check_universe(frame, s);
    for (std::size_t a = 0; a < frame.actions().size(); ++a) {
        if (frame.row(ActionId{a}).is_subset_of(s)) return true;
    }
    return false;
}

bool prevents(const CartesianFrame& frame, const WorldSet& s) {
    check_universe(frame, s);
    for (std::size_t a = 0; a < frame.actions().size(); ++a) {
        if (!frame.row(ActionId{a}).intersects(s)) return true;
    }
    return false;
}

bool controls(const CartesianFrame& frame, const WorldSet& s) {
    return ensures(frame, s) && prevents(frame, s);
}

bool observes(const CartesianFrame& frame, const WorldSet& s) {
    check_universe(frame, s);
    const std::size_t na = frame.actions().size();
    const std::size_t ne = frame.envs().size();
    auto follows = [&](std::size_t a, std::size_t a0, std::size_t a1) {
        for (std::size_t e = 0; e < ne; ++e) {
            const WorldId w = frame.outcome(ActionId{a}, EnvId{e});
            const bool ok = s.contains(w) ? w == frame.outcome(ActionId{a0}, EnvId{e})
                                          : w == frame.outcome(ActionId{a1}, EnvId{e});
            if (!ok) return false;
        }
        return true;
    };
    for (std::size_t a0 = 0; a0 < na; ++a0) {
        for (std::size_t a1 = 0; a1 < na; ++a1) {
            bool found = false;
            for (std::size_t a = 0; a < na && !found; ++a) found = follows(a, a0, a1);
            if (!found) return false;
        }
    }
    return true;
}

bool inevitable(const CartesianFrame& frame, const WorldSet& s) {
    check_universe(frame, s);
    return !frame.actions().empty() && image(frame).is_subset_of(s);
}

bool holds(const CartesianFrame& frame, FrameOperator op, const WorldSet& s) {
    switch (op) {
        case FrameOperator::ensure: return ensures(frame, s);
        case FrameOperator::prevent: return prevents(frame, s);
        case FrameOperator::control: return controls(frame, s);
        case FrameOperator::observe: return observes(frame, s);
        case FrameOperator::inevitable: return inevitable(frame, s);
    }
    return false;
}

namespace {

// Bitmask view of a frame used by exhaustive enumeration: one mask per row
// plus the raw outcome bits per cell.
struct MaskedFrame {
    std::size_t actions = 0;
    std::size_t envs = 0;
    std::vector<std::uint64_t> rows;
    std::vector<std::uint64_t> cells;  // row-major single-bit masks
    std::uint64_t image = 0;

    explicit MaskedFrame(const CartesianFrame& frame)
        : actions(frame.actions().size()), envs(frame.envs().size()), rows(actions, 0) {
        cells.reserve(actions * envs);
        for (std::size_t a = 0; a < actions; ++a) {
            for (std::size_t e = 0; e < envs; ++e) {
                const std::uint64_t bit = std::uint64_t{1} << frame.outcome(ActionId{a}, EnvId{e}).value;
                cells.push_back(bit);
                rows[a] |= bit;
                image |= bit;
            }
        }
    }

    bool ensure(std::uint64_t s) const {
        for (auto r : rows) {
            if ((r & ~s) == 0) return true;
        }
        return false;
    }

    bool prevent(std::uint64_t s) const {
        for (auto r : rows) {
            if ((r & s) == 0) return true;
        }
        return false;
    }

    bool observe(std::uint64_t s) const {
        for (std::size_t a0 = 0; a0 < actions; ++a0) {
            for (std::size_t a1 = 0; a1 < actions; ++a1) {
                bool found = false;
                for (std::size_t a = 0; a < actions && !found; ++a) {
                    found = true;
                    for (std::size_t e = 0; e < envs && found; ++e) {
                        const std::uint64_t c = cells[a * envs + e];
                        found = (c & s) ? c == cells[a0 * envs + e] : c == cells[a1 * envs + e];
                    }
                }
                if (!found) return false;
            }
        }
        return true;
    }

    bool test(FrameOperator op, std::uint64_t s) const {
        switch (op) {
            case FrameOperator::ensure: return ensure(s);
            case FrameOperator::prevent: return prevent(s);
            case FrameOperator::control: return ensure(s) && prevent(s);
            case FrameOperator::observe: return observe(s);
            case FrameOperator::inevitable: return actions > 0 && (image & ~s) == 0;
        }
        return false;
    }
};

}  // namespace

std::vector<WorldSet> enumerate_operator(const CartesianFrame& frame, FrameOperator op, EnumerationOptions options) {
    const std::size_t n = frame.worlds().size();
    const std::size_t cap = std::min<std::size_t>(options.max_worlds, 63);
    if (n > cap) {
        throw SizeError("frame has " + std::to_string(n) + " worlds, above the enumeration cap of " +
                        std::to_string(cap) + "; use membership queries instead");
    }
    const MaskedFrame masked(frame);
    std::vector<WorldSet> family;
    const std::uint64_t end = std::uint64_t{1} << n;
    for (std::uint64_t s = 0; s < end; ++s) {
        if (masked.test(op, s)) family.push_back(WorldSet::from_mask(n, s));
    }
    return family;
}

}  // namespace cartsim
