#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cartsim/labels.hpp"

namespace cartsim {

/// A subset of some world universe. Bit i corresponds to WorldId{i}; the
/// universe size travels with the set so foreign sets can be rejected.
class WorldSet {
public:
    WorldSet() = default;
    explicit WorldSet(std::size_t universe) : bits_(universe) {}

    static WorldSet full(std::size_t universe);
    /// Requires universe <= 64.
    static WorldSet from_mask(std::size_t universe, std::uint64_t mask);

    std::size_t universe() const noexcept { return bits_.size(); }
    std::size_t size() const noexcept { return bits_.count(); }
    bool empty() const noexcept { return bits_.none(); }

    bool contains(WorldId w) const { return w.value < bits_.size() && bits_.test(w.value); }
    void insert(WorldId w);
    void erase(WorldId w);

    bool is_subset_of(const WorldSet& other) const;
    bool intersects(const WorldSet& other) const;
    WorldSet complement() const;

    std::vector<WorldId> members() const;
    /// Requires universe <= 64.
    std::uint64_t to_mask() const;

    friend bool operator==(const WorldSet& a, const WorldSet& b) { return a.bits_ == b.bits_; }

private:
    boost::dynamic_bitset<> bits_;
};

/// A finite two-dimensional Cartesian frame: agent actions A, environment
/// states E, worlds W and the total outcome map A x E -> W, stored row-major
/// (one row per action).
class CartesianFrame {
public:
    /// `outcome` is row-major with |actions| * |envs| entries. Throws
    /// ValidationError if the table is not total or names a world outside W,
    /// or if envs is empty.
    CartesianFrame(LabelIndex actions, LabelIndex envs, LabelIndex worlds, std::vector<WorldId> outcome);

    /// Builds a frame from world labels. When `worlds` is absent the world
    /// universe is the matrix labels in first-appearance order.
    static CartesianFrame from_labels(std::vector<std::string> actions,
                                      std::vector<std::string> envs,
                                      const std::vector<std::string>& matrix,
                                      std::optional<std::vector<std::string>> worlds = std::nullopt);

    const LabelIndex& actions() const noexcept { return actions_; }
    const LabelIndex& envs() const noexcept { return envs_; }
    const LabelIndex& worlds() const noexcept { return worlds_; }
    std::span<const WorldId> table() const noexcept { return outcome_; }

    /// The `a . e` operation. Throws LookupError for out-of-range ids.
    WorldId outcome(ActionId a, EnvId e) const;
    /// Label form; throws LookupError naming the unknown identifier.
    WorldId outcome(std::string_view action, std::string_view env) const;

    /// Worlds in the row of `a`.
    WorldSet row(ActionId a) const;

    /// Throws ValidationError naming the first label not in W.
    WorldSet world_set(std::span<const std::string> labels) const;
    std::vector<std::string> labels_of(const WorldSet& s) const;

    friend bool operator==(const CartesianFrame&, const CartesianFrame&) = default;

private:
    LabelIndex actions_;
    LabelIndex envs_;
    LabelIndex worlds_;
    std::vector<WorldId> outcome_;
};

enum class FrameOperator { ensure, prevent, control, observe, inevitable };

/// Accepts "ensure", "prevent", "control" (or "ctrl"), "observe" (or "obs"),
/// "inevitable". Throws LookupError otherwise.
FrameOperator parse_frame_operator(std::string_view name);
std::string_view to_string(FrameOperator op);

WorldSet image(const CartesianFrame& frame);

// Membership tests. Each throws ValidationError if `s` is not a subset of the
// frame's world universe.
bool ensures(const CartesianFrame& frame, const WorldSet& s);
bool prevents(const CartesianFrame& frame, const WorldSet& s);
bool controls(const CartesianFrame& frame, const WorldSet& s);
/// Conditional-policy reading: for every pair (a0, a1) some action a agrees
/// with a0 on every column where it lands in S and with a1 wherever it lands
/// outside S.
bool observes(const CartesianFrame& frame, const WorldSet& s);
bool inevitable(const CartesianFrame& frame, const WorldSet& s);

bool holds(const CartesianFrame& frame, FrameOperator op, const WorldSet& s);

struct EnumerationOptions {
    std::size_t max_worlds = 16;
};

/// Every S in the operator's family, ordered by bitmask value. Throws
/// SizeError when |W| exceeds the cap.
std::vector<WorldSet> enumerate_operator(const CartesianFrame& frame, FrameOperator op,
                                         EnumerationOptions options = {});

}  // namespace cartsim
