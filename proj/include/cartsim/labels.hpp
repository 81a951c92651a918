#pragma once

#include <cstddef>
#include <compare>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cartsim {

/// Zero-based index into a label universe, tagged so that action, environment
/// and world indices cannot be mixed up.
template <class Tag>
struct Id {
    std::size_t value = 0;

    friend constexpr auto operator<=>(Id, Id) = default;
};

struct ActionTag {};
struct EnvTag {};
struct WorldTag {};

using ActionId = Id<ActionTag>;
using EnvId = Id<EnvTag>;
using WorldId = Id<WorldTag>;

/// Ordered set of unique, human-readable labels with O(1) reverse lookup.
class LabelIndex {
public:
    LabelIndex() = default;

    /// Throws ValidationError on duplicate or empty labels. `what` names the
    /// universe in diagnostics ("action", "world", ...).
    explicit LabelIndex(std::vector<std::string> labels, std::string_view what = "label");

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    const std::string& operator[](std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    bool contains(std::string_view label) const;

    /// Throws LookupError naming the label when absent.
    std::size_t index_of(std::string_view label) const;

    auto begin() const noexcept { return labels_.begin(); }
    auto end() const noexcept { return labels_.end(); }

    friend bool operator==(const LabelIndex& a, const LabelIndex& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string what_ = "label";
};

}  // namespace cartsim
