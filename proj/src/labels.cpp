#include "cartsim/labels.hpp"

#include "cartsim/error.hpp"

namespace cartsim {

LabelIndex::LabelIndex(std::vector<std::string> labels, std::string_view what)
    : labels_(std::move(labels)), what_(what) {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) {
            throw ValidationError("empty " + what_ + " label at position " + std::to_string(i));
        }
        if (!index_.emplace(labels_[i], i).second) {
            throw ValidationError("duplicate " + what_ + " label '" + labels_[i] + "'");
        }
    }
}

bool LabelIndex::contains(std::string_view label) const {
    return index_.find(std::string(label)) != index_.end();
}

std::size_t LabelIndex::index_of(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) {
        throw LookupError("unknown " + what_ + " '" + std::string(label) + "'");
    }
    return it->second;
}

}  // namespace cartsim
