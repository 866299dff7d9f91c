#include "spanrole/labels.hpp"

#include "spanrole/errors.hpp"

namespace spanrole {

const std::set<std::string>& default_core_labels() {
    static const std::set<std::string> core{"A0", "A1", "A2", "A3", "A4", "A5", "AA"};
    return core;
}

LabelSet::LabelSet(std::vector<std::string> names, const std::set<std::string>& core)
    : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto& name : names_) {
        require(!name.empty(), "label names must be non-empty");
        require(seen.insert(name).second, "duplicate label: " + name);
        core_.push_back(core.contains(name));
    }
}

LabelSet::LabelSet(std::vector<std::string> names)
    : LabelSet(std::move(names), default_core_labels()) {}

std::optional<std::size_t> LabelSet::find(const std::string& name) const {
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (names_[k] == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::size_t LabelSet::index(const std::string& name) const {
    const auto found = find(name);
    require(found.has_value(), "unknown label: " + name);
    return *found;
}

bool LabelSet::is_core(const std::string& name) const { return core_.at(index(name)); }

std::set<std::string> LabelSet::core_names() const {
    std::set<std::string> out;
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (core_[k]) {
            out.insert(names_[k]);
        }
    }
    return out;
}

}  // namespace spanrole
