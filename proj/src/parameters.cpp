#include "spanrole/parameters.hpp"

#include "spanrole/errors.hpp"

namespace spanrole {

ParamId ParameterStore::add(std::string name, Tensor initial) {
    require(!find(name).has_value(), "duplicate parameter name: " + name);
    require(!initial.empty(), "parameter must be non-empty: " + name);
    entries_.push_back({std::move(name), std::move(initial)});
    return ParamId{entries_.size() - 1};
}

std::optional<ParamId> ParameterStore::find(const std::string& name) const {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (entries_[k].name == name) {
            return ParamId{k};
        }
    }
    return std::nullopt;
}

std::vector<ParamId> ParameterStore::ids() const {
    std::vector<ParamId> out;
    out.reserve(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        out.push_back(ParamId{k});
    }
    return out;
}

std::size_t ParameterStore::scalar_count() const noexcept {
    std::size_t total = 0;
    for (const auto& entry : entries_) {
        total += entry.value.size();
    }
    return total;
}

}  // namespace spanrole
