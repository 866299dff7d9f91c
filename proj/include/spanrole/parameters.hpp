#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spanrole/tensor.hpp"

namespace spanrole {

struct ParamId {
    std::size_t index = 0;
    friend auto operator<=>(const ParamId&, const ParamId&) = default;
};

// Owns every trainable tensor of a model under a stable, unique name.
class ParameterStore {
public:
    ParamId add(std::string name, Tensor initial);

    const Tensor& value(ParamId id) const { return entries_.at(id.index).value; }
    Tensor& value(ParamId id) { return entries_.at(id.index).value; }
    const std::string& name(ParamId id) const { return entries_.at(id.index).name; }
    std::optional<ParamId> find(const std::string& name) const;

    std::size_t size() const noexcept { return entries_.size(); }
    std::vector<ParamId> ids() const;
    std::size_t scalar_count() const noexcept;

    friend bool operator==(const ParameterStore&, const ParameterStore&) = default;

private:
    struct Entry {
        std::string name;
        Tensor value;
        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> entries_;
};

}  // namespace spanrole
