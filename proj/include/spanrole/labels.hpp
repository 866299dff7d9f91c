#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace spanrole {

// Core roles may fill at most one span per predicate.
const std::set<std::string>& default_core_labels();

// Ordered role inventory R with a core/adjunct partition.
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(std::vector<std::string> names, const std::set<std::string>& core);
    // Core flags follow default_core_labels().
    explicit LabelSet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t index) const { return names_.at(index); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<std::size_t> find(const std::string& name) const;
    // Throws ContractViolation for labels outside the inventory.
    std::size_t index(const std::string& name) const;
    bool is_core(std::size_t index) const { return core_.at(index); }
    bool is_core(const std::string& name) const;
    std::set<std::string> core_names() const;

    friend bool operator==(const LabelSet&, const LabelSet&) = default;

private:
    std::vector<std::string> names_;
    std::vector<bool> core_;
};

}  // namespace spanrole
