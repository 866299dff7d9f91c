#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace spanrole {

// Defaults follow the published configuration for the span model.
struct TrainConfig {
    std::size_t word_dim = 50;  // only used when word vectors are generated
    std::size_t mark_dim = 50;
    std::size_t layers = 4;
    std::size_t hidden = 300;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double l2 = 0.0001;
    double lstm_dropout = 0.1;
    double contextual_dropout = 0.5;
    int epochs = 100;
    int decay_start = 50;  // lr is constant through this epoch
    int decay_every = 25;  // then halves every this many epochs
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 1;

    // Throws DataError for out-of-range values.
    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Mixture-of-experts training schedule.
struct EnsembleConfig {
    double learning_rate = 0.0001;
    std::size_t batch_size = 8;
    int epochs = 20;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 1;
};

// lr(e) = base * 2^-max(0, ceil((e - decay_start) / decay_every)), e >= 1.
double scheduled_learning_rate(const TrainConfig& config, int epoch);

// `key = value` lines; `#` starts a comment; blank lines and [section]
// headers are ignored. Unknown keys are an error.
void apply_config_text(TrainConfig& config, std::istream& in);
TrainConfig load_config(const std::filesystem::path& path);
// Sets one field from its textual value.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace spanrole
