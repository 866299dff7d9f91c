#include "spanrole/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\"'");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = text.find_last_not_of(" \t\r\"'");
    return text.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        T out{};
        if constexpr (std::is_floating_point_v<T>) {
            out = static_cast<T>(std::stod(value, &used));
        } else if constexpr (std::is_signed_v<T>) {
            out = static_cast<T>(std::stoll(value, &used));
        } else {
            if (!value.empty() && value[0] == '-') {
                throw std::invalid_argument("negative");
            }
            out = static_cast<T>(std::stoull(value, &used));
        }
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return out;
    } catch (const std::logic_error&) {
        throw DataError("config key " + key + ": cannot parse \"" + value + "\"");
    }
}

}  // namespace

void TrainConfig::validate() const {
    auto check = [](bool ok, const char* what) {
        if (!ok) {
            throw DataError(std::string("invalid config: ") + what);
        }
    };
    check(word_dim > 0 && mark_dim > 0 && hidden > 0, "dimensions must be positive");
    check(layers >= 1, "layers must be at least 1");
    check(batch_size >= 1, "batch_size must be at least 1");
    check(learning_rate > 0.0, "learning_rate must be positive");
    check(l2 >= 0.0, "l2 must be non-negative");
    check(lstm_dropout >= 0.0 && lstm_dropout < 1.0, "lstm_dropout must be in [0, 1)");
    check(contextual_dropout >= 0.0 && contextual_dropout < 1.0, "contextual_dropout must be in [0, 1)");
    check(epochs >= 0, "epochs must be non-negative");
    check(decay_start >= 0 && decay_every >= 1, "decay schedule must be positive");
    check(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "Adam betas must be in [0, 1)");
}

double scheduled_learning_rate(const TrainConfig& config, int epoch) {
    require(epoch >= 1, "scheduled_learning_rate: epochs count from 1");
    const int past = epoch - config.decay_start;
    if (past <= 0) {
        return config.learning_rate;
    }
    const int halvings = (past + config.decay_every - 1) / config.decay_every;
    return std::ldexp(config.learning_rate, -halvings);
}

void set_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
    if (key == "word_dim") config.word_dim = parse_number<std::size_t>(key, value);
    else if (key == "mark_dim") config.mark_dim = parse_number<std::size_t>(key, value);
    else if (key == "layers") config.layers = parse_number<std::size_t>(key, value);
    else if (key == "hidden") config.hidden = parse_number<std::size_t>(key, value);
    else if (key == "batch_size") config.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "learning_rate") config.learning_rate = parse_number<double>(key, value);
    else if (key == "l2") config.l2 = parse_number<double>(key, value);
    else if (key == "lstm_dropout") config.lstm_dropout = parse_number<double>(key, value);
    else if (key == "contextual_dropout") config.contextual_dropout = parse_number<double>(key, value);
    else if (key == "epochs") config.epochs = parse_number<int>(key, value);
    else if (key == "decay_start") config.decay_start = parse_number<int>(key, value);
    else if (key == "decay_every") config.decay_every = parse_number<int>(key, value);
    else if (key == "beta1") config.beta1 = parse_number<double>(key, value);
    else if (key == "beta2") config.beta2 = parse_number<double>(key, value);
    else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
    else throw DataError("unknown config key: " + key);
}

void apply_config_text(TrainConfig& config, std::istream& in) {
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) {
            text.erase(hash);
        }
        const std::string stripped = trim(text);
        if (stripped.empty() || stripped.front() == '[') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw DataError("expected key = value", line);
        }
        try {
            set_config_value(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        } catch (const DataError& e) {
            throw DataError(e.what(), line);
        }
    }
}

TrainConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config file " + path.string());
    }
    TrainConfig config;
    apply_config_text(config, in);
    return config;
}

nlohmann::json to_json(const TrainConfig& c) {
    return nlohmann::json{
        {"word_dim", c.word_dim},
        {"mark_dim", c.mark_dim},
        {"layers", c.layers},
        {"hidden", c.hidden},
        {"batch_size", c.batch_size},
        {"learning_rate", c.learning_rate},
        {"l2", c.l2},
        {"lstm_dropout", c.lstm_dropout},
        {"contextual_dropout", c.contextual_dropout},
        {"epochs", c.epochs},
        {"decay_start", c.decay_start},
        {"decay_every", c.decay_every},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"seed", c.seed},
    };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    try {
        c.word_dim = j.at("word_dim").get<std::size_t>();
        c.mark_dim = j.at("mark_dim").get<std::size_t>();
        c.layers = j.at("layers").get<std::size_t>();
        c.hidden = j.at("hidden").get<std::size_t>();
        c.batch_size = j.at("batch_size").get<std::size_t>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.l2 = j.at("l2").get<double>();
        c.lstm_dropout = j.at("lstm_dropout").get<double>();
        c.contextual_dropout = j.at("contextual_dropout").get<double>();
        c.epochs = j.at("epochs").get<int>();
        c.decay_start = j.at("decay_start").get<int>();
        c.decay_every = j.at("decay_every").get<int>();
        c.beta1 = j.at("beta1").get<double>();
        c.beta2 = j.at("beta2").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed config in checkpoint: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace spanrole
