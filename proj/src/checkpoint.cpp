#include "spanrole/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << j.dump() << '\n';
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

void check_format(const json& j, const std::string& expected) {
    if (!j.is_object() || j.value("format", "") != expected) {
        throw DataError("not a " + expected + " file");
    }
    if (j.value("version", 0) != kCheckpointVersion) {
        throw DataError("unsupported " + expected + " version " + std::to_string(j.value("version", 0)));
    }
}

json inputs_json(const WordInputs& inputs) {
    if (inputs.contextual()) {
        return {{"kind", "contextual"}, {"dim", inputs.dim()}};
    }
    const EmbeddingTable& table = *inputs.table();
    const Tensor& m = table.matrix();
    json vectors = json::array();
    for (std::size_t r = 0; r < table.vocab_size(); ++r) {
        const auto row = m.row(r);
        vectors.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"kind", "static"}, {"dim", inputs.dim()}, {"words", table.words()}, {"vectors", std::move(vectors)}};
}

std::shared_ptr<const WordInputs> inputs_from_json(const json& j, std::shared_ptr<const WordInputs> contextual) {
    const std::string kind = j.at("kind").get<std::string>();
    const auto dim = j.at("dim").get<std::size_t>();
    if (kind == "contextual") {
        if (!contextual || !contextual->contextual()) {
            throw DataError("checkpoint was trained on contextual vectors; supply them with --contextual");
        }
        if (contextual->dim() != dim) {
            throw DataError("contextual vectors have width " + std::to_string(contextual->dim()) +
                            ", checkpoint expects " + std::to_string(dim));
        }
        return contextual;
    }
    if (kind != "static") {
        throw DataError("unknown input kind " + kind);
    }
    auto words = j.at("words").get<std::vector<std::string>>();
    const auto& rows = j.at("vectors");
    if (rows.size() != words.size()) {
        throw DataError("embedding table has " + std::to_string(rows.size()) + " vectors for " +
                        std::to_string(words.size()) + " words");
    }
    std::vector<double> data;
    data.reserve(words.size() * dim);
    for (const auto& row : rows) {
        auto values = row.get<std::vector<double>>();
        if (values.size() != dim) throw DataError("embedding vector of the wrong width");
        data.insert(data.end(), values.begin(), values.end());
    }
    if (words.empty()) {
        throw DataError("checkpoint embedding table is empty");
    }
    Tensor matrix(words.size(), dim, std::move(data));
    return std::make_shared<const WordInputs>(EmbeddingTable(std::move(words), matrix));
}

}  // namespace

json parameters_json(const ParameterStore& store) {
    json out = json::array();
    for (ParamId id : store.ids()) {
        const Tensor& t = store.value(id);
        out.push_back({{"name", store.name(id)},
                       {"rows", t.rows()},
                       {"cols", t.cols()},
                       {"data", std::vector<double>(t.values().begin(), t.values().end())}});
    }
    return out;
}

ParameterStore parameters_from_json(const json& j) {
    ParameterStore store;
    for (const auto& p : j) {
        const auto rows = p.at("rows").get<std::size_t>();
        const auto cols = p.at("cols").get<std::size_t>();
        auto data = p.at("data").get<std::vector<double>>();
        if (rows == 0 || cols == 0 || data.size() != rows * cols) {
            throw DataError("parameter " + p.at("name").get<std::string>() + " has inconsistent shape");
        }
        store.add(p.at("name").get<std::string>(), Tensor(rows, cols, std::move(data)));
    }
    return store;
}

json checkpoint_json(const SrlModel& model, const CheckpointInfo& info) {
    const auto core = model.labels().core_names();
    return {{"format", "spanrole-checkpoint"},
            {"version", kCheckpointVersion},
            {"config", to_json(model.config())},
            {"labels", model.labels().names()},
            {"core", std::vector<std::string>(core.begin(), core.end())},
            {"inputs", inputs_json(model.inputs())},
            {"parameters", parameters_json(model.parameters())},
            {"best_dev_f1", info.best_dev_f1},
            {"best_epoch", info.best_epoch}};
}

void save_checkpoint(const std::filesystem::path& path, const SrlModel& model, const CheckpointInfo& info) {
    write_json(path, checkpoint_json(model, info));
}

LoadedModel model_from_json(const json& j, std::shared_ptr<const WordInputs> contextual) {
    check_format(j, "spanrole-checkpoint");
    try {
        TrainConfig config = train_config_from_json(j.at("config"));
        const auto core = j.at("core").get<std::set<std::string>>();
        LabelSet labels(j.at("labels").get<std::vector<std::string>>(), core);
        auto inputs = inputs_from_json(j.at("inputs"), std::move(contextual));
        LoadedModel out;
        out.model = std::make_shared<SrlModel>(std::move(config), std::move(labels), std::move(inputs),
                                               parameters_from_json(j.at("parameters")));
        out.info.best_dev_f1 = j.value("best_dev_f1", 0.0);
        out.info.best_epoch = j.value("best_epoch", 0);
        return out;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

LoadedModel load_checkpoint(const std::filesystem::path& path, std::shared_ptr<const WordInputs> contextual) {
    try {
        return model_from_json(read_json(path), std::move(contextual));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

void save_ensemble(const std::filesystem::path& path, const EnsembleModel& model,
                   const std::vector<std::filesystem::path>& base_paths, const CheckpointInfo& info) {
    require(base_paths.size() == model.size(), "save_ensemble: one path per base model is required");
    json bases = json::array();
    for (const auto& base : base_paths) {
        bases.push_back({{"path", base.string()}, {"digest", file_digest(base)}});
    }
    write_json(path, {{"format", "spanrole-ensemble"},
                      {"version", kCheckpointVersion},
                      {"bases", std::move(bases)},
                      {"parameters", parameters_json(model.parameters())},
                      {"best_dev_f1", info.best_dev_f1},
                      {"best_epoch", info.best_epoch}});
}

LoadedEnsemble load_ensemble(const std::filesystem::path& path, std::shared_ptr<const WordInputs> contextual) {
    const json j = read_json(path);
    check_format(j, "spanrole-ensemble");
    try {
        LoadedEnsemble out;
        std::vector<std::shared_ptr<const SrlModel>> bases;
        for (const auto& entry : j.at("bases")) {
            std::filesystem::path base = entry.at("path").get<std::string>();
            if (base.is_relative() && !std::filesystem::exists(base)) {
                base = path.parent_path() / base;
            }
            if (file_digest(base) != entry.at("digest").get<std::string>()) {
                throw DataError("base checkpoint " + base.string() + " changed since the ensemble was saved");
            }
            bases.push_back(load_checkpoint(base, contextual).model);
            out.base_paths.push_back(base);
        }
        out.model = std::make_shared<EnsembleModel>(std::move(bases), parameters_from_json(j.at("parameters")));
        out.info.best_dev_f1 = j.value("best_dev_f1", 0.0);
        out.info.best_epoch = j.value("best_epoch", 0);
        return out;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": malformed ensemble checkpoint: " + e.what());
    }
}

bool is_ensemble_checkpoint(const std::filesystem::path& path) {
    const json j = read_json(path);
    return j.is_object() && j.value("format", "") == "spanrole-ensemble";
}

}  // namespace spanrole
