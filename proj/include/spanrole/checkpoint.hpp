#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "spanrole/ensemble.hpp"
#include "spanrole/model.hpp"

namespace spanrole {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointInfo {
    double best_dev_f1 = 0.0;
    int best_epoch = 0;
};

// Static embedding tables are stored inline. Contextual models only record
// the vector width; the vectors themselves are supplied when loading.
nlohmann::json checkpoint_json(const SrlModel& model, const CheckpointInfo& info);
void save_checkpoint(const std::filesystem::path& path, const SrlModel& model, const CheckpointInfo& info);

struct LoadedModel {
    std::shared_ptr<SrlModel> model;
    CheckpointInfo info;
};

// `contextual` is required for contextual checkpoints and ignored otherwise.
LoadedModel model_from_json(const nlohmann::json& j, std::shared_ptr<const WordInputs> contextual = nullptr);
LoadedModel load_checkpoint(const std::filesystem::path& path, std::shared_ptr<const WordInputs> contextual = nullptr);

// FNV-1a 64 of the file bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

// References each base checkpoint by path and digest. Relative base paths are
// resolved against the ensemble file's directory.
void save_ensemble(const std::filesystem::path& path, const EnsembleModel& model,
                   const std::vector<std::filesystem::path>& base_paths, const CheckpointInfo& info);

struct LoadedEnsemble {
    std::shared_ptr<EnsembleModel> model;
    std::vector<std::filesystem::path> base_paths;
    CheckpointInfo info;
};

// Throws DataError when a base file changed since the ensemble was saved.
LoadedEnsemble load_ensemble(const std::filesystem::path& path, std::shared_ptr<const WordInputs> contextual = nullptr);

// True when the file holds an ensemble checkpoint.
bool is_ensemble_checkpoint(const std::filesystem::path& path);

nlohmann::json parameters_json(const ParameterStore& store);
ParameterStore parameters_from_json(const nlohmann::json& j);

}  // namespace spanrole
