#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spanrole/config.hpp"
#include "spanrole/corpus.hpp"
#include "spanrole/ensemble.hpp"
#include "spanrole/metrics.hpp"
#include "spanrole/model.hpp"
#include "spanrole/rng.hpp"

namespace spanrole {

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;  // summed training loss including the L2 term
    PrfResult dev;
    double learning_rate = 0.0;
};

// `epoch=3 loss=12.5 dev_p=0.8 dev_r=0.7 dev_f1=0.746667 lr=0.001`
std::string format_epoch_log(const EpochLog& log);
// Inverse of format_epoch_log; nullopt for any other line.
std::optional<EpochLog> parse_epoch_log(const std::string& line);

struct TrainOptions {
    std::size_t batch_size = 32;
    int epochs = 100;
    std::function<double(int)> learning_rate;  // per 1-based epoch
    double l2 = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 1;
    // Score the untrained model as epoch 0 so it can be selected.
    bool evaluate_initial = false;
    std::ostream* log = nullptr;
    // Called after every epoch; returning false stops training.
    std::function<bool(const EpochLog&)> after_epoch;
};

TrainOptions options_for(const TrainConfig& config);
TrainOptions options_for(const EnsembleConfig& config);

struct TrainResult {
    std::vector<EpochLog> history;
    double best_dev_f1 = 0.0;
    int best_epoch = 0;
};

// Index batches of similar-length instances, in shuffled batch order.
std::vector<std::vector<std::size_t>> length_batches(const Corpus& corpus, std::size_t batch_size, Rng& rng);

// Minibatch Adam on the summed loss. The parameters of the best dev epoch
// (greedy labeled F1, earliest on ties) are restored on return. Throws
// NumericError on a non-finite loss.
TrainResult train(SpanModel& model, const Corpus& train_set, const Corpus& dev_set, const TrainOptions& options);

// Only the mixture parameters change; the bases stay frozen.
TrainResult train_ensemble(EnsembleModel& model, const Corpus& train_set, const Corpus& dev_set,
                           const EnsembleConfig& config, std::ostream* log = nullptr);

// Copies of `corpus` whose gold field holds the model's predictions.
Corpus predict_corpus(const SpanModel& model, const Corpus& corpus, DecodeMode mode);
PrfResult evaluate_model(const SpanModel& model, const Corpus& corpus, DecodeMode mode = DecodeMode::Greedy);
// Summed span-selection loss without regularization, inference mode.
double corpus_loss(const SpanModel& model, const Corpus& corpus);

}  // namespace spanrole
