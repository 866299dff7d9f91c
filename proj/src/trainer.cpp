#include "spanrole/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spanrole/adam.hpp"
#include "spanrole/errors.hpp"

namespace spanrole {

std::string format_epoch_log(const EpochLog& log) {
    auto shortest = [](double v) {
        char buffer[32];
        const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
        return std::string(buffer, result.ptr);
    };
    return "epoch=" + std::to_string(log.epoch) + " loss=" + shortest(log.loss) + " dev_p=" +
           shortest(log.dev.precision) + " dev_r=" + shortest(log.dev.recall) + " dev_f1=" + shortest(log.dev.f1) +
           " lr=" + shortest(log.learning_rate);
}

std::optional<EpochLog> parse_epoch_log(const std::string& line) {
    std::istringstream in(line);
    EpochLog log;
    std::string field;
    int seen = 0;
    while (in >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        try {
            if (key == "epoch") log.epoch = std::stoi(value);
            else if (key == "loss") log.loss = std::stod(value);
            else if (key == "dev_p") log.dev.precision = std::stod(value);
            else if (key == "dev_r") log.dev.recall = std::stod(value);
            else if (key == "dev_f1") log.dev.f1 = std::stod(value);
            else if (key == "lr") log.learning_rate = std::stod(value);
            else return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        ++seen;
    }
    if (seen != 6) return std::nullopt;
    return log;
}

TrainOptions options_for(const TrainConfig& config) {
    TrainOptions o;
    o.batch_size = config.batch_size;
    o.epochs = config.epochs;
    o.learning_rate = [config](int epoch) { return scheduled_learning_rate(config, epoch); };
    o.l2 = config.l2;
    o.beta1 = config.beta1;
    o.beta2 = config.beta2;
    o.seed = config.seed;
    return o;
}

TrainOptions options_for(const EnsembleConfig& config) {
    TrainOptions o;
    o.batch_size = config.batch_size;
    o.epochs = config.epochs;
    o.learning_rate = [lr = config.learning_rate](int) { return lr; };
    o.l2 = 0.0;
    o.beta1 = config.beta1;
    o.beta2 = config.beta2;
    o.seed = config.seed;
    o.evaluate_initial = true;
    return o;
}

std::vector<std::vector<std::size_t>> length_batches(const Corpus& corpus, std::size_t batch_size, Rng& rng) {
    require(batch_size > 0, "length_batches: batch size must be positive");
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return corpus[a].length() < corpus[b].length(); });
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t k = 0; k < order.size(); k += batch_size) {
        const auto end = std::min(order.size(), k + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(k),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    rng.shuffle(std::span<std::vector<std::size_t>>(batches));
    return batches;
}

Corpus predict_corpus(const SpanModel& model, const Corpus& corpus, DecodeMode mode) {
    Corpus out;
    out.reserve(corpus.size());
    for (const auto& instance : corpus) {
        PredicateInstance copy = instance;
        copy.gold = model.predict(instance, mode);
        out.push_back(std::move(copy));
    }
    return out;
}

PrfResult evaluate_model(const SpanModel& model, const Corpus& corpus, DecodeMode mode) {
    return labeled_prf(annotations_of(predict_corpus(model, corpus, mode)), annotations_of(corpus));
}

double corpus_loss(const SpanModel& model, const Corpus& corpus) {
    double total = 0.0;
    for (const auto& instance : corpus) {
        const auto targets = training_targets(instance, model.labels());
        total += sample_loss(model.scores(instance), targets);
    }
    return total;
}

namespace {

double batch_step(SpanModel& model, const Corpus& data, const std::vector<std::size_t>& batch,
                  const TrainOptions& options, Adam& adam, double lr, Rng& rng) {
    GradientMap grads;
    double loss = 0.0;
    for (std::size_t index : batch) {
        const PredicateInstance& instance = data[index];
        Graph graph;
        const NodeId scores = model.build_scores(graph, instance, true, &rng);
        const auto targets = training_targets(instance, model.labels());
        const NodeId sample = sample_loss(graph, scores, targets);
        const double value = graph.value(sample).item();
        if (!std::isfinite(value)) {
            throw NumericError("non-finite loss on instance " + instance.key());
        }
        loss += value;
        accumulate(grads, graph.backward(sample));
    }
    if (options.l2 > 0.0) {
        const ParameterStore& store = model.parameters();
        Graph graph;
        std::vector<NodeId> params;
        for (ParamId id : store.ids()) params.push_back(graph.parameter(store, id));
        const NodeId penalty = l2_penalty(graph, params, options.l2);
        loss += graph.value(penalty).item();
        accumulate(grads, graph.backward(penalty));
    }
    adam.step(model.parameters(), grads, lr);
    return loss;
}

}  // namespace

TrainResult train(SpanModel& model, const Corpus& train_set, const Corpus& dev_set, const TrainOptions& options) {
    require(options.epochs >= 0, "train: negative epoch count");
    require(static_cast<bool>(options.learning_rate), "train: learning-rate schedule missing");
    for (const auto& instance : train_set) {
        if (!instance.gold) throw DataError("training instance " + instance.key() + " has no gold spans");
    }

    TrainResult result;
    result.best_dev_f1 = -1.0;
    ParameterStore best = model.parameters();
    auto record = [&](const EpochLog& entry) {
        result.history.push_back(entry);
        if (options.log) *options.log << format_epoch_log(entry) << '\n' << std::flush;
        if (entry.dev.f1 > result.best_dev_f1) {
            result.best_dev_f1 = entry.dev.f1;
            result.best_epoch = entry.epoch;
            best = model.parameters();
        }
        return !options.after_epoch || options.after_epoch(entry);
    };

    bool keep_going = true;
    if (options.evaluate_initial) {
        EpochLog entry;
        entry.epoch = 0;
        entry.loss = corpus_loss(model, train_set);
        entry.dev = evaluate_model(model, dev_set);
        keep_going = record(entry);
    }

    Adam adam(options.beta1, options.beta2);
    const Rng root(options.seed);
    for (int epoch = 1; keep_going && epoch <= options.epochs; ++epoch) {
        Rng batch_rng = root.fork(2 * static_cast<std::uint64_t>(epoch));
        Rng dropout_rng = root.fork(2 * static_cast<std::uint64_t>(epoch) + 1);
        EpochLog entry;
        entry.epoch = epoch;
        entry.learning_rate = options.learning_rate(epoch);
        for (const auto& batch : length_batches(train_set, options.batch_size, batch_rng)) {
            entry.loss += batch_step(model, train_set, batch, options, adam, entry.learning_rate, dropout_rng);
        }
        if (!std::isfinite(entry.loss)) {
            throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
        }
        entry.dev = evaluate_model(model, dev_set);
        keep_going = record(entry);
    }
    if (!result.history.empty()) {
        model.parameters() = best;
    } else {
        result.best_dev_f1 = 0.0;
    }
    return result;
}

TrainResult train_ensemble(EnsembleModel& model, const Corpus& train_set, const Corpus& dev_set,
                           const EnsembleConfig& config, std::ostream* log) {
    TrainOptions options = options_for(config);
    options.log = log;
    return train(model, train_set, dev_set, options);
}

}  // namespace spanrole
