#include "spanrole/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "spanrole/errors.hpp"
#include "spanrole/rng.hpp"

namespace spanrole {
namespace {

struct WordClasses {
    std::vector<std::size_t> verbs;
    std::vector<std::size_t> fillers;
    std::vector<std::size_t> content;
    std::vector<std::vector<std::size_t>> starts;  // per label
};

WordClasses partition(std::size_t vocab, std::size_t label_count) {
    std::size_t verbs = std::max<std::size_t>(1, vocab / 10);
    std::size_t starts = std::max<std::size_t>(1, (vocab * 3 / 10) / label_count);
    std::size_t fillers = std::max<std::size_t>(1, vocab / 5);
    if (verbs + fillers + starts * label_count >= vocab) {
        verbs = 1;
        fillers = 1;
        starts = 1;
    }
    WordClasses classes;
    std::size_t next = 0;
    auto take = [&](std::size_t count) {
        std::vector<std::size_t> ids(count);
        std::iota(ids.begin(), ids.end(), next);
        next += count;
        return ids;
    };
    classes.verbs = take(verbs);
    classes.fillers = take(fillers);
    for (std::size_t k = 0; k < label_count; ++k) {
        classes.starts.push_back(take(starts));
    }
    classes.content = take(vocab - next);
    return classes;
}

struct Chunk {
    std::size_t label;
    int length;
};

std::string word(std::size_t id) { return "w" + std::to_string(id); }

template <typename T>
const T& pick_from(const std::vector<T>& items, Rng& rng) {
    return items[rng.below(items.size())];
}

}  // namespace

Corpus gen_synthetic(const SyntheticConfig& config) {
    const std::size_t core_count = config.core_labels.size();
    const std::size_t label_count = core_count + config.adjunct_labels.size();
    if (config.sentences == 0 || config.vocab_size == 0) {
        throw DataError("synthetic config: sentence count and vocabulary size must be positive");
    }
    if (config.core_labels.empty() || config.adjunct_labels.empty()) {
        throw DataError("synthetic config: need at least one core and one adjunct label");
    }
    if (config.min_length < 2 || config.min_length > config.max_length) {
        throw DataError("synthetic config: lengths must satisfy 2 <= min <= max "
                        "(a predicate plus one core argument)");
    }
    if (config.vocab_size < label_count + 3) {
        throw DataError("synthetic config: vocabulary too small for the label inventory");
    }
    std::vector<std::string> labels = config.core_labels;
    labels.insert(labels.end(), config.adjunct_labels.begin(), config.adjunct_labels.end());
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
        throw DataError("synthetic config: duplicate labels");
    }

    const WordClasses classes = partition(config.vocab_size, label_count);
    Rng rng(config.seed);
    Corpus corpus;
    corpus.reserve(config.sentences);

    for (std::size_t n = 0; n < config.sentences; ++n) {
        const int length = rng.between(config.min_length, config.max_length);

        // Core chunks: the first core label sits left of the verb, the rest
        // follow it in inventory order.
        std::vector<std::optional<Chunk>> cores(core_count);
        for (std::size_t k = 0; k < core_count; ++k) {
            if (rng.bernoulli(k == 0 ? 0.8 : 0.6)) {
                cores[k] = Chunk{k, rng.between(1, 3)};
            }
        }
        if (std::none_of(cores.begin(), cores.end(), [](const auto& c) { return c.has_value(); })) {
            const std::size_t k = rng.below(core_count);
            cores[k] = Chunk{k, rng.between(1, 3)};
        }
        std::vector<Chunk> adjuncts;
        for (std::size_t a = 0; a < config.adjunct_labels.size(); ++a) {
            const double u = rng.uniform();
            const int count = u < 0.4 ? 0 : (u < 0.8 ? 1 : 2);
            for (int c = 0; c < count; ++c) {
                adjuncts.push_back(Chunk{core_count + a, rng.between(1, 3)});
            }
        }
        rng.shuffle(std::span<Chunk>(adjuncts));

        auto required = [&] {
            int total = 1;
            for (const auto& c : cores) total += c ? c->length : 0;
            for (const auto& c : adjuncts) total += c.length;
            return total;
        };
        while (required() > length) {
            if (!adjuncts.empty()) {
                adjuncts.pop_back();
                continue;
            }
            auto longest = std::max_element(cores.begin(), cores.end(), [](const auto& a, const auto& b) {
                return (a ? a->length : 0) < (b ? b->length : 0);
            });
            if ((*longest)->length > 1) {
                --(*longest)->length;
                continue;
            }
            const auto present = std::count_if(cores.begin(), cores.end(), [](const auto& c) { return c.has_value(); });
            if (present <= 1) {
                break;
            }
            for (auto it = cores.rbegin(); it != cores.rend(); ++it) {
                if (it->has_value()) {
                    it->reset();
                    break;
                }
            }
        }

        const int slack = length - required();
        const int lead = slack > 0 ? rng.between(0, slack) : 0;
        const int middle = slack - lead;

        PredicateInstance instance;
        instance.id = "syn" + std::to_string(config.seed) + "-" + std::to_string(n + 1);
        std::vector<LabeledSpan> gold;
        auto emit_chunk = [&](const Chunk& chunk) {
            const int start = instance.length() + 1;
            instance.tokens.push_back(word(pick_from(classes.starts[chunk.label], rng)));
            for (int w = 1; w < chunk.length; ++w) {
                instance.tokens.push_back(word(pick_from(classes.content, rng)));
            }
            gold.push_back({start, instance.length(), labels[chunk.label]});
        };
        auto emit_fillers = [&](int count) {
            for (int w = 0; w < count; ++w) {
                instance.tokens.push_back(word(pick_from(classes.fillers, rng)));
            }
        };

        emit_fillers(lead);
        if (cores[0]) {
            emit_chunk(*cores[0]);
        }
        instance.tokens.push_back(word(pick_from(classes.verbs, rng)));
        instance.predicate = instance.length();
        for (std::size_t k = 1; k < core_count; ++k) {
            if (cores[k]) {
                emit_chunk(*cores[k]);
            }
        }
        emit_fillers(middle);
        for (const auto& chunk : adjuncts) {
            emit_chunk(chunk);
        }
        instance.gold = std::move(gold);
        validate_instance(instance, 0, std::set<std::string>(config.core_labels.begin(), config.core_labels.end()));
        corpus.push_back(std::move(instance));
    }
    return corpus;
}

}  // namespace spanrole
