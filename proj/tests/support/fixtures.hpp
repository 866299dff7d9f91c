#pragma once

// Small models and corpora shared by the tests.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "spanrole/corpus.hpp"
#include "spanrole/model.hpp"
#include "spanrole/synthetic.hpp"

namespace fixture {

inline spanrole::Corpus synthetic(std::uint64_t seed, std::size_t sentences) {
    spanrole::SyntheticConfig config;
    config.seed = seed;
    config.sentences = sentences;
    return spanrole::gen_synthetic(config);
}

inline spanrole::TrainConfig small_config(std::size_t hidden = 8, std::size_t layers = 2) {
    spanrole::TrainConfig c;
    c.word_dim = 6;
    c.mark_dim = 4;
    c.hidden = hidden;
    c.layers = layers;
    c.batch_size = 16;
    return c;
}

inline std::shared_ptr<const spanrole::WordInputs> random_inputs(const spanrole::Corpus& corpus, std::size_t dim,
                                                                 std::uint64_t seed = 1) {
    std::set<std::string> vocab;
    for (const auto& inst : corpus) vocab.insert(inst.tokens.begin(), inst.tokens.end());
    spanrole::Rng rng(seed);
    return std::make_shared<const spanrole::WordInputs>(
        spanrole::EmbeddingTable::random(std::vector<std::string>(vocab.begin(), vocab.end()), dim, rng));
}

inline std::shared_ptr<spanrole::SrlModel> model(const spanrole::Corpus& corpus, std::uint64_t seed,
                                                 spanrole::TrainConfig config = small_config()) {
    config.seed = seed;
    spanrole::Rng rng(seed);
    return std::make_shared<spanrole::SrlModel>(config, spanrole::LabelSet(spanrole::collect_labels(corpus)),
                                                random_inputs(corpus, config.word_dim), rng);
}

}  // namespace fixture
