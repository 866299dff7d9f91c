#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spanrole/corpus.hpp"

namespace spanrole {

struct SyntheticConfig {
    std::size_t vocab_size = 50;
    std::size_t sentences = 100;
    int min_length = 5;
    int max_length = 12;
    std::vector<std::string> core_labels{"A0", "A1", "A2"};
    std::vector<std::string> adjunct_labels{"TMP", "LOC"};
    std::uint64_t seed = 1;
};

// Seeded corpus whose argument structure follows fixed positional rules, so
// a model can learn it from a few hundred sentences:
//
//   [fillers] [core 1] VERB [core 2] [core 3] ... [fillers] [adjuncts...]
//
// Every argument chunk opens with a word drawn from its label's own start
// vocabulary, followed by shared content words. Adjunct chunks sit at the end
// of the sentence and a label may repeat. The word-class partition depends
// only on vocab_size and the label inventory, never on the seed, so corpora
// drawn with different seeds share one vocabulary.
Corpus gen_synthetic(const SyntheticConfig& config);

}  // namespace spanrole
