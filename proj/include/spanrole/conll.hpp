#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "spanrole/corpus.hpp"

namespace spanrole {

// CoNLL-2005 props-style columns: the word, then one bracket column per
// predicate ("(A0*", "*", "*)", "(V*)"). Sentences are separated by blank
// lines. Each column's V span marks the predicate and is dropped from the
// gold set; sentence ids are `<prefix><n>` with n counting from 1.
Corpus read_conll(std::istream& in, const std::string& id_prefix = "s");
Corpus read_conll(const std::filesystem::path& path, const std::string& id_prefix = "s");

// Inverse of read_conll. Consecutive instances sharing an id form one
// sentence. Spans must not overlap.
void write_conll(std::ostream& out, std::span<const PredicateInstance> corpus);

}  // namespace spanrole
