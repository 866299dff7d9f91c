#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "spanrole/corpus.hpp"
#include "spanrole/graph.hpp"
#include "spanrole/parameters.hpp"
#include "spanrole/rng.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

// Fixed word vectors. The last row is the all-zero UNK vector.
class EmbeddingTable {
public:
    EmbeddingTable(std::vector<std::string> words, const Tensor& vectors);

    // Text format: `token v1 ... vd` per line; d is taken from the first line.
    static EmbeddingTable load(const std::filesystem::path& path);
    static EmbeddingTable load(std::istream& in);
    // Gaussian vectors with unit-variance entries scaled by 1/sqrt(dim).
    static EmbeddingTable random(std::vector<std::string> words, std::size_t dim, Rng& rng);

    std::size_t dim() const noexcept { return matrix_.cols(); }
    std::size_t vocab_size() const noexcept { return words_.size(); }
    std::size_t unk_row() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const Tensor& matrix() const noexcept { return matrix_; }

    // Exact match, then lowercased match, then UNK.
    std::size_t row_of(const std::string& token) const;
    Tensor lookup(std::span<const std::string> tokens) const;

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    Tensor matrix_;
};

// Precomputed per-token vectors keyed by sentence id (JSON lines:
// {"id": ..., "vectors": [[...], ...]}).
class ContextualVectors {
public:
    static ContextualVectors load(const std::filesystem::path& path);
    static ContextualVectors load(std::istream& in);

    std::size_t dim() const noexcept { return dim_; }
    bool contains(const std::string& id) const { return vectors_.contains(id); }
    // Throws DataError for unknown ids or a row count different from `length`.
    const Tensor& get(const std::string& id, int length) const;
    const Tensor& get(const std::string& id) const;

private:
    std::size_t dim_ = 0;
    std::map<std::string, Tensor> vectors_;
};

Tensor load_contextual(const std::filesystem::path& path, const std::string& sentence_id);

// Where a sentence's x^word rows come from.
class WordInputs {
public:
    explicit WordInputs(EmbeddingTable table) : source_(std::move(table)) {}
    explicit WordInputs(ContextualVectors vectors) : source_(std::move(vectors)) {}

    bool contextual() const noexcept { return std::holds_alternative<ContextualVectors>(source_); }
    std::size_t dim() const noexcept;
    Tensor vectors(const PredicateInstance& instance) const;

    const EmbeddingTable* table() const noexcept { return std::get_if<EmbeddingTable>(&source_); }

private:
    std::variant<EmbeddingTable, ContextualVectors> source_;
};

// Trainable 2 x d_mark table; row 1 marks the predicate, row 0 every other word.
struct MarkEmbedding {
    ParamId table;
    std::size_t dim = 0;

    static MarkEmbedding create(ParameterStore& store, std::size_t dim, Rng& rng);
};

// 0/1 mark per position (1-based predicate).
std::vector<std::size_t> predicate_marks(int length, int predicate);

// x^(1) = [x^word ; x^mark] as a T x (d_word + d_mark) node.
NodeId assemble_inputs(Graph& graph, const Tensor& word_vectors, int predicate, NodeId mark_table);

}  // namespace spanrole
