#include "spanrole/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spanrole/errors.hpp"
#include "spanrole/init.hpp"

namespace spanrole {
namespace {

std::string lowercase(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, const Tensor& vectors)
    : words_(std::move(words)) {
    require(!vectors.empty() && vectors.rows() == words_.size(),
            "EmbeddingTable: one vector row per word is required");
    matrix_ = Tensor(words_.size() + 1, vectors.cols());
    std::copy(vectors.values().begin(), vectors.values().end(), matrix_.values().begin());
    for (std::size_t k = 0; k < words_.size(); ++k) {
        index_.emplace(words_[k], k);
    }
}

EmbeddingTable EmbeddingTable::load(std::istream& in) {
    std::vector<std::string> words;
    std::vector<double> values;
    std::size_t dim = 0;
    std::string text;
    std::size_t line = 0;
    std::set<std::string> seen;
    while (std::getline(in, text)) {
        ++line;
        std::istringstream fields(text);
        std::string token;
        if (!(fields >> token)) {
            continue;
        }
        std::vector<double> row;
        for (std::string field; fields >> field;) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size() || !std::isfinite(v)) {
                throw DataError("bad embedding value \"" + field + "\"", line);
            }
            row.push_back(v);
        }
        if (dim == 0) {
            dim = row.size();
            if (dim == 0) {
                throw DataError("embedding line has no values", line);
            }
        } else if (row.size() != dim) {
            throw DataError("expected " + std::to_string(dim) + " values, found " +
                                std::to_string(row.size()),
                            line);
        }
        if (!seen.insert(token).second) {
            continue;
        }
        words.push_back(std::move(token));
        values.insert(values.end(), row.begin(), row.end());
    }
    if (words.empty()) {
        throw DataError("embedding file is empty");
    }
    const std::size_t rows = words.size();
    return EmbeddingTable(std::move(words), Tensor(rows, dim, std::move(values)));
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open embedding file " + path.string());
    }
    return load(in);
}

EmbeddingTable EmbeddingTable::random(std::vector<std::string> words, std::size_t dim, Rng& rng) {
    require(!words.empty(), "EmbeddingTable::random: empty vocabulary");
    const std::size_t rows = words.size();
    return EmbeddingTable(std::move(words), gaussian(rows, dim, 1.0 / std::sqrt(static_cast<double>(dim)), rng));
}

std::size_t EmbeddingTable::row_of(const std::string& token) const {
    if (auto it = index_.find(token); it != index_.end()) {
        return it->second;
    }
    if (auto it = index_.find(lowercase(token)); it != index_.end()) {
        return it->second;
    }
    return unk_row();
}

Tensor EmbeddingTable::lookup(std::span<const std::string> tokens) const {
    require(!tokens.empty(), "EmbeddingTable::lookup: empty sentence");
    Tensor out(tokens.size(), dim());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto src = matrix_.row(row_of(tokens[t]));
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    return out;
}

ContextualVectors ContextualVectors::load(std::istream& in) {
    ContextualVectors out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        const auto obj = nlohmann::json::parse(text, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("vectors") || !obj["vectors"].is_array() || obj["vectors"].empty()) {
            throw DataError("expected {\"id\": str, \"vectors\": [[...], ...]}", line);
        }
        const auto& rows = obj["vectors"];
        const std::size_t dim = rows[0].size();
        if (dim == 0 || (out.dim_ != 0 && dim != out.dim_)) {
            throw DataError("inconsistent contextual vector dimensionality", line);
        }
        out.dim_ = dim;
        Tensor matrix(rows.size(), dim);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != dim) {
                throw DataError("inconsistent contextual vector dimensionality", line);
            }
            for (std::size_t c = 0; c < dim; ++c) {
                if (!rows[r][c].is_number()) {
                    throw DataError("contextual vectors must be numeric", line);
                }
                matrix(r, c) = rows[r][c].get<double>();
            }
        }
        out.vectors_.insert_or_assign(obj["id"].get<std::string>(), std::move(matrix));
    }
    if (out.vectors_.empty()) {
        throw DataError("contextual vector file is empty");
    }
    return out;
}

ContextualVectors ContextualVectors::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open contextual vector file " + path.string());
    }
    return load(in);
}

const Tensor& ContextualVectors::get(const std::string& id) const {
    const auto it = vectors_.find(id);
    if (it == vectors_.end()) {
        throw DataError("no contextual vectors for sentence id \"" + id + "\"");
    }
    return it->second;
}

const Tensor& ContextualVectors::get(const std::string& id, int length) const {
    const Tensor& m = get(id);
    if (static_cast<int>(m.rows()) != length) {
        throw DataError("contextual vectors for \"" + id + "\" have " + std::to_string(m.rows()) +
                        " rows, sentence has " + std::to_string(length) + " tokens");
    }
    return m;
}

Tensor load_contextual(const std::filesystem::path& path, const std::string& sentence_id) {
    return ContextualVectors::load(path).get(sentence_id);
}

std::size_t WordInputs::dim() const noexcept {
    return std::visit([](const auto& source) { return source.dim(); }, source_);
}

Tensor WordInputs::vectors(const PredicateInstance& instance) const {
    if (const auto* table = std::get_if<EmbeddingTable>(&source_)) {
        return table->lookup(instance.tokens);
    }
    return std::get<ContextualVectors>(source_).get(instance.id, instance.length());
}

MarkEmbedding MarkEmbedding::create(ParameterStore& store, std::size_t dim, Rng& rng) {
    return MarkEmbedding{store.add("mark_embedding", glorot_uniform(2, dim, rng)), dim};
}

std::vector<std::size_t> predicate_marks(int length, int predicate) {
    require(length >= 1 && predicate >= 1 && predicate <= length, "predicate index out of range");
    std::vector<std::size_t> marks(static_cast<std::size_t>(length), 0);
    marks[static_cast<std::size_t>(predicate - 1)] = 1;
    return marks;
}

NodeId assemble_inputs(Graph& graph, const Tensor& word_vectors, int predicate, NodeId mark_table) {
    const auto marks = predicate_marks(static_cast<int>(word_vectors.rows()), predicate);
    const NodeId words = graph.constant(word_vectors);
    const NodeId mark_rows = graph.gather_rows(mark_table, marks);
    return graph.concat_cols(words, mark_rows);
}

}  // namespace spanrole
