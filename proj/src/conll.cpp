#include "spanrole/conll.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

struct Row {
    std::vector<std::string> fields;
    std::size_t line;
};

// Spans encoded in one bracket column.
std::vector<LabeledSpan> parse_column(const std::vector<Row>& rows, std::size_t column) {
    std::vector<LabeledSpan> spans;
    std::vector<LabeledSpan> open;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const std::string& cell = rows[t].fields[column];
        const int position = static_cast<int>(t) + 1;
        std::size_t k = 0;
        while (k < cell.size() && cell[k] == '(') {
            const std::size_t next = cell.find_first_of("*(", k + 1);
            if (next == std::string::npos || next == k + 1) {
                throw DataError("malformed bracket cell \"" + cell + "\"", rows[t].line);
            }
            open.push_back({position, position, cell.substr(k + 1, next - k - 1)});
            k = next;
        }
        if (k >= cell.size() || cell[k] != '*') {
            throw DataError("malformed bracket cell \"" + cell + "\"", rows[t].line);
        }
        for (++k; k < cell.size(); ++k) {
            if (cell[k] != ')' || open.empty()) {
                throw DataError("malformed bracket cell \"" + cell + "\"", rows[t].line);
            }
            LabeledSpan closed = open.back();
            open.pop_back();
            closed.end = position;
            spans.push_back(std::move(closed));
        }
    }
    if (!open.empty()) {
        throw DataError("unclosed bracket for " + open.back().label, rows.back().line);
    }
    std::sort(spans.begin(), spans.end());
    return spans;
}

void flush_sentence(std::vector<Row>& rows, Corpus& corpus, const std::string& prefix,
                    std::size_t& sentence_count) {
    if (rows.empty()) {
        return;
    }
    ++sentence_count;
    const std::size_t width = rows.front().fields.size();
    for (const auto& row : rows) {
        if (row.fields.size() != width) {
            throw DataError("inconsistent column count within sentence", row.line);
        }
    }
    std::vector<std::string> tokens;
    for (const auto& row : rows) {
        tokens.push_back(row.fields[0]);
    }
    for (std::size_t column = 1; column < width; ++column) {
        PredicateInstance instance;
        instance.id = prefix + std::to_string(sentence_count);
        instance.tokens = tokens;
        std::vector<LabeledSpan> gold;
        bool found_predicate = false;
        for (auto& span : parse_column(rows, column)) {
            if (span.label == "V") {
                if (found_predicate) {
                    throw DataError("column has more than one V span", rows.front().line);
                }
                instance.predicate = span.start;
                found_predicate = true;
            } else {
                gold.push_back(std::move(span));
            }
        }
        if (!found_predicate) {
            throw DataError("column has no V span", rows.front().line);
        }
        instance.gold = std::move(gold);
        validate_instance(instance, rows.front().line);
        corpus.push_back(std::move(instance));
    }
    rows.clear();
}

}  // namespace

Corpus read_conll(std::istream& in, const std::string& id_prefix) {
    Corpus corpus;
    std::vector<Row> rows;
    std::size_t sentence_count = 0;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        std::istringstream fields(text);
        Row row{{}, line};
        for (std::string field; fields >> field;) {
            row.fields.push_back(std::move(field));
        }
        if (row.fields.empty()) {
            flush_sentence(rows, corpus, id_prefix, sentence_count);
            continue;
        }
        rows.push_back(std::move(row));
    }
    flush_sentence(rows, corpus, id_prefix, sentence_count);
    return corpus;
}

Corpus read_conll(const std::filesystem::path& path, const std::string& id_prefix) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return read_conll(in, id_prefix);
}

void write_conll(std::ostream& out, std::span<const PredicateInstance> corpus) {
    std::size_t begin = 0;
    while (begin < corpus.size()) {
        std::size_t end = begin + 1;
        while (end < corpus.size() && corpus[end].id == corpus[begin].id) {
            require(corpus[end].tokens == corpus[begin].tokens,
                    "write_conll: instances of one sentence must share tokens");
            ++end;
        }
        const auto& tokens = corpus[begin].tokens;
        std::vector<std::vector<std::string>> columns;
        for (std::size_t k = begin; k < end; ++k) {
            const auto& instance = corpus[k];
            std::vector<LabeledSpan> spans = instance.gold.value_or(std::vector<LabeledSpan>{});
            spans.push_back({instance.predicate, instance.predicate, "V"});
            std::vector<std::string> cells(tokens.size(), "*");
            std::vector<bool> used(tokens.size(), false);
            for (const auto& s : spans) {
                for (int t = s.start; t <= s.end; ++t) {
                    require(!used[t - 1], "write_conll: spans overlap");
                    used[t - 1] = true;
                }
                cells[s.start - 1] = "(" + s.label + cells[s.start - 1];
                cells[s.end - 1] += ")";
            }
            columns.push_back(std::move(cells));
        }
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            out << tokens[t];
            for (const auto& column : columns) {
                out << '\t' << column[t];
            }
            out << '\n';
        }
        out << '\n';
        begin = end;
    }
}

}  // namespace spanrole
