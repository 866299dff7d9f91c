#include "spanrole/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<LabeledSpan> parse_spans(const ordered_json& node, std::size_t line) {
    if (!node.is_array()) {
        throw DataError("\"spans\" must be an array", line);
    }
    std::vector<LabeledSpan> spans;
    for (const auto& item : node) {
        if (!item.is_array() || item.size() != 3 || !item[0].is_number_integer() ||
            !item[1].is_number_integer() || !item[2].is_string()) {
            throw DataError("each span must be [start, end, \"LABEL\"]", line);
        }
        spans.push_back({item[0].get<int>(), item[1].get<int>(), item[2].get<std::string>()});
    }
    return spans;
}

PredicateInstance base_instance(const ordered_json& obj, std::size_t line) {
    PredicateInstance instance;
    if (!obj.contains("id") || !obj["id"].is_string()) {
        throw DataError("missing string field \"id\"", line);
    }
    instance.id = obj["id"].get<std::string>();
    if (!obj.contains("tokens") || !obj["tokens"].is_array() || obj["tokens"].empty()) {
        throw DataError("missing non-empty array field \"tokens\"", line);
    }
    for (const auto& token : obj["tokens"]) {
        if (!token.is_string()) {
            throw DataError("tokens must be strings", line);
        }
        instance.tokens.push_back(token.get<std::string>());
    }
    return instance;
}

PredicateInstance with_predicate(PredicateInstance base, const ordered_json& obj, std::size_t line) {
    if (!obj.contains("predicate") || !obj["predicate"].is_number_integer()) {
        throw DataError("missing integer field \"predicate\"", line);
    }
    base.predicate = obj["predicate"].get<int>();
    if (obj.contains("spans")) {
        base.gold = parse_spans(obj["spans"], line);
    }
    validate_instance(base, line);
    return base;
}

std::vector<PredicateInstance> parse_object(const ordered_json& obj, std::size_t line) {
    if (!obj.is_object()) {
        throw DataError("expected a JSON object", line);
    }
    PredicateInstance base = base_instance(obj, line);
    std::vector<PredicateInstance> out;
    if (obj.contains("predicates")) {
        // Multi-predicate sentence: one instance per entry.
        if (!obj["predicates"].is_array()) {
            throw DataError("\"predicates\" must be an array", line);
        }
        for (const auto& entry : obj["predicates"]) {
            out.push_back(with_predicate(base, entry, line));
        }
        return out;
    }
    out.push_back(with_predicate(std::move(base), obj, line));
    return out;
}

}  // namespace

void validate_instance(const PredicateInstance& instance, std::size_t line,
                       const std::set<std::string>& core) {
    const int length = instance.length();
    if (length < 1) {
        throw DataError("instance " + instance.id + " has no tokens", line);
    }
    if (instance.predicate < 1 || instance.predicate > length) {
        throw DataError("instance " + instance.id + ": predicate index out of range", line);
    }
    if (!instance.gold) {
        return;
    }
    const auto& spans = *instance.gold;
    std::set<std::string> used_core;
    for (std::size_t a = 0; a < spans.size(); ++a) {
        const auto& s = spans[a];
        if (s.label.empty()) {
            throw DataError("instance " + instance.id + ": empty span label", line);
        }
        if (s.start < 1 || s.start > s.end || s.end > length) {
            throw DataError("instance " + instance.id + ": span index out of range", line);
        }
        if (covers(s.span(), instance.predicate)) {
            throw DataError("instance " + instance.id + ": span covers the predicate", line);
        }
        if (core.contains(s.label) && !used_core.insert(s.label).second) {
            throw DataError("instance " + instance.id + ": core label " + s.label + " used twice", line);
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (overlaps(s.span(), spans[b].span())) {
                throw DataError("instance " + instance.id + ": overlapping spans", line);
            }
        }
    }
}

PredicateInstance parse_instance(std::string_view json_line, std::size_t line) {
    auto parsed = parse_object(ordered_json::parse(json_line.begin(), json_line.end(), nullptr, false), line);
    if (parsed.size() != 1) {
        throw DataError("expected exactly one predicate", line);
    }
    return std::move(parsed.front());
}

Corpus parse_jsonl(std::istream& in) {
    Corpus corpus;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        const auto obj = ordered_json::parse(text, nullptr, false);
        if (obj.is_discarded()) {
            throw DataError("invalid JSON", line);
        }
        for (auto& instance : parse_object(obj, line)) {
            corpus.push_back(std::move(instance));
        }
    }
    return corpus;
}

Corpus parse_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus file " + path.string());
    }
    return parse_jsonl(in);
}

std::string to_json_line(const PredicateInstance& instance) {
    ordered_json obj;
    obj["id"] = instance.id;
    obj["tokens"] = instance.tokens;
    obj["predicate"] = instance.predicate;
    if (instance.gold) {
        auto spans = ordered_json::array();
        for (const auto& s : *instance.gold) {
            spans.push_back(ordered_json::array({s.start, s.end, s.label}));
        }
        obj["spans"] = std::move(spans);
    }
    return obj.dump();
}

void write_jsonl(std::ostream& out, std::span<const PredicateInstance> corpus) {
    for (const auto& instance : corpus) {
        out << to_json_line(instance) << '\n';
    }
}

void write_jsonl(const std::filesystem::path& path, std::span<const PredicateInstance> corpus) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    write_jsonl(out, corpus);
}

std::vector<std::string> collect_labels(std::span<const PredicateInstance> corpus) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& instance : corpus) {
        if (!instance.gold) {
            continue;
        }
        for (const auto& s : *instance.gold) {
            if (seen.insert(s.label).second) {
                labels.push_back(s.label);
            }
        }
    }
    return labels;
}

std::vector<LabeledSpan> bio_to_spans(std::span<const std::string> tags, bool strict) {
    std::vector<LabeledSpan> spans;
    std::optional<LabeledSpan> open;
    auto close = [&] {
        if (open) {
            spans.push_back(*open);
            open.reset();
        }
    };
    for (std::size_t k = 0; k < tags.size(); ++k) {
        const std::string& tag = tags[k];
        const int position = static_cast<int>(k) + 1;
        if (tag == "O") {
            close();
            continue;
        }
        if (tag.size() < 3 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I')) {
            throw DataError("malformed BIO tag \"" + tag + "\" at position " + std::to_string(position));
        }
        const std::string label = tag.substr(2);
        if (tag[0] == 'I' && open && open->label == label) {
            open->end = position;
            continue;
        }
        if (tag[0] == 'I' && strict) {
            throw DataError("tag \"" + tag + "\" at position " + std::to_string(position) +
                            " does not continue a span of the same label");
        }
        close();
        open = LabeledSpan{position, position, label};
    }
    close();
    return spans;
}

std::vector<std::string> spans_to_bio(std::span<const LabeledSpan> spans, int length) {
    require(length >= 0, "spans_to_bio: negative length");
    std::vector<std::string> tags(static_cast<std::size_t>(length), "O");
    std::vector<bool> used(static_cast<std::size_t>(length), false);
    for (const auto& s : spans) {
        require(s.start >= 1 && s.start <= s.end && s.end <= length, "spans_to_bio: span out of range");
        for (int t = s.start; t <= s.end; ++t) {
            const auto k = static_cast<std::size_t>(t - 1);
            require(!used[k], "spans_to_bio: overlapping spans");
            used[k] = true;
            tags[k] = (t == s.start ? "B-" : "I-") + s.label;
        }
    }
    return tags;
}

}  // namespace spanrole
