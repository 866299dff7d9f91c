#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanrole/labels.hpp"

namespace spanrole {

// Token range with 1-based inclusive bounds.
struct Span {
    int start = 1;
    int end = 1;
    friend auto operator<=>(const Span&, const Span&) = default;
};

inline bool overlaps(Span a, Span b) noexcept { return a.start <= b.end && b.start <= a.end; }
inline bool covers(Span s, int position) noexcept { return s.start <= position && position <= s.end; }

struct LabeledSpan {
    int start = 1;
    int end = 1;
    std::string label;

    Span span() const noexcept { return {start, end}; }
    friend auto operator<=>(const LabeledSpan&, const LabeledSpan&) = default;
};

// One sentence with one marked predicate. `gold` is absent for inputs that
// only need predictions.
struct PredicateInstance {
    std::string id;
    std::vector<std::string> tokens;
    int predicate = 1;
    std::optional<std::vector<LabeledSpan>> gold;

    int length() const noexcept { return static_cast<int>(tokens.size()); }
    // Identifies the instance across prediction and gold files.
    std::string key() const { return id + "#" + std::to_string(predicate); }

    friend bool operator==(const PredicateInstance&, const PredicateInstance&) = default;
};

using Corpus = std::vector<PredicateInstance>;

// Throws DataError (tagged with `line` when nonzero) if the instance breaks
// any structural invariant: predicate and spans in range, no overlapping
// gold spans, no gold span covering the predicate, one span per core label.
void validate_instance(const PredicateInstance& instance, std::size_t line = 0,
                       const std::set<std::string>& core = default_core_labels());

PredicateInstance parse_instance(std::string_view json_line, std::size_t line = 0);
Corpus parse_jsonl(std::istream& in);
Corpus parse_jsonl(const std::filesystem::path& path);

std::string to_json_line(const PredicateInstance& instance);
void write_jsonl(std::ostream& out, std::span<const PredicateInstance> corpus);
void write_jsonl(const std::filesystem::path& path, std::span<const PredicateInstance> corpus);

// Labels in order of first appearance across the corpus gold spans.
std::vector<std::string> collect_labels(std::span<const PredicateInstance> corpus);

// Maximal B-r (I-r)* runs. In strict mode an I-r that does not continue a
// run of the same label is an error; otherwise it opens a new span.
std::vector<LabeledSpan> bio_to_spans(std::span<const std::string> tags, bool strict = true);
std::vector<std::string> spans_to_bio(std::span<const LabeledSpan> spans, int length);

}  // namespace spanrole
