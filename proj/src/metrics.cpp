#include "spanrole/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <set>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

using LabelPair = std::pair<std::string, std::string>;  // (gold, predicted)

// One-to-one pairing of predicted and gold spans with equal boundaries;
// exact label matches are paired first.
std::vector<LabelPair> boundary_pairs(const std::vector<LabeledSpan>& predicted,
                                      const std::vector<LabeledSpan>& gold) {
    std::vector<LabelPair> pairs;
    std::vector<bool> pred_used(predicted.size(), false);
    std::vector<bool> gold_used(gold.size(), false);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (gold_used[g]) continue;
            for (std::size_t p = 0; p < predicted.size(); ++p) {
                if (pred_used[p] || predicted[p].span() != gold[g].span()) continue;
                if (pass == 0 && predicted[p].label != gold[g].label) continue;
                pred_used[p] = gold_used[g] = true;
                pairs.emplace_back(gold[g].label, predicted[p].label);
                break;
            }
        }
    }
    return pairs;
}

std::vector<LabelPair> all_pairs(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    check_aligned(predicted, gold);
    std::vector<LabelPair> pairs;
    for (const auto& [key, gold_spans] : gold) {
        auto local = boundary_pairs(predicted.at(key), gold_spans);
        pairs.insert(pairs.end(), local.begin(), local.end());
    }
    return pairs;
}

std::size_t total_spans(const SpanAnnotations& a) {
    std::size_t n = 0;
    for (const auto& [key, spans] : a) n += spans.size();
    return n;
}

nlohmann::json prf_json(const PrfResult& r) {
    return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
            {"matched", r.matched},     {"predicted", r.predicted}, {"gold", r.gold}};
}

PrfResult prf_from_json(const nlohmann::json& j) {
    PrfResult r;
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.matched = j.at("matched").get<std::size_t>();
    r.predicted = j.at("predicted").get<std::size_t>();
    r.gold = j.at("gold").get<std::size_t>();
    return r;
}

}  // namespace

PrfResult PrfResult::from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
    PrfResult r;
    r.matched = matched;
    r.predicted = predicted;
    r.gold = gold;
    r.precision = predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
    r.recall = gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
    const double denom = r.precision + r.recall;
    r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
    return r;
}

SpanAnnotations annotations_of(const Corpus& corpus) {
    SpanAnnotations out;
    for (const auto& instance : corpus) {
        const auto [it, inserted] =
            out.emplace(instance.key(), instance.gold.value_or(std::vector<LabeledSpan>{}));
        if (!inserted) {
            throw DataError("duplicate instance " + instance.key());
        }
    }
    return out;
}

void check_aligned(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    std::vector<std::string> missing;
    for (const auto& [key, spans] : gold) {
        if (!predicted.contains(key)) missing.push_back(key + " (no prediction)");
    }
    for (const auto& [key, spans] : predicted) {
        if (!gold.contains(key)) missing.push_back(key + " (no gold)");
    }
    if (!missing.empty()) {
        std::string message = "prediction and gold instances differ:";
        for (const auto& m : missing) message += " " + m;
        throw DataError(message);
    }
}

PrfResult labeled_prf(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    check_aligned(predicted, gold);
    std::size_t matched = 0;
    for (const auto& [key, gold_spans] : gold) {
        std::multiset<LabeledSpan> remaining(gold_spans.begin(), gold_spans.end());
        for (const auto& s : predicted.at(key)) {
            if (auto it = remaining.find(s); it != remaining.end()) {
                remaining.erase(it);
                ++matched;
            }
        }
    }
    return PrfResult::from_counts(matched, total_spans(predicted), total_spans(gold));
}

PrfResult boundary_prf(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    const auto pairs = all_pairs(predicted, gold);
    return PrfResult::from_counts(pairs.size(), total_spans(predicted), total_spans(gold));
}

std::optional<double> label_accuracy(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    const auto pairs = all_pairs(predicted, gold);
    if (pairs.empty()) {
        return std::nullopt;
    }
    const auto correct = std::count_if(pairs.begin(), pairs.end(), [](const LabelPair& p) { return p.first == p.second; });
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

ConfusionMatrix confusion_matrix(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    const auto pairs = all_pairs(predicted, gold);
    std::set<std::string> names;
    for (const auto& [g, p] : pairs) {
        names.insert(g);
        names.insert(p);
    }
    ConfusionMatrix m;
    m.labels.assign(names.begin(), names.end());
    m.counts.assign(m.labels.size(), std::vector<std::size_t>(m.labels.size(), 0));
    auto index = [&](const std::string& label) {
        return static_cast<std::size_t>(std::lower_bound(m.labels.begin(), m.labels.end(), label) - m.labels.begin());
    };
    for (const auto& [g, p] : pairs) {
        ++m.counts[index(g)][index(p)];
    }
    return m;
}

std::size_t ConfusionMatrix::count(const std::string& gold, const std::string& predicted) const {
    const auto g = std::find(labels.begin(), labels.end(), gold);
    const auto p = std::find(labels.begin(), labels.end(), predicted);
    if (g == labels.end() || p == labels.end()) {
        return 0;
    }
    return counts[static_cast<std::size_t>(g - labels.begin())][static_cast<std::size_t>(p - labels.begin())];
}

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (std::size_t c : row) n += c;
    return n;
}

std::size_t ConfusionMatrix::diagonal() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) n += counts[k][k];
    return n;
}

std::vector<std::vector<double>> ConfusionMatrix::row_percentages() const {
    std::vector<std::vector<double>> out;
    for (const auto& row : counts) {
        std::size_t total = 0;
        for (std::size_t c : row) total += c;
        std::vector<double> scaled(row.size(), 0.0);
        if (total > 0) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                scaled[k] = 100.0 * static_cast<double>(row[k]) / static_cast<double>(total);
            }
        }
        out.push_back(std::move(scaled));
    }
    return out;
}

void ConfusionMatrix::write_csv(std::ostream& out) const {
    out << "gold\\predicted";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t g = 0; g < labels.size(); ++g) {
        out << labels[g];
        for (std::size_t c : counts[g]) out << ',' << c;
        out << '\n';
    }
}

std::map<std::string, PrfResult> labelwise_f1(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    check_aligned(predicted, gold);
    std::set<std::string> names;
    for (const auto* side : {&predicted, &gold})
        for (const auto& [key, spans] : *side)
            for (const auto& s : spans) names.insert(s.label);
    std::map<std::string, PrfResult> out;
    for (const auto& label : names) {
        SpanAnnotations p;
        SpanAnnotations g;
        for (const auto& [key, spans] : gold) {
            auto& gs = g[key];
            for (const auto& s : spans)
                if (s.label == label) gs.push_back(s);
            auto& ps = p[key];
            for (const auto& s : predicted.at(key))
                if (s.label == label) ps.push_back(s);
        }
        out.emplace(label, labeled_prf(p, g));
    }
    return out;
}

MetricReport evaluate(const SpanAnnotations& predicted, const SpanAnnotations& gold) {
    MetricReport report;
    report.labeled = labeled_prf(predicted, gold);
    report.boundary = boundary_prf(predicted, gold);
    report.label_accuracy = label_accuracy(predicted, gold);
    report.labelwise = labelwise_f1(predicted, gold);
    report.confusion = confusion_matrix(predicted, gold);
    return report;
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json j;
    j["labeled"] = prf_json(labeled);
    j["boundary"] = prf_json(boundary);
    j["label_accuracy"] = label_accuracy ? nlohmann::json(*label_accuracy) : nlohmann::json(nullptr);
    auto& per_label = j["labelwise"] = nlohmann::json::object();
    for (const auto& [label, r] : labelwise) {
        per_label[label] = prf_json(r);
    }
    j["confusion"] = {{"labels", confusion.labels}, {"counts", confusion.counts}};
    return j;
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
    try {
        MetricReport r;
        r.labeled = prf_from_json(j.at("labeled"));
        r.boundary = prf_from_json(j.at("boundary"));
        if (!j.at("label_accuracy").is_null()) {
            r.label_accuracy = j.at("label_accuracy").get<double>();
        }
        for (const auto& [label, v] : j.at("labelwise").items()) {
            r.labelwise.emplace(label, prf_from_json(v));
        }
        r.confusion.labels = j.at("confusion").at("labels").get<std::vector<std::string>>();
        r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed metric report: ") + e.what());
    }
}

void MetricReport::write_text(std::ostream& out) const {
    const auto flags = out.flags();
    out << std::fixed << std::setprecision(2);
    auto row = [&](const std::string& name, const PrfResult& r) {
        out << std::left << std::setw(14) << name << std::right << std::setw(8) << 100.0 * r.precision
            << std::setw(8) << 100.0 * r.recall << std::setw(8) << 100.0 * r.f1 << std::setw(9) << r.matched
            << std::setw(9) << r.predicted << std::setw(9) << r.gold << (r.gold == 0 ? "  (no gold support)" : "")
            << '\n';
    };
    out << std::left << std::setw(14) << "" << std::right << std::setw(8) << "P" << std::setw(8) << "R"
        << std::setw(8) << "F1" << std::setw(9) << "match" << std::setw(9) << "pred" << std::setw(9) << "gold"
        << '\n';
    row("labeled", labeled);
    row("boundary", boundary);
    out << "label accuracy: ";
    if (label_accuracy) {
        out << 100.0 * *label_accuracy << '\n';
    } else {
        out << "undefined (no boundary matches)\n";
    }
    out << "\nper label\n";
    for (const auto& [label, r] : labelwise) {
        row(label, r);
    }
    out.flags(flags);
}

}  // namespace spanrole
