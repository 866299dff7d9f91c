#include "spanrole/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spanrole/analysis.hpp"
#include "spanrole/checkpoint.hpp"
#include "spanrole/conll.hpp"
#include "spanrole/corpus.hpp"
#include "spanrole/errors.hpp"
#include "spanrole/metrics.hpp"
#include "spanrole/synthetic.hpp"
#include "spanrole/trainer.hpp"

namespace spanrole {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

Corpus concat(const Corpus& a, const Corpus& b) {
    Corpus all = a;
    all.insert(all.end(), b.begin(), b.end());
    return all;
}

std::shared_ptr<const WordInputs> load_contextual_inputs(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_shared<const WordInputs>(ContextualVectors::load(path));
}

void check_inputs(const WordInputs& inputs, const Corpus& corpus, const std::string& what) {
    if (inputs.contextual()) {
        for (const auto& instance : corpus) inputs.vectors(instance);
        return;
    }
    const EmbeddingTable& table = *inputs.table();
    std::size_t known = 0;
    std::size_t total = 0;
    for (const auto& instance : corpus) {
        for (const auto& token : instance.tokens) {
            ++total;
            if (table.row_of(token) != table.unk_row()) ++known;
        }
    }
    if (total > 0 && known == 0) {
        throw DataError("no token of the " + what + " corpus appears in the embedding table");
    }
}

struct LoadedPredictor {
    std::shared_ptr<SpanModel> model;
    std::shared_ptr<const SrlModel> base;  // first base of an ensemble, or the model itself
};

LoadedPredictor load_predictor(const fs::path& path, const std::string& contextual) {
    auto inputs = load_contextual_inputs(contextual);
    if (is_ensemble_checkpoint(path)) {
        auto loaded = load_ensemble(path, inputs);
        return {loaded.model, loaded.model->bases().front()};
    }
    auto loaded = load_checkpoint(path, inputs);
    return {loaded.model, loaded.model};
}

DecodeMode parse_mode(const std::string& mode) {
    return mode == "argmax" ? DecodeMode::Argmax : DecodeMode::Greedy;
}

struct TrainArgs {
    std::string config;
    std::string train;
    std::string dev;
    std::string embeddings;
    std::string contextual;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    std::optional<std::size_t> hidden;
    std::optional<std::size_t> layers;
    std::optional<std::size_t> batch;
    std::optional<double> lr;
    std::vector<std::string> set;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    TrainConfig config;
    if (!a.config.empty()) config = load_config(a.config);
    for (const auto& kv : a.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("--set expects key=value, got " + kv);
        set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (a.seed) config.seed = *a.seed;
    if (a.epochs) config.epochs = *a.epochs;
    if (a.hidden) config.hidden = *a.hidden;
    if (a.layers) config.layers = *a.layers;
    if (a.batch) config.batch_size = *a.batch;
    if (a.lr) config.learning_rate = *a.lr;
    config.validate();

    const Corpus train_set = parse_jsonl(fs::path(a.train));
    const Corpus dev_set = parse_jsonl(fs::path(a.dev));
    const Corpus all = concat(train_set, dev_set);

    Rng rng(config.seed);
    std::shared_ptr<const WordInputs> inputs;
    if (!a.contextual.empty()) {
        inputs = load_contextual_inputs(a.contextual);
    } else if (!a.embeddings.empty()) {
        inputs = std::make_shared<const WordInputs>(EmbeddingTable::load(a.embeddings));
    } else {
        std::set<std::string> vocab;
        for (const auto& instance : all) vocab.insert(instance.tokens.begin(), instance.tokens.end());
        Rng embed_rng = rng.fork(0x656d62);
        inputs = std::make_shared<const WordInputs>(EmbeddingTable::random(
            std::vector<std::string>(vocab.begin(), vocab.end()), config.word_dim, embed_rng));
    }
    check_inputs(*inputs, train_set, "training");
    check_inputs(*inputs, dev_set, "development");

    const auto label_names = collect_labels(all);
    if (label_names.empty()) throw DataError("the training corpus has no labeled spans");
    SrlModel model(config, LabelSet(label_names), inputs, rng);

    TrainOptions options = options_for(config);
    options.log = &out;
    const TrainResult result = train(model, train_set, dev_set, options);
    save_checkpoint(a.out, model, {result.best_dev_f1, result.best_epoch});
    err << "best dev F1 " << result.best_dev_f1 << " at epoch " << result.best_epoch << ", saved " << a.out << '\n';
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output,
                const std::string& mode, const std::string& contextual, const std::string& conll_out) {
    const auto predictor = load_predictor(model_path, contextual);
    const Corpus corpus = parse_jsonl(fs::path(input));
    const Corpus predicted = predict_corpus(*predictor.model, corpus, parse_mode(mode));
    write_jsonl(fs::path(output), predicted);
    if (!conll_out.empty()) {
        if (parse_mode(mode) == DecodeMode::Argmax) {
            throw DataError("CoNLL output needs non-overlapping spans; use --mode greedy");
        }
        auto conll = open_output(conll_out);
        write_conll(conll, predicted);
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& pred, const std::string& gold, const std::string& report_path,
                 const std::string& confusion_path, std::ostream& out) {
    const auto report = evaluate(annotations_of(parse_jsonl(fs::path(pred))), annotations_of(parse_jsonl(fs::path(gold))));
    report.write_text(out);
    if (!report_path.empty()) {
        auto file = open_output(report_path);
        file << report.to_json().dump(2) << '\n';
    }
    if (!confusion_path.empty()) {
        auto file = open_output(confusion_path);
        report.confusion.write_csv(file);
    }
    return kExitOk;
}

int cmd_ensemble(const std::vector<std::string>& base_paths, const std::string& train_path,
                 const std::string& dev_path, const std::string& output, const std::string& contextual,
                 EnsembleConfig config, std::ostream& out, std::ostream& err) {
    auto inputs = load_contextual_inputs(contextual);
    std::vector<std::shared_ptr<const SrlModel>> bases;
    std::vector<fs::path> paths;
    for (const auto& p : base_paths) {
        bases.push_back(load_checkpoint(p, inputs).model);
        paths.emplace_back(p);
    }
    check_compatible(bases);
    const Corpus train_set = parse_jsonl(fs::path(train_path));
    const Corpus dev_set = parse_jsonl(fs::path(dev_path));
    EnsembleModel model(bases);
    const TrainResult result = train_ensemble(model, train_set, dev_set, config, &out);
    save_ensemble(output, model, paths, {result.best_dev_f1, result.best_epoch});
    err << "best dev F1 " << result.best_dev_f1 << " at epoch " << result.best_epoch << ", saved " << output << '\n';
    return kExitOk;
}

int cmd_analyze(const std::string& model_path, const std::string& query_path, const std::string& reference_path,
                std::size_t k, const std::string& output, const std::string& labels_csv, const std::string& mode,
                const std::string& contextual, std::ostream& out, std::ostream& err) {
    if (is_ensemble_checkpoint(model_path)) {
        throw DataError("analyze expects a single-model checkpoint");
    }
    const auto loaded = load_checkpoint(model_path, load_contextual_inputs(contextual));
    const Corpus query = parse_jsonl(fs::path(query_path));
    const Corpus reference = parse_jsonl(fs::path(reference_path));
    const auto report = analyze_neighbors(*loaded.model, query, reference, k, parse_mode(mode));
    if (report.truncated) {
        err << "warning: k=" << k << " exceeds the number of reference spans; neighbor lists are truncated\n";
    }
    std::ofstream file;
    std::ostream* sink = &out;
    if (!output.empty()) {
        file = open_output(output);
        sink = &file;
    }
    for (const auto& entry : report.queries) *sink << to_json(entry).dump() << '\n';
    if (!labels_csv.empty()) {
        auto csv = open_output(labels_csv);
        const SrlModel& model = *loaded.model;
        write_label_embeddings(csv, model.labels(), model.parameters().value(model.label_matrix().weights));
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Span-based semantic role labeling"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a model and save the best-dev checkpoint");
    train_cmd->add_option("--config", train_args.config, "key = value config file")->check(CLI::ExistingFile);
    train_cmd->add_option("--train", train_args.train, "training corpus (JSON lines)")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--dev", train_args.dev, "development corpus (JSON lines)")->required()->check(CLI::ExistingFile);
    auto* emb = train_cmd->add_option("--embeddings", train_args.embeddings, "word vector text file")->check(CLI::ExistingFile);
    train_cmd->add_option("--contextual", train_args.contextual, "per-sentence vectors (JSON lines)")
        ->check(CLI::ExistingFile)
        ->excludes(emb);
    train_cmd->add_option("--out", train_args.out, "checkpoint path")->required();
    train_cmd->add_option("--seed", train_args.seed, "random seed");
    train_cmd->add_option("--epochs", train_args.epochs, "number of epochs");
    train_cmd->add_option("--hidden", train_args.hidden, "hidden size");
    train_cmd->add_option("--layers", train_args.layers, "LSTM layers");
    train_cmd->add_option("--batch", train_args.batch, "minibatch size");
    train_cmd->add_option("--lr", train_args.lr, "initial learning rate");
    train_cmd->add_option("--set", train_args.set, "extra key=value config overrides");

    std::string model_path, input, output, mode = "greedy", contextual, conll_out;
    auto* predict_cmd = app.add_subcommand("predict", "decode a corpus");
    predict_cmd->add_option("--model", model_path, "checkpoint or ensemble checkpoint")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--input", input, "corpus to label (JSON lines)")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--out", output, "prediction file (JSON lines)")->required();
    predict_cmd->add_option("--mode", mode, "decoder")->check(CLI::IsMember({"greedy", "argmax"}));
    predict_cmd->add_option("--contextual", contextual, "per-sentence vectors for contextual models")->check(CLI::ExistingFile);
    predict_cmd->add_option("--conll-out", conll_out, "also write CoNLL bracket columns");

    std::string pred_path, gold_path, report_path, confusion_path;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold spans");
    evaluate_cmd->add_option("--pred", pred_path, "predictions (JSON lines)")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--gold", gold_path, "gold corpus (JSON lines)")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--out", report_path, "report JSON path");
    evaluate_cmd->add_option("--confusion", confusion_path, "confusion matrix CSV path");

    std::vector<std::string> bases;
    std::string ens_train, ens_dev, ens_out, ens_contextual;
    EnsembleConfig ens_config;
    auto* ensemble_cmd = app.add_subcommand("ensemble", "train a mixture over frozen base checkpoints");
    ensemble_cmd->add_option("--bases", bases, "base checkpoints")->required()->expected(1, -1)->check(CLI::ExistingFile);
    ensemble_cmd->add_option("--train", ens_train, "training corpus")->required()->check(CLI::ExistingFile);
    ensemble_cmd->add_option("--dev", ens_dev, "development corpus")->required()->check(CLI::ExistingFile);
    ensemble_cmd->add_option("--out", ens_out, "ensemble checkpoint path")->required();
    ensemble_cmd->add_option("--contextual", ens_contextual, "per-sentence vectors")->check(CLI::ExistingFile);
    ensemble_cmd->add_option("--seed", ens_config.seed, "random seed");
    ensemble_cmd->add_option("--epochs", ens_config.epochs, "number of epochs")->check(CLI::NonNegativeNumber);
    ensemble_cmd->add_option("--batch", ens_config.batch_size, "minibatch size")->check(CLI::PositiveNumber);
    ensemble_cmd->add_option("--lr", ens_config.learning_rate, "learning rate")->check(CLI::PositiveNumber);

    std::string an_model, an_query, an_reference, an_out, an_labels, an_mode = "greedy", an_contextual;
    std::size_t k = 10;
    auto* analyze_cmd = app.add_subcommand("analyze", "nearest-neighbor spans and label vectors");
    analyze_cmd->add_option("--model", an_model, "checkpoint")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--query", an_query, "corpus whose predicted spans are queried")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--reference", an_reference, "corpus whose gold spans are searched")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--k", k, "neighbors per span")->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--out", an_out, "neighbor report (JSON lines); stdout when omitted");
    analyze_cmd->add_option("--labels-csv", an_labels, "label weight rows as CSV");
    analyze_cmd->add_option("--mode", an_mode, "decoder")->check(CLI::IsMember({"greedy", "argmax"}));
    analyze_cmd->add_option("--contextual", an_contextual, "per-sentence vectors")->check(CLI::ExistingFile);

    SyntheticConfig syn;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic corpus");
    gen_cmd->add_option("--out", gen_out, "corpus path (JSON lines)")->required();
    gen_cmd->add_option("--seed", syn.seed, "random seed");
    gen_cmd->add_option("--sentences", syn.sentences, "number of sentences");
    gen_cmd->add_option("--vocab", syn.vocab_size, "vocabulary size");
    gen_cmd->add_option("--min-length", syn.min_length, "shortest sentence");
    gen_cmd->add_option("--max-length", syn.max_length, "longest sentence");

    std::string conv_in, conv_out, prefix = "s";
    bool to_conll = false;
    auto* convert_cmd = app.add_subcommand("convert-conll", "convert CoNLL bracket columns to JSON lines");
    convert_cmd->add_option("--input", conv_in, "input file")->required()->check(CLI::ExistingFile);
    convert_cmd->add_option("--out", conv_out, "output file")->required();
    convert_cmd->add_option("--prefix", prefix, "sentence id prefix");
    convert_cmd->add_flag("--reverse", to_conll, "convert JSON lines to CoNLL columns instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*train_cmd) return cmd_train(train_args, out, err);
        if (*predict_cmd) return cmd_predict(model_path, input, output, mode, contextual, conll_out);
        if (*evaluate_cmd) return cmd_evaluate(pred_path, gold_path, report_path, confusion_path, out);
        if (*ensemble_cmd) return cmd_ensemble(bases, ens_train, ens_dev, ens_out, ens_contextual, ens_config, out, err);
        if (*analyze_cmd) {
            return cmd_analyze(an_model, an_query, an_reference, k, an_out, an_labels, an_mode, an_contextual, out, err);
        }
        if (*gen_cmd) {
            write_jsonl(fs::path(gen_out), gen_synthetic(syn));
            return kExitOk;
        }
        if (*convert_cmd) {
            if (to_conll) {
                auto file = open_output(conv_out);
                write_conll(file, parse_jsonl(fs::path(conv_in)));
            } else {
                write_jsonl(fs::path(conv_out), read_conll(fs::path(conv_in), prefix));
            }
            return kExitOk;
        }
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace spanrole
