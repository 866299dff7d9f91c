#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spanrole/cli.hpp"
#include "spanrole/corpus.hpp"
#include "spanrole/metrics.hpp"
#include "spanrole/trainer.hpp"

using namespace spanrole;
namespace fs = std::filesystem;

namespace {

const fs::path& dir() {
    static const fs::path d = [] {
        fs::path p = fs::temp_directory_path() / "spanrole_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string at(const std::string& name) { return (dir() / name).string(); }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "spanrole");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void train_small(const std::string& out, const std::string& seed) {
    const auto r = run({"train", "--train", at("train.jsonl"), "--dev", at("dev.jsonl"), "--out", at(out), "--hidden",
                        "8", "--layers", "2", "--epochs", "3", "--batch", "8", "--seed", seed, "--set", "word_dim=6",
                        "--set", "mark_dim=4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
}

}  // namespace

TEST_CASE("data generation and training") {
    REQUIRE(run({"gen-data", "--out", at("train.jsonl"), "--seed", "1", "--sentences", "30"}).code == 0);
    REQUIRE(run({"gen-data", "--out", at("dev.jsonl"), "--seed", "2", "--sentences", "10"}).code == 0);
    CHECK(parse_jsonl(fs::path(at("train.jsonl"))).size() == 30);

    const auto r = run({"train", "--train", at("train.jsonl"), "--dev", at("dev.jsonl"), "--out", at("m1.json"),
                        "--hidden", "8", "--layers", "2", "--epochs", "3", "--batch", "8", "--seed", "1", "--set",
                        "word_dim=6", "--set", "mark_dim=4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream lines(r.out);
    std::string line;
    int epochs = 0;
    while (std::getline(lines, line)) {
        const auto parsed = parse_epoch_log(line);
        REQUIRE(parsed);
        CHECK(parsed->epoch == ++epochs);
    }
    CHECK(epochs == 3);
    train_small("m1_again.json", "1");
    CHECK(slurp(at("m1.json")) == slurp(at("m1_again.json")));
}

TEST_CASE("config file with flag precedence") {
    {
        std::ofstream(at("small.toml")) << "hidden = 6\nlayers = 1\nepochs = 1\nword_dim = 5\nmark_dim = 3\n";
    }
    const auto r = run({"train", "--config", at("small.toml"), "--train", at("train.jsonl"), "--dev", at("dev.jsonl"),
                        "--out", at("cfg.json"), "--hidden", "4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = nlohmann::json::parse(slurp(at("cfg.json")));
    CHECK(j["config"]["hidden"] == 4);
    CHECK(j["config"]["layers"] == 1);
}

TEST_CASE("predict and evaluate") {
    for (const char* mode : {"greedy", "argmax"}) {
        const auto r = run({"predict", "--model", at("m1.json"), "--input", at("dev.jsonl"), "--out",
                            at(std::string("pred_") + mode + ".jsonl"), "--mode", mode});
        REQUIRE_MESSAGE(r.code == 0, r.err);
    }
    REQUIRE(run({"predict", "--model", at("m1.json"), "--input", at("dev.jsonl"), "--out", at("pred_again.jsonl"),
                 "--conll-out", at("pred.conll")})
                .code == 0);
    CHECK(slurp(at("pred_greedy.jsonl")) == slurp(at("pred_again.jsonl")));
    CHECK_FALSE(slurp(at("pred.conll")).empty());

    const auto perfect = run({"evaluate", "--pred", at("dev.jsonl"), "--gold", at("dev.jsonl"), "--out",
                              at("perfect.json"), "--confusion", at("perfect.csv")});
    REQUIRE(perfect.code == 0);
    const auto report = MetricReport::from_json(nlohmann::json::parse(slurp(at("perfect.json"))));
    CHECK(report.labeled.f1 == 1.0);
    CHECK(report.boundary.f1 == 1.0);
    CHECK(*report.label_accuracy == 1.0);
    for (const auto& [label, r] : report.labelwise) CHECK(r.f1 == 1.0);
    CHECK(slurp(at("perfect.csv")).rfind("gold\\predicted", 0) == 0);

    CHECK(run({"evaluate", "--pred", at("pred_greedy.jsonl"), "--gold", at("dev.jsonl")}).code == 0);
    const auto mismatch = run({"evaluate", "--pred", at("pred_greedy.jsonl"), "--gold", at("train.jsonl")});
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("syn") != std::string::npos);
}

TEST_CASE("ensemble with zero epochs predicts like its base") {
    const auto r = run({"ensemble", "--bases", at("m1.json"), "--train", at("train.jsonl"), "--dev", at("dev.jsonl"),
                        "--out", at("ens1.json"), "--epochs", "0"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    REQUIRE(run({"predict", "--model", at("ens1.json"), "--input", at("dev.jsonl"), "--out", at("pred_ens.jsonl")})
                .code == 0);
    CHECK(slurp(at("pred_ens.jsonl")) == slurp(at("pred_greedy.jsonl")));

    train_small("m2.json", "2");
    const auto two = run({"ensemble", "--bases", at("m1.json"), at("m2.json"), "--train", at("train.jsonl"), "--dev",
                          at("dev.jsonl"), "--out", at("ens2.json"), "--epochs", "2"});
    REQUIRE_MESSAGE(two.code == 0, two.err);
    const auto first = parse_epoch_log(two.out.substr(0, two.out.find('\n')));
    REQUIRE(first);
    CHECK(first->epoch == 0);
    const auto j = nlohmann::json::parse(slurp(at("ens2.json")));
    CHECK(j["best_dev_f1"].get<double>() >= first->dev.f1);

    CHECK(run({"ensemble", "--bases", at("m1.json"), at("cfg.json"), "--train", at("train.jsonl"), "--dev",
               at("dev.jsonl"), "--out", at("bad.json")})
              .code == 2);
}

TEST_CASE("analyze") {
    const auto r = run({"analyze", "--model", at("m1.json"), "--query", at("dev.jsonl"), "--reference",
                        at("train.jsonl"), "--k", "3", "--labels-csv", at("labels.csv")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK_FALSE(slurp(at("labels.csv")).empty());
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) CHECK(nlohmann::json::parse(line)["neighbors"].size() <= 3);
    const auto wide = run({"analyze", "--model", at("m1.json"), "--query", at("dev.jsonl"), "--reference",
                           at("dev.jsonl"), "--k", "100000", "--out", at("nn.jsonl")});
    CHECK(wide.code == 0);
    CHECK(wide.err.find("warning") != std::string::npos);
}

TEST_CASE("CoNLL conversion both ways") {
    REQUIRE(run({"convert-conll", "--input", at("dev.jsonl"), "--out", at("dev.conll"), "--reverse"}).code == 0);
    REQUIRE(run({"convert-conll", "--input", at("dev.conll"), "--out", at("dev_back.jsonl")}).code == 0);
    const Corpus back = parse_jsonl(fs::path(at("dev_back.jsonl")));
    const Corpus original = parse_jsonl(fs::path(at("dev.jsonl")));
    REQUIRE(back.size() == original.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].tokens == original[k].tokens);
        CHECK(back[k].predicate == original[k].predicate);
        CHECK(back[k].gold == original[k].gold);
    }
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"train", "--train", at("train.jsonl")}).code == 1);
    CHECK(run({"predict", "--model", at("m1.json"), "--input", at("dev.jsonl"), "--out", at("x"), "--mode", "beam"})
              .code == 1);
    CHECK(run({"--help"}).code == 0);
    { std::ofstream(at("broken.jsonl")) << "{\"id\":\"a\",\"tokens\":[\"x\"],\"predicate\":4}\n"; }
    const auto data = run({"predict", "--model", at("m1.json"), "--input", at("broken.jsonl"), "--out", at("x")});
    CHECK(data.code == 2);
    CHECK(data.err.find("line 1") != std::string::npos);
    const auto numeric = run({"train", "--train", at("train.jsonl"), "--dev", at("dev.jsonl"), "--out",
                              at("nan.json"), "--hidden", "4", "--layers", "1", "--epochs", "5", "--lr", "1e300"});
    CHECK(numeric.code == 3);
}
