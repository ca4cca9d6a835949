// kgc: curriculum scheduling toolkit command line.
//
//   kgc synth    generate the synthetic train/test manifests
//   kgc plan     per-epoch probabilities and permutations
//   kgc train    one training run, with checkpoint and predictions
//   kgc run      full experiment for one strategy
//   kgc compare  several strategies on identical data and seeds
//   kgc metrics  evaluate a predictions file
//
// Failures print one JSON object {"error": ..., "message": ...} on stderr and
// exit with status 2 (usage errors: 64).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kgc/error.hpp"
#include "kgc/experiment.hpp"
#include "kgc/text.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string strategy = "curriculum";
    std::vector<std::string> strategies;
    std::string scores_path;
    int epochs = 60;
    int transition_epoch = 0;  // 0: E / 2
    std::size_t repeats = 5;
    std::size_t test_repeats = 5;
    std::size_t negatives = 100;
    std::uint64_t seed = 0;
    std::string manifest;
    std::string test_manifest;
    std::string external;
    std::string out = "out";
    bool full_test = false;
    std::string model = "mlp";
    std::size_t hidden = 32;
    double learning_rate = 0.05;
    std::size_t batch = 32;
    double momentum = 0.0;
    unsigned threads = 1;
    std::size_t run_index = 0;
    std::string predictions;
    double threshold = 0.5;
};

void add_seed_out(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void add_data(CLI::App* cmd, Options& o) {
    cmd->add_option("--scores", o.scores_path, "Score table file (label = score)");
    cmd->add_option("--manifest", o.manifest, "Training manifest (default: synthetic)");
    cmd->add_option("--test-manifest", o.test_manifest, "Test manifest (with --manifest)");
}

void add_schedule(CLI::App* cmd, Options& o) {
    cmd->add_option("--epochs", o.epochs, "Total epochs E")->capture_default_str();
    cmd->add_option("--transition-epoch", o.transition_epoch, "Transition epoch L (default E/2)");
    cmd->add_option("--external", o.external, "External weights file (id,weight)");
}

void add_model(CLI::App* cmd, Options& o) {
    cmd->add_option("--model", o.model, "linear | mlp")->capture_default_str();
    cmd->add_option("--hidden", o.hidden, "MLP hidden width")->capture_default_str();
    cmd->add_option("--lr", o.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--batch", o.batch, "Batch size")->capture_default_str();
    cmd->add_option("--momentum", o.momentum, "SGD momentum")->capture_default_str();
}

void add_protocol(CLI::App* cmd, Options& o) {
    cmd->add_option("--repeats", o.repeats, "Training repeats R")->capture_default_str();
    cmd->add_option("--test-repeats", o.test_repeats, "Balanced test subsets K")->capture_default_str();
    cmd->add_option("--negatives", o.negatives, "Negatives per test subset")->capture_default_str();
    cmd->add_flag("--full-test", o.full_test, "Evaluate on the whole test split");
    cmd->add_option("--threads", o.threads, "Parallel training runs")->capture_default_str();
}

kgc::ScoreTable load_scores(const Options& o) {
    return o.scores_path.empty() ? kgc::ScoreTable::defaults() : kgc::read_score_table(o.scores_path);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) kgc::fail(kgc::ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

kgc::ExperimentConfig make_config(const Options& o, kgc::Strategy strategy) {
    kgc::ExperimentConfig c;
    c.strategy = strategy;
    c.scores = load_scores(o);
    c.schedule = o.transition_epoch > 0 ? kgc::ScheduleParams{o.epochs, o.transition_epoch}
                                        : kgc::ScheduleParams::with_total_epochs(o.epochs);
    c.schedule.validate();
    c.model = {kgc::parse_architecture(o.model), o.hidden};
    c.hyper = {o.learning_rate, o.batch, o.momentum};
    if (!o.manifest.empty()) c.dataset.train_manifest = o.manifest;
    if (!o.test_manifest.empty()) c.dataset.test_manifest = o.test_manifest;
    c.train_repeats = o.repeats;
    c.test_repeats = o.test_repeats;
    c.test_negatives = o.negatives;
    c.full_test = o.full_test;
    c.master_seed = o.seed;
    c.threads = o.threads;
    return c;
}

// External weights come from --external; without it the distance proxy is used.
void attach_external(kgc::ExperimentConfig& c, const Options& o, const kgc::Dataset& data) {
    if (c.strategy != kgc::Strategy::External) return;
    if (o.external.empty()) {
        std::cerr << "note: no --external file, using distance-proxy weights\n";
        c.external_weights = kgc::distance_weights(data.train);
        return;
    }
    std::ifstream in(o.external, std::ios::binary);
    if (!in) kgc::fail(kgc::ErrorCode::IoError, "cannot open " + o.external);
    c.external_weights = kgc::read_external_weights(in, data.train);
}

kgc::Dataset load(const kgc::ExperimentConfig& c) {
    return kgc::load_dataset(c.dataset, c.scores, kgc::SeedSpec{c.master_seed});
}

void cmd_synth(const Options& o) {
    const auto scores = load_scores(o);
    const kgc::SeedSpec seed{o.seed};
    const kgc::Dataset data = kgc::load_dataset({}, scores, seed);
    fs::create_directories(o.out);
    kgc::write_manifest(fs::path(o.out) / "train.csv", data.train);
    kgc::write_manifest(fs::path(o.out) / "test.csv", data.test);
    open_out(fs::path(o.out) / "scores.txt") << kgc::format_score_table(scores);
    auto ext = open_out(fs::path(o.out) / "external.csv");
    kgc::write_external_weights(ext, data.train, kgc::distance_weights(data.train));
    std::cout << "train " << data.train.size() << " records, test " << data.test.size()
              << " records -> " << o.out << '\n';
}

void cmd_plan(const Options& o) {
    auto config = make_config(o, kgc::parse_strategy(o.strategy));
    const kgc::Dataset data = load(config);
    attach_external(config, o, data);
    const auto fine = kgc::fine_labels_of(data.train);
    const auto initial = kgc::make_strategy(config)->initial_probabilities(fine);
    const auto planned = kgc::plan_training_with_probabilities(
        kgc::ScheduleState(initial, config.schedule), config.schedule, kgc::SeedSpec{o.seed},
        o.run_index);

    std::vector<std::string> ids;
    for (const auto& r : data.train) ids.push_back(r.id);
    fs::create_directories(o.out);
    auto plan_out = open_out(fs::path(o.out) / "plan.csv");
    kgc::write_plan(plan_out, planned.plans, ids);
    auto prob_out = open_out(fs::path(o.out) / "probabilities.csv");
    prob_out << "epoch,sample_id,probability\n";
    for (std::size_t e = 0; e < planned.probabilities.size(); ++e) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            prob_out << e + 1 << ',' << ids[i] << ','
                     << kgc::text::format_double(planned.probabilities[e][i]) << '\n';
        }
    }
    std::cout << planned.plans.size() << " epochs planned -> " << o.out << '\n';
}

void cmd_train(const Options& o) {
    auto config = make_config(o, kgc::parse_strategy(o.strategy));
    const kgc::Dataset data = load(config);
    attach_external(config, o, data);
    const kgc::SeedSpec seed{o.seed};
    const auto initial =
        kgc::make_strategy(config)->initial_probabilities(kgc::fine_labels_of(data.train));
    const auto plans = kgc::plan_training(kgc::ScheduleState(initial, config.schedule),
                                          config.schedule, seed, o.run_index);
    const auto result = kgc::train(data.train, plans, config.model, config.hyper, seed, o.run_index);
    const auto scores = kgc::predict_scores(result.model, data.test);

    std::vector<kgc::Prediction> preds;
    std::vector<int> labels;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        preds.push_back({data.test[i].id, data.test[i].label, scores[i]});
        labels.push_back(data.test[i].label);
    }
    const auto report = kgc::evaluate(scores, labels);

    fs::create_directories(o.out);
    const fs::path dir(o.out);
    auto model_out = open_out(dir / "model.txt");
    kgc::write_checkpoint(model_out, result.model);
    auto log_out = open_out(dir / "trainlog.csv");
    kgc::write_train_log(log_out, result.log);
    auto pred_out = open_out(dir / "predictions.csv");
    kgc::write_predictions(pred_out, preds);
    auto report_out = open_out(dir / "report.txt");
    kgc::write_report(report_out, report);
    auto roc_out = open_out(dir / "roc.csv");
    kgc::write_roc(roc_out, report.roc_points);
    kgc::write_report(std::cout, report);
}

void cmd_run(const Options& o) {
    auto config = make_config(o, kgc::parse_strategy(o.strategy));
    const kgc::Dataset data = load(config);
    attach_external(config, o, data);
    const auto report = kgc::run(config, data);
    kgc::write_outputs(o.out, report);
    kgc::write_table(std::cout, report);
}

void cmd_compare(const Options& o) {
    std::vector<std::string> names = o.strategies;
    if (names.empty()) names = {"uniform", "curriculum", "anti", "external"};
    std::vector<kgc::ExperimentConfig> configs;
    for (const auto& name : names) configs.push_back(make_config(o, kgc::parse_strategy(name)));
    const kgc::Dataset data = load(configs.front());
    for (auto& c : configs) attach_external(c, o, data);
    const auto report = kgc::compare(configs, data);
    kgc::write_outputs(o.out, report);
    kgc::write_table(std::cout, report);
}

void cmd_metrics(const Options& o) {
    std::ifstream in(o.predictions, std::ios::binary);
    if (!in) kgc::fail(kgc::ErrorCode::IoError, "cannot open " + o.predictions);
    const auto preds = kgc::read_predictions(in);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& p : preds) {
        scores.push_back(p.score);
        labels.push_back(p.label);
    }
    const auto report = kgc::evaluate(scores, labels, o.threshold);
    if (!report.auc) std::cerr << "note: single-class labels, AUC and AP are undefined\n";
    fs::create_directories(o.out);
    auto report_out = open_out(fs::path(o.out) / "report.txt");
    kgc::write_report(report_out, report);
    auto roc_out = open_out(fs::path(o.out) / "roc.csv");
    kgc::write_roc(roc_out, report.roc_points);
    kgc::write_report(std::cout, report);
}

void print_error(std::string_view code, std::string_view message) {
    nlohmann::json record{{"error", code}, {"message", message}};
    std::cerr << record.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-guided curriculum scheduling toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "Generate synthetic train/test manifests");
    add_seed_out(synth, o);
    synth->add_option("--scores", o.scores_path, "Score table file (label = score)");

    auto* plan = app.add_subcommand("plan", "Emit per-epoch probabilities and permutations");
    plan->add_option("--strategy", o.strategy, "curriculum | anti | uniform | external")
        ->capture_default_str();
    plan->add_option("--run", o.run_index, "Run index")->capture_default_str();
    add_seed_out(plan, o);
    add_data(plan, o);
    add_schedule(plan, o);

    auto* train = app.add_subcommand("train", "Single training run");
    train->add_option("--strategy", o.strategy, "curriculum | anti | uniform | external")
        ->capture_default_str();
    train->add_option("--run", o.run_index, "Run index")->capture_default_str();
    add_seed_out(train, o);
    add_data(train, o);
    add_schedule(train, o);
    add_model(train, o);

    auto* run = app.add_subcommand("run", "Full experiment for one strategy");
    run->add_option("--strategy", o.strategy, "curriculum | anti | uniform | external")
        ->capture_default_str();
    add_seed_out(run, o);
    add_data(run, o);
    add_schedule(run, o);
    add_model(run, o);
    add_protocol(run, o);

    auto* compare = app.add_subcommand("compare", "Compare strategies on identical data and seeds");
    compare->add_option("--strategy", o.strategies,
                        "Strategies to compare (repeatable; default: all four)");
    add_seed_out(compare, o);
    add_data(compare, o);
    add_schedule(compare, o);
    add_model(compare, o);
    add_protocol(compare, o);

    auto* metrics = app.add_subcommand("metrics", "Evaluate a predictions file (id,label,score)");
    metrics->add_option("--predictions", o.predictions, "Predictions file")->required();
    metrics->add_option("--threshold", o.threshold, "Decision threshold")->capture_default_str();
    metrics->add_option("--out", o.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("UsageError", e.what());
        return 64;
    }

    try {
        if (*synth) cmd_synth(o);
        if (*plan) cmd_plan(o);
        if (*train) cmd_train(o);
        if (*run) cmd_run(o);
        if (*compare) cmd_compare(o);
        if (*metrics) cmd_metrics(o);
    } catch (const kgc::Error& e) {
        print_error(kgc::to_string(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return 2;
    }
    return 0;
}
