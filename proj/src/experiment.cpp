#include "kgc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "kgc/error.hpp"
#include "kgc/text.hpp"

namespace kgc {

namespace {

void ensure(bool ok, const std::string& message) {
    if (!ok) fail(ErrorCode::ConfigError, message);
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::vector<int> labels_of(std::span<const SampleRecord> records) {
    std::vector<int> labels;
    labels.reserve(records.size());
    for (const auto& r : records) labels.push_back(r.label);
    return labels;
}

RunArtifacts run_once(const ExperimentConfig& config, const Dataset& data,
                      const std::vector<double>& initial_probs, std::size_t run_index,
                      const std::vector<std::vector<std::size_t>>& subsamples,
                      std::vector<Evaluation>& evaluations) {
    const SeedSpec seed{config.master_seed};
    const auto plans =
        plan_training(ScheduleState(initial_probs, config.schedule), config.schedule, seed, run_index);
    TrainResult trained = train(data.train, plans, config.model, config.hyper, seed, run_index);

    const std::vector<double> scores = predict_scores(trained.model, data.test);
    const std::vector<int> labels = labels_of(data.test);
    RunArtifacts artifacts{std::move(trained.log), {}};
    const EvalReport full = evaluate(scores, labels);
    artifacts.full_test_roc = full.roc_points;

    if (config.full_test) {
        evaluations.push_back({run_index, 0, full});
        return artifacts;
    }
    for (std::size_t k = 0; k < subsamples.size(); ++k) {
        std::vector<double> sub_scores;
        std::vector<int> sub_labels;
        for (const std::size_t idx : subsamples[k]) {
            sub_scores.push_back(scores[idx]);
            sub_labels.push_back(labels[idx]);
        }
        evaluations.push_back({run_index, k, evaluate(sub_scores, sub_labels)});
    }
    return artifacts;
}

void summarize(StrategyResult& result) {
    std::vector<double> acc, auc, ap, f1;
    for (const auto& e : result.evaluations) {
        acc.push_back(e.report.accuracy);
        f1.push_back(e.report.f1);
        if (e.report.auc) auc.push_back(*e.report.auc);
        if (e.report.average_precision) ap.push_back(*e.report.average_precision);
    }
    result.accuracy = mean_std(acc);
    result.auc = mean_std(auc);
    result.average_precision = mean_std(ap);
    result.f1 = mean_std(f1);
}

}  // namespace

std::string to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::Curriculum: return "curriculum";
        case Strategy::Anti: return "anti";
        case Strategy::Uniform: return "uniform";
        case Strategy::External: return "external";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "curriculum") return Strategy::Curriculum;
    if (name == "anti") return Strategy::Anti;
    if (name == "uniform") return Strategy::Uniform;
    if (name == "external") return Strategy::External;
    fail(ErrorCode::ConfigError, "unknown strategy '" + std::string(name) + "'");
}

Dataset load_dataset(const DatasetSource& source, const ScoreTable& scores, const SeedSpec& seed) {
    Dataset data;
    if (source.train_manifest || source.test_manifest) {
        ensure(source.train_manifest && source.test_manifest,
               "both a training and a test manifest are required");
        data.train = read_manifest(*source.train_manifest, scores);
        data.test = read_manifest(*source.test_manifest, scores);
    } else {
        data.train = generate(ClassProfile::default_train(scores), seed, StreamTag::TrainData, "train");
        data.test = generate(ClassProfile::default_test(scores), seed, StreamTag::TestData, "test");
    }
    if (data.train.empty()) fail(ErrorCode::EmptyDataset, "training split is empty");
    if (data.test.empty()) fail(ErrorCode::EmptyDataset, "test split is empty");
    validate_records(data.train, scores);
    validate_records(data.test, scores);
    if (data.train.front().features.size() != data.test.front().features.size()) {
        fail(ErrorCode::ShapeError, "train and test feature dimensions differ");
    }
    return data;
}

void ExperimentConfig::validate() const {
    schedule.validate();
    ensure(train_repeats >= 1, "repeats must be >= 1");
    ensure(test_repeats >= 1, "test repeats must be >= 1");
    ensure(full_test || test_negatives >= 1, "test subsample needs at least one negative");
    ensure(hyper.learning_rate > 0.0 && std::isfinite(hyper.learning_rate),
           "learning rate must be > 0");
    ensure(hyper.batch_size >= 1, "batch size must be >= 1");
    ensure(hyper.momentum >= 0.0 && hyper.momentum < 1.0, "momentum must be in [0, 1)");
    ensure(model.architecture == Architecture::Linear || model.hidden_width >= 1,
           "hidden width must be >= 1");
    ensure(threads >= 1, "threads must be >= 1");
    ensure(strategy != Strategy::External || !external_weights.empty(),
           "external strategy needs a weights file");
}

bool same_setup(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.scores == b.scores && a.schedule.total_epochs == b.schedule.total_epochs &&
           a.schedule.transition_epoch == b.schedule.transition_epoch &&
           a.model.architecture == b.model.architecture &&
           a.model.hidden_width == b.model.hidden_width &&
           a.hyper.learning_rate == b.hyper.learning_rate &&
           a.hyper.batch_size == b.hyper.batch_size && a.hyper.momentum == b.hyper.momentum &&
           a.dataset == b.dataset && a.train_repeats == b.train_repeats &&
           a.test_repeats == b.test_repeats && a.test_negatives == b.test_negatives &&
           a.full_test == b.full_test && a.master_seed == b.master_seed;
}

std::vector<std::size_t> balanced_subsample(std::span<const SampleRecord> test,
                                            std::size_t n_negatives, Stream stream) {
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < test.size(); ++i) {
        (test[i].label == 1 ? positives : negatives).push_back(i);
    }
    if (n_negatives > negatives.size()) {
        fail(ErrorCode::ConfigError, "asked for " + std::to_string(n_negatives) +
                                         " negatives, test split has " +
                                         std::to_string(negatives.size()));
    }
    // Partial Fisher-Yates: the first n_negatives slots become the draw.
    for (std::size_t i = 0; i < n_negatives; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(stream.below(negatives.size() - i));
        std::swap(negatives[i], negatives[j]);
    }
    std::vector<std::size_t> chosen = positives;
    chosen.insert(chosen.end(), negatives.begin(),
                  negatives.begin() + static_cast<std::ptrdiff_t>(n_negatives));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<double> distance_weights(std::span<const SampleRecord> train) {
    std::vector<double> weights;
    weights.reserve(train.size());
    for (const auto& r : train) {
        if (r.features.empty()) fail(ErrorCode::ShapeError, "record without features");
        weights.push_back(std::abs(r.features[0]) + 0.1);
    }
    return weights;
}

std::vector<double> read_external_weights(std::istream& in, std::span<const SampleRecord> train) {
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < train.size(); ++i) index.emplace(train[i].id, i);

    std::string line;
    if (!std::getline(in, line) || text::strip_cr(line) != "id,weight") {
        fail(ErrorCode::ConfigError, "external weights: header must be id,weight");
    }
    std::vector<double> weights(train.size(), 0.0);
    std::vector<bool> seen(train.size(), false);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = text::strip_cr(line);
        if (row.empty()) continue;
        const auto where = "external weights line " + std::to_string(line_no) + ": ";
        const auto fields = text::split(row, ',');
        if (fields.size() != 2) fail(ErrorCode::ConfigError, where + "expected id,weight");
        const auto it = index.find(fields[0]);
        if (it == index.end()) {
            fail(ErrorCode::ConfigError, where + "unknown id '" + std::string(fields[0]) + "'");
        }
        if (seen[it->second]) fail(ErrorCode::ConfigError, where + "duplicate id");
        const auto w = text::parse_double(fields[1]);
        if (!w || !(*w > 0.0) || !std::isfinite(*w)) {
            fail(ErrorCode::InvalidProbability, where + "weight must be finite and > 0");
        }
        weights[it->second] = *w;
        seen[it->second] = true;
    }
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (!seen[i]) fail(ErrorCode::ConfigError, "external weights missing id '" + train[i].id + "'");
    }
    return weights;
}

void write_external_weights(std::ostream& out, std::span<const SampleRecord> train,
                            std::span<const double> weights) {
    if (weights.size() != train.size()) fail(ErrorCode::ShapeError, "weights do not match records");
    out << "id,weight\n";
    for (std::size_t i = 0; i < train.size(); ++i) {
        out << train[i].id << ',' << text::format_double(weights[i]) << '\n';
    }
}

std::unique_ptr<InitialProbabilityStrategy> make_strategy(const ExperimentConfig& config) {
    switch (config.strategy) {
        case Strategy::Curriculum: return make_curriculum_strategy(config.scores);
        case Strategy::Anti: return make_anti_curriculum_strategy(config.scores);
        case Strategy::Uniform: return std::make_unique<UniformStrategy>();
        case Strategy::External: return std::make_unique<ExternalStrategy>(config.external_weights);
    }
    fail(ErrorCode::ConfigError, "unknown strategy");
}

StrategyResult run_strategy(const ExperimentConfig& config, const Dataset& data) {
    config.validate();
    const auto strategy = make_strategy(config);
    const auto fine = fine_labels_of(data.train);
    const std::vector<double> initial = strategy->initial_probabilities(fine);

    const SeedSpec seed{config.master_seed};
    std::vector<std::vector<std::size_t>> subsamples;
    if (!config.full_test) {
        for (std::size_t k = 0; k < config.test_repeats; ++k) {
            subsamples.push_back(balanced_subsample(data.test, config.test_negatives,
                                                    seed.stream(StreamTag::TestSubsample, k)));
        }
    }

    const std::size_t runs = config.train_repeats;
    std::vector<RunArtifacts> artifacts(runs);
    std::vector<std::vector<Evaluation>> per_run(runs);
    std::vector<std::exception_ptr> errors(runs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                artifacts[r] = run_once(config, data, initial, r, subsamples, per_run[r]);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(config.threads, runs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    StrategyResult result;
    result.label = to_string(config.strategy);
    result.strategy = config.strategy;
    result.runs = std::move(artifacts);
    for (auto& evals : per_run) {
        for (auto& e : evals) result.evaluations.push_back(std::move(e));
    }
    summarize(result);
    return result;
}

AggregateReport run(const ExperimentConfig& config, const Dataset& data) {
    AggregateReport report;
    report.master_seed = config.master_seed;
    report.strategies.push_back(run_strategy(config, data));
    return report;
}

AggregateReport run(const ExperimentConfig& config) {
    config.validate();
    return run(config, load_dataset(config.dataset, config.scores, SeedSpec{config.master_seed}));
}

AggregateReport compare(std::span<const ExperimentConfig> configs, const Dataset& data) {
    if (configs.empty()) fail(ErrorCode::ConfigError, "nothing to compare");
    for (const auto& c : configs) {
        if (!same_setup(configs.front(), c)) {
            fail(ErrorCode::UnfairComparison,
                 "compared configs must differ only in strategy (" + to_string(c.strategy) + ")");
        }
    }
    AggregateReport report;
    report.master_seed = configs.front().master_seed;
    std::map<std::string, int> used;
    for (const auto& c : configs) {
        StrategyResult result = run_strategy(c, data);
        const int n = ++used[result.label];
        if (n > 1) result.label += "_" + std::to_string(n);
        report.strategies.push_back(std::move(result));
    }
    return report;
}

AggregateReport compare(std::span<const ExperimentConfig> configs) {
    if (configs.empty()) fail(ErrorCode::ConfigError, "nothing to compare");
    const auto& first = configs.front();
    first.validate();
    return compare(configs, load_dataset(first.dataset, first.scores, SeedSpec{first.master_seed}));
}

void write_report(std::ostream& out, const AggregateReport& report) {
    out << "master_seed = " << report.master_seed << '\n';
    out << "std_convention = sample (n-1)\n";
    for (const auto& s : report.strategies) {
        out << '\n' << "[" << s.label << "]\n";
        out << "strategy = " << to_string(s.strategy) << '\n';
        out << "runs = " << s.runs.size() << '\n';
        out << "evaluations = " << s.evaluations.size() << '\n';
        const auto line = [&](const char* name, const MeanStd& m) {
            out << name << ".mean = " << text::format_double(m.mean) << '\n';
            out << name << ".std = " << text::format_double(m.std) << '\n';
        };
        line("accuracy", s.accuracy);
        line("auc", s.auc);
        line("average_precision", s.average_precision);
        line("f1", s.f1);
    }
}

void write_table(std::ostream& out, const AggregateReport& report) {
    const auto cell = [](const MeanStd& m) { return fixed3(m.mean) + " ± " + fixed3(m.std); };
    out << "Method | Accuracy | AUC | Average Precision | F1 score\n";
    for (const auto& s : report.strategies) {
        out << s.label << " | " << cell(s.accuracy) << " | " << cell(s.auc) << " | "
            << cell(s.average_precision) << " | " << cell(s.f1) << '\n';
    }
}

void write_runs(std::ostream& out, const AggregateReport& report) {
    const auto opt = [](const std::optional<double>& v) {
        return v ? text::format_double(*v) : std::string("NA");
    };
    out << "strategy,run,subsample,n_pos,n_neg,accuracy,auc,average_precision,f1\n";
    for (const auto& s : report.strategies) {
        for (const auto& e : s.evaluations) {
            out << s.label << ',' << e.run << ',' << e.subsample << ',' << e.report.n_pos << ','
                << e.report.n_neg << ',' << text::format_double(e.report.accuracy) << ','
                << opt(e.report.auc) << ',' << opt(e.report.average_precision) << ','
                << text::format_double(e.report.f1) << '\n';
        }
    }
}

void write_outputs(const std::filesystem::path& dir, const AggregateReport& report) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("report.txt");
        write_report(out, report);
    }
    {
        auto out = open("table.txt");
        write_table(out, report);
    }
    {
        auto out = open("runs.csv");
        write_runs(out, report);
    }
    for (const auto& s : report.strategies) {
        for (std::size_t r = 0; r < s.runs.size(); ++r) {
            const std::string suffix = s.label + "_run" + std::to_string(r) + ".csv";
            auto roc = open("roc_" + suffix);
            write_roc(roc, s.runs[r].full_test_roc);
            auto log = open("trainlog_" + suffix);
            write_train_log(log, s.runs[r].log);
        }
    }
}

}  // namespace kgc
