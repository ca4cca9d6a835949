#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgc/metrics.hpp"
#include "kgc/random.hpp"
#include "kgc/sampler.hpp"
#include "kgc/schedule.hpp"
#include "kgc/synth.hpp"
#include "kgc/trainer.hpp"

namespace kgc {

enum class Strategy { Curriculum, Anti, Uniform, External };

std::string to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

/// Where the train/test splits come from: the synthetic default profile
/// (generated from the master seed) or a pair of manifests.
struct DatasetSource {
    std::optional<std::filesystem::path> train_manifest;
    std::optional<std::filesystem::path> test_manifest;

    friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

struct Dataset {
    std::vector<SampleRecord> train;
    std::vector<SampleRecord> test;
};

Dataset load_dataset(const DatasetSource& source, const ScoreTable& scores, const SeedSpec& seed);

struct ExperimentConfig {
    Strategy strategy = Strategy::Curriculum;
    ScoreTable scores = ScoreTable::defaults();
    // Used by Strategy::External; aligned with the training records.
    std::vector<double> external_weights;

    ScheduleParams schedule{60, 30};
    ModelSpec model;
    Hyperparams hyper;
    DatasetSource dataset;

    std::size_t train_repeats = 5;
    std::size_t test_repeats = 5;
    std::size_t test_negatives = 100;
    // Evaluate each run once on the whole test split instead of K balanced subsets.
    bool full_test = false;

    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    /// Throws ConfigError.
    void validate() const;
};

/// Everything except the strategy must agree between configs being compared.
bool same_setup(const ExperimentConfig& a, const ExperimentConfig& b);

/// All positives plus `n_negatives` distinct negatives drawn uniformly, in
/// ascending index order. ConfigError if there are fewer negatives than asked.
std::vector<std::size_t> balanced_subsample(std::span<const SampleRecord> test,
                                            std::size_t n_negatives, Stream stream);

/// A data-driven stand-in for an external curriculum: weight |x0| + 0.1, the
/// distance from the class boundary along the informative axis plus a floor.
std::vector<double> distance_weights(std::span<const SampleRecord> train);

// External weights file: header `id,weight`, one line per training id.
std::vector<double> read_external_weights(std::istream& in, std::span<const SampleRecord> train);
void write_external_weights(std::ostream& out, std::span<const SampleRecord> train,
                            std::span<const double> weights);

std::unique_ptr<InitialProbabilityStrategy> make_strategy(const ExperimentConfig& config);

struct Evaluation {
    std::size_t run = 0;
    std::size_t subsample = 0;
    EvalReport report;
};

struct RunArtifacts {
    TrainLog log;
    std::vector<RocPoint> full_test_roc;
};

struct StrategyResult {
    std::string label;
    Strategy strategy = Strategy::Uniform;
    std::vector<Evaluation> evaluations;
    std::vector<RunArtifacts> runs;
    MeanStd accuracy, auc, average_precision, f1;
};

/// Per-strategy summaries across R x K evaluations. Standard deviations use
/// the sample (n - 1) convention.
struct AggregateReport {
    std::uint64_t master_seed = 0;
    std::vector<StrategyResult> strategies;
};

/// Builds the initial probabilities for the strategy, then for each of R runs
/// plans the epochs, trains and evaluates. Runs are independent and may use up
/// to `config.threads` threads; output does not depend on the thread count.
StrategyResult run_strategy(const ExperimentConfig& config, const Dataset& data);

AggregateReport run(const ExperimentConfig& config);
AggregateReport run(const ExperimentConfig& config, const Dataset& data);

/// Runs every config against one dataset. Throws UnfairComparison when the
/// configs differ in anything but the strategy.
AggregateReport compare(std::span<const ExperimentConfig> configs);
AggregateReport compare(std::span<const ExperimentConfig> configs, const Dataset& data);

// Output files written by write_outputs:
//   report.txt   `key = value` summary per strategy
//   table.txt    Method | Accuracy | AUC | Average Precision | F1 score
//   runs.csv     one row per (strategy, run, subsample)
//   roc_<label>_run<r>.csv       ROC on the whole test split
//   trainlog_<label>_run<r>.csv  per-epoch loss and order fingerprint
void write_report(std::ostream& out, const AggregateReport& report);
void write_table(std::ostream& out, const AggregateReport& report);
void write_runs(std::ostream& out, const AggregateReport& report);
void write_outputs(const std::filesystem::path& dir, const AggregateReport& report);

}  // namespace kgc
