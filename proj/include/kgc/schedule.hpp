#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgc {

/// Difficulty score per fine-grained label, 1 (hardest) to 100 (easiest).
class ScoreTable {
public:
    using Entries = std::map<std::string, int, std::less<>>;

    /// Throws InvalidScore for an empty table or any score outside [1, 100].
    explicit ScoreTable(Entries entries);

    /// Radiologist scores for the elbow dataset: normal 30, a 30, b 30, c 70,
    /// d 40, e 90, f 10.
    static ScoreTable defaults();

    /// Throws UnknownFineLabel when the label has no entry.
    int score(std::string_view label) const;
    bool contains(std::string_view label) const { return entries_.find(label) != entries_.end(); }
    const Entries& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

private:
    Entries entries_;
};

/// Maps every score s to 100 - s. A score of 100 would map to 0, which is not
/// a valid score, and raises ReversalOutOfRange.
ScoreTable reverse_scores(const ScoreTable& scores);

// Score table files: one `label = score` pair per line. Blank lines and lines
// starting with '#' are ignored; surrounding whitespace is trimmed. Duplicate
// labels and non-integer scores are ScoreFileParseError.
ScoreTable parse_score_table(std::string_view text);
ScoreTable read_score_table(const std::filesystem::path& path);
std::string format_score_table(const ScoreTable& scores);

/// Total epochs E and the transition epoch L after which sampling is uniform.
struct ScheduleParams {
    int total_epochs = 60;
    int transition_epoch = 30;

    /// Throws InvalidParams unless 1 <= L <= E.
    void validate() const;
    /// E with L = E / 2 (at least 1).
    static ScheduleParams with_total_epochs(int total_epochs);
};

/// p[i] = s(f_i) / sum_j s(f_j), in input order.
std::vector<double> init_probabilities(std::span<const std::string> fine_labels,
                                       const ScoreTable& scores);

/// ((1/N) / p_init)^(1/L): the per-sample factor that walks p_init toward 1/N.
double compute_lambda(double p_init, std::size_t n_samples, int transition_epoch);

/// Per-sample probabilities for the current epoch together with the factors
/// that produce the next epoch's values.
///
/// For 2 <= e <= L the update multiplies the previous value by lambda; for
/// e > L every entry is set to exactly 1/N. Literal application leaves
/// p(L) = p_init^(1/L) * (1/N)^((L-1)/L), so there is a final jump of
/// ((1/N)/p_init)^(1/L) into epoch L+1. Entries for e >= 2 are raw values and
/// need not sum to one; the sampler normalizes at the point of use.
class ScheduleState {
public:
    /// `initial_probs` must be strictly positive and sum to 1 within 1e-9.
    ScheduleState(std::vector<double> initial_probs, const ScheduleParams& params);

    std::size_t n_samples() const noexcept { return initial_probs_.size(); }
    int current_epoch() const noexcept { return epoch_; }
    int transition_epoch() const noexcept { return transition_epoch_; }
    const std::vector<double>& initial_probs() const noexcept { return initial_probs_; }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const std::vector<double>& current_probs() const noexcept { return current_; }

    friend ScheduleState advance_epoch(const ScheduleState& state, const ScheduleParams& params);

private:
    std::vector<double> initial_probs_;
    std::vector<double> lambdas_;
    std::vector<double> current_;
    int epoch_ = 1;
    int transition_epoch_ = 1;
};

/// Successor state for epoch e + 1. Throws ScheduleExhausted at e = E and
/// InvalidParams when `params` carries a different L than the state was built with.
ScheduleState advance_epoch(const ScheduleState& state, const ScheduleParams& params);

/// Normalizes arbitrary positive weights and builds the schedule from them, so
/// the update applies to probabilities produced by any other curriculum.
ScheduleState from_external_probabilities(std::span<const double> probs,
                                          const ScheduleParams& params);

/// Source of epoch-1 probabilities for a training set described by its fine labels.
class InitialProbabilityStrategy {
public:
    virtual ~InitialProbabilityStrategy() = default;
    virtual std::string name() const = 0;
    virtual std::vector<double> initial_probabilities(
        std::span<const std::string> fine_labels) const = 0;
};

/// Score-driven probabilities (the knowledge-guided curriculum).
class ScoreStrategy final : public InitialProbabilityStrategy {
public:
    ScoreStrategy(std::string name, ScoreTable scores)
        : name_(std::move(name)), scores_(std::move(scores)) {}
    std::string name() const override { return name_; }
    std::vector<double> initial_probabilities(
        std::span<const std::string> fine_labels) const override;

private:
    std::string name_;
    ScoreTable scores_;
};

/// Exactly 1/N for every sample: plain random shuffling.
class UniformStrategy final : public InitialProbabilityStrategy {
public:
    std::string name() const override { return "uniform"; }
    std::vector<double> initial_probabilities(
        std::span<const std::string> fine_labels) const override;
};

/// Positive weights supplied by an outside method, aligned with the training set.
class ExternalStrategy final : public InitialProbabilityStrategy {
public:
    explicit ExternalStrategy(std::vector<double> weights);
    std::string name() const override { return "external"; }
    std::vector<double> initial_probabilities(
        std::span<const std::string> fine_labels) const override;

private:
    std::vector<double> weights_;
};

std::unique_ptr<InitialProbabilityStrategy> make_curriculum_strategy(const ScoreTable& scores);
std::unique_ptr<InitialProbabilityStrategy> make_anti_curriculum_strategy(const ScoreTable& scores);

}  // namespace kgc
