#include "kgc/schedule.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kgc/error.hpp"
#include "kgc/numeric.hpp"

namespace kgc {

namespace {

constexpr int kMinScore = 1;
constexpr int kMaxScore = 100;
constexpr double kSumTolerance = 1e-9;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

ScoreTable::ScoreTable(Entries entries) : entries_(std::move(entries)) {
    if (entries_.empty()) fail(ErrorCode::InvalidScore, "score table is empty");
    for (const auto& [label, score] : entries_) {
        if (score < kMinScore || score > kMaxScore) {
            fail(ErrorCode::InvalidScore, "score for '" + label + "' is " + std::to_string(score) +
                                              ", expected 1..100");
        }
    }
}

ScoreTable ScoreTable::defaults() {
    return ScoreTable({{"normal", 30}, {"a", 30}, {"b", 30}, {"c", 70},
                       {"d", 40}, {"e", 90}, {"f", 10}});
}

int ScoreTable::score(std::string_view label) const {
    const auto it = entries_.find(label);
    if (it == entries_.end()) fail(ErrorCode::UnknownFineLabel, std::string(label));
    return it->second;
}

ScoreTable reverse_scores(const ScoreTable& scores) {
    ScoreTable::Entries reversed;
    for (const auto& [label, score] : scores.entries()) {
        if (score >= kMaxScore) {
            fail(ErrorCode::ReversalOutOfRange,
                 "score 100 for '" + label + "' would reverse to 0");
        }
        reversed.emplace(label, kMaxScore - score);
    }
    return ScoreTable(std::move(reversed));
}

ScoreTable parse_score_table(std::string_view text) {
    ScoreTable::Entries entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::ScoreFileParseError, where() + "expected 'label = score'");
        }
        const std::string_view label = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (label.empty()) fail(ErrorCode::ScoreFileParseError, where() + "empty label");

        int score = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
        if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
            fail(ErrorCode::ScoreFileParseError,
                 where() + "score '" + std::string(value) + "' is not an integer");
        }
        if (!entries.emplace(std::string(label), score).second) {
            fail(ErrorCode::ScoreFileParseError,
                 where() + "duplicate label '" + std::string(label) + "'");
        }
    }
    return ScoreTable(std::move(entries));
}

ScoreTable read_score_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open score table " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_score_table(buffer.str());
}

std::string format_score_table(const ScoreTable& scores) {
    std::string out;
    for (const auto& [label, score] : scores.entries()) {
        out += label + " = " + std::to_string(score) + "\n";
    }
    return out;
}

void ScheduleParams::validate() const {
    if (total_epochs < 1 || transition_epoch < 1 || transition_epoch > total_epochs) {
        fail(ErrorCode::InvalidParams, "need 1 <= L <= E, got E=" + std::to_string(total_epochs) +
                                           " L=" + std::to_string(transition_epoch));
    }
}

ScheduleParams ScheduleParams::with_total_epochs(int total_epochs) {
    ScheduleParams params{total_epochs, total_epochs / 2 > 0 ? total_epochs / 2 : 1};
    params.validate();
    return params;
}

std::vector<double> init_probabilities(std::span<const std::string> fine_labels,
                                       const ScoreTable& scores) {
    if (fine_labels.empty()) fail(ErrorCode::EmptyDataset, "no samples");
    std::vector<double> probs;
    probs.reserve(fine_labels.size());
    // Integer scores sum exactly.
    long long total = 0;
    for (const auto& label : fine_labels) {
        const int s = scores.score(label);
        probs.push_back(static_cast<double>(s));
        total += s;
    }
    const double denom = static_cast<double>(total);
    for (double& p : probs) p /= denom;
    return probs;
}

double compute_lambda(double p_init, std::size_t n_samples, int transition_epoch) {
    if (!(p_init > 0.0) || p_init > 1.0 || !std::isfinite(p_init)) {
        fail(ErrorCode::InvalidProbability, "initial probability must be in (0, 1]");
    }
    if (n_samples == 0) fail(ErrorCode::EmptyDataset, "no samples");
    if (transition_epoch < 1) fail(ErrorCode::InvalidParams, "transition epoch must be >= 1");
    const double ratio = (1.0 / static_cast<double>(n_samples)) / p_init;
    return std::pow(ratio, 1.0 / static_cast<double>(transition_epoch));
}

ScheduleState::ScheduleState(std::vector<double> initial_probs, const ScheduleParams& params)
    : initial_probs_(std::move(initial_probs)), transition_epoch_(params.transition_epoch) {
    params.validate();
    if (initial_probs_.empty()) fail(ErrorCode::EmptyDataset, "no samples");
    for (const double p : initial_probs_) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            fail(ErrorCode::InvalidProbability, "initial probabilities must be strictly positive");
        }
    }
    const double sum = compensated_sum(initial_probs_);
    if (std::abs(sum - 1.0) > kSumTolerance) {
        fail(ErrorCode::InvalidProbability,
             "initial probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
    lambdas_.reserve(initial_probs_.size());
    for (const double p : initial_probs_) {
        lambdas_.push_back(compute_lambda(p, initial_probs_.size(), transition_epoch_));
    }
    current_ = initial_probs_;
}

ScheduleState advance_epoch(const ScheduleState& state, const ScheduleParams& params) {
    params.validate();
    if (params.transition_epoch != state.transition_epoch_) {
        fail(ErrorCode::InvalidParams, "schedule was built with a different transition epoch");
    }
    if (state.epoch_ >= params.total_epochs) {
        fail(ErrorCode::ScheduleExhausted,
             "already at final epoch " + std::to_string(params.total_epochs));
    }
    ScheduleState next = state;
    next.epoch_ = state.epoch_ + 1;
    if (next.epoch_ <= params.transition_epoch) {
        for (std::size_t i = 0; i < next.current_.size(); ++i) {
            next.current_[i] = state.current_[i] * state.lambdas_[i];
        }
    } else {
        const double uniform = 1.0 / static_cast<double>(next.current_.size());
        std::fill(next.current_.begin(), next.current_.end(), uniform);
    }
    return next;
}

ScheduleState from_external_probabilities(std::span<const double> probs,
                                          const ScheduleParams& params) {
    if (probs.empty()) fail(ErrorCode::EmptyDataset, "no probabilities");
    for (const double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            fail(ErrorCode::InvalidProbability, "external probabilities must be strictly positive");
        }
    }
    const double sum = compensated_sum(probs);
    std::vector<double> normalized(probs.begin(), probs.end());
    for (double& p : normalized) p /= sum;
    return ScheduleState(std::move(normalized), params);
}

std::vector<double> ScoreStrategy::initial_probabilities(
    std::span<const std::string> fine_labels) const {
    return init_probabilities(fine_labels, scores_);
}

std::vector<double> UniformStrategy::initial_probabilities(
    std::span<const std::string> fine_labels) const {
    if (fine_labels.empty()) fail(ErrorCode::EmptyDataset, "no samples");
    return std::vector<double>(fine_labels.size(), 1.0 / static_cast<double>(fine_labels.size()));
}

ExternalStrategy::ExternalStrategy(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) fail(ErrorCode::EmptyDataset, "no external weights");
    for (const double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(ErrorCode::InvalidProbability, "external weights must be strictly positive");
        }
    }
}

std::vector<double> ExternalStrategy::initial_probabilities(
    std::span<const std::string> fine_labels) const {
    if (fine_labels.size() != weights_.size()) {
        fail(ErrorCode::ShapeError, "external weights cover " + std::to_string(weights_.size()) +
                                        " samples, training set has " +
                                        std::to_string(fine_labels.size()));
    }
    const double sum = compensated_sum(weights_);
    std::vector<double> probs = weights_;
    for (double& p : probs) p /= sum;
    return probs;
}

std::unique_ptr<InitialProbabilityStrategy> make_curriculum_strategy(const ScoreTable& scores) {
    return std::make_unique<ScoreStrategy>("curriculum", scores);
}

std::unique_ptr<InitialProbabilityStrategy> make_anti_curriculum_strategy(const ScoreTable& scores) {
    return std::make_unique<ScoreStrategy>("anti", reverse_scores(scores));
}

}  // namespace kgc
