#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgc/random.hpp"
#include "kgc/sampler.hpp"
#include "kgc/synth.hpp"

namespace kgc {

enum class Architecture { Linear, Mlp };

std::string to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

struct ModelSpec {
    Architecture architecture = Architecture::Mlp;
    std::size_t hidden_width = 32;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Hyperparams {
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    double momentum = 0.0;
};

/// Binary classifier with all parameters in one flat vector.
///
/// Linear: [w (d), b]. MLP with tanh hidden layer of width h:
/// [W1 (h x d, row major), b1 (h), w2 (h), b2]. The output is a single logit.
class Model {
public:
    Model(ModelSpec spec, std::size_t input_dim);

    /// Linear weights ~ N(0, 0.01^2); MLP layers ~ N(0, 1/fan_in); biases zero.
    static Model initialize(ModelSpec spec, std::size_t input_dim, Stream stream);

    const ModelSpec& spec() const noexcept { return spec_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::vector<double>& parameters() noexcept { return params_; }
    const std::vector<double>& parameters() const noexcept { return params_; }

    double logit(std::span<const double> x) const;
    double score(std::span<const double> x) const;

    /// Mean cross-entropy over data[indices]; accumulates d(loss)/d(params) into
    /// `grad` (resized and zeroed) when non-null.
    double loss(std::span<const SampleRecord> data, std::span<const std::size_t> indices,
                std::vector<double>* grad = nullptr) const;

    friend bool operator==(const Model&, const Model&) = default;

private:
    ModelSpec spec_;
    std::size_t input_dim_;
    std::vector<double> params_;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;  // mean training loss after the epoch
    std::uint64_t order_fingerprint = 0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
};

struct TrainResult {
    Model model;
    TrainLog log;
};

/// Plain minibatch SGD (optional momentum). Epoch e walks plans[e].order and
/// cuts it into consecutive batches of `batch_size` (the last may be shorter);
/// no second shuffle. Weights are initialized from seed.stream(ModelInit, run_index).
///
/// Throws PlanMismatch if a plan is not a permutation of the data and
/// NonFiniteWeights if an update produces NaN or Inf.
TrainResult train(std::span<const SampleRecord> data, std::span<const EpochPlan> plans,
                  const ModelSpec& spec, const Hyperparams& hyper, const SeedSpec& seed,
                  std::uint64_t run_index = 0);

/// Positive-class probability per record, in input order. ShapeError on a
/// feature dimension mismatch.
std::vector<double> predict_scores(const Model& model, std::span<const SampleRecord> data);

// Line-delimited log: header `epoch,loss,order_fingerprint`.
void write_train_log(std::ostream& out, const TrainLog& log);

// Checkpoint: text header `kgc-model 1`, then `architecture`, `input_dim`,
// `hidden_width`, `parameters <count>` lines and one value per line.
void write_checkpoint(std::ostream& out, const Model& model);
Model read_checkpoint(std::istream& in);

}  // namespace kgc
