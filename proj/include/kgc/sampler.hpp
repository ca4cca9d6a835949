#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgc/random.hpp"
#include "kgc/schedule.hpp"

namespace kgc {

/// The order in which training samples are visited during one epoch.
struct EpochPlan {
    int epoch = 1;
    std::vector<std::size_t> order;

    friend bool operator==(const EpochPlan&, const EpochPlan&) = default;
};

/// Weighted sampling without replacement of the whole index set.
///
/// Each item i gets the key log(u_i) / w_i, where u_i is the i-th word of the
/// stream mapped to (0, 1) and w_i is the normalized weight; sorting keys in
/// descending order gives the same distribution as drawing positions one at a
/// time with probability proportional to the remaining weights. Equal keys are
/// ordered by ascending index. Weights need not sum to one.
///
/// Throws EmptyDataset for no weights and InvalidWeight for any w <= 0.
std::vector<std::size_t> sample_permutation(std::span<const double> weights, const Stream& stream);

/// Indices sorted by descending key, ties by ascending index.
std::vector<std::size_t> order_by_descending_key(std::span<const double> keys);

/// One permutation per epoch. Epoch e is drawn from the schedule's current
/// probabilities with the stream SeedSpec::epoch_stream(run_index, e), after
/// which the schedule advances. `schedule` must be at epoch 1.
std::vector<EpochPlan> plan_training(ScheduleState schedule, const ScheduleParams& params,
                                     const SeedSpec& seed, std::uint64_t run_index = 0);

/// Same as plan_training but also returns the per-epoch probability vectors.
struct PlanWithProbabilities {
    std::vector<EpochPlan> plans;
    std::vector<std::vector<double>> probabilities;
};
PlanWithProbabilities plan_training_with_probabilities(ScheduleState schedule,
                                                       const ScheduleParams& params,
                                                       const SeedSpec& seed,
                                                       std::uint64_t run_index = 0);

bool is_permutation_of_indices(std::span<const std::size_t> order, std::size_t n);

/// FNV-1a over the indices as little-endian 64-bit words.
std::uint64_t order_fingerprint(std::span<const std::size_t> order) noexcept;

// Plan export: header `epoch,position,sample_id`, then one line per visit.
void write_plan(std::ostream& out, std::span<const EpochPlan> plans,
                std::span<const std::string> sample_ids);

}  // namespace kgc
