#include "kgc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "kgc/error.hpp"
#include "kgc/numeric.hpp"

namespace kgc {

std::vector<std::size_t> sample_permutation(std::span<const double> weights, const Stream& stream) {
    if (weights.empty()) fail(ErrorCode::EmptyDataset, "no weights to sample from");
    for (const double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(ErrorCode::InvalidWeight, "sampling weights must be finite and > 0");
        }
    }
    const double total = compensated_sum(weights);

    const std::size_t n = weights.size();
    std::vector<double> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = Stream::to_open_unit(stream.u64_at(i));
        // log(u^(1/w)); monotone in u^(1/w) and free of underflow for tiny w.
        keys[i] = std::log(u) / (weights[i] / total);
    }

    return order_by_descending_key(keys);
}

std::vector<std::size_t> order_by_descending_key(std::span<const double> keys) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] > keys[b];
        return a < b;
    });
    return order;
}

PlanWithProbabilities plan_training_with_probabilities(ScheduleState schedule,
                                                       const ScheduleParams& params,
                                                       const SeedSpec& seed,
                                                       std::uint64_t run_index) {
    params.validate();
    if (schedule.current_epoch() != 1) {
        fail(ErrorCode::InvalidParams, "plan_training needs a schedule at epoch 1");
    }
    PlanWithProbabilities out;
    out.plans.reserve(static_cast<std::size_t>(params.total_epochs));
    out.probabilities.reserve(static_cast<std::size_t>(params.total_epochs));
    for (int epoch = 1; epoch <= params.total_epochs; ++epoch) {
        const Stream stream = seed.epoch_stream(run_index, static_cast<std::uint64_t>(epoch));
        out.plans.push_back({epoch, sample_permutation(schedule.current_probs(), stream)});
        out.probabilities.push_back(schedule.current_probs());
        if (epoch < params.total_epochs) schedule = advance_epoch(schedule, params);
    }
    return out;
}

std::vector<EpochPlan> plan_training(ScheduleState schedule, const ScheduleParams& params,
                                     const SeedSpec& seed, std::uint64_t run_index) {
    return plan_training_with_probabilities(std::move(schedule), params, seed, run_index).plans;
}

bool is_permutation_of_indices(std::span<const std::size_t> order, std::size_t n) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (const std::size_t i : order) {
        if (i >= n || seen[i]) return false;
        seen[i] = true;
    }
    return true;
}

std::uint64_t order_fingerprint(std::span<const std::size_t> order) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const std::size_t idx : order) {
        auto v = static_cast<std::uint64_t>(idx);
        for (int byte = 0; byte < 8; ++byte) {
            h ^= v & 0xffu;
            h *= 0x100000001b3ull;
            v >>= 8;
        }
    }
    return h;
}

void write_plan(std::ostream& out, std::span<const EpochPlan> plans,
                std::span<const std::string> sample_ids) {
    out << "epoch,position,sample_id\n";
    for (const auto& plan : plans) {
        if (plan.order.size() != sample_ids.size()) {
            fail(ErrorCode::PlanMismatch, "plan for epoch " + std::to_string(plan.epoch) +
                                              " does not cover the sample ids");
        }
        for (std::size_t pos = 0; pos < plan.order.size(); ++pos) {
            out << plan.epoch << ',' << pos << ',' << sample_ids[plan.order[pos]] << '\n';
        }
    }
}

}  // namespace kgc
