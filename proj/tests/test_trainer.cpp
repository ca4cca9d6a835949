#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kgc/error.hpp"
#include "kgc/experiment.hpp"
#include "kgc/trainer.hpp"

using namespace kgc;

namespace {

std::vector<EpochPlan> shuffles(std::size_t n, int epochs, std::uint64_t seed) {
    const ScheduleParams params{epochs, 1};
    return plan_training(ScheduleState(std::vector<double>(n, 1.0 / n), params), params, SeedSpec{seed});
}

std::vector<SampleRecord> small_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<SampleRecord> data;
    for (std::size_t i = 0; i < n; ++i) {
        SampleRecord r{"r" + std::to_string(i), static_cast<int>(i % 2), i % 2 ? "a" : "normal", {}};
        for (std::size_t k = 0; k < d; ++k) r.features.push_back(u(rng) + (i % 2 ? 0.5 : -0.5));
        data.push_back(std::move(r));
    }
    return data;
}

// Relative error between two vectors, ||a - b|| / max(||a||, ||b||).
double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(std::max(na, nb)), 1e-300);
}

std::vector<double> finite_difference(Model model, std::span<const SampleRecord> data,
                                      std::span<const std::size_t> idx, double h) {
    std::vector<double> grad(model.parameters().size());
    for (std::size_t k = 0; k < grad.size(); ++k) {
        const double saved = model.parameters()[k];
        model.parameters()[k] = saved + h;
        const double up = model.loss(data, idx);
        model.parameters()[k] = saved - h;
        const double down = model.loss(data, idx);
        model.parameters()[k] = saved;
        grad[k] = (up - down) / (2 * h);
    }
    return grad;
}

}  // namespace

TEST_CASE("zero-weight linear model scores 0.5") {
    const Model model({Architecture::Linear, 0}, 3);
    for (const double s : predict_scores(model, small_data(5, 3, 1))) CHECK(s == 0.5);
}

TEST_CASE("linear score matches the closed form and is monotone in the logit") {
    Model model({Architecture::Linear, 0}, 3);
    model.parameters() = {0.3, -1.2, 0.7, 0.05};
    const std::vector<double> x{1.5, 0.2, -0.4};
    const double z = 0.3 * 1.5 - 1.2 * 0.2 + 0.7 * -0.4 + 0.05;
    CHECK(model.score(x) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-15));
    double prev = 0.0;
    for (double t = -5; t <= 5; t += 0.5) {
        const double s = model.score(std::vector<double>{t, 0, 0});
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("shape errors") {
    const Model model({Architecture::Mlp, 4}, 3);
    try {
        model.score(std::vector<double>{1, 2});
        FAIL("expected ShapeError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeError);
    }
}

TEST_CASE("analytic gradients agree with finite differences") {
    std::mt19937_64 rng(21);
    for (const auto arch : {Architecture::Linear, Architecture::Mlp}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto data = small_data(6, 4, 100 + trial);
            Model model = Model::initialize({arch, 5}, 4, Stream(rng()));
            std::normal_distribution<double> nd(0.0, 0.7);
            for (double& p : model.parameters()) p = nd(rng);
            const std::vector<std::size_t> idx{static_cast<std::size_t>(trial % 6),
                                               static_cast<std::size_t>((trial + 3) % 6)};
            std::vector<double> analytic;
            model.loss(data, idx, &analytic);
            const auto numeric = finite_difference(model, data, idx, 1e-6);
            INFO(to_string(arch) << " trial " << trial);
            CHECK(relative_error(analytic, numeric) < 1e-5);
        }
    }
}

TEST_CASE("training is deterministic") {
    const auto data = small_data(64, 4, 3);
    const auto plans = shuffles(data.size(), 5, 8);
    for (const auto arch : {Architecture::Linear, Architecture::Mlp}) {
        const auto a = train(data, plans, {arch, 8}, {}, SeedSpec{4});
        const auto b = train(data, plans, {arch, 8}, {}, SeedSpec{4});
        CHECK(a.model == b.model);
        CHECK(a.log.epochs.size() == 5);
        CHECK(a.log.epochs[2].order_fingerprint == order_fingerprint(plans[2].order));
    }
}

TEST_CASE("separable data is learned perfectly") {
    auto profile = ClassProfile::default_train();
    profile.noise_sigma = 1e-6;
    const auto data = generate(profile, SeedSpec{1});
    const auto plans = shuffles(data.size(), 50, 2);
    for (const auto arch : {Architecture::Linear, Architecture::Mlp}) {
        const auto result = train(data, plans, {arch, 32}, {}, SeedSpec{3});
        int correct = 0;
        const auto scores = predict_scores(result.model, data);
        for (std::size_t i = 0; i < data.size(); ++i) correct += (scores[i] >= 0.5) == (data[i].label == 1);
        CHECK(correct == static_cast<int>(data.size()));
    }
}

TEST_CASE("epoch order changes the trained weights") {
    const auto data = small_data(64, 4, 5);
    const auto plans_a = shuffles(data.size(), 3, 1);
    const auto plans_b = shuffles(data.size(), 3, 2);
    const Hyperparams hyper{0.5, 8, 0.0};
    for (const auto arch : {Architecture::Linear, Architecture::Mlp}) {
        const auto a = train(data, plans_a, {arch, 8}, hyper, SeedSpec{4});
        const auto b = train(data, plans_b, {arch, 8}, hyper, SeedSpec{4});
        CHECK(a.model.parameters() != b.model.parameters());
    }
}

TEST_CASE("loss falls over the first five epochs for every strategy") {
    ExperimentConfig config;
    const Dataset data = load_dataset({}, config.scores, SeedSpec{12});
    const ScheduleParams params{5, 3};
    for (const auto strategy :
         {Strategy::Uniform, Strategy::Curriculum, Strategy::Anti, Strategy::External}) {
        config.strategy = strategy;
        config.external_weights = distance_weights(data.train);
        const auto initial =
            make_strategy(config)->initial_probabilities(fine_labels_of(data.train));
        const auto plans = plan_training(ScheduleState(initial, params), params, SeedSpec{12});
        for (const auto arch : {Architecture::Linear, Architecture::Mlp}) {
            const auto log = train(data.train, plans, {arch, 32}, {}, SeedSpec{12}).log;
            INFO(to_string(strategy) << " " << to_string(arch));
            CHECK(log.epochs.back().loss < log.epochs.front().loss);
            for (const auto& e : log.epochs) CHECK(std::isfinite(e.loss));
        }
    }
}

TEST_CASE("plan mismatch and divergence are reported") {
    const auto data = small_data(8, 2, 1);
    const std::vector<EpochPlan> short_plan{{1, {0, 1, 2}}};
    try {
        train(data, short_plan, {}, {}, SeedSpec{1});
        FAIL("expected PlanMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PlanMismatch);
    }
    try {
        train(data, shuffles(8, 50, 1), {Architecture::Linear, 0}, {1e308, 2, 0.0}, SeedSpec{1});
        FAIL("expected NonFiniteWeights");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteWeights);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("momentum is opt-in") {
    const auto data = small_data(32, 3, 2);
    const auto plans = shuffles(32, 3, 3);
    const auto plain = train(data, plans, {}, {0.05, 8, 0.0}, SeedSpec{1});
    const auto heavy = train(data, plans, {}, {0.05, 8, 0.9}, SeedSpec{1});
    CHECK(plain.model.parameters() != heavy.model.parameters());
}

TEST_CASE("checkpoint and log output") {
    const auto data = small_data(16, 3, 4);
    const auto result = train(data, shuffles(16, 2, 1), {Architecture::Mlp, 4}, {}, SeedSpec{6});
    std::stringstream buffer;
    write_checkpoint(buffer, result.model);
    CHECK(read_checkpoint(buffer) == result.model);

    std::istringstream bad("kgc-model 1\narchitecture linear\ninput_dim 2\nhidden_width 0\nparameters 5\n");
    CHECK_THROWS_AS(read_checkpoint(bad), Error);

    std::ostringstream log;
    write_train_log(log, result.log);
    CHECK(log.str().rfind("epoch,loss,order_fingerprint\n1,", 0) == 0);
}
