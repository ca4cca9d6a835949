#include "kgc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "kgc/error.hpp"
#include "kgc/text.hpp"

namespace kgc {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

std::size_t parameter_count(const ModelSpec& spec, std::size_t d) {
    if (spec.architecture == Architecture::Linear) return d + 1;
    const std::size_t h = spec.hidden_width;
    return h * d + h + h + 1;
}

}  // namespace

std::string to_string(Architecture arch) {
    return arch == Architecture::Linear ? "linear" : "mlp";
}

Architecture parse_architecture(std::string_view name) {
    if (name == "linear") return Architecture::Linear;
    if (name == "mlp") return Architecture::Mlp;
    fail(ErrorCode::ConfigError, "unknown architecture '" + std::string(name) + "'");
}

Model::Model(ModelSpec spec, std::size_t input_dim) : spec_(spec), input_dim_(input_dim) {
    if (input_dim_ == 0) fail(ErrorCode::ShapeError, "input dimension must be positive");
    if (spec_.architecture == Architecture::Mlp && spec_.hidden_width == 0) {
        fail(ErrorCode::ShapeError, "hidden width must be positive");
    }
    params_.assign(parameter_count(spec_, input_dim_), 0.0);
}

Model Model::initialize(ModelSpec spec, std::size_t input_dim, Stream stream) {
    Model model(spec, input_dim);
    auto& p = model.params_;
    const std::size_t d = input_dim;
    if (spec.architecture == Architecture::Linear) {
        for (std::size_t k = 0; k < d; ++k) p[k] = 0.01 * stream.normal();
        return model;
    }
    const std::size_t h = spec.hidden_width;
    const double scale1 = 1.0 / std::sqrt(static_cast<double>(d));
    const double scale2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t k = 0; k < h * d; ++k) p[k] = scale1 * stream.normal();
    for (std::size_t j = 0; j < h; ++j) p[h * d + h + j] = scale2 * stream.normal();
    return model;
}

double Model::logit(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        fail(ErrorCode::ShapeError, "expected " + std::to_string(input_dim_) + " features, got " +
                                        std::to_string(x.size()));
    }
    const std::size_t d = input_dim_;
    if (spec_.architecture == Architecture::Linear) {
        double z = params_[d];
        for (std::size_t k = 0; k < d; ++k) z += params_[k] * x[k];
        return z;
    }
    const std::size_t h = spec_.hidden_width;
    const double* w1 = params_.data();
    const double* b1 = w1 + h * d;
    const double* w2 = b1 + h;
    double z = w2[h];
    for (std::size_t j = 0; j < h; ++j) {
        double a = b1[j];
        for (std::size_t k = 0; k < d; ++k) a += w1[j * d + k] * x[k];
        z += w2[j] * std::tanh(a);
    }
    return z;
}

double Model::score(std::span<const double> x) const { return sigmoid(logit(x)); }

double Model::loss(std::span<const SampleRecord> data, std::span<const std::size_t> indices,
                   std::vector<double>* grad) const {
    if (indices.empty()) return 0.0;
    if (grad) grad->assign(params_.size(), 0.0);
    const std::size_t d = input_dim_;
    const std::size_t h = spec_.hidden_width;
    std::vector<double> hidden(spec_.architecture == Architecture::Mlp ? h : 0);

    double total = 0.0;
    for (const std::size_t idx : indices) {
        const SampleRecord& rec = data[idx];
        const std::span<const double> x = rec.features;
        if (x.size() != d) fail(ErrorCode::ShapeError, "feature dimension mismatch for " + rec.id);
        const double y = static_cast<double>(rec.label);

        double z;
        if (spec_.architecture == Architecture::Linear) {
            z = logit(x);
        } else {
            const double* w1 = params_.data();
            const double* b1 = w1 + h * d;
            const double* w2 = b1 + h;
            z = w2[h];
            for (std::size_t j = 0; j < h; ++j) {
                double a = b1[j];
                for (std::size_t k = 0; k < d; ++k) a += w1[j * d + k] * x[k];
                hidden[j] = std::tanh(a);
                z += w2[j] * hidden[j];
            }
        }
        total += softplus(z) - y * z;
        if (!grad) continue;

        const double delta = sigmoid(z) - y;
        auto& g = *grad;
        if (spec_.architecture == Architecture::Linear) {
            for (std::size_t k = 0; k < d; ++k) g[k] += delta * x[k];
            g[d] += delta;
            continue;
        }
        const double* w2 = params_.data() + h * d + h;
        double* gw1 = g.data();
        double* gb1 = gw1 + h * d;
        double* gw2 = gb1 + h;
        for (std::size_t j = 0; j < h; ++j) {
            gw2[j] += delta * hidden[j];
            const double dh = delta * w2[j] * (1.0 - hidden[j] * hidden[j]);
            gb1[j] += dh;
            for (std::size_t k = 0; k < d; ++k) gw1[j * d + k] += dh * x[k];
        }
        gw2[h] += delta;
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    if (grad) {
        for (double& v : *grad) v *= inv;
    }
    return total * inv;
}

TrainResult train(std::span<const SampleRecord> data, std::span<const EpochPlan> plans,
                  const ModelSpec& spec, const Hyperparams& hyper, const SeedSpec& seed,
                  std::uint64_t run_index) {
    if (data.empty()) fail(ErrorCode::EmptyDataset, "no training data");
    if (!(hyper.learning_rate > 0.0) || hyper.batch_size == 0 || hyper.momentum < 0.0 ||
        hyper.momentum >= 1.0) {
        fail(ErrorCode::InvalidParams, "need learning rate > 0, batch size >= 1, 0 <= momentum < 1");
    }
    for (const auto& plan : plans) {
        if (!is_permutation_of_indices(plan.order, data.size())) {
            fail(ErrorCode::PlanMismatch, "plan for epoch " + std::to_string(plan.epoch) +
                                              " is not a permutation of " +
                                              std::to_string(data.size()) + " samples");
        }
    }

    TrainResult result{Model::initialize(spec, data.front().features.size(),
                                         seed.stream(StreamTag::ModelInit, run_index)),
                       {}};
    Model& model = result.model;
    auto& params = model.parameters();
    std::vector<double> grad;
    std::vector<double> velocity(params.size(), 0.0);

    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    for (const auto& plan : plans) {
        const std::span<const std::size_t> order = plan.order;
        for (std::size_t start = 0, batch = 0; start < order.size();
             start += hyper.batch_size, ++batch) {
            const std::size_t len = std::min(hyper.batch_size, order.size() - start);
            model.loss(data, order.subspan(start, len), &grad);
            for (std::size_t k = 0; k < params.size(); ++k) {
                velocity[k] = hyper.momentum * velocity[k] - hyper.learning_rate * grad[k];
                params[k] += velocity[k];
                if (!std::isfinite(params[k])) {
                    fail(ErrorCode::NonFiniteWeights,
                         "parameter " + std::to_string(k) + " became non-finite at epoch " +
                             std::to_string(plan.epoch) + ", batch " + std::to_string(batch) +
                             " (learning rate " + text::format_double(hyper.learning_rate) + ")");
                }
            }
        }
        const double epoch_loss = model.loss(data, all);
        if (!std::isfinite(epoch_loss)) {
            fail(ErrorCode::NonFiniteWeights, "loss is not finite after epoch " +
                                                  std::to_string(plan.epoch));
        }
        result.log.epochs.push_back({plan.epoch, epoch_loss, order_fingerprint(order)});
    }
    return result;
}

std::vector<double> predict_scores(const Model& model, std::span<const SampleRecord> data) {
    std::vector<double> scores;
    scores.reserve(data.size());
    for (const auto& rec : data) scores.push_back(model.score(rec.features));
    return scores;
}

void write_train_log(std::ostream& out, const TrainLog& log) {
    out << "epoch,loss,order_fingerprint\n";
    for (const auto& e : log.epochs) {
        char fp[17];
        std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(e.order_fingerprint));
        out << e.epoch << ',' << text::format_double(e.loss) << ',' << fp << '\n';
    }
}

void write_checkpoint(std::ostream& out, const Model& model) {
    out << "kgc-model 1\n";
    out << "architecture " << to_string(model.spec().architecture) << '\n';
    out << "input_dim " << model.input_dim() << '\n';
    out << "hidden_width " << model.spec().hidden_width << '\n';
    out << "parameters " << model.parameters().size() << '\n';
    for (const double p : model.parameters()) out << text::format_double(p) << '\n';
}

Model read_checkpoint(std::istream& in) {
    const auto bad = [](const std::string& what) -> Model {
        fail(ErrorCode::IoError, "bad checkpoint: " + what);
    };
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "kgc-model" || version != "1") {
        return bad("missing 'kgc-model 1' header");
    }
    std::string key, arch_name;
    std::size_t input_dim = 0, hidden = 0, count = 0;
    if (!(in >> key >> arch_name) || key != "architecture") return bad("architecture");
    if (!(in >> key >> input_dim) || key != "input_dim") return bad("input_dim");
    if (!(in >> key >> hidden) || key != "hidden_width") return bad("hidden_width");
    if (!(in >> key >> count) || key != "parameters") return bad("parameters");

    Model model({parse_architecture(arch_name), hidden}, input_dim);
    if (count != model.parameters().size()) return bad("parameter count does not match shape");
    for (double& p : model.parameters()) {
        std::string token;
        if (!(in >> token)) return bad("truncated parameter list");
        const auto value = text::parse_double(token);
        if (!value) return bad("bad value '" + token + "'");
        p = *value;
    }
    return model;
}

}  // namespace kgc
