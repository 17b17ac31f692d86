#include "qfs/qconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "qfs/error.hpp"
#include "qfs/gradient.hpp"
#include "qfs/rng.hpp"
#include "qfs/serialize.hpp"
#include "qfs/simulate.hpp"

namespace qfs {

namespace {

std::vector<double> scale_sample(const QConvModel &model,
                                 std::span<const double> sample) {
    if (static_cast<int>(sample.size()) != model.conv().window) {
        throw ArityError("sample has " + std::to_string(sample.size()) +
                         " values, model expects " +
                         std::to_string(model.conv().window));
    }
    std::vector<double> out(sample.size());
    std::transform(sample.begin(), sample.end(), out.begin(),
                   [&](double v) { return model.scaler().apply(v); });
    return out;
}

// Scaled sample with `padding` zero angles on each side.
std::vector<double> pad(const ConvConfig &conv, std::span<const double> scaled) {
    std::vector<double> padded(scaled.size() + 2 * static_cast<std::size_t>(conv.padding), 0.0);
    std::copy(scaled.begin(), scaled.end(), padded.begin() + conv.padding);
    return padded;
}

std::span<const double> window_at(const ConvConfig &conv,
                                  const std::vector<double> &padded, int j) {
    return std::span<const double>(padded).subspan(
        static_cast<std::size_t>(j * conv.stride),
        static_cast<std::size_t>(conv.kernel()));
}

struct Pooled {
    std::vector<double> value;  // per channel, after ReLU and max-pool
    std::vector<int> argmax;    // window feeding each channel
    std::vector<bool> active;   // pre-activation > 0 at argmax
};

// ReLU then max over windows; the first maximal window wins ties.
Pooled pool(const std::vector<std::vector<double>> &expvals_by_window, int n) {
    Pooled p;
    p.value.assign(static_cast<std::size_t>(n), 0.0);
    p.argmax.assign(static_cast<std::size_t>(n), 0);
    p.active.assign(static_cast<std::size_t>(n), false);
    for (int q = 0; q < n; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        double best = -1.0;
        for (std::size_t j = 0; j < expvals_by_window.size(); ++j) {
            const double pre = expvals_by_window[j][qi];
            const double r = std::max(pre, 0.0);
            if (r > best) {
                best = r;
                p.argmax[qi] = static_cast<int>(j);
                p.active[qi] = pre > 0.0;
            }
        }
        p.value[qi] = best;
    }
    return p;
}

std::vector<std::vector<double>> expvals_by_window(const QConvModel &model,
                                                   std::span<const double> scaled) {
    const ConvConfig &conv = model.conv();
    const auto padded = pad(conv, scaled);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(conv.output_length()));
    for (int j = 0; j < conv.output_length(); ++j) {
        out.push_back(expvals_all(model.circuit(), window_at(conv, padded, j),
                                  model.quantum_weights));
    }
    return out;
}

double head(const QConvModel &model, const std::vector<double> &pooled) {
    double y = model.head_bias;
    for (std::size_t q = 0; q < pooled.size(); ++q) {
        y += model.head_weights[q] * pooled[q];
    }
    return y;
}

void check_head(const QConvModel &model) {
    if (static_cast<int>(model.head_weights.size()) != model.n_qubits()) {
        throw ArityError("head weight count does not match the qubit count");
    }
}

std::pair<std::size_t, std::size_t> split_rows(const WindowedDataset &d, Split split) {
    switch (split) {
    case Split::Train:
        return {0, d.split_index};
    case Split::Test:
        return {d.split_index, d.size()};
    case Split::All:
        break;
    }
    return {0, d.size()};
}

class Adam {
  public:
    Adam(std::size_t n, const TrainConfig &cfg)
        : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double> &params, const std::vector<double> &grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            params[i] -= cfg_.learning_rate * (m_[i] / c1) /
                         (std::sqrt(v_[i] / c2) + cfg_.epsilon);
        }
    }

  private:
    TrainConfig cfg_;
    std::vector<double> m_, v_;
    int t_ = 0;
};

double mean_train_loss(const QConvModel &model, const WindowedDataset &d,
                       Exec exec) {
    std::vector<double> losses(d.split_index);
    parallel_for(losses.size(), exec, [&](std::size_t i) {
        const double pred = forward_scaled(model, scale_sample(model, d.inputs[i]));
        const double err = pred - model.scaler().apply(d.targets[i]);
        losses[i] = err * err;
    });
    double sum = 0.0;
    for (double l : losses) {
        sum += l;
    }
    return sum / static_cast<double>(losses.size());
}

} // namespace

int ConvConfig::output_length() const noexcept {
    if (stride < 1) {
        return 0;
    }
    return (window + 2 * padding - kernel()) / stride + 1;
}

void ConvConfig::validate() const {
    qfs::validate(descriptor);
    if (window < 1 || padding < 0 || stride < 1) {
        throw DescriptorError("window must be >= 1, padding >= 0, stride >= 1");
    }
    if (kernel() >= window) {
        throw DescriptorError("kernel " + std::to_string(kernel()) +
                              " must be smaller than the window " +
                              std::to_string(window));
    }
    const int span = window + 2 * padding - kernel();
    if (span < 0 || span % stride != 0) {
        throw DescriptorError("(c + 2p - k) is not a non-negative multiple of s");
    }
}

QConvModel::QConvModel(ConvConfig conv, Scaler scaler)
    : conv_(std::move(conv)), scaler_(scaler) {
    conv_.validate();
    circuit_ = build_architecture(conv_.descriptor);
    quantum_weights.assign(static_cast<std::size_t>(circuit_.n_weight_slots()), 0.0);
    head_weights.assign(static_cast<std::size_t>(circuit_.n_qubits()), 0.0);
}

void QConvModel::initialize(std::uint64_t seed) {
    auto eng = substream(seed, StreamTag::ModelInit, 0);
    for (auto &w : quantum_weights) {
        w = uniform(eng, 0.0, 2.0 * std::numbers::pi);
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(n_qubits()));
    for (auto &h : head_weights) {
        h = uniform(eng, -bound, bound);
    }
    head_bias = uniform(eng, -bound, bound);
}

std::size_t QConvModel::n_parameters() const noexcept {
    return quantum_weights.size() + head_weights.size() + 1;
}

std::vector<double> QConvModel::parameters() const {
    std::vector<double> p;
    p.reserve(n_parameters());
    p.insert(p.end(), quantum_weights.begin(), quantum_weights.end());
    p.insert(p.end(), head_weights.begin(), head_weights.end());
    p.push_back(head_bias);
    return p;
}

void QConvModel::set_parameters(std::span<const double> params) {
    if (params.size() != n_parameters()) {
        throw ArityError("expected " + std::to_string(n_parameters()) +
                         " parameters, got " + std::to_string(params.size()));
    }
    const auto nq = quantum_weights.size();
    const auto nh = head_weights.size();
    std::copy_n(params.begin(), nq, quantum_weights.begin());
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(nq), nh, head_weights.begin());
    head_bias = params[nq + nh];
}

std::vector<double> forward_window(const QConvModel &model,
                                   std::span<const double> window) {
    if (static_cast<int>(window.size()) != model.conv().kernel()) {
        throw ArityError("window must hold exactly k values");
    }
    return expvals_all(model.circuit(), window, model.quantum_weights);
}

std::vector<std::vector<double>> feature_map(const QConvModel &model,
                                             std::span<const double> scaled) {
    if (static_cast<int>(scaled.size()) != model.conv().window) {
        throw ArityError("sample length does not match the window");
    }
    const auto by_window = expvals_by_window(model, scaled);
    std::vector<std::vector<double>> fm(static_cast<std::size_t>(model.n_qubits()),
                                        std::vector<double>(by_window.size()));
    for (std::size_t j = 0; j < by_window.size(); ++j) {
        for (std::size_t q = 0; q < fm.size(); ++q) {
            fm[q][j] = by_window[j][q];
        }
    }
    return fm;
}

double forward_scaled(const QConvModel &model, std::span<const double> scaled) {
    check_head(model);
    if (static_cast<int>(scaled.size()) != model.conv().window) {
        throw ArityError("sample length does not match the window");
    }
    const Pooled p = pool(expvals_by_window(model, scaled), model.n_qubits());
    return head(model, p.value);
}

double forward(const QConvModel &model, std::span<const double> sample) {
    return model.scaler().invert(forward_scaled(model, scale_sample(model, sample)));
}

std::vector<double> predict(const QConvModel &model,
                            const std::vector<std::vector<double>> &inputs,
                            Exec exec) {
    std::vector<double> out(inputs.size());
    parallel_for(inputs.size(), exec,
                 [&](std::size_t i) { out[i] = forward(model, inputs[i]); });
    return out;
}

LossGradient loss_and_gradient(const QConvModel &model,
                               std::span<const double> sample, double target) {
    check_head(model);
    const ConvConfig &conv = model.conv();
    const int n = model.n_qubits();
    const auto scaled = scale_sample(model, sample);
    const auto padded = pad(conv, scaled);
    const auto by_window = expvals_by_window(model, scaled);
    const Pooled p = pool(by_window, n);

    const double err = head(model, p.value) - model.scaler().apply(target);
    const double g = 2.0 * err;

    LossGradient out;
    out.loss = err * err;
    out.gradient.assign(model.n_parameters(), 0.0);
    const std::size_t nq = model.quantum_weights.size();
    for (int q = 0; q < n; ++q) {
        out.gradient[nq + static_cast<std::size_t>(q)] = g * p.value[static_cast<std::size_t>(q)];
    }
    out.gradient.back() = g;

    // Each window receives the head coefficients of the channels it won.
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (int j = 0; j < conv.output_length(); ++j) {
        bool any = false;
        for (int q = 0; q < n; ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const bool routed = p.active[qi] && p.argmax[qi] == j;
            coeffs[qi] = routed ? g * model.head_weights[qi] : 0.0;
            any = any || (routed && coeffs[qi] != 0.0);
        }
        if (!any) {
            continue;
        }
        const auto og = grad_adjoint_weighted(model.circuit(), window_at(conv, padded, j),
                                              model.quantum_weights, coeffs);
        for (std::size_t k = 0; k < nq; ++k) {
            out.gradient[k] += og.gradient[k];
        }
    }
    return out;
}

TrainResult train(const QConvModel &model, const WindowedDataset &dataset,
                  const TrainConfig &config, Exec exec) {
    if (config.epochs < 1 || config.batch_size < 1) {
        throw RangeError("epochs and batch size must be >= 1");
    }
    if (!(config.learning_rate > 0.0)) {
        throw RangeError("learning rate must be positive");
    }
    if (dataset.split_index == 0) {
        throw SizeError("dataset has no training rows");
    }
    TrainResult result{model, {}, 0};
    QConvModel current = model;
    std::vector<double> params = current.parameters();
    Adam adam(params.size(), config);
    double best_loss = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(dataset.split_index);
    const auto batch = static_cast<std::size_t>(config.batch_size);
    std::vector<std::vector<double>> sample_grads(batch);
    std::vector<double> sample_losses(batch);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto eng = substream(config.seed, StreamTag::Shuffle,
                             static_cast<std::uint64_t>(epoch));
        std::shuffle(order.begin(), order.end(), eng);

        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t count = std::min(batch, order.size() - start);
            parallel_for(count, exec, [&](std::size_t b) {
                const std::size_t row = order[start + b];
                auto lg = loss_and_gradient(current, dataset.inputs[row],
                                            dataset.targets[row]);
                sample_losses[b] = lg.loss;
                sample_grads[b] = std::move(lg.gradient);
            });
            std::vector<double> grad(params.size(), 0.0);
            for (std::size_t b = 0; b < count; ++b) {
                if (!std::isfinite(sample_losses[b])) {
                    throw TrainingError("non-finite loss during epoch " +
                                            std::to_string(epoch),
                                        epoch);
                }
                for (std::size_t k = 0; k < grad.size(); ++k) {
                    grad[k] += sample_grads[b][k];
                }
            }
            for (double &gk : grad) {
                gk /= static_cast<double>(count);
            }
            adam.step(params, grad);
            current.set_parameters(params);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = mean_train_loss(current, dataset, exec);
        if (!std::isfinite(rec.train_loss)) {
            throw TrainingError("non-finite train loss after epoch " +
                                    std::to_string(epoch),
                                epoch);
        }
        rec.test_rmse = dataset.n_test() > 0
                            ? evaluate(current, dataset, Split::Test, exec).rmse
                            : std::numeric_limits<double>::quiet_NaN();
        result.history.push_back(rec);
        if (rec.train_loss < best_loss) {
            best_loss = rec.train_loss;
            result.model = current;
            result.best_epoch = epoch;
        }
    }
    return result;
}

Metrics compute_metrics(std::span<const double> predictions,
                        std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw SizeError("prediction and target counts differ");
    }
    if (targets.empty()) {
        throw SizeError("no rows to evaluate");
    }
    Metrics m;
    m.n = targets.size();
    double se = 0.0;
    double ae = 0.0;
    double ape = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = predictions[i] - targets[i];
        se += e * e;
        ae += std::abs(e);
        if (targets[i] == 0.0) {
            m.mape_defined = false;
        } else {
            ape += std::abs(e / targets[i]);
        }
    }
    const auto n = static_cast<double>(m.n);
    m.rmse = std::sqrt(se / n);
    m.mae = ae / n;
    m.mape = m.mape_defined ? ape / n : std::numeric_limits<double>::quiet_NaN();
    return m;
}

Metrics evaluate(const QConvModel &model, const WindowedDataset &dataset,
                 Split split, Exec exec) {
    const auto [lo, hi] = split_rows(dataset, split);
    std::vector<double> preds(hi - lo);
    parallel_for(preds.size(), exec, [&](std::size_t i) {
        preds[i] = forward(model, dataset.inputs[lo + i]);
    });
    return compute_metrics(preds, std::span<const double>(dataset.targets).subspan(lo, hi - lo));
}

Metrics persistence_metrics(const WindowedDataset &dataset, Split split) {
    const auto [lo, hi] = split_rows(dataset, split);
    std::vector<double> preds;
    preds.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        preds.push_back(dataset.inputs[i].back());
    }
    return compute_metrics(preds, std::span<const double>(dataset.targets).subspan(lo, hi - lo));
}

void save_checkpoint(const QConvModel &model, const std::filesystem::path &path) {
    write_json_file(checkpoint_json(model), path);
}

nlohmann::json checkpoint_json(const QConvModel &model) {
    nlohmann::json j;
    j["format_version"] = kCheckpointFormatVersion;
    j["descriptor"] = model.conv().descriptor;
    j["conv"] = model.conv();
    j["quantum_weights"] = model.quantum_weights;
    j["head_weights"] = model.head_weights;
    j["head_bias"] = model.head_bias;
    j["scaler"] = model.scaler();
    return j;
}

QConvModel load_checkpoint(const std::filesystem::path &path) {
    const nlohmann::json j = read_json_file(path);
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kCheckpointFormatVersion) {
            throw ParseError(path.string() + ": unsupported format_version " +
                             std::to_string(version));
        }
        ConvConfig conv = j.at("conv").get<ConvConfig>();
        conv.descriptor = j.at("descriptor").get<ModelDescriptor>();
        QConvModel model{conv, scaler_from_json(j.at("scaler"))};
        const auto qw = j.at("quantum_weights").get<std::vector<double>>();
        const auto hw = j.at("head_weights").get<std::vector<double>>();
        if (qw.size() != model.quantum_weights.size() ||
            hw.size() != model.head_weights.size()) {
            throw ParseError(path.string() +
                             ": weight counts do not match the stored descriptor");
        }
        model.quantum_weights = qw;
        model.head_weights = hw;
        model.head_bias = j.at("head_bias").get<double>();
        return model;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

QConvModel load_checkpoint(const std::filesystem::path &path,
                           const ConvConfig &expected) {
    QConvModel model = load_checkpoint(path);
    if (!(model.conv() == expected)) {
        nlohmann::json stored = model.conv().descriptor;
        nlohmann::json want = expected.descriptor;
        throw DescriptorError("checkpoint descriptor " + stored.dump() +
                              " (window " + std::to_string(model.conv().window) +
                              ") does not match the requested " + want.dump() +
                              " (window " + std::to_string(expected.window) + ")");
    }
    return model;
}

} // namespace qfs
