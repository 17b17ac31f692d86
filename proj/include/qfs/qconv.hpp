#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qfs/ansatz.hpp"
#include "qfs/circuit.hpp"
#include "qfs/data.hpp"
#include "qfs/parallel.hpp"

namespace qfs {

/// 1D quantum convolution geometry. The kernel is the descriptor's M.
struct ConvConfig {
    int window = 4; ///< c, lags per sample
    int padding = 1;
    int stride = 1;
    ModelDescriptor descriptor;

    [[nodiscard]] int kernel() const noexcept { return descriptor.kernel; }
    /// o = (c + 2p - k)/s + 1.
    [[nodiscard]] int output_length() const noexcept;
    /// Throws DescriptorError unless k < c and o is a positive integer.
    void validate() const;

    bool operator==(const ConvConfig &) const = default;
};

/// Quantum convolution, per-channel ReLU and max-pool over windows, then a
/// linear head. Predictions are made in scaled space and inverted.
class QConvModel {
  public:
    QConvModel(ConvConfig conv, Scaler scaler);

    /// Quantum weights uniform in [0, 2pi); head and bias uniform in
    /// +-1/sqrt(n_qubits).
    void initialize(std::uint64_t seed);

    [[nodiscard]] const ConvConfig &conv() const noexcept { return conv_; }
    [[nodiscard]] const Scaler &scaler() const noexcept { return scaler_; }
    [[nodiscard]] const CircuitProgram &circuit() const noexcept { return circuit_; }
    [[nodiscard]] int n_qubits() const noexcept { return circuit_.n_qubits(); }

    /// Flat layout: quantum weights, head weights, bias.
    [[nodiscard]] std::size_t n_parameters() const noexcept;
    [[nodiscard]] std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    std::vector<double> quantum_weights;
    std::vector<double> head_weights;
    double head_bias = 0.0;

  private:
    ConvConfig conv_;
    Scaler scaler_;
    CircuitProgram circuit_;
};

/// Per-qubit <Z> for one already-scaled window of k values.
std::vector<double> forward_window(const QConvModel &model,
                                   std::span<const double> window);

/// Feature map of a scaled sample, indexed [channel][window], shape (n, o).
/// Padding adds zero angles at both edges.
std::vector<std::vector<double>> feature_map(const QConvModel &model,
                                             std::span<const double> scaled);

/// Prediction in scaled space for a scaled sample.
double forward_scaled(const QConvModel &model, std::span<const double> scaled);

/// Prediction in original units for a raw sample of length c.
double forward(const QConvModel &model, std::span<const double> sample);

std::vector<double> predict(const QConvModel &model,
                            const std::vector<std::vector<double>> &inputs,
                            Exec exec = Exec::Parallel);

struct LossGradient {
    double loss = 0.0;             ///< squared error in scaled space
    std::vector<double> gradient;  ///< same layout as parameters()
};

/// Exact gradient: head analytically, max-pool routed to the first argmax
/// window, ReLU'(0) = 0, quantum part by the adjoint method.
LossGradient loss_and_gradient(const QConvModel &model,
                               std::span<const double> sample, double target);

struct TrainConfig {
    int epochs = 30;
    double learning_rate = 0.01;
    int batch_size = 16;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0; ///< mean scaled squared error over train rows
    double test_rmse = 0.0;  ///< original units; NaN without test rows
};

struct TrainResult {
    QConvModel model; ///< snapshot with the lowest train loss
    std::vector<EpochRecord> history;
    int best_epoch = 0;
};

/// Adam over shuffled minibatches of the train split. Per-sample gradients
/// may run concurrently but are summed in sample order. Throws TrainingError
/// on a non-finite loss.
TrainResult train(const QConvModel &model, const WindowedDataset &dataset,
                  const TrainConfig &config, Exec exec = Exec::Parallel);

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;          ///< fraction, not percent
    bool mape_defined = true;   ///< false when some target is exactly 0
    std::size_t n = 0;
};

Metrics compute_metrics(std::span<const double> predictions,
                        std::span<const double> targets);

enum class Split { Train, Test, All };

Metrics evaluate(const QConvModel &model, const WindowedDataset &dataset,
                 Split split = Split::Test, Exec exec = Exec::Parallel);

/// Predicts x(t + h) = x(t), the last lag of each row.
Metrics persistence_metrics(const WindowedDataset &dataset,
                            Split split = Split::Test);

constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const QConvModel &model, const std::filesystem::path &path);

/// Throws ParseError (with location) on malformed files.
QConvModel load_checkpoint(const std::filesystem::path &path);

/// As above, and throws DescriptorError unless the stored geometry and
/// descriptor equal `expected`.
QConvModel load_checkpoint(const std::filesystem::path &path,
                           const ConvConfig &expected);

} // namespace qfs
