#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qfs/error.hpp"
#include "qfs/qconv.hpp"

namespace qfs {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

ConvConfig Conv(AnsatzFamily family, Architecture arch, int layers, int window = 4) {
    ConvConfig c;
    c.window = window;
    c.descriptor.ansatz.family = family;
    c.descriptor.architecture = arch;
    c.descriptor.kernel = 2;
    c.descriptor.layers = layers;
    return c;
}

QConvModel RandomModel(const ConvConfig &conv, std::uint64_t seed) {
    QConvModel m(conv, Scaler(-1.0, 2.0));
    m.initialize(seed);
    return m;
}

double ScaledLoss(const QConvModel &m, std::span<const double> sample, double target) {
    const double r = forward_scaled(m, [&] {
        std::vector<double> s(sample.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = m.scaler().apply(sample[i]);
        }
        return s;
    }()) - m.scaler().apply(target);
    return r * r;
}

WindowedDataset SyntheticDataset(std::size_t rows, std::size_t split, std::uint64_t seed,
                                 bool flat) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    WindowedDataset d;
    d.lag_offsets = {-3, -2, -1, 0};
    d.horizon = 1;
    d.split_index = split;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> x(4);
        for (auto &v : x) {
            v = flat ? 0.3 : u(eng);
        }
        d.targets.push_back(flat ? 0.3 : 0.5 * (x[3] + x[2]));
        d.inputs.push_back(std::move(x));
        d.anchors.push_back(r + 3);
    }
    return d;
}

class TempDir : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qfs_qconv_" + std::string(::testing::UnitTest::GetInstance()
                                               ->current_test_info()
                                               ->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

TEST(ConvConfig, OutputLength) {
    auto c = Conv(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2, 5);
    EXPECT_EQ(c.output_length(), 6);
    c.window = 4;
    EXPECT_EQ(c.output_length(), 5);
    c.padding = 0;
    c.stride = 2;
    EXPECT_EQ(c.output_length(), 2);
    c.window = 5;
    EXPECT_THROW(c.validate(), DescriptorError);
    c = Conv(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2, 2);
    EXPECT_THROW(c.validate(), DescriptorError);
}

TEST(Forward, FeatureMapShape) {
    for (int window : {3, 4, 5, 8}) {
        for (int padding : {0, 1, 2}) {
            for (int stride : {1, 2}) {
                auto c = Conv(AnsatzFamily::BasicEntangler, Architecture::SuperParallel, 2, window);
                c.padding = padding;
                c.stride = stride;
                if ((window + 2 * padding - 2) % stride != 0) {
                    EXPECT_THROW(c.validate(), DescriptorError);
                    continue;
                }
                const auto m = RandomModel(c, 1);
                const std::vector<double> x(window, 0.4);
                const auto fm = feature_map(m, x);
                ASSERT_EQ(fm.size(), 4U);
                for (const auto &ch : fm) {
                    EXPECT_EQ(static_cast<int>(ch.size()),
                              (window + 2 * padding - 2) / stride + 1);
                }
            }
        }
    }
}

TEST(Forward, WindowMatchesSimulator) {
    const auto c = Conv(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2);
    QConvModel m(c, Scaler(0.0, 1.0));
    const std::vector<double> zero = {0.0, 0.0};
    for (double v : forward_window(m, zero)) {
        EXPECT_NEAR(v, 1.0, 1e-15);
    }
    const std::vector<double> w = {0.3, 1.1};
    const auto got = forward_window(m, w);
    const auto psi = oracle::dense_run(m.circuit(), w, m.quantum_weights);
    for (int q = 0; q < 4; ++q) {
        EXPECT_NEAR(got[q], oracle::dense_expval_z(psi, q), 1e-13);
    }
    const auto basic =
        QConvModel(Conv(AnsatzFamily::BasicEntangler, Architecture::SuperParallel, 2),
                   Scaler(0.0, 1.0));
    for (double v : forward_window(basic, zero)) {
        EXPECT_NEAR(v, 1.0, 1e-15);
    }
}

TEST(Forward, ZeroHeadGivesInverseScaledBias) {
    auto m = RandomModel(Conv(AnsatzFamily::CustomLayers, Architecture::SuperParallel, 2), 5);
    std::fill(m.head_weights.begin(), m.head_weights.end(), 0.0);
    m.head_bias = 0.7;
    std::mt19937_64 eng(2);
    for (int i = 0; i < 5; ++i) {
        const auto x = oracle::random_angles(4, eng, -1, 2);
        EXPECT_NEAR(forward(m, x), m.scaler().invert(0.7), 1e-15);
    }
}

TEST(Forward, PipelineByHand) {
    // Recompute pad, window, ReLU, max-pool and head from forward_window.
    const auto m = RandomModel(Conv(AnsatzFamily::StronglyEntangling,
                                    Architecture::SuperParallel, 2), 3);
    const std::vector<double> x = {0.1, -0.4, 1.5, 0.9};
    std::vector<double> padded = {0.0};
    for (double v : x) {
        padded.push_back(m.scaler().apply(v));
    }
    padded.push_back(0.0);
    std::vector<double> pooled(4, 0.0);
    for (int j = 0; j < 5; ++j) {
        const std::vector<double> w = {padded[j], padded[j + 1]};
        const auto e = forward_window(m, w);
        for (int q = 0; q < 4; ++q) {
            pooled[q] = std::max(pooled[q], std::max(e[q], 0.0));
        }
    }
    double y = m.head_bias;
    for (int q = 0; q < 4; ++q) {
        y += m.head_weights[q] * pooled[q];
    }
    EXPECT_NEAR(forward(m, x), m.scaler().invert(y), 1e-14);
}

TEST(Gradient, MatchesFiniteDifferencesForEveryAnsatz) {
    const AnsatzFamily families[] = {
        AnsatzFamily::StronglyEntangling, AnsatzFamily::BasicEntangler,
        AnsatzFamily::CustomLayers, AnsatzFamily::RandomLayers,
        AnsatzFamily::DenseBlock};
    std::mt19937_64 eng(31);
    for (auto family : families) {
        for (int layers : {2, 3}) { // 4 and 6 qubits
            auto m = RandomModel(Conv(family, Architecture::SuperParallel, layers), 40 + layers);
            const auto x = oracle::random_angles(4, eng, -1, 2);
            const double target = 0.6;
            const auto lg = loss_and_gradient(m, x, target);
            EXPECT_NEAR(lg.loss, ScaledLoss(m, x, target), 1e-14);
            auto p = m.parameters();
            ASSERT_EQ(lg.gradient.size(), p.size());
            const double h = 1e-4;
            double worst = 0;
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double keep = p[j];
                p[j] = keep + h;
                m.set_parameters(p);
                const double up = ScaledLoss(m, x, target);
                p[j] = keep - h;
                m.set_parameters(p);
                const double dn = ScaledLoss(m, x, target);
                p[j] = keep;
                m.set_parameters(p);
                worst = std::max(worst, std::abs((up - dn) / (2 * h) - lg.gradient[j]));
            }
            EXPECT_LT(worst, 1e-5) << to_string(family) << " L=" << layers;
        }
    }
}

TEST(Gradient, PerfectPredictionHasZeroLoss) {
    const auto m = RandomModel(Conv(AnsatzFamily::BasicEntangler,
                                    Architecture::SuperParallel, 2), 9);
    const std::vector<double> x = {0.2, 0.3, 0.1, 0.8};
    const double target = forward(m, x);
    const auto lg = loss_and_gradient(m, x, target);
    EXPECT_NEAR(lg.loss, 0.0, 1e-24);
    for (double g : lg.gradient) {
        EXPECT_NEAR(g, 0.0, 1e-10);
    }
}

TEST(Gradient, DeadUnitsBlockQuantumPath) {
    // Parallel BasicEntangler on 2 qubits: W1, enc, W2. With every scaled
    // input at 0 the encoding is the identity; RX(pi) on qubit 0 followed by
    // CNOT(0, 1) leaves |11>, so both channels read -1 in every window.
    QConvModel m(Conv(AnsatzFamily::BasicEntangler, Architecture::Parallel, 1),
                 Scaler(0.0, 1.0));
    m.quantum_weights = {0.0, 0.0, kPi, 0.0};
    m.head_weights = {0.5, -0.3};
    m.head_bias = 0.2;
    const std::vector<double> x(4, 0.0);
    for (const auto &ch : feature_map(m, x)) {
        for (double v : ch) {
            ASSERT_LT(v, 0.0);
        }
    }
    const auto lg = loss_and_gradient(m, x, 0.9);
    for (std::size_t j = 0; j < m.quantum_weights.size(); ++j) {
        EXPECT_EQ(lg.gradient[j], 0.0);
    }
    EXPECT_NE(lg.gradient.back(), 0.0);
    EXPECT_NEAR(lg.gradient.back(), 2 * (0.2 - m.scaler().apply(0.9)), 1e-14);
}

TEST(Train, ConstantTargetIsFitted) {
    // A flat series: every window and target equals 0.3. Fitting a scaler
    // on it would be degenerate, so the range is given explicitly.
    auto d = SyntheticDataset(400, 400, 3, true);
    QConvModel m(Conv(AnsatzFamily::BasicEntangler, Architecture::SuperParallel, 2),
                 Scaler(0.0, 1.0));
    m.initialize(1);
    TrainConfig cfg;
    cfg.seed = 1;
    const auto r = train(m, d, cfg);
    ASSERT_EQ(r.history.size(), 30U);
    double best = 1e300;
    for (const auto &e : r.history) {
        best = std::min(best, e.train_loss);
        EXPECT_TRUE(std::isnan(e.test_rmse));
    }
    EXPECT_LT(best, 1e-4);
    EXPECT_EQ(r.history[r.best_epoch - 1].train_loss, best);
}

TEST(Train, DeterministicAcrossExecutionModes) {
    auto d = SyntheticDataset(80, 60, 4, false);
    const auto sc = fit_scaler(d);
    QConvModel m(Conv(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2), sc);
    m.initialize(2);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 5;
    const auto a = train(m, d, cfg, Exec::Serial);
    const auto b = train(m, d, cfg, Exec::Parallel);
    const auto c = train(m, d, cfg, Exec::Parallel);
    ASSERT_EQ(a.history.size(), 3U);
    for (std::size_t e = 0; e < 3; ++e) {
        EXPECT_EQ(a.history[e].train_loss, b.history[e].train_loss);
        EXPECT_EQ(a.history[e].test_rmse, b.history[e].test_rmse);
        EXPECT_EQ(b.history[e].train_loss, c.history[e].train_loss);
    }
    EXPECT_EQ(a.model.parameters(), b.model.parameters());
    EXPECT_EQ(a.best_epoch, b.best_epoch);
}

TEST(Train, Errors) {
    auto d = SyntheticDataset(20, 0, 4, false);
    QConvModel m(Conv(AnsatzFamily::BasicEntangler, Architecture::SuperParallel, 2),
                 Scaler(0.0, 1.0));
    EXPECT_THROW(train(m, d, {}), SizeError);
    d.split_index = 10;
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(train(m, d, cfg), RangeError);
    cfg = {};
    cfg.learning_rate = 1e308;
    cfg.epochs = 2;
    m.initialize(0);
    try {
        train(m, d, cfg);
        FAIL() << "expected divergence";
    } catch (const TrainingError &e) {
        EXPECT_GE(e.epoch(), 1);
    }
}

TEST(Metrics, HandArithmetic) {
    const std::vector<double> pred = {3.0, 1.0}, target = {2.0, 2.0};
    const auto m = compute_metrics(pred, target);
    EXPECT_DOUBLE_EQ(m.rmse, 1.0);
    EXPECT_DOUBLE_EQ(m.mae, 1.0);
    EXPECT_DOUBLE_EQ(m.mape, 0.5);
    EXPECT_TRUE(m.mape_defined);
    const auto perfect = compute_metrics(target, target);
    EXPECT_EQ(perfect.rmse, 0.0);
    EXPECT_EQ(perfect.mae, 0.0);
    EXPECT_EQ(perfect.mape, 0.0);
    const std::vector<double> zero_target = {0.0, 1.0};
    EXPECT_FALSE(compute_metrics(pred, zero_target).mape_defined);
}

TEST(Metrics, MaeNeverExceedsRmse) {
    std::mt19937_64 eng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = oracle::random_angles(30, eng, -3, 3);
        const auto t = oracle::random_angles(30, eng, 0.5, 3);
        const auto m = compute_metrics(p, t);
        EXPECT_LE(m.mae, m.rmse + 1e-15);
    }
}

TEST(Metrics, PersistenceBaseline) {
    const auto d = SyntheticDataset(10, 5, 1, false);
    const auto m = persistence_metrics(d, Split::Test);
    std::vector<double> pred, tgt;
    for (std::size_t r = 5; r < 10; ++r) {
        pred.push_back(d.inputs[r].back());
        tgt.push_back(d.targets[r]);
    }
    EXPECT_EQ(m.rmse, compute_metrics(pred, tgt).rmse);
    EXPECT_EQ(m.n, 5U);
}

TEST_F(TempDir, CheckpointRoundTrip) {
    const auto conv = Conv(AnsatzFamily::RandomLayers, Architecture::SuperParallel, 2);
    QConvModel m(conv, Scaler(-0.123456789012345, 1.98765432109876));
    m.initialize(77);
    const auto path = dir_ / "m.checkpoint.json";
    save_checkpoint(m, path);
    const auto back = load_checkpoint(path, conv);
    EXPECT_EQ(back.parameters(), m.parameters());
    EXPECT_EQ(back.scaler(), m.scaler());
    EXPECT_EQ(back.conv(), m.conv());
    std::mt19937_64 eng(6);
    for (int i = 0; i < 100; ++i) {
        const auto x = oracle::random_angles(4, eng, -1, 2);
        EXPECT_EQ(forward(back, x), forward(m, x));
    }
}

TEST_F(TempDir, CheckpointErrors) {
    const auto conv = Conv(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2);
    auto m = RandomModel(conv, 1);
    const auto path = dir_ / "m.checkpoint.json";
    save_checkpoint(m, path);
    std::string text;
    {
        std::ifstream in(path);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    const auto cut = dir_ / "cut.json";
    std::ofstream(cut) << text.substr(0, text.size() / 2);
    EXPECT_THROW(load_checkpoint(cut), ParseError);
    EXPECT_THROW(load_checkpoint(dir_ / "none.json"), ParseError);

    auto other = conv;
    other.descriptor.ansatz.family = AnsatzFamily::BasicEntangler;
    EXPECT_THROW(load_checkpoint(path, other), DescriptorError);
    other = conv;
    other.padding = 0;
    other.window = 3;
    EXPECT_THROW(load_checkpoint(path, other), DescriptorError);
}

} // namespace
} // namespace qfs
