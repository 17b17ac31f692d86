#include "qfs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qfs/error.hpp"
#include "qfs/gradient.hpp"
#include "qfs/rng.hpp"
#include "qfs/simulate.hpp"

namespace qfs {

namespace {

std::vector<double> uniform_angles(std::mt19937_64 &eng, int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto &v : w) {
        v = uniform(eng, 0.0, 2.0 * std::numbers::pi);
    }
    return w;
}

// Neumaier-compensated running sum.
class CompensatedSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

FidelityHistogram make_histogram(std::span<const double> fidelities, int n_bins) {
    if (n_bins < 1) {
        throw SizeError("histogram needs at least one bin");
    }
    FidelityHistogram h;
    h.n_bins = n_bins;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (double f : fidelities) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw DomainError("fidelity " + std::to_string(f) + " outside [0, 1]");
        }
        auto b = static_cast<int>(f * n_bins);
        b = std::min(b, n_bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    h.n_samples = static_cast<std::int64_t>(fidelities.size());
    return h;
}

double haar_pdf(double fidelity, std::int64_t dim) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw DomainError("fidelity outside [0, 1]");
    }
    if (dim < 2) {
        throw DomainError("Haar density needs dimension >= 2");
    }
    const auto n = static_cast<double>(dim);
    return (n - 1.0) * std::pow(1.0 - fidelity, n - 2.0);
}

double haar_bin_probability(int bin, int n_bins, std::int64_t dim) {
    if (n_bins < 1 || bin < 0 || bin >= n_bins) {
        throw IndexError("bin " + std::to_string(bin) + " out of range");
    }
    if (dim < 2) {
        throw DomainError("Haar density needs dimension >= 2");
    }
    const double lo = static_cast<double>(bin) / n_bins;
    const double hi = static_cast<double>(bin + 1) / n_bins;
    const double e = static_cast<double>(dim - 1);
    return std::pow(1.0 - lo, e) - std::pow(1.0 - hi, e);
}

double expressibility_upper_bound(std::int64_t dim, int n_bins) {
    return static_cast<double>(dim - 1) * std::log(static_cast<double>(n_bins));
}

std::vector<double> sample_fidelities(const ModelDescriptor &desc,
                                      const DiagnosticsOptions &options,
                                      Exec exec) {
    return sample_fidelities(build_architecture(desc), options, exec);
}

std::vector<double> sample_fidelities(const CircuitProgram &circuit,
                                      const DiagnosticsOptions &options,
                                      Exec exec) {
    if (options.n_pairs < 1) {
        throw SizeError("need at least one fidelity pair");
    }
    const std::vector<double> data(static_cast<std::size_t>(circuit.n_data_slots()),
                                   options.data_value);
    const int n_w = circuit.n_weight_slots();
    std::vector<double> out(static_cast<std::size_t>(options.n_pairs));
    parallel_for(out.size(), exec, [&](std::size_t i) {
        auto eng = substream(options.seed, StreamTag::FidelityPairs, i);
        const auto theta = uniform_angles(eng, n_w);
        const auto phi = uniform_angles(eng, n_w);
        out[i] = fidelity(run(circuit, data, theta), run(circuit, data, phi));
    });
    return out;
}

double kl_to_haar(const FidelityHistogram &hist, std::int64_t dim) {
    if (hist.n_samples < 1) {
        throw SizeError("empty fidelity histogram");
    }
    double kl = 0.0;
    for (int b = 0; b < hist.n_bins; ++b) {
        const auto count = hist.counts[static_cast<std::size_t>(b)];
        if (count == 0) {
            continue;
        }
        const double p = static_cast<double>(count) / static_cast<double>(hist.n_samples);
        const double q = haar_bin_probability(b, hist.n_bins, dim);
        if (!(q > 0.0)) {
            throw NumericalGuardError("Haar bin " + std::to_string(b) +
                                      " has zero mass but holds samples");
        }
        kl += p * std::log(p / q);
    }
    return std::max(kl, 0.0);
}

ExpressibilityResult expressibility(const ModelDescriptor &desc,
                                    const DiagnosticsOptions &options,
                                    Exec exec) {
    const auto fids = sample_fidelities(desc, options, exec);
    const std::int64_t dim = std::int64_t{1} << desc.n_qubits();
    ExpressibilityResult r;
    r.histogram = make_histogram(fids, options.n_bins);
    r.kl = kl_to_haar(r.histogram, dim);
    r.upper_bound = expressibility_upper_bound(dim, options.n_bins);
    r.descriptor = desc;
    r.n_pairs = options.n_pairs;
    r.n_bins = options.n_bins;
    r.seed = options.seed;
    return r;
}

VarianceResult gradient_variance(const ModelDescriptor &desc,
                                 const DiagnosticsOptions &options, Exec exec) {
    if (options.n_samples < 2) {
        throw SizeError("variance needs at least two samples");
    }
    const CircuitProgram circuit = build_architecture(desc);
    if (circuit.n_weight_slots() < 1) {
        throw SizeError("circuit has no trainable weights");
    }
    if (options.parameter_index < 0 ||
        options.parameter_index >= circuit.n_weight_slots()) {
        throw IndexError("parameter index " +
                         std::to_string(options.parameter_index) +
                         " out of range");
    }
    const std::vector<double> data(static_cast<std::size_t>(circuit.n_data_slots()),
                                   options.data_value);
    std::vector<double> grads(static_cast<std::size_t>(options.n_samples));
    parallel_for(grads.size(), exec, [&](std::size_t i) {
        auto eng = substream(options.seed, StreamTag::GradientSamples, i);
        const auto w = uniform_angles(eng, circuit.n_weight_slots());
        grads[i] = grad_parameter_shift_slot(circuit, data, w, options.qubit,
                                             options.parameter_index);
    });

    CompensatedSum sum;
    for (double g : grads) {
        sum.add(g);
    }
    const double mean = sum.value() / static_cast<double>(grads.size());
    CompensatedSum sq;
    for (double g : grads) {
        sq.add((g - mean) * (g - mean));
    }
    VarianceResult r;
    r.mean = mean;
    r.variance = sq.value() / static_cast<double>(grads.size() - 1);
    r.n_samples = options.n_samples;
    r.parameter_index = options.parameter_index;
    r.descriptor = desc;
    r.seed = options.seed;
    return r;
}

StateVector haar_random_state(int n_qubits, std::uint64_t seed,
                              std::uint64_t index) {
    auto eng = substream(seed, StreamTag::Generic, index);
    std::normal_distribution<double> normal{0.0, 1.0};
    StateVector s{n_qubits};
    double norm = 0.0;
    for (auto &a : s.amplitudes()) {
        const double re = normal(eng);
        const double im = normal(eng);
        a = {re, im};
        norm += re * re + im * im;
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &a : s.amplitudes()) {
        a *= scale;
    }
    return s;
}

} // namespace qfs
