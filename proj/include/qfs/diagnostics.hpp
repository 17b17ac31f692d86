#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qfs/ansatz.hpp"
#include "qfs/parallel.hpp"
#include "qfs/state.hpp"

namespace qfs {

/// Fidelity histogram on [0, 1]; bin b covers [b/n, (b+1)/n), F = 1 lands in
/// the last bin.
struct FidelityHistogram {
    int n_bins = 75;
    std::vector<std::int64_t> counts;
    std::int64_t n_samples = 0;

    [[nodiscard]] double bin_lo(int b) const { return static_cast<double>(b) / n_bins; }
    [[nodiscard]] double bin_hi(int b) const { return static_cast<double>(b + 1) / n_bins; }
};

FidelityHistogram make_histogram(std::span<const double> fidelities, int n_bins);

/// Fidelity density of Haar-random states in dimension N:
/// (N-1)(1-F)^(N-2).
double haar_pdf(double fidelity, std::int64_t dim);

/// Haar mass of bin `bin` out of `n_bins`: (1-lo)^(N-1) - (1-hi)^(N-1).
double haar_bin_probability(int bin, int n_bins, std::int64_t dim);

/// (N-1) ln(b): the largest value the histogram KL estimate can reach.
double expressibility_upper_bound(std::int64_t dim, int n_bins);

struct DiagnosticsOptions {
    std::uint64_t seed = 0;
    int n_pairs = 5000;
    int n_bins = 75;
    int n_samples = 200;     ///< gradient draws
    /// Weight slot probed by gradient_variance. Slot 0 is a no-op for the
    /// rotation families (RZ or RX acting first on |0>), so probe slot 1.
    int parameter_index = 1;
    int qubit = 0;           ///< measured qubit for the variance probe
    /// Data value fed to every data slot while sampling. Zero makes the
    /// encoding gates the identity.
    double data_value = 0.0;
};

/// F(run(x, theta), run(x, phi)) for independent uniform draws per pair.
std::vector<double> sample_fidelities(const ModelDescriptor &desc,
                                      const DiagnosticsOptions &options,
                                      Exec exec = Exec::Parallel);

/// Same sampling for an arbitrary circuit.
std::vector<double> sample_fidelities(const CircuitProgram &circuit,
                                      const DiagnosticsOptions &options,
                                      Exec exec = Exec::Parallel);

struct ExpressibilityResult {
    double kl = 0.0;
    double upper_bound = 0.0;
    FidelityHistogram histogram;
    ModelDescriptor descriptor;
    int n_pairs = 0;
    int n_bins = 0;
    std::uint64_t seed = 0;
};

/// KL(histogram || Haar bins) of a fidelity sample in dimension `dim`.
/// Empty bins contribute nothing; throws NumericalGuardError if a bin with
/// samples has zero Haar mass.
double kl_to_haar(const FidelityHistogram &hist, std::int64_t dim);

ExpressibilityResult expressibility(const ModelDescriptor &desc,
                                    const DiagnosticsOptions &options,
                                    Exec exec = Exec::Parallel);

struct VarianceResult {
    double variance = 0.0;
    double mean = 0.0;
    int n_samples = 0;
    int parameter_index = 0;
    ModelDescriptor descriptor;
    std::uint64_t seed = 0;
};

/// Unbiased sample variance of d<Z_qubit>/dw_k over uniform weight draws,
/// gradients by the shift rule, accumulated with compensated summation in
/// sample order.
VarianceResult gradient_variance(const ModelDescriptor &desc,
                                 const DiagnosticsOptions &options,
                                 Exec exec = Exec::Parallel);

/// Uniformly random unit vector in C^(2^n): normalized complex Gaussians.
StateVector haar_random_state(int n_qubits, std::uint64_t seed,
                              std::uint64_t index);

} // namespace qfs
