#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qfs/ansatz.hpp"
#include "qfs/parallel.hpp"
#include "qfs/state.hpp"

namespace qfs {

/// Integer frequency per data dimension, each in [-G/2, G/2).
using FrequencyVector = std::vector<int>;

/// Dense coefficient table c_omega over the centered frequency box. Storage
/// index of omega is sum_m (omega_m mod G) * G^m.
class CoefficientGrid {
  public:
    CoefficientGrid() = default;
    CoefficientGrid(int n_vars, int grid_size);

    [[nodiscard]] int n_vars() const noexcept { return n_vars_; }
    [[nodiscard]] int grid_size() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] std::size_t index_of(std::span<const int> omega) const;
    [[nodiscard]] FrequencyVector frequency_at(std::size_t index) const;
    [[nodiscard]] Complex at(std::span<const int> omega) const {
        return values_[index_of(omega)];
    }

    [[nodiscard]] std::span<const Complex> values() const noexcept {
        return values_;
    }
    [[nodiscard]] std::span<Complex> values() noexcept { return values_; }

  private:
    int n_vars_ = 0;
    int grid_ = 0;
    std::vector<Complex> values_;
};

/// f on the grid x_m = 2*pi*g_m/G, where f is <Z_0> of the circuit. Flat
/// index is sum_m g_m * G^m. No aliasing guard.
std::vector<double> evaluate_grid(const CircuitProgram &circuit,
                                  std::span<const double> weights,
                                  int grid_size);

/// As above for a descriptor; throws AliasingError when G is below
/// 2 * expected_degree + 2.
std::vector<double> evaluate_grid(const ModelDescriptor &desc,
                                  std::span<const double> weights,
                                  int grid_size);

/// Throws AliasingError if `grid_size` cannot resolve the descriptor's
/// expected degree. NonReuploading is checked against its band limit.
void check_grid(const ModelDescriptor &desc, int grid_size);

/// c_omega = G^-M sum_g f(g) exp(-2*pi*i omega.g / G), computed one axis at
/// a time.
CoefficientGrid dft_coefficients(std::span<const double> grid, int n_vars,
                                 int grid_size);

/// Per data slot, the number of encoding gates bound to it; caps |omega_m|.
std::vector<int> band_limit(const ModelDescriptor &desc);

struct SpectrumOptions {
    int n_samples = 100;
    std::uint64_t seed = 0;
    int grid_size = 64;
    double threshold = 1e-5;
};

struct SpectrumReport {
    ModelDescriptor descriptor;
    SpectrumOptions options;
    std::vector<CoefficientGrid> samples;
    /// max over samples of |c_omega|, indexed like CoefficientGrid.
    std::vector<double> max_abs;
    /// Frequencies whose max_abs exceeds the threshold, lexicographic order.
    std::vector<FrequencyVector> accessible;
    int degree = 0;
};

/// Coefficients of `n_samples` weight draws, uniform in [0, 2*pi), each from
/// its own substream. Result does not depend on the thread count.
SpectrumReport sample_spectrum(const ModelDescriptor &desc,
                               const SpectrumOptions &options,
                               Exec exec = Exec::Parallel);

/// Weights of spectrum sample `index`.
std::vector<double> spectrum_weights(std::uint64_t seed, std::size_t index,
                                     int n_weights);

namespace reference {

/// Direct O(G^(2M)) transform used to check dft_coefficients.
CoefficientGrid dft_direct(std::span<const double> grid, int n_vars,
                           int grid_size);

} // namespace reference

} // namespace qfs
