#include "qfs/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qfs/error.hpp"
#include "qfs/rng.hpp"
#include "qfs/simulate.hpp"

namespace qfs {

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

// e^{-2 pi i k / G} for k in [0, G).
std::vector<Complex> twiddles(int grid_size) {
    std::vector<Complex> w(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double angle = -2.0 * std::numbers::pi * k / grid_size;
        w[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
    }
    return w;
}

bool binds_data(const GateOp &op) {
    for (int a = 0; a < op.n_angles(); ++a) {
        if (op.angles[a].source == AngleBinding::Source::Data) {
            return true;
        }
    }
    return false;
}

} // namespace

CoefficientGrid::CoefficientGrid(int n_vars, int grid_size)
    : n_vars_(n_vars), grid_(grid_size) {
    if (n_vars < 1 || grid_size < 1) {
        throw SizeError("coefficient grid needs n_vars >= 1 and G >= 1");
    }
    values_.assign(ipow(static_cast<std::size_t>(grid_size), n_vars), Complex{});
}

std::size_t CoefficientGrid::index_of(std::span<const int> omega) const {
    if (static_cast<int>(omega.size()) != n_vars_) {
        throw SizeError("frequency has " + std::to_string(omega.size()) +
                        " components, expected " + std::to_string(n_vars_));
    }
    std::size_t index = 0;
    std::size_t stride = 1;
    for (int m = 0; m < n_vars_; ++m) {
        const int w = omega[static_cast<std::size_t>(m)];
        if (w < -grid_ / 2 || w >= grid_ - grid_ / 2) {
            throw IndexError("frequency component " + std::to_string(w) +
                             " outside the grid");
        }
        const int wrapped = ((w % grid_) + grid_) % grid_;
        index += static_cast<std::size_t>(wrapped) * stride;
        stride *= static_cast<std::size_t>(grid_);
    }
    return index;
}

FrequencyVector CoefficientGrid::frequency_at(std::size_t index) const {
    FrequencyVector omega(static_cast<std::size_t>(n_vars_));
    const auto g = static_cast<std::size_t>(grid_);
    for (int m = 0; m < n_vars_; ++m) {
        auto k = static_cast<int>(index % g);
        index /= g;
        if (k >= grid_ - grid_ / 2) {
            k -= grid_;
        }
        omega[static_cast<std::size_t>(m)] = k;
    }
    return omega;
}

std::vector<double> evaluate_grid(const CircuitProgram &circuit,
                                  std::span<const double> weights,
                                  int grid_size) {
    const int n_vars = circuit.n_data_slots();
    if (grid_size < 1 || n_vars < 1) {
        throw SizeError("grid evaluation needs G >= 1 and a data slot");
    }
    const std::vector<double> zeros(static_cast<std::size_t>(n_vars), 0.0);
    check_arity(circuit, zeros, weights);

    // Gates before the first data-bound gate are shared by every point.
    const auto &gates = circuit.gates();
    std::size_t prefix_end = 0;
    while (prefix_end < gates.size() && !binds_data(gates[prefix_end])) {
        ++prefix_end;
    }
    StateVector prefix{circuit.n_qubits()};
    for (std::size_t g = 0; g < prefix_end; ++g) {
        apply_gate_inplace(prefix, gates[g],
                           resolve_angles(gates[g], zeros, weights));
    }

    const std::size_t total = ipow(static_cast<std::size_t>(grid_size), n_vars);
    std::vector<double> out(total);
    std::vector<double> x(static_cast<std::size_t>(n_vars));
    StateVector state = prefix;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (auto &xm : x) {
            const auto g = static_cast<double>(rest % static_cast<std::size_t>(grid_size));
            rest /= static_cast<std::size_t>(grid_size);
            xm = 2.0 * std::numbers::pi * g / grid_size;
        }
        std::copy(prefix.amplitudes().begin(), prefix.amplitudes().end(),
                  state.amplitudes().begin());
        run_from(circuit, prefix_end, state, x, weights);
        out[flat] = expval_z(state, 0);
    }
    return out;
}

void check_grid(const ModelDescriptor &desc, int grid_size) {
    int degree = 0;
    if (desc.architecture == Architecture::NonReuploading) {
        const auto limits = band_limit(desc);
        degree = *std::max_element(limits.begin(), limits.end());
    } else {
        degree = expected_degree(desc);
    }
    const int needed = 2 * degree + 2;
    if (grid_size < needed) {
        throw AliasingError("grid size " + std::to_string(grid_size) +
                            " cannot resolve degree " + std::to_string(degree) +
                            "; need at least " + std::to_string(needed));
    }
}

std::vector<double> evaluate_grid(const ModelDescriptor &desc,
                                  std::span<const double> weights,
                                  int grid_size) {
    check_grid(desc, grid_size);
    return evaluate_grid(build_architecture(desc), weights, grid_size);
}

CoefficientGrid dft_coefficients(std::span<const double> grid, int n_vars,
                                 int grid_size) {
    CoefficientGrid out(n_vars, grid_size);
    if (grid.size() != out.size()) {
        throw SizeError("grid has " + std::to_string(grid.size()) +
                        " values, expected " + std::to_string(out.size()));
    }
    auto data = out.values();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        data[i] = grid[i];
    }

    const auto g = static_cast<std::size_t>(grid_size);
    const auto w = twiddles(grid_size);
    std::vector<Complex> line(g);
    std::size_t stride = 1;
    for (int m = 0; m < n_vars; ++m) {
        const std::size_t block = stride * g;
        for (std::size_t outer = 0; outer < data.size(); outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                const std::size_t base = outer + inner;
                for (std::size_t k = 0; k < g; ++k) {
                    Complex acc{};
                    for (std::size_t j = 0; j < g; ++j) {
                        acc += data[base + j * stride] * w[(k * j) % g];
                    }
                    line[k] = acc;
                }
                for (std::size_t k = 0; k < g; ++k) {
                    data[base + k * stride] = line[k] / static_cast<double>(grid_size);
                }
            }
        }
        stride = block;
    }
    return out;
}

std::vector<int> band_limit(const ModelDescriptor &desc) {
    const CircuitProgram circuit = build_architecture(desc);
    std::vector<int> limits(static_cast<std::size_t>(desc.kernel));
    for (int m = 0; m < desc.kernel; ++m) {
        limits[static_cast<std::size_t>(m)] = circuit.data_slot_uses(m);
    }
    return limits;
}

std::vector<double> spectrum_weights(std::uint64_t seed, std::size_t index,
                                     int n_weights) {
    auto eng = substream(seed, StreamTag::SpectrumWeights, index);
    std::vector<double> w(static_cast<std::size_t>(n_weights));
    for (auto &v : w) {
        v = uniform(eng, 0.0, 2.0 * std::numbers::pi);
    }
    return w;
}

SpectrumReport sample_spectrum(const ModelDescriptor &desc,
                               const SpectrumOptions &options, Exec exec) {
    if (options.n_samples < 1) {
        throw SizeError("spectrum needs at least one sample");
    }
    check_grid(desc, options.grid_size);
    const CircuitProgram circuit = build_architecture(desc);

    SpectrumReport report;
    report.descriptor = desc;
    report.options = options;
    report.samples.resize(static_cast<std::size_t>(options.n_samples));

    parallel_for(report.samples.size(), exec, [&](std::size_t s) {
        const auto weights =
            spectrum_weights(options.seed, s, circuit.n_weight_slots());
        const auto grid = evaluate_grid(circuit, weights, options.grid_size);
        report.samples[s] = dft_coefficients(grid, desc.kernel, options.grid_size);
    });

    const CoefficientGrid &first = report.samples.front();
    report.max_abs.assign(first.size(), 0.0);
    for (const auto &sample : report.samples) {
        const auto values = sample.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            report.max_abs[i] = std::max(report.max_abs[i], std::abs(values[i]));
        }
    }
    for (std::size_t i = 0; i < report.max_abs.size(); ++i) {
        if (report.max_abs[i] > options.threshold) {
            report.accessible.push_back(first.frequency_at(i));
        }
    }
    std::sort(report.accessible.begin(), report.accessible.end());
    for (const auto &omega : report.accessible) {
        for (int w : omega) {
            report.degree = std::max(report.degree, std::abs(w));
        }
    }
    return report;
}

namespace reference {

CoefficientGrid dft_direct(std::span<const double> grid, int n_vars,
                           int grid_size) {
    CoefficientGrid out(n_vars, grid_size);
    if (grid.size() != out.size()) {
        throw SizeError("grid length mismatch");
    }
    const auto g = static_cast<std::size_t>(grid_size);
    auto values = out.values();
    for (std::size_t fi = 0; fi < values.size(); ++fi) {
        const FrequencyVector omega = out.frequency_at(fi);
        Complex acc{};
        for (std::size_t pi = 0; pi < grid.size(); ++pi) {
            std::size_t rest = pi;
            double phase = 0.0;
            for (int m = 0; m < n_vars; ++m) {
                const auto gm = static_cast<double>(rest % g);
                rest /= g;
                phase += omega[static_cast<std::size_t>(m)] * gm;
            }
            const double angle = -2.0 * std::numbers::pi * phase / grid_size;
            acc += grid[pi] * Complex{std::cos(angle), std::sin(angle)};
        }
        values[fi] = acc / static_cast<double>(grid.size());
    }
    return out;
}

} // namespace reference

} // namespace qfs
