#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qfs {

using Complex = std::complex<double>;

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<Complex, 4>;

Mat2 rx_matrix(double theta);
Mat2 ry_matrix(double theta);
Mat2 rz_matrix(double theta);
/// RZ(omega) * RY(theta) * RZ(phi).
Mat2 rot_matrix(double phi, double theta, double omega);
Mat2 hadamard_matrix();

/// Dense n-qubit state. Qubit q is bit q of the basis index (qubit 0 is the
/// least significant bit).
class StateVector {
  public:
    /// |0...0> on n qubits; throws SizeError outside [1, kMaxQubits].
    explicit StateVector(int n_qubits);

    /// Adopts explicit amplitudes; the length must be a power of two >= 2.
    /// No normalization is applied.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }
    Complex &operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept;

    /// Back to |0...0> without reallocating.
    void reset() noexcept;

    void apply_matrix(int q, const Mat2 &m) noexcept;
    void apply_rx(int q, double theta) noexcept;
    void apply_ry(int q, double theta) noexcept;
    void apply_rz(int q, double theta) noexcept;
    void apply_h(int q) noexcept;
    void apply_cnot(int control, int target) noexcept;
    void apply_x(int q) noexcept;
    void apply_y(int q) noexcept;
    void apply_z(int q) noexcept;

    bool operator==(const StateVector &) const = default;

  private:
    StateVector(int n_qubits, std::vector<Complex> amps)
        : n_qubits_(n_qubits), amps_(std::move(amps)) {}

    int n_qubits_;
    std::vector<Complex> amps_;
};

/// <a|b>.
Complex inner_product(const StateVector &a, const StateVector &b);

} // namespace qfs
