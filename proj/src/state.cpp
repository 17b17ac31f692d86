#include "qfs/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "qfs/circuit.hpp"
#include "qfs/error.hpp"

namespace qfs {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat2 multiply(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

} // namespace

Mat2 rx_matrix(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
}

Mat2 ry_matrix(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
}

Mat2 rz_matrix(double theta) {
    return {std::exp(-kI * (theta / 2)), Complex{}, Complex{},
            std::exp(kI * (theta / 2))};
}

Mat2 rot_matrix(double phi, double theta, double omega) {
    return multiply(rz_matrix(omega), multiply(ry_matrix(theta), rz_matrix(phi)));
}

Mat2 hadamard_matrix() {
    const double r = 1.0 / std::sqrt(2.0);
    return {Complex{r, 0}, Complex{r, 0}, Complex{r, 0}, Complex{-r, 0}};
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n_qubits) +
                        " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << static_cast<unsigned>(n_qubits), Complex{});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t n = amplitudes.size();
    if (n < 2 || !std::has_single_bit(n) ||
        n > (std::size_t{1} << static_cast<unsigned>(kMaxQubits))) {
        throw SizeError("amplitude count " + std::to_string(n) +
                        " is not a supported power of two");
    }
    for (const Complex &a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw DomainError("non-finite amplitude");
        }
    }
    const int q = std::countr_zero(n);
    return StateVector{q, std::move(amplitudes)};
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const Complex &a : amps_) {
        s += std::norm(a);
    }
    return s;
}

void StateVector::reset() noexcept {
    std::fill(amps_.begin(), amps_.end(), Complex{});
    amps_[0] = 1.0;
}

void StateVector::apply_matrix(int q, const Mat2 &m) noexcept {
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(q);
    const std::size_t n = amps_.size();
    Complex *a = amps_.data();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = a[i];
            const Complex a1 = a[i + stride];
            a[i] = m[0] * a0 + m[1] * a1;
            a[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void StateVector::apply_rx(int q, double theta) noexcept {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(q);
    const std::size_t n = amps_.size();
    Complex *a = amps_.data();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = a[i];
            const Complex a1 = a[i + stride];
            // c*a0 - i*s*a1 and -i*s*a0 + c*a1
            a[i] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
            a[i + stride] = {s * a0.imag() + c * a1.real(),
                             -s * a0.real() + c * a1.imag()};
        }
    }
}

void StateVector::apply_ry(int q, double theta) noexcept {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(q);
    const std::size_t n = amps_.size();
    Complex *a = amps_.data();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = a[i];
            const Complex a1 = a[i + stride];
            a[i] = c * a0 - s * a1;
            a[i + stride] = s * a0 + c * a1;
        }
    }
}

void StateVector::apply_rz(int q, double theta) noexcept {
    const Complex lo = std::exp(-kI * (theta / 2));
    const Complex hi = std::conj(lo);
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(q);
    const std::size_t n = amps_.size();
    Complex *a = amps_.data();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            a[i] *= lo;
            a[i + stride] *= hi;
        }
    }
}

void StateVector::apply_h(int q) noexcept { apply_matrix(q, hadamard_matrix()); }

void StateVector::apply_cnot(int control, int target) noexcept {
    const std::size_t cmask = std::size_t{1} << static_cast<unsigned>(control);
    const std::size_t tmask = std::size_t{1} << static_cast<unsigned>(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amps_[i], amps_[i | tmask]);
        }
    }
}

void StateVector::apply_x(int q) noexcept {
    const std::size_t mask = std::size_t{1} << static_cast<unsigned>(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == 0) {
            std::swap(amps_[i], amps_[i | mask]);
        }
    }
}

void StateVector::apply_y(int q) noexcept {
    const std::size_t mask = std::size_t{1} << static_cast<unsigned>(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == 0) {
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | mask];
            amps_[i] = -kI * a1;
            amps_[i | mask] = kI * a0;
        }
    }
}

void StateVector::apply_z(int q) noexcept {
    const std::size_t mask = std::size_t{1} << static_cast<unsigned>(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) != 0) {
            amps_[i] = -amps_[i];
        }
    }
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.size() != b.size()) {
        throw SizeError("inner product of states with different sizes");
    }
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

} // namespace qfs
