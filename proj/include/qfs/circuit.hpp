#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qfs {

inline constexpr int kMaxQubits = 12;

enum class GateKind : std::uint8_t { RX, RY, RZ, ROT, CNOT, H };

std::string to_string(GateKind kind);

/// Number of angles a gate kind consumes (ROT takes phi, theta, omega).
int angle_count(GateKind kind) noexcept;

/// Number of qubits a gate kind acts on.
int target_count(GateKind kind) noexcept;

/// Where one gate angle comes from at execution time.
struct AngleBinding {
    enum class Source : std::uint8_t { Fixed, Data, Weight };

    Source source = Source::Fixed;
    double value = 0.0; ///< used when source == Fixed
    int slot = 0;       ///< data or weight slot otherwise

    static AngleBinding fixed(double angle) { return {Source::Fixed, angle, 0}; }
    static AngleBinding data(int m) { return {Source::Data, 0.0, m}; }
    static AngleBinding weight(int j) { return {Source::Weight, 0.0, j}; }

    bool operator==(const AngleBinding &) const = default;
};

/// One gate of a circuit. For CNOT, targets[0] is the control and
/// targets[1] the target.
struct GateOp {
    GateKind kind = GateKind::H;
    std::array<int, 2> targets{0, 0};
    std::array<AngleBinding, 3> angles{};

    static GateOp rx(int q, AngleBinding a);
    static GateOp ry(int q, AngleBinding a);
    static GateOp rz(int q, AngleBinding a);
    static GateOp rot(int q, AngleBinding phi, AngleBinding theta,
                      AngleBinding omega);
    static GateOp cnot(int control, int target);
    static GateOp h(int q);

    [[nodiscard]] int n_angles() const noexcept { return angle_count(kind); }
    [[nodiscard]] int n_targets() const noexcept { return target_count(kind); }

    bool operator==(const GateOp &) const = default;
};

/// Immutable, validated gate list with data and weight slot counts.
/// Gates are applied in list order.
class CircuitProgram {
  public:
    CircuitProgram() = default;

    /// Throws SizeError, IndexError or ArityError when the gates do not fit
    /// the declared qubit and slot counts.
    CircuitProgram(int n_qubits, std::vector<GateOp> gates, int n_data_slots,
                   int n_weight_slots);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] int n_data_slots() const noexcept { return n_data_slots_; }
    [[nodiscard]] int n_weight_slots() const noexcept { return n_weight_slots_; }
    [[nodiscard]] const std::vector<GateOp> &gates() const noexcept {
        return gates_;
    }

    /// Number of gate angles bound to data slot m.
    [[nodiscard]] int data_slot_uses(int m) const;

    bool operator==(const CircuitProgram &) const = default;

  private:
    int n_qubits_ = 1;
    std::vector<GateOp> gates_;
    int n_data_slots_ = 0;
    int n_weight_slots_ = 0;
};

} // namespace qfs
