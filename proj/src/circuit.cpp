#include "qfs/circuit.hpp"

#include <utility>

#include "qfs/error.hpp"

namespace qfs {

std::string to_string(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::ROT:
        return "ROT";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::H:
        return "H";
    }
    return "?";
}

int angle_count(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
        return 1;
    case GateKind::ROT:
        return 3;
    case GateKind::CNOT:
    case GateKind::H:
        return 0;
    }
    return 0;
}

int target_count(GateKind kind) noexcept {
    return kind == GateKind::CNOT ? 2 : 1;
}

GateOp GateOp::rx(int q, AngleBinding a) {
    return {GateKind::RX, {q, q}, {a, {}, {}}};
}

GateOp GateOp::ry(int q, AngleBinding a) {
    return {GateKind::RY, {q, q}, {a, {}, {}}};
}

GateOp GateOp::rz(int q, AngleBinding a) {
    return {GateKind::RZ, {q, q}, {a, {}, {}}};
}

GateOp GateOp::rot(int q, AngleBinding phi, AngleBinding theta,
                   AngleBinding omega) {
    return {GateKind::ROT, {q, q}, {phi, theta, omega}};
}

GateOp GateOp::cnot(int control, int target) {
    return {GateKind::CNOT, {control, target}, {}};
}

GateOp GateOp::h(int q) { return {GateKind::H, {q, q}, {}}; }

CircuitProgram::CircuitProgram(int n_qubits, std::vector<GateOp> gates,
                               int n_data_slots, int n_weight_slots)
    : n_qubits_(n_qubits), gates_(std::move(gates)),
      n_data_slots_(n_data_slots), n_weight_slots_(n_weight_slots) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw SizeError("circuit qubit count " + std::to_string(n_qubits) +
                        " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (n_data_slots < 0 || n_weight_slots < 0) {
        throw SizeError("negative slot count");
    }
    for (std::size_t g = 0; g < gates_.size(); ++g) {
        const GateOp &op = gates_[g];
        const std::string where = "gate " + std::to_string(g) + " (" +
                                  to_string(op.kind) + ")";
        for (int t = 0; t < op.n_targets(); ++t) {
            if (op.targets[t] < 0 || op.targets[t] >= n_qubits) {
                throw IndexError(where + ": qubit " +
                                 std::to_string(op.targets[t]) +
                                 " out of range");
            }
        }
        if (op.kind == GateKind::CNOT && op.targets[0] == op.targets[1]) {
            throw ArityError(where + ": control equals target");
        }
        for (int a = 0; a < 3; ++a) {
            const AngleBinding &b = op.angles[a];
            if (a >= op.n_angles()) {
                if (b.source != AngleBinding::Source::Fixed || b.value != 0.0) {
                    throw ArityError(where + ": gate takes " +
                                     std::to_string(op.n_angles()) +
                                     " angle(s)");
                }
                continue;
            }
            if (b.source == AngleBinding::Source::Data &&
                (b.slot < 0 || b.slot >= n_data_slots)) {
                throw IndexError(where + ": data slot " +
                                 std::to_string(b.slot) + " out of range");
            }
            if (b.source == AngleBinding::Source::Weight &&
                (b.slot < 0 || b.slot >= n_weight_slots)) {
                throw IndexError(where + ": weight slot " +
                                 std::to_string(b.slot) + " out of range");
            }
        }
    }
}

int CircuitProgram::data_slot_uses(int m) const {
    int uses = 0;
    for (const GateOp &op : gates_) {
        for (int a = 0; a < op.n_angles(); ++a) {
            if (op.angles[a].source == AngleBinding::Source::Data &&
                op.angles[a].slot == m) {
                ++uses;
            }
        }
    }
    return uses;
}

} // namespace qfs
