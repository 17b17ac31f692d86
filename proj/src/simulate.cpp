#include "qfs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfs/error.hpp"

namespace qfs {

StateVector init_state(int n_qubits) { return StateVector{n_qubits}; }

std::array<double, 3> resolve_angles(const GateOp &gate,
                                     std::span<const double> data,
                                     std::span<const double> weights) noexcept {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int a = 0; a < gate.n_angles(); ++a) {
        const AngleBinding &b = gate.angles[a];
        switch (b.source) {
        case AngleBinding::Source::Fixed:
            out[a] = b.value;
            break;
        case AngleBinding::Source::Data:
            out[a] = data[static_cast<std::size_t>(b.slot)];
            break;
        case AngleBinding::Source::Weight:
            out[a] = weights[static_cast<std::size_t>(b.slot)];
            break;
        }
    }
    return out;
}

void apply_gate_inplace(StateVector &state, const GateOp &gate,
                        const std::array<double, 3> &angles) noexcept {
    const int q = gate.targets[0];
    switch (gate.kind) {
    case GateKind::RX:
        state.apply_rx(q, angles[0]);
        break;
    case GateKind::RY:
        state.apply_ry(q, angles[0]);
        break;
    case GateKind::RZ:
        state.apply_rz(q, angles[0]);
        break;
    case GateKind::ROT:
        state.apply_matrix(q, rot_matrix(angles[0], angles[1], angles[2]));
        break;
    case GateKind::CNOT:
        state.apply_cnot(gate.targets[0], gate.targets[1]);
        break;
    case GateKind::H:
        state.apply_h(q);
        break;
    }
}

StateVector apply_gate(const StateVector &state, const GateOp &gate,
                       std::span<const double> angles) {
    if (static_cast<int>(angles.size()) != gate.n_angles()) {
        throw ArityError(to_string(gate.kind) + " takes " +
                         std::to_string(gate.n_angles()) + " angle(s), got " +
                         std::to_string(angles.size()));
    }
    for (int t = 0; t < gate.n_targets(); ++t) {
        if (gate.targets[t] < 0 || gate.targets[t] >= state.n_qubits()) {
            throw IndexError("gate target " + std::to_string(gate.targets[t]) +
                             " out of range for " +
                             std::to_string(state.n_qubits()) + " qubits");
        }
    }
    if (gate.kind == GateKind::CNOT && gate.targets[0] == gate.targets[1]) {
        throw ArityError("CNOT control equals target");
    }
    std::array<double, 3> resolved{0.0, 0.0, 0.0};
    std::copy(angles.begin(), angles.end(), resolved.begin());
    StateVector out = state;
    apply_gate_inplace(out, gate, resolved);
    return out;
}

void check_arity(const CircuitProgram &circuit, std::span<const double> data,
                 std::span<const double> weights) {
    if (static_cast<int>(data.size()) != circuit.n_data_slots()) {
        throw ArityError("expected " + std::to_string(circuit.n_data_slots()) +
                         " data value(s), got " + std::to_string(data.size()));
    }
    if (static_cast<int>(weights.size()) != circuit.n_weight_slots()) {
        throw ArityError("expected " +
                         std::to_string(circuit.n_weight_slots()) +
                         " weight(s), got " + std::to_string(weights.size()));
    }
}

void run_from(const CircuitProgram &circuit, std::size_t first_gate,
              StateVector &state, std::span<const double> data,
              std::span<const double> weights) noexcept {
    const auto &gates = circuit.gates();
    for (std::size_t g = first_gate; g < gates.size(); ++g) {
        apply_gate_inplace(state, gates[g],
                           resolve_angles(gates[g], data, weights));
    }
}

StateVector run(const CircuitProgram &circuit, std::span<const double> data,
                std::span<const double> weights) {
    check_arity(circuit, data, weights);
    StateVector state{circuit.n_qubits()};
    run_from(circuit, 0, state, data, weights);
    return state;
}

double expval_z(const StateVector &state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) {
        throw IndexError("qubit " + std::to_string(qubit) + " out of range");
    }
    const std::size_t mask = std::size_t{1} << static_cast<unsigned>(qubit);
    double plus = 0.0;
    double minus = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) == 0) {
            plus += std::norm(amps[i]);
        } else {
            minus += std::norm(amps[i]);
        }
    }
    return std::clamp(plus - minus, -1.0, 1.0);
}

std::vector<double> expvals_all(const StateVector &state) {
    std::vector<double> out(static_cast<std::size_t>(state.n_qubits()), 0.0);
    for (int q = 0; q < state.n_qubits(); ++q) {
        out[static_cast<std::size_t>(q)] = expval_z(state, q);
    }
    return out;
}

std::vector<double> expvals_all(const CircuitProgram &circuit,
                                std::span<const double> data,
                                std::span<const double> weights) {
    return expvals_all(run(circuit, data, weights));
}

double fidelity(const StateVector &a, const StateVector &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw SizeError("fidelity of states with " +
                        std::to_string(a.n_qubits()) + " and " +
                        std::to_string(b.n_qubits()) + " qubits");
    }
    return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

} // namespace qfs
