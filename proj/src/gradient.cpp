#include "qfs/gradient.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfs/error.hpp"
#include "qfs/simulate.hpp"

namespace qfs {

namespace {

bool is_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY ||
           kind == GateKind::RZ || kind == GateKind::ROT;
}

void check_weight_gates(const CircuitProgram &circuit) {
    for (const GateOp &op : circuit.gates()) {
        for (int a = 0; a < op.n_angles(); ++a) {
            if (op.angles[a].source == AngleBinding::Source::Weight &&
                !is_rotation(op.kind)) {
                throw UnsupportedGateError(
                    "weight slot bound to " + to_string(op.kind) +
                    ", which has no two-term shift rule");
            }
        }
    }
}

void check_qubit(const CircuitProgram &circuit, int qubit) {
    if (qubit < 0 || qubit >= circuit.n_qubits()) {
        throw IndexError("qubit " + std::to_string(qubit) + " out of range");
    }
}

// Single-axis step of the reverse sweep; ROT expands to RZ, RY, RZ.
enum class Axis { X, Y, Z };

void apply_axis_rotation(StateVector &s, int q, Axis axis, double angle) {
    switch (axis) {
    case Axis::X:
        s.apply_rx(q, angle);
        break;
    case Axis::Y:
        s.apply_ry(q, angle);
        break;
    case Axis::Z:
        s.apply_rz(q, angle);
        break;
    }
}

// Im <lambda| P_q |psi> for the Pauli generator P of `axis`.
double generator_overlap_imag(const StateVector &lambda, const StateVector &psi,
                              int q, Axis axis) {
    const std::size_t mask = std::size_t{1} << static_cast<unsigned>(q);
    const auto l = lambda.amplitudes();
    const auto p = psi.amplitudes();
    Complex sum{};
    for (std::size_t i = 0; i < p.size(); ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        const std::size_t j = i | mask;
        switch (axis) {
        case Axis::X:
            sum += std::conj(l[i]) * p[j] + std::conj(l[j]) * p[i];
            break;
        case Axis::Y:
            // Y|0> = i|1>, Y|1> = -i|0>
            sum += std::conj(l[i]) * (Complex{0, -1} * p[j]) +
                   std::conj(l[j]) * (Complex{0, 1} * p[i]);
            break;
        case Axis::Z:
            sum += std::conj(l[i]) * p[i] - std::conj(l[j]) * p[j];
            break;
        }
    }
    return sum.imag();
}

struct Step {
    Axis axis;
    int qubit;
    double angle;
    const AngleBinding *binding;
};

// Undo a non-rotation gate; CNOT and H are self-inverse.
void undo_fixed_gate(StateVector &s, const GateOp &op) {
    if (op.kind == GateKind::CNOT) {
        s.apply_cnot(op.targets[0], op.targets[1]);
    } else {
        s.apply_h(op.targets[0]);
    }
}

// Sum of shift-rule terms over the bound angles selected by `want`.
template <class Select>
void accumulate_shift_terms(const CircuitProgram &circuit,
                            std::span<const double> data,
                            std::span<const double> weights, int qubit,
                            Select &&want, std::span<double> grad) {
    constexpr double shift = std::numbers::pi / 2;
    const auto &gates = circuit.gates();
    StateVector state{circuit.n_qubits()};

    auto shifted_value = [&](std::size_t gate_index, int angle_index,
                             double delta) {
        state.reset();
        for (std::size_t g = 0; g < gates.size(); ++g) {
            auto angles = resolve_angles(gates[g], data, weights);
            if (g == gate_index) {
                angles[static_cast<std::size_t>(angle_index)] += delta;
            }
            apply_gate_inplace(state, gates[g], angles);
        }
        return expval_z(state, qubit);
    };

    for (std::size_t g = 0; g < gates.size(); ++g) {
        for (int a = 0; a < gates[g].n_angles(); ++a) {
            const AngleBinding &b = gates[g].angles[a];
            if (b.source != AngleBinding::Source::Weight || !want(b.slot)) {
                continue;
            }
            const double plus = shifted_value(g, a, shift);
            const double minus = shifted_value(g, a, -shift);
            grad[static_cast<std::size_t>(b.slot)] += 0.5 * (plus - minus);
        }
    }
}

} // namespace

std::vector<double> grad_parameter_shift(const CircuitProgram &circuit,
                                         std::span<const double> data,
                                         std::span<const double> weights,
                                         int qubit) {
    check_arity(circuit, data, weights);
    check_qubit(circuit, qubit);
    check_weight_gates(circuit);
    std::vector<double> grad(weights.size(), 0.0);
    accumulate_shift_terms(
        circuit, data, weights, qubit, [](int) { return true; }, grad);
    return grad;
}

double grad_parameter_shift_slot(const CircuitProgram &circuit,
                                 std::span<const double> data,
                                 std::span<const double> weights, int qubit,
                                 int slot) {
    check_arity(circuit, data, weights);
    check_qubit(circuit, qubit);
    check_weight_gates(circuit);
    if (slot < 0 || slot >= circuit.n_weight_slots()) {
        throw IndexError("weight slot " + std::to_string(slot) + " out of range");
    }
    std::vector<double> grad(weights.size(), 0.0);
    accumulate_shift_terms(
        circuit, data, weights, qubit, [slot](int j) { return j == slot; }, grad);
    return grad[static_cast<std::size_t>(slot)];
}

ObservableGradient grad_adjoint_weighted(const CircuitProgram &circuit,
                                         std::span<const double> data,
                                         std::span<const double> weights,
                                         std::span<const double> coeffs) {
    check_arity(circuit, data, weights);
    check_weight_gates(circuit);
    if (static_cast<int>(coeffs.size()) != circuit.n_qubits()) {
        throw ArityError("expected one observable coefficient per qubit");
    }

    ObservableGradient out;
    out.gradient.assign(weights.size(), 0.0);

    StateVector psi = run(circuit, data, weights);
    out.expvals = expvals_all(psi);

    // lambda = (sum_q c_q Z_q) psi
    StateVector lambda = psi;
    {
        auto l = lambda.amplitudes();
        const auto p = psi.amplitudes();
        for (std::size_t i = 0; i < p.size(); ++i) {
            double diag = 0.0;
            for (std::size_t q = 0; q < coeffs.size(); ++q) {
                diag += ((i >> q) & 1U) != 0 ? -coeffs[q] : coeffs[q];
            }
            l[i] = diag * p[i];
        }
    }

    const auto &gates = circuit.gates();
    for (std::size_t g = gates.size(); g-- > 0;) {
        const GateOp &op = gates[g];
        if (op.kind == GateKind::CNOT || op.kind == GateKind::H) {
            undo_fixed_gate(psi, op);
            undo_fixed_gate(lambda, op);
            continue;
        }
        const auto angles = resolve_angles(op, data, weights);
        const int q = op.targets[0];
        std::array<Step, 3> steps{};
        int n_steps = 0;
        switch (op.kind) {
        case GateKind::RX:
            steps[n_steps++] = {Axis::X, q, angles[0], &op.angles[0]};
            break;
        case GateKind::RY:
            steps[n_steps++] = {Axis::Y, q, angles[0], &op.angles[0]};
            break;
        case GateKind::RZ:
            steps[n_steps++] = {Axis::Z, q, angles[0], &op.angles[0]};
            break;
        case GateKind::ROT:
            steps[n_steps++] = {Axis::Z, q, angles[0], &op.angles[0]};
            steps[n_steps++] = {Axis::Y, q, angles[1], &op.angles[1]};
            steps[n_steps++] = {Axis::Z, q, angles[2], &op.angles[2]};
            break;
        default:
            break;
        }
        for (int s = n_steps; s-- > 0;) {
            const Step &step = steps[static_cast<std::size_t>(s)];
            if (step.binding->source == AngleBinding::Source::Weight) {
                out.gradient[static_cast<std::size_t>(step.binding->slot)] +=
                    generator_overlap_imag(lambda, psi, step.qubit, step.axis);
            }
            apply_axis_rotation(psi, step.qubit, step.axis, -step.angle);
            apply_axis_rotation(lambda, step.qubit, step.axis, -step.angle);
        }
    }
    return out;
}

std::vector<double> grad_adjoint(const CircuitProgram &circuit,
                                 std::span<const double> data,
                                 std::span<const double> weights, int qubit) {
    check_qubit(circuit, qubit);
    std::vector<double> coeffs(static_cast<std::size_t>(circuit.n_qubits()),
                               0.0);
    coeffs[static_cast<std::size_t>(qubit)] = 1.0;
    return grad_adjoint_weighted(circuit, data, weights, coeffs).gradient;
}

} // namespace qfs
