#pragma once

#include <array>
#include <span>
#include <vector>

#include "qfs/circuit.hpp"
#include "qfs/state.hpp"

namespace qfs {

/// |0...0> on n qubits (1 <= n <= 12).
StateVector init_state(int n_qubits);

/// Returns gate(state). `angles` must hold exactly gate.n_angles() values.
StateVector apply_gate(const StateVector &state, const GateOp &gate,
                       std::span<const double> angles);

/// In-place variant of apply_gate without arity checks.
void apply_gate_inplace(StateVector &state, const GateOp &gate,
                        const std::array<double, 3> &angles) noexcept;

/// Angle values of `gate` for the given inputs.
std::array<double, 3> resolve_angles(const GateOp &gate,
                                     std::span<const double> data,
                                     std::span<const double> weights) noexcept;

/// Throws ArityError unless the spans match the circuit's slot counts.
void check_arity(const CircuitProgram &circuit, std::span<const double> data,
                 std::span<const double> weights);

/// Applies every gate of `circuit` to |0...0>.
StateVector run(const CircuitProgram &circuit, std::span<const double> data,
                std::span<const double> weights);

/// Applies gates [first_gate, end) to `state` in place. No arity checks;
/// meant for hot loops that validated their inputs once.
void run_from(const CircuitProgram &circuit, std::size_t first_gate,
              StateVector &state, std::span<const double> data,
              std::span<const double> weights) noexcept;

/// <Z_qubit> of `state`.
double expval_z(const StateVector &state, int qubit);

/// <Z_q> for every qubit q of the evaluated circuit.
std::vector<double> expvals_all(const CircuitProgram &circuit,
                                std::span<const double> data,
                                std::span<const double> weights);

/// Per-qubit <Z_q> of an already evaluated state.
std::vector<double> expvals_all(const StateVector &state);

/// |<a|b>|^2.
double fidelity(const StateVector &a, const StateVector &b);

} // namespace qfs
