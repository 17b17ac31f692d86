#pragma once

#include <span>
#include <vector>

#include "qfs/circuit.hpp"

namespace qfs {

/// d<Z_qubit>/dw_j for every weight slot j by the two-term shift rule,
/// shifting each bound angle separately and summing the contributions.
std::vector<double> grad_parameter_shift(const CircuitProgram &circuit,
                                         std::span<const double> data,
                                         std::span<const double> weights,
                                         int qubit);

/// One component of grad_parameter_shift; costs two runs per bound angle.
double grad_parameter_shift_slot(const CircuitProgram &circuit,
                                 std::span<const double> data,
                                 std::span<const double> weights, int qubit,
                                 int slot);

/// Same gradient as grad_parameter_shift from one forward pass and one
/// reverse sweep.
std::vector<double> grad_adjoint(const CircuitProgram &circuit,
                                 std::span<const double> data,
                                 std::span<const double> weights, int qubit);

struct ObservableGradient {
    std::vector<double> expvals;  ///< <Z_q> for every qubit
    std::vector<double> gradient; ///< d(sum_q c_q <Z_q>)/dw
};

/// Reverse-sweep gradient of sum_q coeffs[q] <Z_q>. One sweep regardless of
/// how many coefficients are nonzero.
ObservableGradient grad_adjoint_weighted(const CircuitProgram &circuit,
                                         std::span<const double> data,
                                         std::span<const double> weights,
                                         std::span<const double> coeffs);

} // namespace qfs
