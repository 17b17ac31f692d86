#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfs/circuit.hpp"

namespace qfs {

/// Trainable block families.
enum class AnsatzFamily {
    StronglyEntangling, ///< ROT on every qubit + CNOT ring with varying range
    BasicEntangler,     ///< RX on every qubit + nearest-neighbour CNOT ring
    CustomLayers,       ///< RY on every qubit + open CNOT chain
    RandomLayers,       ///< seeded random rotations and CNOTs
    DenseBlock,         ///< R stacked strongly-entangling sublayers
};

struct AnsatzKind {
    AnsatzFamily family = AnsatzFamily::StronglyEntangling;
    /// CNOT count per block as a fraction of the rotation count (RandomLayers).
    double rotation_ratio = 1.0 / 3.0;
    /// Sublayer repetitions per block (DenseBlock).
    int repetitions = 5;

    bool operator==(const AnsatzKind &) const = default;
};

enum class Architecture { Parallel, SuperParallel, NonReuploading };

/// Everything needed to build a circuit and its weight shape.
struct ModelDescriptor {
    AnsatzKind ansatz;
    Architecture architecture = Architecture::SuperParallel;
    int kernel = 2; ///< data features per encoding (M)
    int layers = 2; ///< L
    std::uint64_t seed = 1234;

    /// M*L for SuperParallel, M otherwise.
    [[nodiscard]] int n_qubits() const noexcept;

    bool operator==(const ModelDescriptor &) const = default;
};

std::string to_string(AnsatzFamily family);
std::string to_string(Architecture arch);
/// Accepts the short CLI names ("strongly", "super", ...) and the long ones.
AnsatzFamily parse_ansatz_family(const std::string &name);
Architecture parse_architecture(const std::string &name);

/// Throws DescriptorError when the descriptor cannot be built.
void validate(const ModelDescriptor &desc);

/// RY(x_m) on qubit r*M + m for r in [0, repeats), m in [0, M).
std::vector<GateOp> build_encoding(int kernel, int vertical_repeats);

struct TrainableBlock {
    std::vector<GateOp> gates;
    int n_params = 0;
};

/// Weight count of one block of `kind` on n qubits.
int params_per_block(const AnsatzKind &kind, int n_qubits);

/// One trainable block whose weight slots start at `first_slot`. RandomLayers
/// layouts depend on the seed only, so every block of a model shares one.
TrainableBlock build_trainable_block(const AnsatzKind &kind, int n_qubits,
                                     int block_index, std::uint64_t seed,
                                     int first_slot = 0);

CircuitProgram build_architecture(const ModelDescriptor &desc);

/// Independent real parameters of a degree-D series in M variables,
/// (2D+1)^M. Throws RangeError on overflow.
std::uint64_t dof(int degree, int n_vars);

/// L for Parallel, L^2 for SuperParallel; throws DescriptorError for
/// NonReuploading, which has no closed form.
int expected_degree(const ModelDescriptor &desc);

} // namespace qfs
