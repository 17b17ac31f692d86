#include "qfs/ansatz.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include "qfs/error.hpp"
#include "qfs/rng.hpp"

namespace qfs {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_entangling(AnsatzFamily f) {
    return f != AnsatzFamily::RandomLayers;
}

int n_random_cnots(const AnsatzKind &kind, int n_qubits) {
    if (n_qubits < 2) {
        return 0;
    }
    return static_cast<int>(std::floor(n_qubits * kind.rotation_ratio + 1e-12));
}

void append_rot_layer(std::vector<GateOp> &gates, int n, int &slot) {
    for (int q = 0; q < n; ++q) {
        gates.push_back(GateOp::rot(q, AngleBinding::weight(slot),
                                    AngleBinding::weight(slot + 1),
                                    AngleBinding::weight(slot + 2)));
        slot += 3;
    }
}

void append_ring(std::vector<GateOp> &gates, int n, int range) {
    for (int q = 0; q < n; ++q) {
        gates.push_back(GateOp::cnot(q, (q + range) % n));
    }
}

std::size_t draw(std::mt19937_64 &eng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>{0, n - 1}(eng);
}

} // namespace

int ModelDescriptor::n_qubits() const noexcept {
    return architecture == Architecture::SuperParallel ? kernel * layers
                                                       : kernel;
}

std::string to_string(AnsatzFamily family) {
    switch (family) {
    case AnsatzFamily::StronglyEntangling:
        return "strongly";
    case AnsatzFamily::BasicEntangler:
        return "basic";
    case AnsatzFamily::CustomLayers:
        return "custom";
    case AnsatzFamily::RandomLayers:
        return "random";
    case AnsatzFamily::DenseBlock:
        return "dense";
    }
    return "?";
}

std::string to_string(Architecture arch) {
    switch (arch) {
    case Architecture::Parallel:
        return "parallel";
    case Architecture::SuperParallel:
        return "super";
    case Architecture::NonReuploading:
        return "nonreuploading";
    }
    return "?";
}

AnsatzFamily parse_ansatz_family(const std::string &name) {
    const std::string s = lower(name);
    if (s == "strongly" || s == "strongly_entangling" || s == "stronglyentangling") {
        return AnsatzFamily::StronglyEntangling;
    }
    if (s == "basic" || s == "basic_entangler" || s == "basicentangler") {
        return AnsatzFamily::BasicEntangler;
    }
    if (s == "custom" || s == "custom_layers" || s == "customlayers") {
        return AnsatzFamily::CustomLayers;
    }
    if (s == "random" || s == "random_layers" || s == "randomlayers") {
        return AnsatzFamily::RandomLayers;
    }
    if (s == "dense" || s == "dense_block" || s == "denseblock") {
        return AnsatzFamily::DenseBlock;
    }
    throw DescriptorError("unknown ansatz '" + name + "'");
}

Architecture parse_architecture(const std::string &name) {
    const std::string s = lower(name);
    if (s == "parallel") {
        return Architecture::Parallel;
    }
    if (s == "super" || s == "superparallel" || s == "super_parallel") {
        return Architecture::SuperParallel;
    }
    if (s == "nonreuploading" || s == "non_reuploading" || s == "nr") {
        return Architecture::NonReuploading;
    }
    throw DescriptorError("unknown architecture '" + name + "'");
}

void validate(const ModelDescriptor &desc) {
    if (desc.kernel < 1) {
        throw DescriptorError("kernel must be >= 1");
    }
    if (desc.layers < 1) {
        throw DescriptorError("layers must be >= 1");
    }
    if (desc.kernel > kMaxQubits || desc.layers > kMaxQubits) {
        throw DescriptorError("kernel or layer count exceeds qubit limit");
    }
    const int n = desc.n_qubits();
    if (n > kMaxQubits) {
        throw DescriptorError("descriptor needs " + std::to_string(n) +
                              " qubits, limit is " +
                              std::to_string(kMaxQubits));
    }
    if (is_entangling(desc.ansatz.family) && n < 2) {
        throw DescriptorError("entangling ansatz '" +
                              to_string(desc.ansatz.family) +
                              "' needs at least 2 qubits");
    }
    if (desc.ansatz.family == AnsatzFamily::DenseBlock &&
        desc.ansatz.repetitions < 1) {
        throw DescriptorError("dense block repetitions must be >= 1");
    }
    if (desc.ansatz.family == AnsatzFamily::RandomLayers &&
        !(desc.ansatz.rotation_ratio >= 0.0 && desc.ansatz.rotation_ratio <= 1.0)) {
        throw DescriptorError("rotation ratio must lie in [0, 1]");
    }
}

std::vector<GateOp> build_encoding(int kernel, int vertical_repeats) {
    if (kernel < 1 || vertical_repeats < 1) {
        throw DescriptorError("encoding needs kernel >= 1 and repeats >= 1");
    }
    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(kernel * vertical_repeats));
    for (int r = 0; r < vertical_repeats; ++r) {
        for (int m = 0; m < kernel; ++m) {
            gates.push_back(GateOp::ry(r * kernel + m, AngleBinding::data(m)));
        }
    }
    return gates;
}

int params_per_block(const AnsatzKind &kind, int n_qubits) {
    switch (kind.family) {
    case AnsatzFamily::StronglyEntangling:
        return 3 * n_qubits;
    case AnsatzFamily::BasicEntangler:
    case AnsatzFamily::CustomLayers:
    case AnsatzFamily::RandomLayers:
        return n_qubits;
    case AnsatzFamily::DenseBlock:
        return 3 * n_qubits * kind.repetitions;
    }
    return 0;
}

TrainableBlock build_trainable_block(const AnsatzKind &kind, int n_qubits,
                                     int block_index, std::uint64_t seed,
                                     int first_slot) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw DescriptorError("block qubit count out of range");
    }
    if (is_entangling(kind.family) && n_qubits < 2) {
        throw DescriptorError("entangling block needs at least 2 qubits");
    }
    TrainableBlock block;
    auto &gates = block.gates;
    int slot = first_slot;
    const int n = n_qubits;

    switch (kind.family) {
    case AnsatzFamily::StronglyEntangling: {
        append_rot_layer(gates, n, slot);
        append_ring(gates, n, (block_index % (n - 1)) + 1);
        break;
    }
    case AnsatzFamily::BasicEntangler: {
        for (int q = 0; q < n; ++q) {
            gates.push_back(GateOp::rx(q, AngleBinding::weight(slot++)));
        }
        if (n == 2) {
            gates.push_back(GateOp::cnot(0, 1));
        } else {
            append_ring(gates, n, 1);
        }
        break;
    }
    case AnsatzFamily::CustomLayers: {
        for (int q = 0; q < n; ++q) {
            gates.push_back(GateOp::ry(q, AngleBinding::weight(slot++)));
        }
        for (int q = 0; q + 1 < n; ++q) {
            gates.push_back(GateOp::cnot(q, q + 1));
        }
        break;
    }
    case AnsatzFamily::RandomLayers: {
        // Every block replays the same seeded layout, as a fixed-seed
        // template instantiated once per block would.
        auto eng = substream(seed, StreamTag::RandomLayers, 0);
        const int n_rot = n;
        const int n_cnot = n_random_cnots(kind, n);
        const auto total = static_cast<std::size_t>(n_rot + n_cnot);
        std::vector<bool> is_cnot(total, false);
        std::vector<std::size_t> free(total);
        for (std::size_t i = 0; i < total; ++i) {
            free[i] = i;
        }
        for (int c = 0; c < n_cnot; ++c) {
            const std::size_t k = draw(eng, free.size());
            is_cnot[free[k]] = true;
            free.erase(free.begin() + static_cast<std::ptrdiff_t>(k));
        }
        const auto nq = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < total; ++i) {
            if (is_cnot[i]) {
                const auto control = static_cast<int>(draw(eng, nq));
                auto target = static_cast<int>(draw(eng, nq - 1));
                if (target >= control) {
                    ++target;
                }
                gates.push_back(GateOp::cnot(control, target));
            } else {
                const std::size_t axis = draw(eng, 3);
                const auto q = static_cast<int>(draw(eng, nq));
                const AngleBinding w = AngleBinding::weight(slot++);
                if (axis == 0) {
                    gates.push_back(GateOp::rx(q, w));
                } else if (axis == 1) {
                    gates.push_back(GateOp::ry(q, w));
                } else {
                    gates.push_back(GateOp::rz(q, w));
                }
            }
        }
        break;
    }
    case AnsatzFamily::DenseBlock: {
        for (int r = 0; r < kind.repetitions; ++r) {
            append_rot_layer(gates, n, slot);
            append_ring(gates, n, 1);
        }
        break;
    }
    }
    block.n_params = slot - first_slot;
    return block;
}

CircuitProgram build_architecture(const ModelDescriptor &desc) {
    validate(desc);
    const int n = desc.n_qubits();
    std::vector<GateOp> gates;
    int slot = 0;
    int block_index = 0;

    auto add_block = [&] {
        TrainableBlock b =
            build_trainable_block(desc.ansatz, n, block_index++, desc.seed, slot);
        slot += b.n_params;
        gates.insert(gates.end(), b.gates.begin(), b.gates.end());
    };
    auto add_encoding = [&](int repeats) {
        const auto enc = build_encoding(desc.kernel, repeats);
        gates.insert(gates.end(), enc.begin(), enc.end());
    };

    add_block(); // W^(1)
    switch (desc.architecture) {
    case Architecture::Parallel:
        for (int l = 0; l < desc.layers; ++l) {
            add_encoding(1);
            add_block();
        }
        break;
    case Architecture::SuperParallel:
        for (int l = 0; l < desc.layers; ++l) {
            add_encoding(desc.layers);
            add_block();
        }
        break;
    case Architecture::NonReuploading:
        add_encoding(1);
        for (int l = 0; l < desc.layers; ++l) {
            add_block();
        }
        break;
    }
    return CircuitProgram{n, std::move(gates), desc.kernel, slot};
}

std::uint64_t dof(int degree, int n_vars) {
    if (degree < 0 || n_vars < 1) {
        throw DomainError("dof needs degree >= 0 and at least one variable");
    }
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(degree) + 1;
    std::uint64_t result = 1;
    for (int m = 0; m < n_vars; ++m) {
        if (result > std::numeric_limits<std::uint64_t>::max() / base) {
            throw RangeError("dof overflows 64 bits");
        }
        result *= base;
    }
    return result;
}

int expected_degree(const ModelDescriptor &desc) {
    switch (desc.architecture) {
    case Architecture::Parallel:
        return desc.layers;
    case Architecture::SuperParallel:
        return desc.layers * desc.layers;
    case Architecture::NonReuploading:
        break;
    }
    throw DescriptorError("no expected degree for the non-reuploading architecture");
}

} // namespace qfs
