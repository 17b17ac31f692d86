#include "qfs/serialize.hpp"

#include <fstream>
#include <sstream>

#include "qfs/error.hpp"

namespace qfs {

void to_json(nlohmann::json &j, const ModelDescriptor &d) {
    j = nlohmann::json{{"ansatz", to_string(d.ansatz.family)},
                       {"architecture", to_string(d.architecture)},
                       {"kernel", d.kernel},
                       {"layers", d.layers},
                       {"seed", d.seed}};
    if (d.ansatz.family == AnsatzFamily::RandomLayers) {
        j["rotation_ratio"] = d.ansatz.rotation_ratio;
    }
    if (d.ansatz.family == AnsatzFamily::DenseBlock) {
        j["repetitions"] = d.ansatz.repetitions;
    }
}

void from_json(const nlohmann::json &j, ModelDescriptor &d) {
    d = ModelDescriptor{};
    d.ansatz.family = parse_ansatz_family(j.at("ansatz").get<std::string>());
    d.architecture = parse_architecture(j.at("architecture").get<std::string>());
    d.kernel = j.at("kernel").get<int>();
    d.layers = j.at("layers").get<int>();
    d.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rotation_ratio")) {
        d.ansatz.rotation_ratio = j.at("rotation_ratio").get<double>();
    }
    if (j.contains("repetitions")) {
        d.ansatz.repetitions = j.at("repetitions").get<int>();
    }
}

void to_json(nlohmann::json &j, const ConvConfig &c) {
    j = nlohmann::json{{"c", c.window}, {"k", c.kernel()}, {"p", c.padding}, {"s", c.stride}};
}

void from_json(const nlohmann::json &j, ConvConfig &c) {
    c.window = j.at("c").get<int>();
    c.padding = j.at("p").get<int>();
    c.stride = j.at("s").get<int>();
    c.descriptor.kernel = j.at("k").get<int>();
}

void to_json(nlohmann::json &j, const Scaler &s) {
    j = nlohmann::json{{"min", s.data_min()}, {"max", s.data_max()},
                       {"lo", s.lo()},        {"hi", s.hi()}};
}

Scaler scaler_from_json(const nlohmann::json &j) {
    return Scaler{j.at("min").get<double>(), j.at("max").get<double>(),
                  j.at("lo").get<double>(), j.at("hi").get<double>()};
}

void to_json(nlohmann::json &j, const TrainConfig &c) {
    j = nlohmann::json{{"epochs", c.epochs},
                       {"learning_rate", c.learning_rate},
                       {"batch_size", c.batch_size},
                       {"beta1", c.beta1},
                       {"beta2", c.beta2},
                       {"epsilon", c.epsilon},
                       {"seed", c.seed}};
}

void to_json(nlohmann::json &j, const Metrics &m) {
    j = nlohmann::json{{"rmse", m.rmse}, {"mae", m.mae}, {"n", m.n}};
    if (m.mape_defined) {
        j["mape"] = m.mape;
    } else {
        j["mape"] = nullptr;
    }
    j["mape_defined"] = m.mape_defined;
}

nlohmann::json parse_json_text(const std::string &text, const std::string &where) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(where + ": " + e.what());
    }
}

nlohmann::json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void write_json_file(const nlohmann::json &j, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

} // namespace qfs
