#pragma once

// JSON encodings shared by checkpoints and CLI result files.

#include <json.hpp>

#include "qfs/ansatz.hpp"
#include "qfs/data.hpp"
#include "qfs/qconv.hpp"

namespace qfs {

void to_json(nlohmann::json &j, const ModelDescriptor &d);
void from_json(const nlohmann::json &j, ModelDescriptor &d);

void to_json(nlohmann::json &j, const ConvConfig &c);
/// Reads geometry only; the descriptor is stored separately.
void from_json(const nlohmann::json &j, ConvConfig &c);

void to_json(nlohmann::json &j, const Scaler &s);
Scaler scaler_from_json(const nlohmann::json &j);

void to_json(nlohmann::json &j, const TrainConfig &c);
void to_json(nlohmann::json &j, const Metrics &m);

/// Checkpoint document as written by save_checkpoint. Callers may add
/// provenance keys; load_checkpoint ignores keys it does not know.
nlohmann::json checkpoint_json(const QConvModel &model);

/// Parses text, rethrowing library errors as ParseError prefixed by `where`.
nlohmann::json parse_json_text(const std::string &text, const std::string &where);
nlohmann::json read_json_file(const std::filesystem::path &path);
/// Pretty-printed with a trailing newline.
void write_json_file(const nlohmann::json &j, const std::filesystem::path &path);

} // namespace qfs
