#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>

#include "plots.hpp"
#include "qfs/data.hpp"
#include "qfs/diagnostics.hpp"
#include "qfs/error.hpp"
#include "qfs/parallel.hpp"
#include "qfs/qconv.hpp"
#include "qfs/serialize.hpp"
#include "qfs/spectra.hpp"

namespace qfs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
    using Error::Error;
};

class MissingInputError : public Error {
    using Error::Error;
};

// Shortest text that parses back to the same double.
std::string shortest(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CLI::Option *add_real(CLI::App *sub, const std::string &name, double &value,
                      const std::string &help) {
    return sub->add_option(name, value, help)->default_str(shortest(value));
}

struct GlobalArgs {
    std::uint64_t seed = 0;
    std::string out = ".";
    int threads = 0;
    std::string config;
};

struct DescriptorArgs {
    std::string ansatz = "strongly";
    std::string architecture = "super";
    int kernel = 2;
    int layers = 2;
    int qubits = 0;
    std::uint64_t ansatz_seed = 1234;
    double rotation_ratio = 1.0 / 3.0;
    int repetitions = 5;

    [[nodiscard]] ModelDescriptor resolve() const {
        ModelDescriptor d;
        d.ansatz.family = parse_ansatz_family(ansatz);
        d.ansatz.rotation_ratio = rotation_ratio;
        d.ansatz.repetitions = repetitions;
        d.architecture = parse_architecture(architecture);
        d.layers = layers;
        d.kernel = kernel;
        d.seed = ansatz_seed;
        if (qubits > 0) {
            if (d.architecture == Architecture::SuperParallel) {
                if (layers < 1 || qubits % layers != 0) {
                    throw UsageError("--qubits " + std::to_string(qubits) +
                                     " is not a multiple of --layers " +
                                     std::to_string(layers));
                }
                d.kernel = qubits / layers;
            } else {
                d.kernel = qubits;
            }
        }
        validate(d);
        return d;
    }
};

void add_descriptor_options(CLI::App *sub, DescriptorArgs &a) {
    sub->add_option("--ansatz", a.ansatz,
                    "strongly, basic, custom, random or dense");
    sub->add_option("--arch", a.architecture, "parallel, super or nonreuploading");
    sub->add_option("--kernel", a.kernel, "data features per encoding (M)");
    sub->add_option("--layers", a.layers, "encoding repetitions (L)");
    sub->add_option("--qubits", a.qubits,
                    "total qubits; sets the kernel from the layer count (0 = unused)");
    sub->add_option("--ansatz-seed", a.ansatz_seed, "layout seed for random blocks");
    add_real(sub, "--rotation-ratio", a.rotation_ratio, "CNOTs per rotation (random)");
    sub->add_option("--repetitions", a.repetitions, "sublayers per block (dense)");
}

// Pulls the value of --config out of the raw arguments, if present.
std::optional<std::string> find_config_path(const std::vector<std::string> &args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return std::nullopt;
}

// Config entries become trailing "--key=value" arguments; with the take-last
// policy they override flags given on the command line.
std::vector<std::string> config_arguments(const std::string &path) {
    if (!fs::exists(path)) {
        throw MissingInputError("config file '" + path + "' not found");
    }
    json j;
    try {
        j = read_json_file(path);
    } catch (const ParseError &e) {
        throw UsageError(e.what());
    }
    if (!j.is_object()) {
        throw UsageError("config file must hold a JSON object");
    }
    std::vector<std::string> out;
    for (const auto &[key, value] : j.items()) {
        if (key == "command" || key == "config" || key == "out" || key == "threads") {
            continue;
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
            text = value.dump();
        } else {
            throw UsageError("config key '" + key + "' must be a scalar");
        }
        out.push_back("--" + key + "=" + text);
    }
    return out;
}

// Effective option values of a subcommand, as strings keyed by option name.
json effective_config(const CLI::App *sub, std::uint64_t seed) {
    json cfg = json::object();
    cfg["command"] = sub->get_name();
    cfg["seed"] = seed;
    for (const CLI::Option *opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help") {
            continue;
        }
        cfg[name] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
    }
    return cfg;
}

json result_header(const json &config) {
    json j = json::object();
    j["format_version"] = kResultFormatVersion;
    j["command"] = config.at("command");
    j["seed"] = config.at("seed");
    j["config"] = config;
    return j;
}

std::string comment_line(const json &config) {
    return "format_version=" + std::to_string(kResultFormatVersion) +
           " seed=" + config.at("seed").dump() + " config=" + config.dump();
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string fmt17(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

fs::path require_file(const std::string &path, const std::string &what) {
    if (path.empty()) {
        throw UsageError(what + " is required");
    }
    if (!fs::is_regular_file(path)) {
        throw MissingInputError(what + " '" + path + "' not found");
    }
    return path;
}

// ---- data -----------------------------------------------------------------

struct DataArgs {
    std::string dataset;
    int points = 0;
    double sigma = 0.05;
    double tau = 17.0;
    std::string in;
    std::string name;
};

WindowSpec windows_for(const std::string &dataset) {
    if (dataset == "mackey") {
        return mackey_glass_windows();
    }
    if (dataset == "legendre") {
        return legendre_windows();
    }
    return exchange_rate_windows();
}

int cmd_data(const CLI::App *sub, const GlobalArgs &g, const DataArgs &a,
             std::ostream &out) {
    TimeSeries series;
    if (a.dataset == "legendre") {
        LegendreParams p;
        p.n_points = a.points > 0 ? a.points : 1000;
        p.noise_sigma = a.sigma;
        p.seed = g.seed;
        series = gen_legendre(p);
    } else if (a.dataset == "mackey") {
        MackeyGlassParams p;
        // 1024 points give exactly 1000 windows with the (-18..0; +6) layout.
        p.n_points = a.points > 0 ? a.points : 1024;
        p.tau = a.tau;
        series = gen_mackey_glass(p);
    } else {
        series = load_csv(require_file(a.in, "--in"));
    }
    const std::string name = a.name.empty() ? a.dataset : a.name;
    const json config = effective_config(sub, g.seed);
    const fs::path dir{g.out};
    const std::string series_file = name + ".csv";
    write_csv(series, dir / series_file, comment_line(config));

    const WindowSpec spec = windows_for(a.dataset);
    const WindowedDataset ds = make_windows(series.values, spec);
    json manifest = result_header(config);
    manifest["dataset"] = a.dataset;
    manifest["series_file"] = series_file;
    manifest["n_points"] = series.values.size();
    manifest["meta"] = series.meta;
    manifest["windows"] = {{"lag_offsets", spec.lag_offsets},
                           {"horizon", spec.horizon},
                           {"split_index", spec.split_index},
                           {"n_rows", ds.size()},
                           {"n_train", ds.n_train()},
                           {"n_test", ds.n_test()}};
    write_json_file(manifest, dir / (name + ".manifest.json"));
    out << a.dataset << ": " << series.values.size() << " points, " << ds.size()
        << " windows (" << ds.n_train() << " train / " << ds.n_test() << " test) -> "
        << (dir / series_file).string() << '\n';
    return kExitOk;
}

struct LoadedData {
    std::string dataset;
    WindowedDataset windows;
};

LoadedData load_manifest(const std::string &path) {
    const fs::path mpath = require_file(path, "--data");
    const json m = read_json_file(mpath);
    try {
        const fs::path series_path = mpath.parent_path() / m.at("series_file").get<std::string>();
        if (!fs::is_regular_file(series_path)) {
            throw MissingInputError("series file '" + series_path.string() + "' not found");
        }
        const TimeSeries series = load_csv(series_path);
        const json &w = m.at("windows");
        WindowSpec spec;
        spec.lag_offsets = w.at("lag_offsets").get<std::vector<int>>();
        spec.horizon = w.at("horizon").get<int>();
        spec.split_index = w.at("split_index").get<std::size_t>();
        return {m.at("dataset").get<std::string>(), make_windows(series.values, spec)};
    } catch (const json::exception &e) {
        throw ParseError(mpath.string() + ": " + e.what());
    }
}

// ---- train / eval ----------------------------------------------------------

struct TrainArgs {
    std::string data;
    DescriptorArgs desc;
    int epochs = 30;
    double learning_rate = 0.01;
    int batch = 16;
    int padding = 1;
    int stride = 1;
    std::string name = "run";
};

json metrics_block(const QConvModel &model, const WindowedDataset &ds) {
    json j;
    j["train"] = evaluate(model, ds, Split::Train);
    j["test"] = evaluate(model, ds, Split::Test);
    j["persistence_test"] = persistence_metrics(ds, Split::Test);
    return j;
}

void write_predictions(const QConvModel &model, const LoadedData &data,
                       const json &config, const fs::path &stem) {
    const auto &ds = data.windows;
    const auto preds = predict(model, ds.inputs);
    std::string csv = "# " + comment_line(config) + "\nrow,anchor,split,target,prediction\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        csv += std::to_string(i) + ',' + std::to_string(ds.anchors[i]) + ',' +
               (i < ds.split_index ? "train" : "test") + ',' + fmt17(ds.targets[i]) +
               ',' + fmt17(preds[i]) + '\n';
    }
    write_text(stem.string() + ".predictions.csv", csv);
    write_text(stem.string() + ".predictions.svg",
               svg_prediction_chart(ds.targets, preds, ds.split_index,
                                    data.dataset + ": truth vs prediction",
                                    comment_line(config)));
}

ConvConfig conv_config(const TrainArgs &a, const WindowedDataset &ds) {
    ConvConfig c;
    c.window = static_cast<int>(ds.lag_offsets.size());
    c.padding = a.padding;
    c.stride = a.stride;
    c.descriptor = a.desc.resolve();
    c.validate();
    return c;
}

int cmd_train(const CLI::App *sub, const GlobalArgs &g, const TrainArgs &a,
              std::ostream &out) {
    const LoadedData data = load_manifest(a.data);
    const ConvConfig conv = conv_config(a, data.windows);
    const json config = effective_config(sub, g.seed);

    QConvModel model{conv, fit_scaler(data.windows)};
    model.initialize(g.seed);
    TrainConfig tc;
    tc.epochs = a.epochs;
    tc.learning_rate = a.learning_rate;
    tc.batch_size = a.batch;
    tc.seed = g.seed;

    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult result = train(model, data.windows, tc);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path stem = fs::path{g.out} / a.name;
    json ckpt = checkpoint_json(result.model);
    ckpt["seed"] = g.seed;
    ckpt["config"] = config;
    write_json_file(ckpt, stem.string() + ".checkpoint.json");

    std::string hist = "# " + comment_line(config) + "\nepoch,train_loss,test_rmse\n";
    for (const auto &e : result.history) {
        hist += std::to_string(e.epoch) + ',' + fmt17(e.train_loss) + ',' +
                fmt17(e.test_rmse) + '\n';
    }
    write_text(stem.string() + ".history.csv", hist);

    json m = result_header(config);
    m["dataset"] = data.dataset;
    m["descriptor"] = conv.descriptor;
    m["conv"] = conv;
    m["n_qubits"] = model.n_qubits();
    m["n_parameters"] = model.n_parameters();
    m["train_config"] = tc;
    m["best_epoch"] = result.best_epoch;
    m["metrics"] = metrics_block(result.model, data.windows);
    m["wall_seconds"] = wall;
    write_json_file(m, stem.string() + ".metrics.json");
    write_predictions(result.model, data, config, stem);

    const auto &test = m["metrics"]["test"];
    out << a.name << ": test rmse " << test["rmse"].get<double>() << ", mae "
        << test["mae"].get<double>() << " (best epoch " << result.best_epoch << ", "
        << wall << " s)\n";
    return kExitOk;
}

struct EvalArgs {
    TrainArgs train; // descriptor and geometry to match
    std::string checkpoint;
};

int cmd_eval(const CLI::App *sub, const GlobalArgs &g, const EvalArgs &a,
             std::ostream &out) {
    const LoadedData data = load_manifest(a.train.data);
    const ConvConfig expected = conv_config(a.train, data.windows);
    const QConvModel model =
        load_checkpoint(require_file(a.checkpoint, "--checkpoint"), expected);
    const json config = effective_config(sub, g.seed);
    json m = result_header(config);
    m["dataset"] = data.dataset;
    m["descriptor"] = model.conv().descriptor;
    m["n_qubits"] = model.n_qubits();
    m["n_parameters"] = model.n_parameters();
    m["metrics"] = metrics_block(model, data.windows);
    const fs::path stem = fs::path{g.out} / a.train.name;
    write_json_file(m, stem.string() + ".eval.json");
    write_predictions(model, data, config, stem);
    out << a.train.name << ": test rmse " << m["metrics"]["test"]["rmse"].get<double>()
        << '\n';
    return kExitOk;
}

// ---- spectrum / express / variance ----------------------------------------

struct SpectrumArgs {
    DescriptorArgs desc;
    int samples = 100;
    int grid = 64;
    double threshold = 1e-5;
    std::string name = "spectrum";
};

int cmd_spectrum(const CLI::App *sub, const GlobalArgs &g, const SpectrumArgs &a,
                 std::ostream &out) {
    const ModelDescriptor desc = a.desc.resolve();
    SpectrumOptions opts;
    opts.n_samples = a.samples;
    opts.grid_size = a.grid;
    opts.threshold = a.threshold;
    opts.seed = g.seed;
    check_grid(desc, opts.grid_size);
    const SpectrumReport rep = sample_spectrum(desc, opts);
    const json config = effective_config(sub, g.seed);
    const auto limits = band_limit(desc);

    json j = result_header(config);
    j["descriptor"] = desc;
    j["n_qubits"] = desc.n_qubits();
    j["options"] = {{"samples", opts.n_samples},
                    {"grid", opts.grid_size},
                    {"threshold", opts.threshold}};
    j["degree"] = rep.degree;
    if (desc.architecture == Architecture::NonReuploading) {
        j["expected_degree"] = nullptr;
    } else {
        j["expected_degree"] = expected_degree(desc);
    }
    j["band_limit"] = limits;
    j["n_accessible"] = rep.accessible.size();
    json acc = json::array();
    const CoefficientGrid &shape = rep.samples.front();
    for (const auto &w : rep.accessible) {
        acc.push_back({{"omega", w}, {"max_abs", rep.max_abs[shape.index_of(w)]}});
    }
    j["accessible"] = acc;
    const fs::path stem = fs::path{g.out} / a.name;
    write_json_file(j, stem.string() + ".spectrum.json");

    // One row per weight draw and accessible frequency.
    std::string csv = "# " + comment_line(config) + "\nsample,";
    for (std::size_t m = 0; m < limits.size(); ++m) {
        csv += "omega_" + std::to_string(m + 1) + ',';
    }
    csv += "re,im\n";
    for (std::size_t s = 0; s < rep.samples.size(); ++s) {
        for (const auto &w : rep.accessible) {
            const Complex c = rep.samples[s].at(w);
            csv += std::to_string(s) + ',';
            for (int v : w) {
                csv += std::to_string(v) + ',';
            }
            csv += fmt17(c.real()) + ',' + fmt17(c.imag()) + '\n';
        }
    }
    write_text(stem.string() + ".spectrum.csv", csv);
    write_text(stem.string() + ".spectrum.svg",
               svg_spectrum_panels(rep,
                                   to_string(desc.ansatz.family) + " / " +
                                       to_string(desc.architecture) + ", " +
                                       std::to_string(desc.n_qubits()) + " qubits, L=" +
                                       std::to_string(desc.layers) + ", degree " +
                                       std::to_string(rep.degree),
                                   comment_line(config)));
    out << a.name << ": degree " << rep.degree << ", " << rep.accessible.size()
        << " accessible coefficients\n";
    return kExitOk;
}

struct ExpressArgs {
    DescriptorArgs desc;
    int pairs = 5000;
    int bins = 75;
    double data_value = 0.0;
    std::string name = "express";
};

int cmd_express(const CLI::App *sub, const GlobalArgs &g, const ExpressArgs &a,
                std::ostream &out) {
    const ModelDescriptor desc = a.desc.resolve();
    DiagnosticsOptions o;
    o.seed = g.seed;
    o.n_pairs = a.pairs;
    o.n_bins = a.bins;
    o.data_value = a.data_value;
    const ExpressibilityResult r = expressibility(desc, o);
    const json config = effective_config(sub, g.seed);
    json j = result_header(config);
    j["descriptor"] = desc;
    j["n_qubits"] = desc.n_qubits();
    j["n_pairs"] = r.n_pairs;
    j["n_bins"] = r.n_bins;
    j["data_value"] = a.data_value;
    j["kl"] = r.kl;
    j["upper_bound"] = r.upper_bound;
    j["histogram"] = r.histogram.counts;
    const fs::path stem = fs::path{g.out} / a.name;
    write_json_file(j, stem.string() + ".express.json");

    const std::int64_t dim = std::int64_t{1} << desc.n_qubits();
    std::string csv = "# " + comment_line(config) + "\nbin_lo,bin_hi,count,haar_prob\n";
    for (int b = 0; b < r.histogram.n_bins; ++b) {
        csv += fmt17(r.histogram.bin_lo(b)) + ',' + fmt17(r.histogram.bin_hi(b)) + ',' +
               std::to_string(r.histogram.counts[b]) + ',' +
               fmt17(haar_bin_probability(b, r.histogram.n_bins, dim)) + '\n';
    }
    write_text(stem.string() + ".express.csv", csv);
    out << a.name << ": kl " << r.kl << " (upper bound " << r.upper_bound << ")\n";
    return kExitOk;
}

struct VarianceArgs {
    DescriptorArgs desc;
    int samples = 200;
    int parameter = 1;
    int qubit = 0;
    double data_value = 0.0;
    std::string name = "variance";
};

int cmd_variance(const CLI::App *sub, const GlobalArgs &g, const VarianceArgs &a,
                 std::ostream &out) {
    const ModelDescriptor desc = a.desc.resolve();
    DiagnosticsOptions o;
    o.seed = g.seed;
    o.n_samples = a.samples;
    o.parameter_index = a.parameter;
    o.qubit = a.qubit;
    o.data_value = a.data_value;
    const VarianceResult r = gradient_variance(desc, o);
    const json config = effective_config(sub, g.seed);
    json j = result_header(config);
    j["descriptor"] = desc;
    j["n_qubits"] = desc.n_qubits();
    j["n_samples"] = r.n_samples;
    j["parameter_index"] = r.parameter_index;
    j["qubit"] = a.qubit;
    j["data_value"] = a.data_value;
    j["variance"] = r.variance;
    j["mean"] = r.mean;
    write_json_file(j, (fs::path{g.out} / a.name).string() + ".variance.json");
    out << a.name << ": variance " << r.variance << '\n';
    return kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
    std::string in;
    std::string name = "report";
};

std::string descriptor_key(const json &d) {
    return d.at("ansatz").get<std::string>() + '|' + d.at("architecture").get<std::string>() +
           '|' + d.at("kernel").dump() + '|' + d.at("layers").dump() + '|' + d.at("seed").dump();
}

std::string csv_field(const json &v) {
    if (v.is_null()) {
        return "";
    }
    if (v.is_number_float()) {
        return fmt17(v.get<double>());
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
}

struct RunMetrics {
    double rmse = 0, mae = 0, mape = 0;
    int count = 0;
};

json improvement(const RunMetrics &baseline, const RunMetrics &candidate) {
    auto pct = [](double base, double cand) { return 100.0 * (base - cand) / base; };
    return {{"rmse_pct", pct(baseline.rmse, candidate.rmse)},
            {"mae_pct", pct(baseline.mae, candidate.mae)},
            {"mape_pct", pct(baseline.mape, candidate.mape)},
            {"baseline_runs", baseline.count},
            {"candidate_runs", candidate.count}};
}

int cmd_report(const CLI::App *sub, const GlobalArgs &g, const ReportArgs &a,
               std::ostream &out) {
    const fs::path dir = a.in.empty() ? fs::path{g.out} : fs::path{a.in};
    if (!fs::is_directory(dir)) {
        throw MissingInputError("input directory '" + dir.string() + "' not found");
    }
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<std::pair<std::string, json>> trains;
    std::map<std::string, json> diag; // descriptor key -> merged row
    for (const auto &f : files) {
        json j;
        try {
            j = read_json_file(f);
        } catch (const ParseError &) {
            continue;
        }
        if (!j.is_object() || !j.contains("command") || !j.contains("descriptor")) {
            continue;
        }
        const std::string cmd = j["command"].get<std::string>();
        const std::string key = descriptor_key(j["descriptor"]);
        if (cmd == "train") {
            trains.emplace_back(f.filename().string(), j);
        } else if (cmd == "spectrum" || cmd == "express" || cmd == "variance") {
            json &row = diag[key];
            row["descriptor"] = j["descriptor"];
            row["n_qubits"] = j["n_qubits"];
            if (cmd == "spectrum") {
                row["degree"] = j["degree"];
            } else if (cmd == "express") {
                row["kl"] = j["kl"];
            } else {
                row["variance"] = j["variance"];
            }
        }
    }
    if (trains.empty() && diag.empty()) {
        throw MissingInputError("no train, spectrum, express or variance results in '" +
                                dir.string() + "'");
    }
    const json config = effective_config(sub, g.seed);
    const fs::path stem = fs::path{g.out} / a.name;

    // Table-1-shaped rows, grouped by dataset.
    std::stable_sort(trains.begin(), trains.end(), [](const auto &x, const auto &y) {
        return x.second["dataset"].template get<std::string>() <
               y.second["dataset"].template get<std::string>();
    });
    std::string t1 = "# " + comment_line(config) +
                     "\ndataset,run,ansatz,architecture,qubits,layers,parameters,rmse,mae,mape,training_time_s\n";
    // dataset -> descriptor key -> averaged test metrics
    std::map<std::string, std::map<std::string, RunMetrics>> grouped;
    for (const auto &[file, j] : trains) {
        const json &d = j["descriptor"];
        const json &test = j["metrics"]["test"];
        t1 += csv_field(j["dataset"]) + ',' + file + ',' + csv_field(d["ansatz"]) + ',' +
              csv_field(d["architecture"]) + ',' + csv_field(j["n_qubits"]) + ',' +
              csv_field(d["layers"]) + ',' + csv_field(j["n_parameters"]) + ',' +
              csv_field(test["rmse"]) + ',' + csv_field(test["mae"]) + ',' +
              csv_field(test["mape"]) + ',' + csv_field(j.value("wall_seconds", json{})) + '\n';
        RunMetrics &rm = grouped[j["dataset"].get<std::string>()][descriptor_key(d)];
        rm.rmse += test["rmse"].get<double>();
        rm.mae += test["mae"].get<double>();
        rm.mape += test["mape"].is_number() ? test["mape"].get<double>() : std::nan("");
        ++rm.count;
    }
    write_text(stem.string() + ".training.csv", t1);

    std::string t5 = "# " + comment_line(config) +
                     "\nansatz,architecture,qubits,layers,degree,expressibility,variance\n";
    for (const auto &[key, row] : diag) {
        const json &d = row["descriptor"];
        t5 += csv_field(d["ansatz"]) + ',' + csv_field(d["architecture"]) + ',' +
              csv_field(row["n_qubits"]) + ',' + csv_field(d["layers"]) + ',' +
              csv_field(row.value("degree", json{})) + ',' +
              csv_field(row.value("kl", json{})) + ',' +
              csv_field(row.value("variance", json{})) + '\n';
    }
    write_text(stem.string() + ".diagnostics.csv", t5);

    // Percentage improvements of reuploading and of the super-parallel layout.
    json summary = result_header(config);
    summary["datasets"] = json::object();
    for (auto &[dataset, runs] : grouped) {
        for (auto &[key, rm] : runs) {
            rm.rmse /= rm.count;
            rm.mae /= rm.count;
            rm.mape /= rm.count;
        }
        json reup = json::array();
        json super = json::array();
        for (const auto &[key, rm] : runs) {
            // key = ansatz|arch|kernel|layers|seed
            std::vector<std::string> parts;
            std::string part;
            for (char c : key + '|') {
                if (c == '|') {
                    parts.push_back(part);
                    part.clear();
                } else {
                    part += c;
                }
            }
            const std::string &ansatz = parts[0];
            const std::string &arch = parts[1];
            const int kernel = std::stoi(parts[2]);
            const int layers = std::stoi(parts[3]);
            auto find = [&](const std::string &arch2, int layers2) -> const RunMetrics * {
                const std::string k2 = ansatz + '|' + arch2 + '|' + parts[2] + '|' +
                                       std::to_string(layers2) + '|' + parts[4];
                const auto it = runs.find(k2);
                return it == runs.end() ? nullptr : &it->second;
            };
            if (arch == "parallel") {
                if (const RunMetrics *base = find("nonreuploading", layers)) {
                    json e = improvement(*base, rm);
                    e["ansatz"] = ansatz;
                    e["kernel"] = kernel;
                    e["layers"] = layers;
                    reup.push_back(e);
                }
            } else if (arch == "super") {
                if (const RunMetrics *base = find("parallel", layers * layers)) {
                    json e = improvement(*base, rm);
                    e["ansatz"] = ansatz;
                    e["super_qubits"] = kernel * layers;
                    e["super_layers"] = layers;
                    e["parallel_layers"] = layers * layers;
                    super.push_back(e);
                }
            }
        }
        summary["datasets"][dataset] = {{"reuploading_improvement", reup},
                                        {"super_parallel_improvement", super}};
    }
    write_json_file(summary, stem.string() + ".summary.json");
    out << a.name << ": " << trains.size() << " training runs, " << diag.size()
        << " diagnostic descriptors -> " << stem.string() << ".*\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string> &raw_args, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Fourier-spectrum analysis and quantum-convolution forecasting "
                 "for small parameterized circuits",
                 "qfs"};
    app.option_defaults()->always_capture_default()->take_last();
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads (0 = runtime default)");
    app.add_option("--config", g.config, "JSON file of option values; overrides flags");

    DataArgs data_args;
    CLI::App *data = app.add_subcommand("data", "generate or ingest a series and its windows");
    data->add_option("dataset,--dataset", data_args.dataset, "legendre, mackey or csv")
        ->required()
        ->check(CLI::IsMember({"legendre", "mackey", "csv"}));
    data->add_option("--points", data_args.points,
                     "series length (0 = 1000 for legendre, 1024 for mackey)");
    add_real(data, "--sigma", data_args.sigma, "Legendre noise standard deviation");
    add_real(data, "--tau", data_args.tau, "Mackey-Glass delay");
    data->add_option("--in", data_args.in, "input CSV (csv dataset)");
    data->add_option("--name", data_args.name, "output basename (default: dataset)");

    TrainArgs train_args;
    CLI::App *train_cmd = app.add_subcommand("train", "train the quantum convolution model");
    auto add_model_options = [](CLI::App *sub, TrainArgs &t) {
        sub->add_option("--data", t.data, "dataset manifest written by 'data'");
        add_descriptor_options(sub, t.desc);
        sub->add_option("--padding", t.padding, "zero padding per edge");
        sub->add_option("--stride", t.stride, "window stride");
        sub->add_option("--name", t.name, "output basename");
    };
    add_model_options(train_cmd, train_args);
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    add_real(train_cmd, "--lr", train_args.learning_rate, "Adam learning rate");
    train_cmd->add_option("--batch", train_args.batch, "minibatch size");

    EvalArgs eval_args;
    eval_args.train.name = "eval";
    CLI::App *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    add_model_options(eval_cmd, eval_args.train);
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint JSON");

    SpectrumArgs spec_args;
    CLI::App *spec_cmd = app.add_subcommand("spectrum", "sample accessible Fourier coefficients");
    add_descriptor_options(spec_cmd, spec_args.desc);
    spec_cmd->add_option("--samples", spec_args.samples, "weight draws");
    spec_cmd->add_option("--grid", spec_args.grid, "grid points per data dimension");
    add_real(spec_cmd, "--threshold", spec_args.threshold, "accessibility threshold");
    spec_cmd->add_option("--name", spec_args.name, "output basename");

    ExpressArgs expr_args;
    CLI::App *expr_cmd = app.add_subcommand("express", "expressibility against Haar states");
    add_descriptor_options(expr_cmd, expr_args.desc);
    expr_cmd->add_option("--pairs", expr_args.pairs, "fidelity pairs");
    expr_cmd->add_option("--bins", expr_args.bins, "histogram bins");
    add_real(expr_cmd, "--data-value", expr_args.data_value, "value fed to every data slot");
    expr_cmd->add_option("--name", expr_args.name, "output basename");

    VarianceArgs var_args;
    CLI::App *var_cmd = app.add_subcommand("variance", "gradient variance probe");
    add_descriptor_options(var_cmd, var_args.desc);
    var_cmd->add_option("--samples", var_args.samples, "weight draws");
    var_cmd->add_option("--param", var_args.parameter, "weight slot to differentiate");
    var_cmd->add_option("--qubit", var_args.qubit, "measured qubit");
    add_real(var_cmd, "--data-value", var_args.data_value, "value fed to every data slot");
    var_cmd->add_option("--name", var_args.name, "output basename");

    ReportArgs rep_args;
    CLI::App *rep_cmd = app.add_subcommand("report", "aggregate result files into tables");
    rep_cmd->add_option("--in", rep_args.in, "directory of result JSON files (default: --out)");
    rep_cmd->add_option("--name", rep_args.name, "output basename");

    try {
        std::vector<std::string> args = raw_args;
        if (const auto path = find_config_path(raw_args)) {
            const auto extra = config_arguments(*path);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp &) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::ParseError &e) {
            err << "qfs: " << e.what() << "\nRun with --help for usage.\n";
            return kExitUsage;
        }
        if (g.threads < 0) {
            throw UsageError("--threads must be >= 0");
        }
        set_thread_count(g.threads);
        std::error_code ec;
        fs::create_directories(g.out, ec);
        if (ec) {
            throw Error("cannot create output directory '" + g.out + "'");
        }

        if (data->parsed()) {
            return cmd_data(data, g, data_args, out);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_cmd, g, train_args, out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_cmd, g, eval_args, out);
        }
        if (spec_cmd->parsed()) {
            return cmd_spectrum(spec_cmd, g, spec_args, out);
        }
        if (expr_cmd->parsed()) {
            return cmd_express(expr_cmd, g, expr_args, out);
        }
        if (var_cmd->parsed()) {
            return cmd_variance(var_cmd, g, var_args, out);
        }
        return cmd_report(rep_cmd, g, rep_args, out);
    } catch (const TrainingError &e) {
        err << "qfs: training diverged at epoch " << e.epoch() << ": " << e.what() << '\n';
        return kExitDivergence;
    } catch (const AliasingError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitAliasing;
    } catch (const MissingInputError &e) {
        err << "qfs: missing input: " << e.what() << '\n';
        return kExitMissingInput;
    } catch (const UsageError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DescriptorError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RangeError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IndexError &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "qfs: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace qfs::cli
