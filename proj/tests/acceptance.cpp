// Acceptance checks, one PASS/FAIL line per criterion. Run with criterion
// numbers as arguments to select a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "oracle.hpp"
#include "qfs/ansatz.hpp"
#include "qfs/data.hpp"
#include "qfs/diagnostics.hpp"
#include "qfs/gradient.hpp"
#include "qfs/qconv.hpp"
#include "qfs/spectra.hpp"

namespace fs = std::filesystem;
using namespace qfs;

namespace {

// Tolerances and reference targets.
constexpr double kAdjointVsShift = 1e-10;
constexpr double kShiftVsFd = 1e-6;
constexpr double kModelVsFd = 1e-5;
constexpr double kBandLeak = 1e-8;
constexpr double kHaarOracleKl = 0.01;
constexpr double kKlBand = 0.5;
constexpr double kVarianceFactor = 2.0;
constexpr double kRmseLo = 0.05;
constexpr double kRmseHi = 0.12;

struct Verdict {
    bool pass = true;
    std::string detail;
};

ModelDescriptor Desc(AnsatzFamily family, Architecture arch, int kernel, int layers) {
    ModelDescriptor d;
    d.ansatz.family = family;
    d.architecture = arch;
    d.kernel = kernel;
    d.layers = layers;
    return d;
}

const AnsatzFamily kFamilies[] = {AnsatzFamily::StronglyEntangling,
                                  AnsatzFamily::BasicEntangler, AnsatzFamily::CustomLayers,
                                  AnsatzFamily::RandomLayers, AnsatzFamily::DenseBlock};
const Architecture kArchs[] = {Architecture::Parallel, Architecture::SuperParallel,
                               Architecture::NonReuploading};

std::string Fmt(const char *f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Verdict Criterion1() {
    Verdict v;
    std::mt19937_64 eng(2024);
    double worst_adj = 0, worst_fd = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + i % 7;
        const AnsatzFamily family = kFamilies[i % 5];
        ModelDescriptor d;
        switch (i % 3) {
        case 0:
            d = n % 2 == 0 ? Desc(family, Architecture::SuperParallel, 2, n / 2)
                           : Desc(family, Architecture::Parallel, n, 2);
            break;
        case 1:
            d = Desc(family, Architecture::Parallel, n, 1 + i % 3);
            break;
        default:
            d = Desc(family, Architecture::NonReuploading, n, 1 + i % 2);
        }
        d.seed = 1234 + static_cast<std::uint64_t>(i);
        const auto c = build_architecture(d);
        const auto data = oracle::random_angles(c.n_data_slots(), eng);
        const auto w = oracle::random_angles(c.n_weight_slots(), eng);
        const int q = i % c.n_qubits();
        const auto adj = grad_adjoint(c, data, w, q);
        const auto ps = grad_parameter_shift(c, data, w, q);
        const auto fd = oracle::finite_difference(c, data, w, q);
        for (std::size_t j = 0; j < w.size(); ++j) {
            worst_adj = std::max(worst_adj, std::abs(adj[j] - ps[j]));
            worst_fd = std::max(worst_fd, std::abs(ps[j] - fd[j]));
        }
    }

    double worst_model = 0;
    for (auto family : kFamilies) {
        for (auto arch : kArchs) {
            ConvConfig conv;
            conv.window = 4;
            conv.descriptor = Desc(family, arch, 2, 2);
            QConvModel m(conv, Scaler(-1.0, 2.0));
            m.initialize(7);
            const auto x = oracle::random_angles(4, eng, -1, 2);
            const double target = 0.4;
            const auto lg = loss_and_gradient(m, x, target);
            auto p = m.parameters();
            const double h = 1e-5;
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double keep = p[j];
                p[j] = keep + h;
                m.set_parameters(p);
                const double up = loss_and_gradient(m, x, target).loss;
                p[j] = keep - h;
                m.set_parameters(p);
                const double dn = loss_and_gradient(m, x, target).loss;
                p[j] = keep;
                m.set_parameters(p);
                worst_model = std::max(worst_model, std::abs((up - dn) / (2 * h) - lg.gradient[j]));
            }
        }
    }
    v.pass = worst_adj < kAdjointVsShift && worst_fd < kShiftVsFd && worst_model < kModelVsFd;
    v.detail = "adjoint-shift " + Fmt("%.2e", worst_adj) + ", shift-fd " + Fmt("%.2e", worst_fd) +
               ", model-fd " + Fmt("%.2e", worst_model);
    return v;
}

Verdict Criterion2() {
    Verdict v;
    double worst = 0;
    for (int layers : {2, 3, 4}) {
        for (auto arch : kArchs) {
            for (auto family : kFamilies) {
                const auto d = Desc(family, arch, 2, layers);
                const auto limit = band_limit(d);
                SpectrumOptions o;
                o.n_samples = 20;
                o.seed = 5;
                o.grid_size = 2 * *std::max_element(limit.begin(), limit.end()) + 6;
                const auto rep = sample_spectrum(d, o);
                for (const auto &s : rep.samples) {
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        const auto w = s.frequency_at(i);
                        if (std::abs(w[0]) > limit[0] || std::abs(w[1]) > limit[1]) {
                            worst = std::max(worst, std::abs(s.values()[i]));
                        }
                    }
                }
            }
        }
    }
    v.pass = worst < kBandLeak;
    v.detail = "max |c| outside band " + Fmt("%.2e", worst);
    return v;
}

Verdict Criterion3() {
    Verdict v;
    const std::map<AnsatzFamily, std::vector<int>> target = {
        {AnsatzFamily::StronglyEntangling, {3, 8, 11}},
        {AnsatzFamily::BasicEntangler, {3, 8, 10}},
        {AnsatzFamily::RandomLayers, {2, 2, 2}},
        {AnsatzFamily::CustomLayers, {2, 5, 8}},
    };
    for (const auto &[family, want] : target) {
        const int slack = family == AnsatzFamily::CustomLayers ? 1 : 0;
        v.detail += to_string(family) + " ";
        for (int k = 0; k < 3; ++k) {
            SpectrumOptions o; // 100 draws, G = 64, threshold 1e-5
            const int got =
                sample_spectrum(Desc(family, Architecture::SuperParallel, 2, k + 2), o).degree;
            if (std::abs(got - want[k]) > slack) {
                v.pass = false;
            }
            v.detail += std::to_string(got) + (k < 2 ? "/" : "");
        }
        v.detail += "; ";
    }
    v.detail += "targets 3/8/11, 3/8/10, 2/2/2, custom 2/5/8 +-1";
    return v;
}

Verdict Criterion4() {
    Verdict v;
    for (auto family : {AnsatzFamily::StronglyEntangling, AnsatzFamily::BasicEntangler}) {
        SpectrumOptions o;
        const auto par = sample_spectrum(Desc(family, Architecture::Parallel, 2, 4), o);
        const auto non = sample_spectrum(Desc(family, Architecture::NonReuploading, 2, 4), o);
        const std::set<FrequencyVector> ps(par.accessible.begin(), par.accessible.end());
        const bool subset = std::all_of(non.accessible.begin(), non.accessible.end(),
                                        [&](const auto &w) { return ps.count(w) > 0; });
        const bool strict = non.accessible.size() < par.accessible.size();
        v.pass = v.pass && subset && strict;
        v.detail += to_string(family) + " " + std::to_string(non.accessible.size()) + " < " +
                    std::to_string(par.accessible.size()) + "; ";
    }
    return v;
}

Verdict Criterion5() {
    Verdict v;
    const std::vector<std::pair<AnsatzFamily, double>> rows = {
        {AnsatzFamily::StronglyEntangling, 0.0033},
        {AnsatzFamily::BasicEntangler, 0.0053},
        {AnsatzFamily::RandomLayers, 2.764}};
    std::vector<double> means;
    for (const auto &[family, reference] : rows) {
        double sum = 0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            DiagnosticsOptions o; // 5000 pairs, 75 bins
            o.seed = seed;
            sum += expressibility(Desc(family, Architecture::SuperParallel, 2, 2), o).kl;
        }
        const double mean = sum / 5;
        means.push_back(mean);
        if (std::abs(mean - reference) > kKlBand * reference) {
            v.pass = false;
        }
        v.detail += to_string(family) + " " + Fmt("%.4f", mean) + "; ";
    }
    if (!(means[0] < means[1] && means[1] < means[2])) {
        v.pass = false;
    }
    std::vector<double> f(5000);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = fidelity(haar_random_state(4, 99, 2 * i), haar_random_state(4, 99, 2 * i + 1));
    }
    const double haar = kl_to_haar(make_histogram(f, 75), 16);
    v.pass = v.pass && haar < kHaarOracleKl;
    v.detail += "haar " + Fmt("%.4f", haar);
    return v;
}

Verdict Criterion6() {
    Verdict v;
    const double reference[] = {0.021, 0.0063, 0.0016};
    double prev = INFINITY;
    for (int k = 0; k < 3; ++k) {
        DiagnosticsOptions o; // 200 draws, slot 1
        const double var = gradient_variance(
            Desc(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2, k + 2), o)
                               .variance;
        const double ratio = var / reference[k];
        if (ratio > kVarianceFactor || ratio < 1 / kVarianceFactor || !(var < prev)) {
            v.pass = false;
        }
        prev = var;
        v.detail += Fmt("%.4g", var) + (k < 2 ? " / " : "");
    }
    v.detail += " (reference 0.021 / 0.0063 / 0.0016)";
    return v;
}

WindowedDataset MackeyGlass() {
    MackeyGlassParams p;
    p.n_points = 1024;
    return make_windows(gen_mackey_glass(p).values, mackey_glass_windows());
}

double TestRmse(const WindowedDataset &data, const ModelDescriptor &d, std::uint64_t seed) {
    ConvConfig conv;
    conv.window = 4;
    conv.descriptor = d;
    QConvModel m(conv, fit_scaler(data));
    m.initialize(seed);
    TrainConfig tc; // 30 epochs
    tc.seed = seed;
    return evaluate(train(m, data, tc).model, data).rmse;
}

Verdict Criterion7() {
    Verdict v;
    const auto data = MackeyGlass();
    const double rmse =
        TestRmse(data, Desc(AnsatzFamily::StronglyEntangling, Architecture::SuperParallel, 2, 2), 0);
    const double base = persistence_metrics(data).rmse;
    v.pass = rmse >= kRmseLo && rmse <= kRmseHi && rmse < base;
    v.detail = "test rmse " + Fmt("%.5f", rmse) + ", persistence " + Fmt("%.5f", base);
    return v;
}

Verdict Criterion8() {
    Verdict v;
    const auto data = MackeyGlass();
    const auto s = AnsatzFamily::StronglyEntangling;
    const std::vector<std::pair<std::string, ModelDescriptor>> models = {
        {"nonreuploading(2q,4L)", Desc(s, Architecture::NonReuploading, 2, 4)},
        {"parallel(2q,4L)", Desc(s, Architecture::Parallel, 2, 4)},
        {"super(4q,2L)", Desc(s, Architecture::SuperParallel, 2, 2)}};
    std::vector<double> mean;
    for (const auto &[name, d] : models) {
        double sum = 0;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            sum += TestRmse(data, d, seed);
        }
        mean.push_back(sum / 3);
        v.detail += name + " " + Fmt("%.5f", mean.back()) + "; ";
    }
    v.pass = mean[1] < mean[0] && mean[2] < mean[1];
    return v;
}

Verdict Criterion9() {
    Verdict v;
    const std::vector<std::pair<int, std::uint64_t>> rows = {
        {4, 81}, {3, 49}, {2, 25}, {8, 289}, {11, 529}};
    for (const auto &[degree, want] : rows) {
        const auto got = dof(degree, 2);
        v.pass = v.pass && got == want;
        v.detail += "dof(" + std::to_string(degree) + ",2)=" + std::to_string(got) + " ";
    }
    return v;
}

std::string Slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// JSON files are compared after dropping wall-clock fields; everything else
// byte for byte.
std::string Normalized(const fs::path &p) {
    auto text = Slurp(p);
    if (p.extension() == ".csv") {
        // Blank the training_time_s column wherever a header declares it.
        std::istringstream in(text);
        std::string line, result;
        int column = -1;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');) {
                cells.push_back(cell);
            }
            const auto it = std::find(cells.begin(), cells.end(), "training_time_s");
            if (it != cells.end()) {
                column = static_cast<int>(it - cells.begin());
            } else if (column >= 0 && column < static_cast<int>(cells.size())) {
                cells[static_cast<std::size_t>(column)].clear();
            }
            for (const auto &c : cells) {
                result += c + ',';
            }
            result += '\n';
        }
        return result;
    }
    if (p.extension() != ".json") {
        return text;
    }
    std::function<void(nlohmann::json &)> strip = [&](nlohmann::json &j) {
        if (j.is_object()) {
            j.erase("wall_seconds");
        }
        if (j.is_structured()) {
            for (auto &child : j) {
                strip(child);
            }
        }
    };
    auto j = nlohmann::json::parse(text);
    strip(j);
    return j.dump();
}

Verdict Criterion10() {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / "qfs_acceptance_determinism";
    fs::remove_all(root);
    const std::string manifest = (root / "data" / "legendre.manifest.json").string();
    std::ostringstream sink;
    int bad_exit = 0;
    auto cli = [&](std::vector<std::string> args) {
        if (cli::run_cli(args, sink, sink) != 0) {
            ++bad_exit;
        }
    };
    cli({"data", "legendre", "--seed", "4", "--out", (root / "data").string()});
    const std::string threads[] = {"1", "4"};
    for (const auto &t : threads) {
        const std::string out = (root / ("t" + t)).string();
        const std::vector<std::string> common = {"--seed", "11", "--threads", t, "--out", out};
        auto with = [&](std::vector<std::string> a) {
            a.insert(a.end(), common.begin(), common.end());
            cli(a);
        };
        with({"data", "mackey", "--points", "1024"});
        with({"data", "legendre", "--sigma", "0.02"});
        with({"train", "--data", manifest, "--epochs", "2", "--layers", "1"});
        // Both evals read the first run's checkpoint so the embedded paths agree.
        with({"eval", "--data", manifest, "--checkpoint",
              (root / "t1" / "run.checkpoint.json").string(), "--layers", "1"});
        with({"spectrum", "--samples", "12", "--grid", "16"});
        with({"express", "--pairs", "300"});
        with({"variance", "--samples", "40"});
        with({"report"});
    }
    std::size_t compared = 0, differing = 0;
    for (const auto &entry : fs::directory_iterator(root / "t1")) {
        const auto other = root / "t4" / entry.path().filename();
        ++compared;
        if (!fs::exists(other) || Normalized(entry.path()) != Normalized(other)) {
            ++differing;
            v.detail += "differs: " + entry.path().filename().string() + "; ";
        }
    }
    if (bad_exit > 0) {
        v.detail += sink.str();
    }
    v.pass = bad_exit == 0 && differing == 0 && compared >= 15;
    v.detail += std::to_string(compared) + " files compared across 1 and 4 threads, " +
                std::to_string(bad_exit) + " failed commands";
    if (v.pass) {
        fs::remove_all(root);
    }
    return v;
}

} // namespace

int main(int argc, char **argv) {
    const std::vector<std::function<Verdict()>> criteria = {
        Criterion1, Criterion2, Criterion3, Criterion4, Criterion5,
        Criterion6, Criterion7, Criterion8, Criterion9, Criterion10};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (int k = 1; k <= 10; ++k) {
        if (!selected.empty() && !selected.count(k)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k - 1]();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s  (%.1fs)  %s\n", k, v.pass ? "PASS" : "FAIL", secs,
                    v.detail.c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
