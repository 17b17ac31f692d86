#include "qfs/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "qfs/error.hpp"
#include "qfs/rng.hpp"

namespace qfs {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string &text, double &out) {
    const char *begin = text.data();
    const char *end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

} // namespace

std::string to_string(SeriesOrigin origin) {
    switch (origin) {
    case SeriesOrigin::Legendre:
        return "legendre";
    case SeriesOrigin::MackeyGlass:
        return "mackey";
    case SeriesOrigin::CsvFile:
        return "csv";
    }
    return "?";
}

TimeSeries gen_legendre(const LegendreParams &params) {
    if (params.n_points < 6) {
        throw DomainError("Legendre series needs at least 6 points");
    }
    if (!(params.noise_sigma >= 0.0)) {
        throw DomainError("noise sigma must be >= 0");
    }
    TimeSeries s;
    s.origin = SeriesOrigin::Legendre;
    s.meta = {{"n_points", params.n_points},
              {"noise_sigma", params.noise_sigma},
              {"seed", static_cast<double>(params.seed)}};
    auto eng = substream(params.seed, StreamTag::LegendreNoise, 0);
    std::normal_distribution<double> noise{0.0, 1.0};
    s.values.resize(static_cast<std::size_t>(params.n_points));
    for (int i = 0; i < params.n_points; ++i) {
        const double x = -1.0 + 2.0 * i / (params.n_points - 1);
        const double eps = params.noise_sigma > 0.0 ? params.noise_sigma * noise(eng) : 0.0;
        s.values[static_cast<std::size_t>(i)] = 0.5 * (3.0 * x * x - 1.0) + eps;
    }
    return s;
}

TimeSeries gen_mackey_glass(const MackeyGlassParams &p) {
    if (p.n_points < 1) {
        throw DomainError("Mackey-Glass series needs at least one point");
    }
    if (!(p.tau > 0.0) || !(p.dt > 0.0)) {
        throw DomainError("tau and dt must be positive");
    }
    const double steps_real = 1.0 / p.dt;
    const auto steps_per_unit = static_cast<long>(std::lround(steps_real));
    if (steps_per_unit < 1 || std::abs(steps_real - static_cast<double>(steps_per_unit)) > 1e-9) {
        throw DomainError("dt must divide the unit sampling interval");
    }
    if (p.tau < p.dt) {
        throw DomainError("tau must be at least one step");
    }

    const long n_steps = steps_per_unit * p.n_points;
    std::vector<double> traj;
    traj.reserve(static_cast<std::size_t>(n_steps + 1));
    traj.push_back(p.x0);

    // x at time t <= current time, linear between stored steps.
    auto history = [&](double t) {
        if (t <= 0.0) {
            return p.x0;
        }
        const double s = t / p.dt;
        auto k = static_cast<std::size_t>(std::floor(s));
        if (k + 1 >= traj.size()) {
            return traj.back();
        }
        const double frac = s - static_cast<double>(k);
        return traj[k] + frac * (traj[k + 1] - traj[k]);
    };
    auto rhs = [&](double x, double delayed) {
        return p.a * delayed / (1.0 + std::pow(delayed, p.exponent)) - p.b * x;
    };

    TimeSeries s;
    s.origin = SeriesOrigin::MackeyGlass;
    s.meta = {{"n_points", p.n_points}, {"tau", p.tau},   {"a", p.a},
              {"b", p.b},               {"exponent", p.exponent},
              {"x0", p.x0},             {"dt", p.dt}};
    s.values.reserve(static_cast<std::size_t>(p.n_points));

    double x = p.x0;
    for (long n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * p.dt;
        const double d0 = history(t - p.tau);
        const double dh = history(t + 0.5 * p.dt - p.tau);
        const double d1 = history(t + p.dt - p.tau);
        const double k1 = rhs(x, d0);
        const double k2 = rhs(x + 0.5 * p.dt * k1, dh);
        const double k3 = rhs(x + 0.5 * p.dt * k2, dh);
        const double k4 = rhs(x + p.dt * k3, d1);
        x += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x)) {
            throw IntegrationError("non-finite Mackey-Glass state at t = " +
                                   std::to_string(t + p.dt));
        }
        traj.push_back(x);
        if ((n + 1) % steps_per_unit == 0) {
            s.values.push_back(x);
        }
    }
    return s;
}

TimeSeries load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    TimeSeries s;
    s.origin = SeriesOrigin::CsvFile;
    s.source = path.string();
    std::string line;
    int line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto comma = t.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
            throw ParseError(where + ": expected two columns 'date,value'");
        }
        const std::string label = trim(t.substr(0, comma));
        const std::string value_text = trim(t.substr(comma + 1));
        double v = 0.0;
        if (!parse_double(value_text, v)) {
            if (!seen_data && s.values.empty()) {
                seen_data = true; // header row
                continue;
            }
            throw ParseError(where + ": non-numeric value '" + value_text + "'");
        }
        seen_data = true;
        s.values.push_back(v);
        s.labels.push_back(label);
    }
    if (s.values.empty()) {
        throw ParseError(path.string() + ": no data rows");
    }
    s.meta = {{"n_points", static_cast<double>(s.values.size())}};
    return s;
}

void write_csv(const TimeSeries &series, const std::filesystem::path &path,
               const std::string &comment) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "date,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const std::string label =
            series.labels.size() == series.values.size() ? series.labels[i]
                                                         : std::to_string(i + 1);
        std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
        out << label << ',' << buf << '\n';
    }
}

WindowSpec mackey_glass_windows() { return {{-18, -12, -6, 0}, 6, 500}; }

WindowSpec exchange_rate_windows() { return {{-4, -3, -2, -1, 0}, 1, 300}; }

WindowSpec legendre_windows() { return {{-4, -3, -2, -1, 0}, 1, 750}; }

WindowedDataset make_windows(std::span<const double> series,
                             const WindowSpec &spec) {
    if (spec.lag_offsets.empty()) {
        throw RangeError("at least one lag offset is required");
    }
    if (!std::is_sorted(spec.lag_offsets.begin(), spec.lag_offsets.end())) {
        throw RangeError("lag offsets must be sorted ascending");
    }
    if (spec.lag_offsets.back() > 0 || spec.horizon < 1) {
        throw RangeError("lags must be <= 0 and horizon >= 1");
    }
    const long first = -spec.lag_offsets.front();
    const long last = static_cast<long>(series.size()) - 1 - spec.horizon;
    if (last < first) {
        throw RangeError("series of length " + std::to_string(series.size()) +
                         " too short for the requested lags and horizon");
    }
    WindowedDataset d;
    d.lag_offsets = spec.lag_offsets;
    d.horizon = spec.horizon;
    for (long t = first; t <= last; ++t) {
        std::vector<double> row;
        row.reserve(spec.lag_offsets.size());
        for (int off : spec.lag_offsets) {
            row.push_back(series[static_cast<std::size_t>(t + off)]);
        }
        d.inputs.push_back(std::move(row));
        d.targets.push_back(series[static_cast<std::size_t>(t + spec.horizon)]);
        d.anchors.push_back(static_cast<std::size_t>(t));
    }
    if (spec.split_index >= d.size()) {
        throw RangeError("split index " + std::to_string(spec.split_index) +
                         " leaves no test rows out of " + std::to_string(d.size()));
    }
    d.split_index = spec.split_index;
    return d;
}

Scaler::Scaler(double data_min, double data_max, double lo, double hi)
    : data_min_(data_min), data_max_(data_max), lo_(lo), hi_(hi) {
    if (!(data_max > data_min) || !std::isfinite(data_min) || !std::isfinite(data_max)) {
        throw ScalerError("degenerate scaler range");
    }
    if (!(hi > lo)) {
        throw ScalerError("degenerate target range");
    }
}

Scaler Scaler::fit(std::span<const double> values, double lo, double hi) {
    if (values.empty()) {
        throw ScalerError("cannot fit a scaler on no values");
    }
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return Scaler{*mn, *mx, lo, hi};
}

double Scaler::apply(double v) const noexcept {
    return lo_ + (v - data_min_) * (hi_ - lo_) / (data_max_ - data_min_);
}

double Scaler::invert(double v) const noexcept {
    return data_min_ + (v - lo_) * (data_max_ - data_min_) / (hi_ - lo_);
}

double Scaler::inverse_slope() const noexcept {
    return (data_max_ - data_min_) / (hi_ - lo_);
}

Scaler fit_scaler(const WindowedDataset &dataset) {
    std::vector<double> values;
    for (std::size_t i = 0; i < dataset.split_index; ++i) {
        values.insert(values.end(), dataset.inputs[i].begin(), dataset.inputs[i].end());
        values.push_back(dataset.targets[i]);
    }
    return Scaler::fit(values);
}

} // namespace qfs
