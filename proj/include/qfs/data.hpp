#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qfs {

enum class SeriesOrigin { Legendre, MackeyGlass, CsvFile };

std::string to_string(SeriesOrigin origin);

struct TimeSeries {
    std::vector<double> values;
    SeriesOrigin origin = SeriesOrigin::CsvFile;
    std::string source; ///< file path for CsvFile
    std::map<std::string, double> meta;
    /// Optional per-row labels (dates for CSV input); empty or values.size().
    std::vector<std::string> labels;
};

struct LegendreParams {
    int n_points = 1000;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;
};

/// 0.5 (3x^2 - 1) + N(0, sigma) at n equispaced x in [-1, 1].
TimeSeries gen_legendre(const LegendreParams &params);

struct MackeyGlassParams {
    int n_points = 1000;
    double tau = 17.0;
    double a = 0.2;        ///< delayed-feedback gain
    double b = 0.1;        ///< decay rate
    double exponent = 10.0;
    double x0 = 1.2;
    double dt = 0.1;
};

/// dx/dt = a x(t-tau) / (1 + x(t-tau)^exponent) - b x(t), integrated by
/// classical RK4 with x(t) = x0 for t <= 0. Delayed values at the RK stages
/// are linearly interpolated from the stored trajectory. Returns x at
/// t = 1, ..., n_points.
TimeSeries gen_mackey_glass(const MackeyGlassParams &params);

/// Two-column "date,value" file with optional header. Throws ParseError
/// carrying the line number for malformed rows.
TimeSeries load_csv(const std::filesystem::path &path);

/// Writes "date,value" rows; generated series use the row index as label.
void write_csv(const TimeSeries &series, const std::filesystem::path &path,
               const std::string &comment = {});

struct WindowedDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    std::vector<int> lag_offsets;
    int horizon = 1;
    std::size_t split_index = 0; ///< rows [0, split) train, rest test
    std::vector<std::size_t> anchors; ///< series index of t for each row

    [[nodiscard]] std::size_t size() const noexcept { return targets.size(); }
    [[nodiscard]] std::size_t n_train() const noexcept { return split_index; }
    [[nodiscard]] std::size_t n_test() const noexcept {
        return size() - split_index;
    }
};

struct WindowSpec {
    std::vector<int> lag_offsets;
    int horizon = 1;
    std::size_t split_index = 0;
};

/// [x(t-18), x(t-12), x(t-6), x(t); x(t+6)], first 500 rows train.
WindowSpec mackey_glass_windows();
/// [x(t-4), ..., x(t); x(t+1)], first 300 rows train.
WindowSpec exchange_rate_windows();
/// Five contiguous lags, horizon 1, first 750 rows train.
WindowSpec legendre_windows();

/// One row per t with every lag and t + horizon inside the series.
WindowedDataset make_windows(std::span<const double> series,
                             const WindowSpec &spec);

/// Affine map [data_min, data_max] -> [lo, hi].
class Scaler {
  public:
    Scaler() = default;
    Scaler(double data_min, double data_max, double lo = 0.0,
           double hi = std::numbers::pi);

    /// Min-max over the given values; throws ScalerError if degenerate.
    static Scaler fit(std::span<const double> values, double lo = 0.0,
                      double hi = std::numbers::pi);

    [[nodiscard]] double apply(double v) const noexcept;
    [[nodiscard]] double invert(double v) const noexcept;
    /// d invert / d v.
    [[nodiscard]] double inverse_slope() const noexcept;

    [[nodiscard]] double data_min() const noexcept { return data_min_; }
    [[nodiscard]] double data_max() const noexcept { return data_max_; }
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

    bool operator==(const Scaler &) const = default;

  private:
    double data_min_ = 0.0;
    double data_max_ = 1.0;
    double lo_ = 0.0;
    double hi_ = std::numbers::pi;
};

/// Scaler fitted on the train rows only (inputs and targets).
Scaler fit_scaler(const WindowedDataset &dataset);

} // namespace qfs
