#pragma once

#include <span>
#include <string>

#include "qfs/spectra.hpp"

namespace qfs::cli {

/// Truth vs prediction over the row index; a dashed rule marks the first
/// test row.
std::string svg_prediction_chart(std::span<const double> truth,
                                 std::span<const double> predicted,
                                 std::size_t split_index,
                                 const std::string &title,
                                 const std::string &header_comment);

/// One complex-plane scatter panel per accessible frequency (capped at
/// `max_panels`), showing c_omega across weight draws.
std::string svg_spectrum_panels(const SpectrumReport &report,
                                const std::string &title,
                                const std::string &header_comment,
                                std::size_t max_panels = 81);

} // namespace qfs::cli
