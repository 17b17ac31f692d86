#include "plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qfs::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '-':
            // "--" is not allowed inside XML comments
            out += (!out.empty() && out.back() == '-') ? " -" : "-";
            break;
        default:
            out += c;
        }
    }
    return out;
}

void open_svg(std::ostringstream &os, double w, double h,
              const std::string &comment) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w)
       << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << ' '
       << num(h) << "\" font-family=\"sans-serif\">\n";
    os << "<!-- " << escape(comment) << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string polyline(std::span<const double> ys, double x0, double y0,
                     double w, double h, double lo, double hi,
                     const std::string &color) {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.2\" points=\"";
    const double n = std::max<double>(1.0, static_cast<double>(ys.size()) - 1.0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double x = x0 + w * static_cast<double>(i) / n;
        const double y = y0 + h * (1.0 - (ys[i] - lo) / (hi - lo));
        os << num(x) << ',' << num(y) << ' ';
    }
    os << "\"/>\n";
    return os.str();
}

} // namespace

std::string svg_prediction_chart(std::span<const double> truth,
                                 std::span<const double> predicted,
                                 std::size_t split_index,
                                 const std::string &title,
                                 const std::string &header_comment) {
    const double W = 900, H = 360, L = 60, T = 40, PW = 810, PH = 270;
    double lo = 0.0, hi = 1.0;
    if (!truth.empty()) {
        const auto [a, b] = std::minmax_element(truth.begin(), truth.end());
        lo = *a;
        hi = *b;
        for (double p : predicted) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        const double pad = 0.05 * std::max(hi - lo, 1e-12);
        lo -= pad;
        hi += pad;
    }
    std::ostringstream os;
    open_svg(os, W, H, header_comment);
    os << "<text x=\"" << num(L) << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
    os << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(PW)
       << "\" height=\"" << num(PH) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = T + PH * (1.0 - k / 4.0);
        os << "<text x=\"" << num(L - 6) << "\" y=\"" << num(y + 4)
           << "\" font-size=\"10\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    if (truth.size() > 1 && split_index > 0 && split_index < truth.size()) {
        const double x = L + PW * static_cast<double>(split_index) /
                                 static_cast<double>(truth.size() - 1);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(T) << "\" x2=\"" << num(x)
           << "\" y2=\"" << num(T + PH) << "\" stroke=\"#444\" stroke-dasharray=\"4 3\"/>\n";
    }
    os << polyline(truth, L, T, PW, PH, lo, hi, "#1f77b4");
    os << polyline(predicted, L, T, PW, PH, lo, hi, "#d62728");
    os << "<text x=\"" << num(L) << "\" y=\"" << num(T + PH + 30)
       << "\" font-size=\"11\" fill=\"#1f77b4\">truth</text>\n";
    os << "<text x=\"" << num(L + 60) << "\" y=\"" << num(T + PH + 30)
       << "\" font-size=\"11\" fill=\"#d62728\">prediction</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string svg_spectrum_panels(const SpectrumReport &report,
                                const std::string &title,
                                const std::string &header_comment,
                                std::size_t max_panels) {
    const std::size_t n_panels = std::min(report.accessible.size(), max_panels);
    const auto cols = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::sqrt(static_cast<double>(n_panels)))));
    const std::size_t rows = n_panels == 0 ? 1 : (n_panels + cols - 1) / cols;
    const double cell = 110, pad = 10, top = 40;
    const double W = pad + static_cast<double>(cols) * cell;
    const double H = top + static_cast<double>(rows) * cell + pad;

    std::ostringstream os;
    open_svg(os, W, H, header_comment);
    os << "<text x=\"" << num(pad) << "\" y=\"24\" font-size=\"14\">" << escape(title) << "</text>\n";
    for (std::size_t p = 0; p < n_panels; ++p) {
        const auto &omega = report.accessible[p];
        double radius = 0.0;
        std::vector<Complex> pts;
        pts.reserve(report.samples.size());
        for (const auto &grid : report.samples) {
            const Complex c = grid.at(omega);
            pts.push_back(c);
            radius = std::max({radius, std::abs(c.real()), std::abs(c.imag())});
        }
        radius = std::max(radius, 1e-12);
        const double x0 = pad + static_cast<double>(p % cols) * cell;
        const double y0 = top + static_cast<double>(p / cols) * cell;
        const double side = cell - pad;
        const double cx = x0 + side / 2, cy = y0 + side / 2;
        os << "<g>\n<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\""
           << num(side) << "\" height=\"" << num(side)
           << "\" fill=\"#fafafa\" stroke=\"#bbb\"/>\n";
        os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(x0 + side)
           << "\" y2=\"" << num(cy) << "\" stroke=\"#ddd\"/>\n";
        os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(cx)
           << "\" y2=\"" << num(y0 + side) << "\" stroke=\"#ddd\"/>\n";
        const double scale = 0.45 * side / radius;
        for (const Complex &c : pts) {
            os << "<circle cx=\"" << num(cx + scale * c.real()) << "\" cy=\""
               << num(cy - scale * c.imag()) << "\" r=\"1.3\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
        }
        std::string label = "(";
        for (std::size_t m = 0; m < omega.size(); ++m) {
            label += (m ? "," : "") + std::to_string(omega[m]);
        }
        label += ")";
        os << "<text x=\"" << num(x0 + 3) << "\" y=\"" << num(y0 + 11)
           << "\" font-size=\"9\">" << label << "</text>\n</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace qfs::cli
