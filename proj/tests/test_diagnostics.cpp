#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "qfs/diagnostics.hpp"
#include "qfs/error.hpp"
#include "qfs/simulate.hpp"

namespace qfs {
namespace {

ModelDescriptor Desc(AnsatzFamily family, int m, int l) {
    ModelDescriptor d;
    d.ansatz.family = family;
    d.architecture = Architecture::SuperParallel;
    d.kernel = m;
    d.layers = l;
    return d;
}

TEST(HaarPdf, Examples) {
    EXPECT_DOUBLE_EQ(haar_pdf(0.0, 2), 1.0);
    EXPECT_DOUBLE_EQ(haar_pdf(1.0, 4), 0.0);
    EXPECT_THROW(haar_pdf(1.5, 4), DomainError);
    EXPECT_THROW(haar_pdf(-0.1, 4), DomainError);
}

TEST(HaarPdf, IntegratesToOne) {
    using boost::math::quadrature::gauss_kronrod;
    for (std::int64_t n : {2, 4, 16, 64, 256}) {
        // Split near 0 where the density of large N is concentrated.
        auto f = [n](double x) { return haar_pdf(x, n); };
        const double total = gauss_kronrod<double, 61>::integrate(f, 0.0, 0.05, 15, 1e-14) +
                             gauss_kronrod<double, 61>::integrate(f, 0.05, 1.0, 15, 1e-14);
        EXPECT_NEAR(total, 1.0, 1e-8) << "N=" << n;
    }
}

TEST(HaarBins, SumsAndUniformCase) {
    EXPECT_NEAR(haar_bin_probability(0, 1, 16), 1.0, 1e-15);
    double sum = 0;
    for (int b = 0; b < 75; ++b) {
        sum += haar_bin_probability(b, 75, 16);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int b = 0; b < 75; ++b) {
        EXPECT_NEAR(haar_bin_probability(b, 75, 2), 1.0 / 75, 1e-15);
    }
    EXPECT_THROW(haar_bin_probability(75, 75, 16), IndexError);
}

TEST(Histogram, BinsAndEdges) {
    const std::vector<double> f = {0.0, 0.1, 0.5, 0.999, 1.0};
    const auto h = make_histogram(f, 10);
    EXPECT_EQ(h.n_samples, 5);
    EXPECT_EQ(h.counts[0], 1);
    EXPECT_EQ(h.counts[1], 1);
    EXPECT_EQ(h.counts[5], 1);
    EXPECT_EQ(h.counts[9], 2);
    std::int64_t total = 0;
    for (auto c : h.counts) {
        total += c;
    }
    EXPECT_EQ(total, h.n_samples);
    EXPECT_THROW(make_histogram(std::vector<double>{1.2}, 10), DomainError);
}

TEST(Kl, ZeroBinsIgnoredAndNonNegative) {
    FidelityHistogram h;
    h.n_bins = 4;
    h.counts = {10, 0, 0, 0};
    h.n_samples = 10;
    // all mass in bin 0 against a uniform reference: ln 4
    EXPECT_NEAR(kl_to_haar(h, 2), std::log(4.0), 1e-14);
    h.counts = {5, 5, 5, 5};
    h.n_samples = 20;
    EXPECT_NEAR(kl_to_haar(h, 2), 0.0, 1e-15);
}

TEST(Fidelities, ZeroTrainableGatesGiveOne) {
    const CircuitProgram c(2, {GateOp::h(0), GateOp::cnot(0, 1)}, 0, 0);
    DiagnosticsOptions o;
    o.n_pairs = 50;
    for (double f : sample_fidelities(c, o)) {
        EXPECT_NEAR(f, 1.0, 1e-14);
    }
}

TEST(Fidelities, SingleQubitMatchesClosedForm) {
    // theta - phi is uniform mod 2pi, so F = cos^2(u/2) has
    // CDF 1 - (2/pi) acos(sqrt F).
    const CircuitProgram c(1, {GateOp::ry(0, AngleBinding::weight(0))}, 0, 1);
    DiagnosticsOptions o;
    o.n_pairs = 5000;
    o.seed = 17;
    auto f = sample_fidelities(c, o);
    std::sort(f.begin(), f.end());
    double ks = 0;
    const double n = static_cast<double>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double cdf = 1.0 - 2.0 / std::numbers::pi * std::acos(std::sqrt(f[i]));
        ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.05);
}

TEST(Fidelities, BoundedAndThreadIndependent) {
    const auto d = Desc(AnsatzFamily::StronglyEntangling, 2, 2);
    DiagnosticsOptions o;
    o.n_pairs = 300;
    o.seed = 4;
    const auto a = sample_fidelities(d, o, Exec::Serial);
    const auto b = sample_fidelities(d, o, Exec::Parallel);
    EXPECT_EQ(a, b);
    for (double f : a) {
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0 + 1e-12);
    }
}

TEST(Expressibility, HaarOracle) {
    // Fidelity of independent Haar states in dimension 16.
    const int n_pairs = 5000;
    std::vector<double> f(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const auto a = haar_random_state(4, 123, 2 * static_cast<std::uint64_t>(i));
        const auto b = haar_random_state(4, 123, 2 * static_cast<std::uint64_t>(i) + 1);
        EXPECT_NEAR(a.norm_squared(), 1.0, 1e-12);
        f[i] = fidelity(a, b);
    }
    const auto h = make_histogram(f, 75);
    EXPECT_LT(kl_to_haar(h, 16), 0.01);
}

TEST(Expressibility, ResultFieldsAndBound) {
    const auto d = Desc(AnsatzFamily::BasicEntangler, 2, 2);
    DiagnosticsOptions o;
    o.n_pairs = 500;
    o.n_bins = 20;
    const auto r = expressibility(d, o);
    EXPECT_GE(r.kl, 0.0);
    EXPECT_TRUE(std::isfinite(r.kl));
    EXPECT_EQ(r.histogram.n_samples, 500);
    EXPECT_EQ(r.n_bins, 20);
    EXPECT_NEAR(r.upper_bound, 15 * std::log(20.0), 1e-12);
    const auto again = expressibility(d, o, Exec::Serial);
    EXPECT_EQ(r.histogram.counts, again.histogram.counts);
    EXPECT_EQ(r.kl, again.kl);
}

TEST(Variance, FlatSlotGivesZero) {
    // Slot 0 is an RZ on |0>: a global phase with zero derivative.
    const auto d = Desc(AnsatzFamily::StronglyEntangling, 2, 2);
    DiagnosticsOptions o;
    o.parameter_index = 0;
    o.n_samples = 50;
    const auto r = gradient_variance(d, o);
    EXPECT_LT(r.variance, 1e-25);
}

TEST(Variance, DeterministicAndValidated) {
    const auto d = Desc(AnsatzFamily::BasicEntangler, 2, 2);
    DiagnosticsOptions o;
    o.n_samples = 40;
    o.seed = 8;
    const auto a = gradient_variance(d, o, Exec::Serial);
    const auto b = gradient_variance(d, o, Exec::Parallel);
    EXPECT_EQ(a.variance, b.variance);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_GT(a.variance, 0.0);
    EXPECT_EQ(a.parameter_index, 1);
    o.parameter_index = 99;
    EXPECT_THROW(gradient_variance(d, o), IndexError);
    o.parameter_index = 1;
    o.n_samples = 1;
    EXPECT_THROW(gradient_variance(d, o), SizeError);
}

} // namespace
} // namespace qfs
