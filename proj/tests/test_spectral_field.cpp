#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "critex/spectral_field.hpp"

using namespace critex;
using std::numbers::pi;

namespace {

PhysicalField random_field(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    PhysicalField f{g, std::vector<double>(g.size())};
    for (auto& v : f.values) v = N01(rng);
    return f;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Grid, Validation) {
    EXPECT_THROW(GridSpec(0, 16, 1.0), DomainError);
    EXPECT_THROW(GridSpec(4, 16, 1.0), DomainError);
    EXPECT_THROW(GridSpec(1, 12, 1.0), DomainError);
    EXPECT_THROW(GridSpec(1, 4, 1.0), DomainError);
    EXPECT_THROW(GridSpec(1, 16, 0.0), DomainError);
    GridSpec g(2, 8, 2 * pi);
    EXPECT_EQ(g.size(), 64u);
    EXPECT_EQ(g.mode(7), -1);
    EXPECT_EQ(g.mode(4), -4);
    EXPECT_DOUBLE_EQ(g.wavenumber(1), 1.0);
}

TEST(Transform, ConstantIsDcOnly) {
    GridSpec g(2, 16, 3.0);
    PhysicalField f{g, std::vector<double>(g.size(), 1.0)};
    const auto s = transform_forward(f);
    EXPECT_NEAR(std::abs(s.coeffs[0]), std::sqrt(g.size() * g.cell_volume()), 1e-12);
    for (std::size_t i = 1; i < s.coeffs.size(); ++i) EXPECT_LT(std::abs(s.coeffs[i]), 1e-13);
}

TEST(Transform, CosineHasConjugatePair) {
    GridSpec g(1, 64, 2 * pi);
    const auto f = make_initial_data(SingleModeData{{3, 0, 0}, 1.0}, g);
    const auto s = transform_forward(f);
    const auto a = s.coeffs[3], b = s.coeffs[64 - 3];
    EXPECT_NEAR(std::abs(a), std::abs(b), 1e-13);
    EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-13);
    for (std::size_t i = 0; i < 64; ++i)
        if (i != 3 && i != 61) EXPECT_LT(std::abs(s.coeffs[i]), 1e-13);
}

class RoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(RoundTrip, RandomFieldsAndParseval) {
    const int dim = GetParam();
    const int N = dim == 1 ? 256 : dim == 2 ? 32 : 16;
    GridSpec g(dim, N, 7.5);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto f = random_field(g, seed);
        const auto s = transform_forward(f);
        const auto back = transform_inverse(s);
        double scale = 0;
        for (double v : f.values) scale = std::max(scale, std::abs(v));
        EXPECT_LT(max_abs_diff(back.values, f.values), 1e-12 * scale);
        EXPECT_NEAR(l2_norm(s), l2_norm(f), 1e-12 * l2_norm(f));
        EXPECT_LT(hermitian_defect(s), 1e-12 * l2_norm(s));
        EXPECT_LT(inverse_imaginary_residual(s), 1e-12 * scale);
    }
}

INSTANTIATE_TEST_SUITE_P(Dims, RoundTrip, ::testing::Values(1, 2, 3));

TEST(Transform, SizeMismatch) {
    GridSpec g(1, 16, 1.0);
    std::vector<double> v(15);
    EXPECT_THROW(transform_forward(v, g), ContractViolation);
}

TEST(Sobolev, ZeroOrderIsL2OnMeanFreeFields) {
    GridSpec g(2, 32, 5.0);
    auto f = random_field(g, 9);
    double mean = 0;
    for (double v : f.values) mean += v;
    mean /= f.values.size();
    for (auto& v : f.values) v -= mean;
    const auto s = transform_forward(f);
    EXPECT_NEAR(sobolev_norm(s, {0.0, true}), l2_norm(f), 1e-12 * l2_norm(f));
}

TEST(Sobolev, SingleModeAtWavenumberTwo) {
    // L = π so the first mode has |k| = 2.
    GridSpec g(1, 64, pi);
    auto f = make_initial_data(SingleModeData{{1, 0, 0}, 1.0}, g);
    const double n0 = l2_norm(f);
    for (auto& v : f.values) v /= n0;
    const auto s = transform_forward(f);
    const double gamma = 0.7;
    EXPECT_NEAR(sobolev_norm(s, {-gamma, true}), std::pow(2.0, -gamma), 1e-12);
    EXPECT_NEAR(sobolev_norm(s, {1.0, true}), 2.0, 1e-12);
    EXPECT_NEAR(sobolev_norm(s, {1.0, false}), std::sqrt(5.0), 1e-12);
}

TEST(Sobolev, ZeroModePolicy) {
    GridSpec g(1, 64, 2 * pi);
    PhysicalField f{g, std::vector<double>(64, 1.0)};
    const auto s = transform_forward(f);
    EXPECT_THROW(sobolev_norm(s, {-0.5, true}), DomainError);
    EXPECT_NO_THROW(sobolev_norm(s, {0.5, true}));
    EXPECT_NO_THROW(sobolev_norm(s, {-0.5, false}));
}

TEST(Sobolev, ScalingAndMonotoneEmbedding) {
    GridSpec g(1, 128, 2 * pi);
    auto f = random_field(g, 3);
    auto s = transform_forward(f);
    s.coeffs[0] = 0;
    const double a = sobolev_norm(s, {0.5, true});
    auto s2 = s;
    for (auto& c : s2.coeffs) c *= -3.0;
    EXPECT_NEAR(sobolev_norm(s2, {0.5, true}), 3 * a, 1e-12 * a);
    // On a 2π torus every nonzero |k| >= 1, so Ḣ^s is nondecreasing in s.
    double prev = 0;
    for (double order = -1.0; order <= 1.0; order += 0.25) {
        const double v = sobolev_norm(s, {order, true});
        EXPECT_GE(v, prev * (1 - 1e-14));
        prev = v;
    }
}

TEST(Dealias, RemovesHighModes) {
    GridSpec g(2, 32, 2 * pi);
    auto s = transform_forward(random_field(g, 4));
    const auto d = dealiased(s);
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) {
        const auto idx = g.unflatten(i);
        const bool high = std::abs(g.mode(idx[0])) > 10 || std::abs(g.mode(idx[1])) > 10;
        if (high) EXPECT_EQ(d.coeffs[i], Complex(0.0));
        else EXPECT_EQ(d.coeffs[i], s.coeffs[i]);
    }
}

TEST(InitialData, PaperProfileAtCentre) {
    GridSpec g(1, 64, 20.0);
    const auto f = make_initial_data(PaperProfileData{0.3, 0.5}, g);
    EXPECT_NEAR(f.values[32], 0.3, 1e-15);  // x = 0 at index N/2
    GridSpec g2(2, 32, 20.0);
    const auto f2 = make_initial_data(PaperProfileData{0.7, 0.5}, g2);
    EXPECT_NEAR(f2.values[g2.flatten({16, 16, 0})], 0.7, 1e-15);
}

TEST(InitialData, GaussianMass) {
    for (int dim = 1; dim <= 3; ++dim) {
        GridSpec g(dim, dim == 3 ? 32 : 64, 20.0);
        const auto f = make_initial_data(GaussianData{1.0, 1.0}, g);
        double mass = 0;
        for (double v : f.values) mass += v;
        mass *= g.cell_volume();
        EXPECT_NEAR(mass, std::pow(2 * pi, 0.5 * dim), 1e-8);
    }
}

TEST(InitialData, SingleModeNorm) {
    GridSpec g(1, 128, 10.0);
    const auto f = make_initial_data(SingleModeData{{4, 0, 0}, 2.0}, g);
    const auto s = transform_forward(f);
    const double k = 2 * pi * 4 / 10.0;
    EXPECT_NEAR(sobolev_norm(s, {0.6, true}), std::pow(k, 0.6) * l2_norm(f), 1e-12);
}

TEST(InitialData, Rejects) {
    GridSpec g(1, 16, 1.0);
    EXPECT_THROW(make_initial_data(GaussianData{0.0, 1.0}, g), DomainError);
    EXPECT_THROW(make_initial_data(GaussianData{1.0, -1.0}, g), DomainError);
    EXPECT_THROW(make_initial_data(PaperProfileData{-1.0, 0.5}, g), DomainError);
    EXPECT_THROW(make_initial_data(SingleModeData{{1, 0, 0}, 0.0}, g), DomainError);
}

TEST(Record, RoundTripAndLayout) {
    GridSpec g(2, 8, 3.25);
    const auto s = transform_forward(random_field(g, 5));
    std::stringstream buf;
    write_record(buf, s);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.size(), 24u + 16u * 64u);
    // Header: little-endian int64 dim = 2.
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 2);
    for (int b = 1; b < 8; ++b) EXPECT_EQ(bytes[b], 0);
    // First pair is the mode (-4, -4).
    double re = 0;
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[24 + b]);
    re = std::bit_cast<double>(bits);
    EXPECT_EQ(re, s.coeffs[g.flatten({4, 4, 0})].real());
    const auto back = read_record(buf);
    EXPECT_TRUE(back.grid == g);
    EXPECT_EQ(back.coeffs, s.coeffs);
}

TEST(Record, Truncated) {
    std::stringstream buf("abc");
    EXPECT_THROW(read_record(buf), ContractViolation);
}
