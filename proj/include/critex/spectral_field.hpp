#pragma once

// Real fields on a periodic grid and their Fourier coefficients.
//
// Coefficient convention: f̂_m = L^{dim/2} N^{-dim} Σ_x f(x) e^{-i k_m·x}, so
//   Σ_m |f̂_m|² = Σ_x |f(x)|² (L/N)^dim        (Parseval, unit constant)
// and every Sobolev norm is a plain weighted sum over modes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "critex/error.hpp"
#include "critex/fft.hpp"
#include "critex/grid.hpp"

namespace critex {

using Complex = std::complex<double>;

struct PhysicalField {
    GridSpec grid;
    std::vector<double> values;
};

struct SpectrumField {
    GridSpec grid;
    std::vector<Complex> coeffs;

    static SpectrumField zeros(const GridSpec& g) { return {g, std::vector<Complex>(g.size())}; }

    Complex& operator[](std::size_t i) { return coeffs[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs[i]; }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw ContractViolation("fields live on different grids");
}

inline SpectrumField transform_forward(std::span<const double> samples, const GridSpec& grid) {
    if (samples.size() != grid.size())
        throw ContractViolation("sample count " + std::to_string(samples.size()) +
                                " does not match grid size " + std::to_string(grid.size()));
    std::vector<Complex> in(samples.begin(), samples.end());
    SpectrumField out = SpectrumField::zeros(grid);
    fft::execute(grid.dim, grid.points, fft::Direction::Forward, in.data(), out.coeffs.data());
    const double scale = std::pow(grid.length, 0.5 * grid.dim) / static_cast<double>(grid.size());
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

inline SpectrumField transform_forward(const PhysicalField& field) {
    return transform_forward(field.values, field.grid);
}

namespace detail {
inline std::vector<Complex> inverse_complex(const SpectrumField& field) {
    if (field.coeffs.size() != field.grid.size())
        throw ContractViolation("coefficient count does not match grid size");
    std::vector<Complex> out(field.grid.size());
    fft::execute(field.grid.dim, field.grid.points, fft::Direction::Backward, field.coeffs.data(),
                 out.data());
    const double scale = std::pow(field.grid.length, -0.5 * field.grid.dim);
    for (auto& c : out) c *= scale;
    return out;
}
}  // namespace detail

inline PhysicalField transform_inverse(const SpectrumField& field) {
    const auto z = detail::inverse_complex(field);
    PhysicalField out{field.grid, std::vector<double>(z.size())};
    std::transform(z.begin(), z.end(), out.values.begin(), [](Complex c) { return c.real(); });
    return out;
}

/// Largest imaginary part produced by the inverse transform (zero for real fields).
inline double inverse_imaginary_residual(const SpectrumField& field) {
    double worst = 0.0;
    for (const auto& c : detail::inverse_complex(field)) worst = std::max(worst, std::abs(c.imag()));
    return worst;
}

/// max_k |f̂(-k) - conj f̂(k)|.
inline double hermitian_defect(const SpectrumField& field) {
    double worst = 0.0;
    for (std::size_t i = 0; i < field.coeffs.size(); ++i)
        worst = std::max(worst, std::abs(field.coeffs[field.grid.partner(i)] - std::conj(field.coeffs[i])));
    return worst;
}

inline bool all_finite(const SpectrumField& field) {
    return std::all_of(field.coeffs.begin(), field.coeffs.end(),
                       [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

inline double l2_norm(const PhysicalField& field) {
    double sum = 0.0;
    for (double v : field.values) sum += v * v;
    return std::sqrt(sum * field.grid.cell_volume());
}

inline double l2_norm(const SpectrumField& field) {
    double sum = 0.0;
    for (const auto& c : field.coeffs) sum += std::norm(c);
    return std::sqrt(sum);
}

struct NormOrder {
    double s = 0.0;
    bool homogeneous = true;
};

/// Relative zero-mode tolerance for homogeneous norms of negative order.
inline constexpr double kZeroModeTolerance = 1e-10;

/// Σ_{k≠0} |k|^{2s} |f̂_k|², without any zero-mode check.
inline double homogeneous_sum_nonzero(const SpectrumField& field, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        const double k2 = field.grid.wavenumber_squared(i);
        if (k2 == 0.0) continue;
        sum += std::pow(k2, s) * std::norm(field.coeffs[i]);
    }
    return sum;
}

/// ‖f‖ in Ḣ^s (homogeneous) or H^s. Ḣ^0 includes the zero mode so that it equals L².
inline double sobolev_norm(const SpectrumField& field, NormOrder order) {
    if (!order.homogeneous) {
        double sum = 0.0;
        for (std::size_t i = 0; i < field.coeffs.size(); ++i)
            sum += std::pow(1.0 + field.grid.wavenumber_squared(i), order.s) * std::norm(field.coeffs[i]);
        return std::sqrt(sum);
    }
    if (order.s == 0.0) return l2_norm(field);
    if (order.s < 0.0) {
        const double mean = std::abs(field.coeffs.at(0));
        if (mean > kZeroModeTolerance * l2_norm(field))
            throw DomainError("negative-order homogeneous norm of a field with nonzero mean; "
                              "remove the mean first");
    }
    return std::sqrt(homogeneous_sum_nonzero(field, order.s));
}

/// Copy with every mode |m| > N/3 on any axis set to zero (2/3 rule).
inline SpectrumField dealiased(const SpectrumField& field) {
    SpectrumField out = field;
    const int cutoff = field.grid.points / 3;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
        const auto idx = field.grid.unflatten(i);
        for (int a = 0; a < field.grid.dim; ++a) {
            if (std::abs(field.grid.mode(idx[a])) > cutoff) {
                out.coeffs[i] = 0.0;
                break;
            }
        }
    }
    return out;
}

/// A·exp(-|x|²/(2w²)) centred in the box.
struct GaussianData {
    double amplitude = 1.0;
    double width = 1.0;
};

/// ε1 ⟨x⟩^{-(n/2+γ)} (log(e+|x|))^{-1}, n the grid dimension.
struct PaperProfileData {
    double eps1 = 1.0;
    double gamma = 0.5;
};

/// A·cos(k·x) with k = 2π m / L per axis.
struct SingleModeData {
    std::array<int, 3> mode{1, 0, 0};
    double amplitude = 1.0;
};

using InitialDataKind = std::variant<GaussianData, PaperProfileData, SingleModeData>;

inline PhysicalField make_initial_data(const InitialDataKind& kind, const GridSpec& grid) {
    grid.validate();
    PhysicalField out{grid, std::vector<double>(grid.size())};
    auto position = [&](std::size_t flat, double& r2, std::array<double, 3>& x) {
        const auto idx = grid.unflatten(flat);
        r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            x[a] = grid.coordinate(idx[a]);
            r2 += x[a] * x[a];
        }
    };

    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, GaussianData>) {
                if (!(k.amplitude > 0.0) || !(k.width > 0.0))
                    throw DomainError("gaussian data needs positive amplitude and width");
            } else if constexpr (std::is_same_v<K, PaperProfileData>) {
                if (!(k.eps1 > 0.0)) throw DomainError("paper profile needs eps1 > 0");
                if (!(k.gamma > 0.0)) throw DomainError("paper profile needs gamma > 0");
            } else {
                if (!(k.amplitude > 0.0)) throw DomainError("single mode needs positive amplitude");
            }
            std::array<double, 3> x{};
            double r2 = 0.0;
            for (std::size_t i = 0; i < out.values.size(); ++i) {
                position(i, r2, x);
                if constexpr (std::is_same_v<K, GaussianData>) {
                    out.values[i] = k.amplitude * std::exp(-r2 / (2.0 * k.width * k.width));
                } else if constexpr (std::is_same_v<K, PaperProfileData>) {
                    const double decay = 0.5 * grid.dim + k.gamma;
                    out.values[i] = k.eps1 * std::pow(1.0 + r2, -0.5 * decay) /
                                    std::log(std::numbers::e + std::sqrt(r2));
                } else {
                    double phase = 0.0;
                    for (int a = 0; a < grid.dim; ++a)
                        phase += 2.0 * std::numbers::pi * k.mode[a] / grid.length * x[a];
                    out.values[i] = k.amplitude * std::cos(phase);
                }
            }
        },
        kind);
    return out;
}

// Binary record: int64 dim, int64 N, float64 L, then (re, im) float64 pairs for
// every mode in row-major ascending-frequency order (m = -N/2 ... N/2-1 per
// axis). All values little-endian.

namespace detail {
inline void put_u64(std::ostream& os, std::uint64_t v) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
    os.write(bytes, 8);
}
inline std::uint64_t get_u64(std::istream& is) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw ContractViolation("truncated field record");
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[b];
    return v;
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

template <class F>
void for_each_frequency_ordered(const GridSpec& g, F&& f) {
    const int n = g.points;
    std::array<int, 3> idx{0, 0, 0};
    const std::size_t total = g.size();
    for (std::size_t ordinal = 0; ordinal < total; ++ordinal) {
        std::size_t rest = ordinal;
        for (int a = g.dim - 1; a >= 0; --a) {
            const int j = static_cast<int>(rest % n);
            rest /= n;
            idx[a] = g.storage(j - n / 2);
        }
        f(g.flatten(idx));
    }
}
}  // namespace detail

inline void write_record(std::ostream& os, const SpectrumField& field) {
    detail::put_u64(os, static_cast<std::uint64_t>(field.grid.dim));
    detail::put_u64(os, static_cast<std::uint64_t>(field.grid.points));
    detail::put_f64(os, field.grid.length);
    detail::for_each_frequency_ordered(field.grid, [&](std::size_t flat) {
        detail::put_f64(os, field.coeffs[flat].real());
        detail::put_f64(os, field.coeffs[flat].imag());
    });
}

inline SpectrumField read_record(std::istream& is) {
    const auto dim = static_cast<int>(detail::get_u64(is));
    const auto points = static_cast<int>(detail::get_u64(is));
    const double length = detail::get_f64(is);
    SpectrumField field = SpectrumField::zeros(GridSpec(dim, points, length));
    detail::for_each_frequency_ordered(field.grid, [&](std::size_t flat) {
        const double re = detail::get_f64(is);
        const double im = detail::get_f64(is);
        field.coeffs[flat] = {re, im};
    });
    return field;
}

}  // namespace critex
