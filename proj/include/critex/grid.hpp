#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "critex/error.hpp"

namespace critex {

/// Periodic box [-L/2, L/2)^dim sampled with N points per axis.
struct GridSpec {
    int dim = 1;
    int points = 64;
    double length = 2.0 * std::numbers::pi;

    GridSpec() = default;
    GridSpec(int d, int n, double l) : dim(d), points(n), length(l) { validate(); }

    void validate() const {
        if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
        if (points < 8 || (points & (points - 1)) != 0)
            throw DomainError("grid points per axis must be a power of two >= 8");
        if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("box length must be positive");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(points);
        return s;
    }

    double spacing() const { return length / points; }
    double cell_volume() const { return std::pow(spacing(), dim); }

    /// Signed frequency index m ∈ {-N/2, ..., N/2-1} of storage index i.
    int mode(int i) const { return i < points / 2 ? i : i - points; }
    int storage(int m) const { return m >= 0 ? m : m + points; }
    double wavenumber(int i) const { return 2.0 * std::numbers::pi * mode(i) / length; }
    double coordinate(int i) const { return -0.5 * length + i * spacing(); }

    /// Per-axis storage indices of a flat row-major index (unused axes are 0).
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % static_cast<std::size_t>(points));
            flat /= static_cast<std::size_t>(points);
        }
        return idx;
    }

    std::size_t flatten(const std::array<int, 3>& idx) const {
        std::size_t flat = 0;
        for (int a = 0; a < dim; ++a) flat = flat * points + static_cast<std::size_t>(idx[a]);
        return flat;
    }

    double wavenumber_squared(std::size_t flat) const {
        const auto idx = unflatten(flat);
        double k2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double k = wavenumber(idx[a]);
            k2 += k * k;
        }
        return k2;
    }

    /// Flat index of the mode -k (Hermitian partner).
    std::size_t partner(std::size_t flat) const {
        auto idx = unflatten(flat);
        for (int a = 0; a < dim; ++a) idx[a] = (points - idx[a]) % points;
        return flatten(idx);
    }

    bool operator==(const GridSpec&) const = default;
};

}  // namespace critex
