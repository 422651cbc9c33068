#pragma once

#include <limits>
#include <vector>

#include "topgn/grid.hpp"

namespace topgn {

namespace detail {

constexpr double kDistInf = std::numeric_limits<double>::infinity();

/// 1D squared-distance transform out[q] = min_p (q - p)^2 + f[p]
/// (lower envelope of parabolas; infinite f values carry no parabola).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& out, int n)
{
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.clear();
    z.clear();

    for (int q = 0; q < n; ++q) {
        if (f[q] == kDistInf) continue;
        double s = -kDistInf;
        while (!v.empty()) {
            const int p = v.back();
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p);
            if (s > z.back()) break;
            v.pop_back();
            z.pop_back();
            s = -kDistInf;
        }
        v.push_back(q);
        z.push_back(v.size() == 1 ? -kDistInf : s);
    }

    if (v.empty()) {
        std::fill(out.begin(), out.begin() + n, kDistInf);
        return;
    }
    std::size_t k = 0;
    for (int q = 0; q < n; ++q) {
        while (k + 1 < z.size() && z[k + 1] < q) ++k;
        const int p = v[k];
        out[q] = (q - p) * static_cast<double>(q - p) + f[p];
    }
}

} // namespace detail

/// Exact squared Euclidean distance (cells^2) from every cell to the nearest
/// nonzero cell of `occupied`; +inf everywhere when the grid is empty.
inline Grid2D<double> squared_distance_transform(const BinaryGrid& occupied)
{
    const int n = occupied.side();
    Grid2D<double> dist(occupied.spec());

    std::vector<double> line(n), out(n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) line[r] = occupied.at(r, c) ? 0.0 : detail::kDistInf;
        detail::edt_1d(line, out, n);
        for (int r = 0; r < n; ++r) dist.at(r, c) = out[r];
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) line[c] = dist.at(r, c);
        detail::edt_1d(line, out, n);
        for (int c = 0; c < n; ++c) dist.at(r, c) = out[c];
    }
    return dist;
}

} // namespace topgn
