#pragma once

#include <algorithm>
#include <array>
#include <vector>

namespace rejopt {

// Composite Gauss-Legendre quadrature. The default grid matches the
// theoretical-integral contract used throughout: [-12, 14], 4096 panels,
// 8 nodes per panel. Integrands with known kinks or jumps are handled by
// inserting their locations as extra panel edges, keeping each panel smooth.
namespace quad {

inline constexpr double kLo = -12.0;
inline constexpr double kHi = 14.0;
inline constexpr int kPanels = 4096;

inline constexpr std::array<double, 4> kNodes = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kWeights = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i)
        acc += kWeights[i] * (f(c - h * kNodes[i]) + f(c + h * kNodes[i]));
    return acc * h;
}

/// Uniform panel edges over [lo, hi] with `extra` breakpoints merged in.
inline std::vector<double> edges(double lo = kLo, double hi = kHi, int panels = kPanels,
                                 const std::vector<double>& extra = {}) {
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(panels) + extra.size() + 1);
    for (int i = 0; i <= panels; ++i)
        e.push_back(lo + (hi - lo) * static_cast<double>(i) / panels);
    for (double x : extra)
        if (x > lo && x < hi) e.push_back(x);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

template <class F>
double integrate(F&& f, const std::vector<double>& panel_edges) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < panel_edges.size(); ++i)
        acc += panel(f, panel_edges[i], panel_edges[i + 1]);
    return acc;
}

template <class F>
double integrate(F&& f, double lo = kLo, double hi = kHi, int panels = kPanels) {
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / panels;
        const double b = lo + (hi - lo) * static_cast<double>(i + 1) / panels;
        acc += panel(f, a, b);
    }
    return acc;
}

}  // namespace quad
}  // namespace rejopt
