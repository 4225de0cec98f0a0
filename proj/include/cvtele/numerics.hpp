#pragma once

#include "cvtele/common.hpp"

#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

namespace cvtele {

template <typename T>
struct Extrapolated {
    T value;
    double error_estimate;
    std::size_t levels;
};

struct RichardsonOptions {
    double initial_step = 0.1;
    std::size_t max_levels = 8;
    double target = 1e-10;       // stop refining once successive estimates agree this well
    double accept = 1e-8;        // fail if the best estimate is worse than this
};

/// Derivative at zero of an analytic `f` by central differences
/// (f(d) - f(-d)) / 2d with step halving and Richardson elimination of the
/// even error terms. `norm` maps a T to a non-negative double.
template <typename T, typename F, typename Norm>
Extrapolated<T> richardson_derivative(F&& f, Norm&& norm, const RichardsonOptions& opts = {}) {
    std::vector<std::vector<T>> table;
    double step = opts.initial_step;
    T best{};
    double best_error = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < opts.max_levels; ++i, step *= 0.5) {
        std::vector<T> row;
        row.reserve(i + 1);
        row.push_back((f(step) - f(-step)) / (2.0 * step));
        double factor = 1.0;
        for (std::size_t j = 1; j <= i; ++j) {
            factor *= 4.0;
            row.push_back(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (factor - 1.0));
        }
        if (i > 0) {
            const double change = norm(T(row[i] - table[i - 1][i - 1]));
            if (change < best_error) {
                best_error = change;
                best = row[i];
            }
            if (change <= opts.target) return {row[i], change, i + 1};
        }
        table.push_back(std::move(row));
    }
    if (best_error > opts.accept) {
        std::ostringstream msg;
        msg << "Richardson extrapolation did not converge: best change " << best_error
            << " after " << opts.max_levels << " levels";
        fail(ErrorKind::numeric, msg.str());
    }
    return {best, best_error, opts.max_levels};
}

}  // namespace cvtele
