#include "invgen/linprog.hpp"

#include <cmath>
#include <cstddef>

#include "invgen/errors.hpp"

namespace invgen {

namespace {
constexpr double kEps = 1e-11;
}

SimplexResult simplex_max(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) throw invalid_input_error("simplex: ragged constraint matrix");
        if (b[i] < 0.0) throw invalid_input_error("simplex: rhs must be nonnegative");
    }

    // Tableau: m rows of [A | I | b], objective row below. Basis starts as
    // the slack columns.
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (;;) {
        // Bland: entering = lowest-index column with negative reduced cost.
        std::size_t pivot_col = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j] < -kEps) {
                pivot_col = j;
                break;
            }
        }
        if (pivot_col == cols) break;  // optimal

        // Ratio test, ties broken by lowest basis index (Bland).
        std::size_t pivot_row = m;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][pivot_col] > kEps) {
                const double ratio = t[i][cols - 1] / t[i][pivot_col];
                if (pivot_row == m || ratio < best_ratio - kEps ||
                    (std::fabs(ratio - best_ratio) <= kEps && basis[i] < basis[pivot_row])) {
                    pivot_row = i;
                    best_ratio = ratio;
                }
            }
        }
        if (pivot_row == m) return SimplexResult{false, 0.0, {}};  // unbounded

        // Pivot.
        const double piv = t[pivot_row][pivot_col];
        for (std::size_t j = 0; j < cols; ++j) t[pivot_row][j] /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == pivot_row) continue;
            const double factor = t[i][pivot_col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[pivot_row][j];
        }
        basis[pivot_row] = pivot_col;
    }

    SimplexResult res;
    res.optimal = true;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = t[i][cols - 1];
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    return res;
}

} // namespace invgen
