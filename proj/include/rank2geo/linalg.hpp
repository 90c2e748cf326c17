#pragma once

#include <type_traits>

#include "rank2geo/jet.hpp"

namespace rank2geo {

template <class S>
using Matrix = std::vector<std::vector<S>>;

template <class S>
Matrix<S> identity_matrix(int n) {
    Matrix<S> m(static_cast<std::size_t>(n),
                std::vector<S>(static_cast<std::size_t>(n), ScalarOps<S>::zero()));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = ScalarOps<S>::one();
    return m;
}

template <class S>
Matrix<S> transpose(const Matrix<S>& a) {
    if (a.empty()) return {};
    Matrix<S> r(a[0].size(), std::vector<S>(a.size(), ScalarOps<S>::zero()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
    return r;
}

template <class S>
std::vector<S> mat_vec(const Matrix<S>& a, const std::vector<S>& x) {
    std::vector<S> r(a.size(), ScalarOps<S>::zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != x.size()) throw DimensionMismatch("matrix-vector size mismatch");
        for (std::size_t j = 0; j < x.size(); ++j) r[i] += a[i][j] * x[j];
    }
    return r;
}

template <class S>
Matrix<S> mat_mul(const Matrix<S>& a, const Matrix<S>& b) {
    if (a.empty() || b.empty()) return {};
    Matrix<S> r(a.size(), std::vector<S>(b[0].size(), ScalarOps<S>::zero()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b.size()) throw DimensionMismatch("matrix product size mismatch");
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[k].size(); ++j) r[i][j] += a[i][k] * b[k][j];
    }
    return r;
}

namespace detail {

// Pivot choice: the float backend takes the entry of largest magnitude
// above the pivot tolerance; exact backends take the first unit entry.
template <class S>
int pick_pivot_row(const Matrix<S>& m, std::size_t col, std::size_t from) {
    if constexpr (std::is_same_v<S, double>) {
        int best = -1;
        double best_abs = ScalarOps<double>::kPivotTol;
        for (std::size_t r = from; r < m.size(); ++r) {
            const double a = std::fabs(m[r][col]);
            if (a > best_abs) {
                best_abs = a;
                best = static_cast<int>(r);
            }
        }
        return best;
    } else {
        for (std::size_t r = from; r < m.size(); ++r)
            if (ScalarOps<S>::is_unit(m[r][col])) return static_cast<int>(r);
        return -1;
    }
}

}  // namespace detail

// In-place reduced row echelon form; returns the pivot columns.
template <class S>
std::vector<int> rref_inplace(Matrix<S>& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        const int p = detail::pick_pivot_row(m, col, row);
        if (p < 0) continue;
        std::swap(m[row], m[static_cast<std::size_t>(p)]);
        const S inv = ScalarOps<S>::inv(m[row][col]);
        for (std::size_t j = 0; j < cols; ++j) m[row][j] = inv * m[row][j];
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || ScalarOps<S>::is_zero(m[r][col])) continue;
            const S f = m[r][col];
            for (std::size_t j = 0; j < cols; ++j) m[r][j] -= f * m[row][j];
        }
        pivots.push_back(static_cast<int>(col));
        ++row;
    }
    return pivots;
}

template <class S>
int rank(Matrix<S> m) {
    return static_cast<int>(rref_inplace(m).size());
}

// Basis of the right kernel, one vector per free column.
template <class S>
std::vector<std::vector<S>> kernel_basis(Matrix<S> m) {
    if (m.empty()) return {};
    const std::size_t cols = m[0].size();
    const std::vector<int> pivots = rref_inplace(m);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    std::vector<std::vector<S>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<S> v(cols, ScalarOps<S>::zero());
        v[f] = ScalarOps<S>::one();
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[static_cast<std::size_t>(pivots[r])] = S(-m[r][f]);
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of A x = b with free variables set to zero.
template <class S>
std::vector<S> solve_linear(const Matrix<S>& a, const std::vector<S>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("rhs length does not match row count");
    if (a.empty()) return {};
    const std::size_t cols = a[0].size();
    Matrix<S> aug = a;
    for (std::size_t i = 0; i < a.size(); ++i) aug[i].push_back(b[i]);
    const std::vector<int> pivots = rref_inplace(aug);
    if (!pivots.empty() && static_cast<std::size_t>(pivots.back()) == cols)
        throw InconsistentSystem();
    std::vector<S> x(cols, ScalarOps<S>::zero());
    for (std::size_t r = 0; r < pivots.size(); ++r)
        x[static_cast<std::size_t>(pivots[r])] = aug[r][cols];
    return x;
}

// Greedy extension: appends candidate rows that raise the rank, keeping
// the incoming span. Returns the indices of the accepted candidates.
template <class S>
std::vector<int> greedy_extend_rank(Matrix<S>& span_rows, const Matrix<S>& candidates,
                                    int target_rank) {
    std::vector<int> taken;
    int current = rank(span_rows);
    for (std::size_t i = 0; i < candidates.size() && current < target_rank; ++i) {
        Matrix<S> trial = span_rows;
        trial.push_back(candidates[i]);
        const int r = rank(trial);
        if (r > current) {
            span_rows.push_back(candidates[i]);
            current = r;
            taken.push_back(static_cast<int>(i));
        }
    }
    return taken;
}

// ---- jet-valued linear algebra -------------------------------------------

template <class S>
bool unit_at_base(const Jet<S>& j) {
    if (j.order() < 0 && !j.is_exact_poly()) return false;
    return ScalarOps<S>::is_unit(j.coeff(0));
}

namespace detail {

// Same policy as the scalar pivot choice: the float backend prefers the
// constant term of largest magnitude, exact backends take the first unit.
template <class S>
int pick_jet_pivot_row(const Matrix<Jet<S>>& a, std::size_t col, std::size_t from) {
    if constexpr (std::is_same_v<S, double>) {
        int best = -1;
        double best_abs = ScalarOps<double>::kPivotTol;
        for (std::size_t r = from; r < a.size(); ++r) {
            if (!unit_at_base(a[r][col])) continue;
            const double v = std::fabs(a[r][col].coeff(0));
            if (v > best_abs) {
                best_abs = v;
                best = static_cast<int>(r);
            }
        }
        return best;
    } else {
        for (std::size_t r = from; r < a.size(); ++r)
            if (unit_at_base(a[r][col])) return static_cast<int>(r);
        return -1;
    }
}

}  // namespace detail

// Solves A X = B where A is square with invertible constant term; X and
// B are matrices of jets (columns are right-hand sides). Gaussian
// elimination over the jet ring, pivoting on entries whose constant
// term is a unit.
template <class S>
Matrix<Jet<S>> jet_solve_square(Matrix<Jet<S>> a, Matrix<Jet<S>> b) {
    const std::size_t n = a.size();
    if (n == 0) return b;
    for (const auto& row : a)
        if (row.size() != n) throw DimensionMismatch("jet system matrix is not square");
    if (b.size() != n) throw DimensionMismatch("jet rhs row count mismatch");
    const std::size_t w = b[0].size();

    for (std::size_t col = 0; col < n; ++col) {
        const int piv = detail::pick_jet_pivot_row(a, col, col);
        if (piv < 0) throw InconsistentSystem("jet system is singular at the base point");
        std::swap(a[static_cast<std::size_t>(piv)], a[col]);
        std::swap(b[static_cast<std::size_t>(piv)], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            // Only a certified-exact zero may be skipped; a jet that merely
            // vanishes to a low order must still degrade the row's order.
            if (a[r][col].is_exact_poly() && a[r][col].vanishes_to_order()) continue;
            const Jet<S> f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] = a[r][j] - f * a[col][j];
            for (std::size_t j = 0; j < w; ++j) b[r][j] = b[r][j] - f * b[col][j];
        }
    }
    Matrix<Jet<S>> x(n, std::vector<Jet<S>>(w));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < w; ++j) x[i][j] = b[i][j] / a[i][i];
    return x;
}

// A one-dimensional kernel of a jet matrix whose constant term has
// corank exactly one. Returns the kernel generator normalized so the
// free coordinate equals 1, or nullopt when the corank is not one.
// Rows outside the solved square block are verified to annihilate the
// result; a nonzero residual there means the kernel is not truly
// one-dimensional to jet order.
template <class S>
std::optional<std::vector<Jet<S>>> jet_kernel_line(const Matrix<Jet<S>>& a) {
    if (a.empty() || a[0].empty()) return std::nullopt;
    const std::size_t rows = a.size(), cols = a[0].size();

    Matrix<S> a0(rows, std::vector<S>(cols, ScalarOps<S>::zero()));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            a0[i][j] = (a[i][j].order() >= 0 || a[i][j].is_exact_poly()) ? a[i][j].coeff(0)
                                                                         : ScalarOps<S>::zero();
    Matrix<S> r0 = a0;
    const std::vector<int> pivots = rref_inplace(r0);
    if (pivots.size() != cols - 1) return std::nullopt;

    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    std::size_t free_col = cols;
    for (std::size_t j = 0; j < cols; ++j)
        if (!is_pivot[j]) free_col = j;

    // Pick rows independent on the pivot columns.
    Matrix<S> picked;
    std::vector<std::size_t> row_ids;
    for (std::size_t i = 0; i < rows && picked.size() < cols - 1; ++i) {
        std::vector<S> restricted;
        for (int p : pivots) restricted.push_back(a0[i][static_cast<std::size_t>(p)]);
        Matrix<S> trial = picked;
        trial.push_back(restricted);
        if (rank(trial) > static_cast<int>(picked.size())) {
            picked = std::move(trial);
            row_ids.push_back(i);
        }
    }
    if (picked.size() != cols - 1) return std::nullopt;

    Matrix<Jet<S>> sq(row_ids.size());
    Matrix<Jet<S>> rhs(row_ids.size());
    for (std::size_t k = 0; k < row_ids.size(); ++k) {
        for (int p : pivots) sq[k].push_back(a[row_ids[k]][static_cast<std::size_t>(p)]);
        rhs[k].push_back(-a[row_ids[k]][free_col]);
    }
    const Matrix<Jet<S>> sol = jet_solve_square(std::move(sq), std::move(rhs));

    long long common = kOrdInf;
    for (const auto& row : sol) common = std::min(common, row[0].order());
    std::vector<Jet<S>> v(cols);
    for (std::size_t k = 0; k < pivots.size(); ++k) v[static_cast<std::size_t>(pivots[k])] = sol[k][0];
    v[free_col] = Jet<S>::constant(ScalarOps<S>::one(), common);

    // Residual on the rows that were not part of the square solve.
    for (std::size_t i = 0; i < rows; ++i) {
        Jet<S> acc = Jet<S>::constant(ScalarOps<S>::zero(), common);
        for (std::size_t j = 0; j < cols; ++j) acc = acc + a[i][j] * v[j];
        if (!acc.vanishes_to_order())
            throw Error("jet kernel line: residual row does not vanish to jet order");
    }
    return v;
}

}  // namespace rank2geo
