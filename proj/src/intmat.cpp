#include "obcalc/intmat.hpp"

#include "obcalc/core.hpp"

#include <algorithm>
#include <sstream>

namespace obcalc {

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& o) const {
    if (cols_ != o.rows_)
        throw InternalError("matrix product shape mismatch");
    IntegerMatrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Int& f = at(i, k);
            if (f == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                out.at(i, j) += f * o.at(k, j);
        }
    return out;
}

bool IntegerMatrix::is_identity() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

bool IntegerMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

Int IntegerMatrix::determinant() const {
    if (!is_square())
        throw InternalError("determinant of non-square matrix");
    const std::size_t n = rows_;
    if (n == 0) return 1;
    IntegerMatrix m = *this;
    Int prev = 1;
    int sign = 1;
    // Bareiss: every division below is exact.
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            std::size_t r = k + 1;
            while (r < n && m.at(r, k) == 0) ++r;
            if (r == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(r, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
            m.at(i, k) = 0;
        }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

std::string IntegerMatrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ',';
            os << at(i, j);
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

namespace {

Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

}  // namespace

SmithResult smith_normal_form(const IntegerMatrix& a) {
    const std::size_t r = a.rows(), c = a.cols();
    SmithResult s{a, IntegerMatrix::identity(r), IntegerMatrix::identity(c)};
    IntegerMatrix& d = s.d;
    IntegerMatrix& u = s.u;
    IntegerMatrix& v = s.v;

    // Row ops act on d and u together, column ops on d and v, so
    // u * a * v == d stays true throughout.
    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t t = 0; t < c; ++t) std::swap(d.at(i, t), d.at(j, t));
        for (std::size_t t = 0; t < r; ++t) std::swap(u.at(i, t), u.at(j, t));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t t = 0; t < r; ++t) std::swap(d.at(t, i), d.at(t, j));
        for (std::size_t t = 0; t < c; ++t) std::swap(v.at(t, i), v.at(t, j));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, const Int& f) {
        for (std::size_t t = 0; t < c; ++t) d.at(dst, t) += f * d.at(src, t);
        for (std::size_t t = 0; t < r; ++t) u.at(dst, t) += f * u.at(src, t);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, const Int& f) {
        for (std::size_t t = 0; t < r; ++t) d.at(t, dst) += f * d.at(t, src);
        for (std::size_t t = 0; t < c; ++t) v.at(t, dst) += f * v.at(t, src);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t t = 0; t < c; ++t) d.at(i, t) = -d.at(i, t);
        for (std::size_t t = 0; t < r; ++t) u.at(i, t) = -u.at(i, t);
    };

    const std::size_t lim = std::min(r, c);
    for (std::size_t t = 0; t < lim; ++t) {
        for (;;) {
            // Smallest nonzero entry of the trailing block as pivot keeps
            // the reduction loop count down and entries tame.
            std::size_t pi = r, pj = c;
            Int best = 0;
            for (std::size_t i = t; i < r; ++i)
                for (std::size_t j = t; j < c; ++j) {
                    const Int& x = d.at(i, j);
                    if (x == 0) continue;
                    if (pi == r || abs_int(x) < best) {
                        pi = i;
                        pj = j;
                        best = abs_int(x);
                    }
                }
            if (pi == r) {
                // Trailing block is zero; d is already diagonal from t on.
                return s;
            }
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool dirty = false;
            for (std::size_t i = t + 1; i < r; ++i) {
                if (d.at(i, t) == 0) continue;
                Int q = d.at(i, t) / d.at(t, t);
                if (q != 0) add_row(i, t, -q);
                if (d.at(i, t) != 0) dirty = true;
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (d.at(t, j) == 0) continue;
                Int q = d.at(t, j) / d.at(t, t);
                if (q != 0) add_col(j, t, -q);
                if (d.at(t, j) != 0) dirty = true;
            }
            if (dirty) continue;  // remainders became new, smaller pivots

            // Pivot divides everything in its row and column; force it to
            // divide the rest of the block too.
            bool fixed = false;
            for (std::size_t i = t + 1; i < r && !fixed; ++i)
                for (std::size_t j = t + 1; j < c && !fixed; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) {
                        add_row(t, i, 1);
                        fixed = true;
                    }
            if (!fixed) break;
        }
        if (d.at(t, t) < 0) negate_row(t);
    }
    return s;
}

std::vector<Int> invariant_factors(const IntegerMatrix& a) {
    SmithResult s = smith_normal_form(a);
    std::vector<Int> out;
    const std::size_t lim = std::min(a.rows(), a.cols());
    for (std::size_t t = 0; t < lim; ++t)
        if (s.d.at(t, t) != 0) out.push_back(s.d.at(t, t));
    return out;
}

std::size_t matrix_rank(const IntegerMatrix& a) {
    return invariant_factors(a).size();
}

}  // namespace obcalc
