#include "kneser/intmat.hpp"

#include <algorithm>
#include <cassert>

namespace kneser {

IntMat::IntMat(int r, int c, std::vector<Int> entries) : rows(r), cols(c), a(std::move(entries)) {
    if (a.size() != static_cast<size_t>(r) * c)
        throw std::invalid_argument("entry count does not match dimensions");
}

IntMat IntMat::identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty()) return IntMat(0, 0);
    IntMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows; ++i) {
        if (rows[i].size() != static_cast<size_t>(m.cols))
            throw std::invalid_argument("ragged rows");
        for (int j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMat IntMat::transpose() const {
    IntMat t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool IntMat::is_symmetric() const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

bool IntMat::is_zero() const {
    return std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; });
}

std::vector<Int> IntMat::row(int i) const {
    return std::vector<Int>(a.begin() + static_cast<size_t>(i) * cols,
                            a.begin() + static_cast<size_t>(i + 1) * cols);
}

IntMat operator*(const IntMat& x, const IntMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("dimension mismatch in product");
    IntMat z(x.rows, y.cols);
    Int tmp;
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Int& xik = x(i, k);
            if (xik == 0) continue;
            for (int j = 0; j < y.cols; ++j) {
                tmp = xik * y(k, j);
                z(i, j) += tmp;
            }
        }
    return z;
}

IntMat operator+(const IntMat& x, const IntMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("dimension mismatch");
    IntMat z(x.rows, x.cols);
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = x.a[i] + y.a[i];
    return z;
}

IntMat operator-(const IntMat& x, const IntMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("dimension mismatch");
    IntMat z(x.rows, x.cols);
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
    return z;
}

std::vector<Int> operator*(const std::vector<Int>& v, const IntMat& m) {
    if (static_cast<int>(v.size()) != m.rows) throw std::invalid_argument("dimension mismatch");
    std::vector<Int> out(m.cols);
    for (int i = 0; i < m.rows; ++i) {
        if (v[i] == 0) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += v[i] * m(i, j);
    }
    return out;
}

RatMat::RatMat(const IntMat& m) : rows(m.rows), cols(m.cols), a(m.a.size()) {
    for (size_t i = 0; i < a.size(); ++i) a[i] = Rat(m.a[i]);
}

RatMat RatMat::identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMat RatMat::transpose() const {
    RatMat t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Int RatMat::denominator() const {
    Int d = 1;
    for (const Rat& x : a) d = lcm(d, x.get_den());
    return d;
}

IntMat RatMat::scaled_integral() const {
    Int d = denominator();
    IntMat m(rows, cols);
    for (size_t i = 0; i < a.size(); ++i) {
        Rat s = a[i] * Rat(d);
        assert(s.get_den() == 1);
        m.a[i] = s.get_num();
    }
    return m;
}

bool RatMat::is_integral() const {
    return std::all_of(a.begin(), a.end(), [](const Rat& x) { return x.get_den() == 1; });
}

IntMat RatMat::to_int() const {
    if (!is_integral()) throw std::invalid_argument("matrix has non-integral entries");
    IntMat m(rows, cols);
    for (size_t i = 0; i < a.size(); ++i) m.a[i] = a[i].get_num();
    return m;
}

RatMat operator*(const RatMat& x, const RatMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("dimension mismatch in product");
    RatMat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rat& xik = x(i, k);
            if (xik == 0) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

std::vector<Rat> operator*(const std::vector<Rat>& v, const RatMat& m) {
    if (static_cast<int>(v.size()) != m.rows) throw std::invalid_argument("dimension mismatch");
    std::vector<Rat> out(m.cols);
    for (int i = 0; i < m.rows; ++i) {
        if (v[i] == 0) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += v[i] * m(i, j);
    }
    return out;
}

namespace {

void swap_rows(IntMat& m, int i, int j) {
    if (i == j) return;
    for (int c = 0; c < m.cols; ++c) std::swap(m(i, c), m(j, c));
}

// row_i -= q * row_j
void row_axpy(IntMat& m, int i, int j, const Int& q) {
    if (q == 0) return;
    for (int c = 0; c < m.cols; ++c) m(i, c) -= q * m(j, c);
}

void negate_row(IntMat& m, int i) {
    for (int c = 0; c < m.cols; ++c) m(i, c) = -m(i, c);
}

} // namespace

HnfResult hnf(const IntMat& m) {
    IntMat h = m;
    IntMat t = IntMat::identity(m.rows);
    int r = 0;
    for (int c = 0; c < h.cols && r < h.rows; ++c) {
        int piv = -1;
        for (int i = r; i < h.rows; ++i)
            if (h(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        swap_rows(h, r, piv);
        swap_rows(t, r, piv);
        // gcd out everything below the pivot
        for (int i = r + 1; i < h.rows; ++i) {
            while (h(i, c) != 0) {
                Int q = h(r, c) / h(i, c);
                row_axpy(h, r, i, q);
                row_axpy(t, r, i, q);
                swap_rows(h, r, i);
                swap_rows(t, r, i);
            }
        }
        if (h(r, c) < 0) { negate_row(h, r); negate_row(t, r); }
        for (int i = 0; i < r; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
            row_axpy(h, i, r, q);
            row_axpy(t, i, r, q);
        }
        ++r;
    }
    return HnfResult{std::move(h), std::move(t), r};
}

SmithForm snf(const IntMat& m) {
    IntMat d = m;
    IntMat left = IntMat::identity(m.rows);
    IntMat right = IntMat::identity(m.cols);

    auto col_axpy = [&](IntMat& x, int i, int j, const Int& q) {
        if (q == 0) return;
        for (int r = 0; r < x.rows; ++r) x(r, i) -= q * x(r, j);
    };
    auto swap_cols = [&](IntMat& x, int i, int j) {
        if (i == j) return;
        for (int r = 0; r < x.rows; ++r) std::swap(x(r, i), x(r, j));
    };

    int k = 0;
    int n = std::min(d.rows, d.cols);
    while (k < n) {
        // find a nonzero pivot in the trailing block
        int pi = -1, pj = -1;
        for (int i = k; i < d.rows && pi < 0; ++i)
            for (int j = k; j < d.cols; ++j)
                if (d(i, j) != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        swap_rows(d, k, pi); swap_rows(left, k, pi);
        swap_cols(d, k, pj); swap_cols(right, k, pj);

        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (int i = k + 1; i < d.rows; ++i) {
                while (d(i, k) != 0) {
                    Int q = d(k, k) / d(i, k);
                    row_axpy(d, k, i, q); row_axpy(left, k, i, q);
                    swap_rows(d, k, i); swap_rows(left, k, i);
                    dirty = true;
                }
            }
            for (int j = k + 1; j < d.cols; ++j) {
                while (d(k, j) != 0) {
                    Int q = d(k, k) / d(k, j);
                    col_axpy(d, k, j, q); col_axpy(right, k, j, q);
                    swap_cols(d, k, j); swap_cols(right, k, j);
                    dirty = true;
                }
            }
        }
        if (d(k, k) < 0) { negate_row(d, k); negate_row(left, k); }
        ++k;
    }
    // enforce the divisibility chain
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i + 1 < k; ++i) {
            if (d(i + 1, i + 1) % d(i, i) != 0) {
                // fold d[i+1] into the pivot at i: add column i+1 to column i,
                // then re-clear the 2x2 corner
                for (int r = 0; r < d.rows; ++r) d(r, i) += d(r, i + 1);
                for (int r = 0; r < right.rows; ++r) right(r, i) += right(r, i + 1);
                // now the block has entries [[di,0],[di+1,di+1]]; redo the pivot
                int kk = i;
                bool dirty = true;
                while (dirty) {
                    dirty = false;
                    for (int r = kk + 1; r < d.rows; ++r) {
                        while (d(r, kk) != 0) {
                            Int q = d(kk, kk) / d(r, kk);
                            row_axpy(d, kk, r, q); row_axpy(left, kk, r, q);
                            swap_rows(d, kk, r); swap_rows(left, kk, r);
                            dirty = true;
                        }
                    }
                    for (int c = kk + 1; c < d.cols; ++c) {
                        while (d(kk, c) != 0) {
                            Int q = d(kk, kk) / d(kk, c);
                            col_axpy(d, kk, c, q); col_axpy(right, kk, c, q);
                            swap_cols(d, kk, c); swap_cols(right, kk, c);
                            dirty = true;
                        }
                    }
                }
                if (d(kk, kk) < 0) { negate_row(d, kk); negate_row(left, kk); }
                if (d(kk + 1, kk + 1) < 0) {
                    for (int r = 0; r < d.rows; ++r) d(r, kk + 1) = -d(r, kk + 1);
                    for (int r = 0; r < right.rows; ++r) right(r, kk + 1) = -right(r, kk + 1);
                }
                changed = true;
            }
        }
    }

    SmithForm out;
    out.diagonal.resize(n);
    for (int i = 0; i < n; ++i) out.diagonal[i] = (i < k) ? d(i, i) : Int(0);
    out.left = std::move(left);
    out.right = std::move(right);
    return out;
}

IntMat kernel_mod_p(const IntMat& m, const Int& p) {
    if (!is_prime(p)) throw std::invalid_argument("kernel_mod_p: p is not prime");
    int64_t pp = to_long(p);
    int rows = m.rows, cols = m.cols;
    // reduce a copy mod p, row-eliminate, track pivot columns
    std::vector<std::vector<int64_t>> w(rows, std::vector<int64_t>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            Int r = m(i, j) % p;
            if (r < 0) r += p;
            w[i][j] = r.get_si();
        }
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (w[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(w[r], w[piv]);
        int64_t inv = inv_mod(w[r][c], pp);
        for (int j = c; j < cols; ++j) w[r][j] = mod_pos(w[r][j] * inv % pp, pp);
        for (int i = 0; i < rows; ++i) {
            if (i == r || w[i][c] == 0) continue;
            int64_t f = w[i][c];
            for (int j = c; j < cols; ++j) w[i][j] = mod_pos(w[i][j] - f * w[r][j] % pp, pp);
        }
        pivot_col.push_back(c);
        ++r;
    }
    // free columns give the kernel basis
    std::vector<bool> is_piv(cols, false);
    for (int c : pivot_col) is_piv[c] = true;
    IntMat basis(cols - r, cols);
    int bi = 0;
    for (int c = 0; c < cols; ++c) {
        if (is_piv[c]) continue;
        basis(bi, c) = 1;
        for (int i = 0; i < r; ++i) {
            int64_t coeff = w[i][c];
            if (coeff != 0) basis(bi, pivot_col[i]) = mod_pos(-coeff, pp);
        }
        ++bi;
    }
    return basis;
}

int rank_mod_p(const IntMat& m, const Int& p) {
    return m.cols - kernel_mod_p(m, p).rows;
}

Int det(const IntMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det of non-square matrix");
    int n = m.rows;
    if (n == 0) return 1;
    // Bareiss fraction-free elimination
    IntMat w = m;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (w(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (w(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            swap_rows(w, k, piv);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int num = w(i, j) * w(k, k) - w(i, k) * w(k, j);
                mpz_divexact(w(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = w(k, k);
    }
    return sign > 0 ? w(n - 1, n - 1) : -w(n - 1, n - 1);
}

Rat det(const RatMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det of non-square matrix");
    IntMat s = m.scaled_integral();
    Int d = m.denominator();
    Rat out(det(s));
    Rat scale(d);
    for (int i = 0; i < m.rows; ++i) out /= scale;
    return out;
}

RatMat inverse(const RatMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
    int n = m.rows;
    RatMat w = m;
    RatMat inv = RatMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (w(i, c) != 0) { piv = i; break; }
        if (piv < 0) throw std::domain_error("matrix is singular");
        for (int j = 0; j < n; ++j) {
            std::swap(w(c, j), w(piv, j));
            std::swap(inv(c, j), inv(piv, j));
        }
        Rat f = w(c, c);
        for (int j = 0; j < n; ++j) { w(c, j) /= f; inv(c, j) /= f; }
        for (int i = 0; i < n; ++i) {
            if (i == c || w(i, c) == 0) continue;
            Rat g = w(i, c);
            for (int j = 0; j < n; ++j) {
                w(i, j) -= g * w(c, j);
                inv(i, j) -= g * inv(c, j);
            }
        }
    }
    return inv;
}

RatMat inverse(const IntMat& m) { return inverse(RatMat(m)); }

std::optional<std::vector<Int>> solve_left(const IntMat& m, const std::vector<Int>& t) {
    if (static_cast<int>(t.size()) != m.cols) throw std::invalid_argument("dimension mismatch");
    HnfResult h = hnf(m);
    // solve y * hermite = t by forward substitution over pivot columns
    std::vector<Int> y(m.rows, 0);
    std::vector<Int> rem = t;
    int r = 0;
    for (int c = 0; c < m.cols; ++c) {
        if (r < h.rank && h.hermite(r, c) != 0) {
            Int q = rem[c] / h.hermite(r, c);
            if (rem[c] % h.hermite(r, c) != 0) return std::nullopt;
            y[r] = q;
            for (int j = c; j < m.cols; ++j) rem[j] -= q * h.hermite(r, j);
            ++r;
        } else if (rem[c] != 0) {
            return std::nullopt;
        }
    }
    for (int c = 0; c < m.cols; ++c)
        if (rem[c] != 0) return std::nullopt;
    return y * h.transform;
}

std::vector<Rat> solve_left(const RatMat& m, const std::vector<Rat>& t) {
    return t * inverse(m);
}

} // namespace kneser
