#pragma once

#include "kneser/integers.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace kneser {

/// Dense integer matrix with arbitrary-precision entries, row major.
struct IntMat {
    int rows = 0, cols = 0;
    std::vector<Int> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    IntMat(int r, int c, std::vector<Int> entries);

    Int& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static IntMat identity(int n);
    static IntMat zero(int r, int c) { return IntMat(r, c); }
    static IntMat from_rows(const std::vector<std::vector<Int>>& rows);

    IntMat transpose() const;
    bool operator==(const IntMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
    bool is_symmetric() const;
    bool is_zero() const;

    std::vector<Int> row(int i) const;
};

IntMat operator*(const IntMat& x, const IntMat& y);
IntMat operator+(const IntMat& x, const IntMat& y);
IntMat operator-(const IntMat& x, const IntMat& y);
std::vector<Int> operator*(const std::vector<Int>& v, const IntMat& m);

/// Exact rational matrix; entries kept in lowest terms by mpq.
struct RatMat {
    int rows = 0, cols = 0;
    std::vector<Rat> a;

    RatMat() = default;
    RatMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    explicit RatMat(const IntMat& m);

    Rat& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Rat& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static RatMat identity(int n);
    RatMat transpose() const;
    bool operator==(const RatMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }

    /// Least common multiple of entry denominators.
    Int denominator() const;
    /// Returns (denominator() * this) as an integer matrix.
    IntMat scaled_integral() const;
    /// True if every entry is an integer.
    bool is_integral() const;
    IntMat to_int() const;
};

RatMat operator*(const RatMat& x, const RatMat& y);
std::vector<Rat> operator*(const std::vector<Rat>& v, const RatMat& m);

struct HnfResult {
    IntMat hermite;    // transform * input, in row Hermite normal form
    IntMat transform;  // unimodular
    int rank = 0;
};

/// Row Hermite normal form: pivots positive, entries above each pivot
/// reduced into [0, pivot), zero rows at the bottom.
HnfResult hnf(const IntMat& m);

struct SmithForm {
    std::vector<Int> diagonal;  // d1 | d2 | ... (nonnegative)
    IntMat left, right;         // left * input * right is diagonal
};

SmithForm snf(const IntMat& m);

/// Basis of {v : m v^T = 0 mod p} as matrix rows, p prime.
IntMat kernel_mod_p(const IntMat& m, const Int& p);

/// Rank of m over F_p.
int rank_mod_p(const IntMat& m, const Int& p);

/// Determinant (square matrices), fraction-free elimination.
Int det(const IntMat& m);
Rat det(const RatMat& m);

/// Exact inverse; throws if singular.
RatMat inverse(const RatMat& m);
RatMat inverse(const IntMat& m);

/// One solution x of x * m = t over the integers, if any.
std::optional<std::vector<Int>> solve_left(const IntMat& m, const std::vector<Int>& t);

/// One rational solution x of x * m = t (m square nonsingular).
std::vector<Rat> solve_left(const RatMat& m, const std::vector<Rat>& t);

} // namespace kneser
