#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kneser/intmat.hpp"
#include "kneser/rng.hpp"

using namespace kneser;

namespace {

IntMat random_mat(Rng& rng, int r, int c, int lo, int hi) {
    IntMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            m(i, j) = static_cast<long>(lo + static_cast<int64_t>(rng.below(hi - lo + 1)));
    return m;
}

bool is_unimodular(const IntMat& m) {
    Int d = det(m);
    return d == 1 || d == -1;
}

bool in_hnf(const IntMat& h, int rank) {
    int prev_col = -1;
    for (int i = 0; i < rank; ++i) {
        int piv = -1;
        for (int j = 0; j < h.cols; ++j)
            if (h(i, j) != 0) { piv = j; break; }
        if (piv < 0 || piv <= prev_col) return false;
        if (h(i, piv) <= 0) return false;
        for (int k = 0; k < i; ++k)
            if (h(k, piv) < 0 || h(k, piv) >= h(i, piv)) return false;
        prev_col = piv;
    }
    for (int i = rank; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j)
            if (h(i, j) != 0) return false;
    return true;
}

} // namespace

TEST_CASE("hnf basics") {
    // identity is already in HNF
    IntMat id = IntMat::identity(3);
    HnfResult h = hnf(id);
    CHECK(h.hermite == id);
    CHECK(h.transform == id);

    // [[2,4],[6,8]]
    IntMat m = IntMat::from_rows({{Int(2), Int(4)}, {Int(6), Int(8)}});
    h = hnf(m);
    CHECK(h.transform * m == h.hermite);
    CHECK(is_unimodular(h.transform));
    CHECK(in_hnf(h.hermite, h.rank));
    CHECK(h.rank == 2);

    // zero matrix
    IntMat z(2, 2);
    h = hnf(z);
    CHECK(h.hermite.is_zero());
    CHECK(is_unimodular(h.transform));
    CHECK(h.rank == 0);
}

TEST_CASE("hnf preserves |det|") {
    Rng rng(42);
    for (int iter = 0; iter < 50; ++iter) {
        int n = 2 + static_cast<int>(rng.below(5));
        IntMat m = random_mat(rng, n, n, -9, 9);
        HnfResult h = hnf(m);
        CHECK(h.transform * m == h.hermite);
        CHECK(abs(det(h.hermite)) == abs(det(m)));
        CHECK(in_hnf(h.hermite, h.rank));
    }
}

TEST_CASE("snf examples") {
    SmithForm s = snf(IntMat::from_rows({{Int(2)}}));
    CHECK(s.diagonal == std::vector<Int>{Int(2)});

    // D4 gram
    IntMat d4 = IntMat::from_rows({{Int(2), Int(-1), Int(0), Int(0)},
                                   {Int(-1), Int(2), Int(-1), Int(-1)},
                                   {Int(0), Int(-1), Int(2), Int(0)},
                                   {Int(0), Int(-1), Int(0), Int(2)}});
    s = snf(d4);
    CHECK(s.diagonal == std::vector<Int>{Int(1), Int(1), Int(2), Int(2)});
    Int prod = 1;
    for (const Int& d : s.diagonal) prod *= d;
    CHECK(prod == det(d4));

    // diag(4,6) -> (2,12)
    s = snf(IntMat::from_rows({{Int(4), Int(0)}, {Int(0), Int(6)}}));
    CHECK(s.diagonal == std::vector<Int>{Int(2), Int(12)});
}

TEST_CASE("snf round trip on random matrices") {
    Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        int r = 1 + static_cast<int>(rng.below(8));
        int c = 1 + static_cast<int>(rng.below(8));
        IntMat m = random_mat(rng, r, c, -50, 50);
        SmithForm s = snf(m);
        IntMat d = s.left * m * s.right;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                CHECK(d(i, j) == (i == j && i < static_cast<int>(s.diagonal.size())
                                      ? s.diagonal[i]
                                      : Int(0)));
        CHECK(is_unimodular(s.left));
        CHECK(is_unimodular(s.right));
        for (size_t i = 0; i + 1 < s.diagonal.size(); ++i) {
            if (s.diagonal[i + 1] == 0) continue;
            CHECK(s.diagonal[i] != 0);
            CHECK(s.diagonal[i + 1] % s.diagonal[i] == 0);
        }
    }
}

TEST_CASE("kernel_mod_p") {
    CHECK(kernel_mod_p(IntMat::identity(4), Int(5)).rows == 0);

    IntMat row(1, 3);
    row(0, 0) = row(0, 1) = row(0, 2) = 1;
    IntMat k = kernel_mod_p(row, Int(3));
    CHECK(k.rows == 2);

    CHECK(kernel_mod_p(IntMat::identity(3), Int(3)).rows == 0);

    CHECK_THROWS_AS(kernel_mod_p(row, Int(4)), std::invalid_argument);
}

TEST_CASE("kernel vectors satisfy m v = 0 and are independent") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        int r = 1 + static_cast<int>(rng.below(4));
        int c = 2 + static_cast<int>(rng.below(5));
        int64_t p = std::vector<int64_t>{2, 3, 5, 7}[rng.below(4)];
        IntMat m = random_mat(rng, r, c, -10, 10);
        IntMat k = kernel_mod_p(m, Int(p));
        // m v^T = 0 mod p for every kernel row
        IntMat prod = m * k.transpose();
        for (const Int& e : prod.a) CHECK(e % p == 0);
        CHECK(rank_mod_p(k, Int(p)) == k.rows);
        CHECK(k.rows + rank_mod_p(m, Int(p)) == c);
    }
}

TEST_CASE("det and inverse") {
    IntMat m = IntMat::from_rows({{Int(2), Int(1)}, {Int(1), Int(3)}});
    CHECK(det(m) == 5);
    RatMat inv = inverse(m);
    RatMat prod = inv * RatMat(m);
    CHECK(prod == RatMat::identity(2));
}

TEST_CASE("solve_left") {
    IntMat m = IntMat::from_rows({{Int(2), Int(0)}, {Int(0), Int(3)}});
    auto x = solve_left(m, {Int(4), Int(9)});
    REQUIRE(x.has_value());
    CHECK((*x) * m == std::vector<Int>{Int(4), Int(9)});
    CHECK_FALSE(solve_left(m, {Int(1), Int(0)}).has_value());
}
