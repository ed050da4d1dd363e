#include <doctest.h>

#include "kneser/lattice.hpp"
#include "kneser/rng.hpp"

#include <sstream>

using namespace kneser;

namespace {

Lattice random_lattice(Rng& rng, int n, int spread = 3) {
    // B B^T for a random integer matrix B of full rank
    while (true) {
        IntMat b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                b(i, j) = static_cast<long>(rng.below(2 * spread + 1)) - spread;
        if (det(b) == 0) continue;
        return Lattice(b * b.transpose());
    }
}

} // namespace

TEST_CASE("builtin lattices") {
    Lattice e8 = builtin("E8");
    CHECK(e8.det() == 1);
    CHECK(e8.is_even());

    Lattice a2 = builtin("A2");
    CHECK(a2.det() == 3);
    CHECK(a2.gram == IntMat::from_rows({{Int(2), Int(-1)}, {Int(-1), Int(2)}}));

    Lattice d16p = builtin("D16+");
    CHECK(d16p.det() == 1);
    CHECK(d16p.is_even());
    CHECK(builtin("E16").gram == d16p.gram);

    CHECK(builtin("Z5").gram == IntMat::identity(5));
    CHECK(builtin("D4").det() == 4);
    CHECK(builtin("D7").det() == 4);
    CHECK(builtin("E6").det() == 3);
    CHECK(builtin("E7").det() == 2);
    CHECK_THROWS(builtin("D12+"));  // 8 does not divide 12
    CHECK_THROWS(builtin("Q3"));
}

TEST_CASE("parity") {
    CHECK_FALSE(builtin("Z1").is_even());
    CHECK(builtin("E8").is_even());
    CHECK_FALSE(direct_sum(builtin("A1"), builtin("Z1")).is_even());
}

TEST_CASE("dual gram") {
    CHECK(dual(builtin("Z3")) == RatMat(IntMat::identity(3)));
    Lattice a1 = builtin("A1");
    RatMat d = dual(a1);
    CHECK(d(0, 0) == Rat(1, 2));
    CHECK(det(dual(builtin("D4"))) == Rat(1, 4));
}

TEST_CASE("residue of small lattices") {
    // unimodular -> trivial
    CHECK(residue(builtin("Z8")).ngens() == 0);
    CHECK(residue(builtin("E8")).order() == 1);

    // A1: Z/2 with q = 1/4
    FiniteQuadraticModule r = residue(builtin("A1"));
    REQUIRE(r.orders == std::vector<Int>{Int(2)});
    REQUIRE(r.has_quadratic);
    CHECK(r.q({Int(1)}) == Rat(1, 4));

    // D4: (Z/2)^2 with q = 1/2 on all three nonzero elements
    FiniteQuadraticModule d4 = residue(builtin("D4"));
    REQUIRE(d4.orders == std::vector<Int>({Int(2), Int(2)}));
    REQUIRE(d4.has_quadratic);
    int count_half = 0;
    for (const auto& e : d4.elements()) {
        if (e == d4.zero()) continue;
        if (d4.q(e) == Rat(1, 2)) ++count_half;
    }
    CHECK(count_half == 3);

    // D7: res = Z/4 (one generator)
    CHECK(residue(builtin("D7")).ngens() == 1);
}

TEST_CASE("residue order product equals det") {
    Rng rng(101);
    for (int iter = 0; iter < 100; ++iter) {
        int n = 1 + static_cast<int>(rng.below(6));
        Lattice l = random_lattice(rng, n, 2);
        CHECK(residue(l).order() == l.det());
    }
}

TEST_CASE("quadratic/bilinear compatibility") {
    Rng rng(202);
    int tested = 0;
    for (int iter = 0; iter < 60 && tested < 12; ++iter) {
        int n = 1 + static_cast<int>(rng.below(4));
        Lattice l = random_lattice(rng, n, 2);
        // force even by doubling the form
        IntMat g2 = l.gram;
        for (auto& v : g2.a) v *= 2;
        Lattice le(g2);
        FiniteQuadraticModule r = residue(le);
        if (r.order() > 64) continue;
        ++tested;
        auto elems = r.elements();
        for (const auto& x : elems)
            for (const auto& y : elems) {
                Rat lhs = frac_mod1(r.q(r.add(x, y)) - r.q(x) - r.q(y));
                CHECK(lhs == r.b(x, y));
            }
    }
    CHECK(tested >= 5);
}

TEST_CASE("discretize inverts lift") {
    FiniteQuadraticModule r = residue(builtin("D4"));
    for (const auto& e : r.elements()) CHECK(r.discretize(r.lift(e)) == e);
    FiniteQuadraticModule r7 = residue(builtin("D7"));
    for (const auto& e : r7.elements()) CHECK(r7.discretize(r7.lift(e)) == e);
}

TEST_CASE("saturate") {
    Lattice z3 = builtin("Z3");
    IntMat b(1, 3);
    b(0, 0) = 2;  // 2Z inside Z
    Sublattice sat = saturate(Sublattice(z3, b));
    CHECK(sat.basis.rows == 1);
    CHECK(abs(sat.basis(0, 0)) == 1);
    CHECK(is_saturated(sat));

    IntMat b2(2, 3);
    b2(0, 0) = 2;
    b2(1, 1) = 2;
    Sublattice sat2 = saturate(Sublattice(z3, b2));
    CHECK(is_saturated(sat2));
    CHECK(det(sat2.induced_gram()) == 1);

    Sublattice sat3 = saturate(sat2);
    CHECK(hnf(sat3.basis).hermite == hnf(sat2.basis).hermite);
}

TEST_CASE("orthogonal complement") {
    Lattice z3 = builtin("Z3");
    IntMat b(1, 3);
    b(0, 0) = 1;
    Sublattice c = orthogonal_complement(Sublattice(z3, b));
    CHECK(c.rank() == 2);
    CHECK(det(c.induced_gram()) == 1);

    // A1 root inside E8 -> E7 complement (det 2)
    Lattice e8 = builtin("E8");
    IntMat r(1, 8);
    r(0, 0) = 1;
    Sublattice e7 = orthogonal_complement(Sublattice(e8, r));
    CHECK(e7.rank() == 7);
    CHECK(det(e7.induced_gram()) == 2);

    Sublattice full(z3, IntMat::identity(3));
    CHECK(orthogonal_complement(full).rank() == 0);

    // complement is orthogonal to A
    IntMat prods = Sublattice(e8, r).basis * e8.gram * e7.basis.transpose();
    CHECK(prods.is_zero());
}

TEST_CASE("unimodular index identity [L : A perp B] = det A = det B") {
    Lattice z4 = builtin("Z4");
    IntMat b(2, 4);
    b(0, 0) = 1; b(0, 1) = 1;
    b(1, 2) = 1; b(1, 3) = 1;
    Sublattice a(z4, b);
    REQUIRE(is_saturated(a));
    Sublattice c = orthogonal_complement(a);
    Int da = det(a.induced_gram());
    Int db = det(c.induced_gram());
    CHECK(da == db);
    IntMat stacked(a.rank() + c.rank(), 4);
    for (int j = 0; j < 4; ++j) {
        stacked(0, j) = a.basis(0, j);
        stacked(1, j) = a.basis(1, j);
        stacked(2, j) = c.basis(0, j);
        stacked(3, j) = c.basis(1, j);
    }
    CHECK(abs(det(stacked)) == da);
}

TEST_CASE("direct sum") {
    Lattice z2 = direct_sum(builtin("Z1"), builtin("Z1"));
    CHECK(z2.gram == IntMat::identity(2));
    Lattice e8e8 = direct_sum(builtin("E8"), builtin("E8"));
    CHECK(e8e8.rank() == 16);
    CHECK(e8e8.det() == 1);
    CHECK(e8e8.is_even());
    Lattice a1 = builtin("A1");
    CHECK(direct_sum(a1, builtin("Z0")).gram == a1.gram);
}

TEST_CASE("lat file round trip and validation") {
    Lattice e6 = builtin("E6");
    std::ostringstream os;
    write_lat(os, e6);
    std::istringstream is(os.str());
    Lattice back = read_lat(is, "E6");
    CHECK(back.gram == e6.gram);

    std::istringstream bad_sym("2\n1 2\n3 1\n");
    CHECK_THROWS_WITH_AS(read_lat(bad_sym), "gram matrix is not symmetric", std::invalid_argument);

    std::istringstream bad_pd("2\n1 2\n2 1\n");
    CHECK_THROWS_WITH_AS(read_lat(bad_pd), "gram matrix is not positive definite",
                         std::invalid_argument);

    std::istringstream with_comment("# a comment\n1\n4 # trailing\n");
    CHECK(read_lat(with_comment).gram(0, 0) == 4);
}
