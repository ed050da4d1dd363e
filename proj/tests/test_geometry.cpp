#include <doctest.h>

#include "kneser/geometry.hpp"
#include "kneser/rng.hpp"
#include "oracles.hpp"

using namespace kneser;

namespace {

Lattice random_lattice(Rng& rng, int n, int spread = 3) {
    while (true) {
        IntMat b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                b(i, j) = static_cast<long>(rng.below(2 * spread + 1)) - spread;
        if (det(b) == 0) continue;
        return Lattice(b * b.transpose());
    }
}

IntMat random_unimodular(Rng& rng, int n, int steps = 20) {
    IntMat t = IntMat::identity(n);
    for (int s = 0; s < steps; ++s) {
        int i = static_cast<int>(rng.below(n)), j = static_cast<int>(rng.below(n));
        if (i == j) continue;
        long c = static_cast<long>(rng.below(5)) - 2;
        for (int k = 0; k < n; ++k) t(i, k) += c * t(j, k);
    }
    return t;
}

} // namespace

TEST_CASE("lll basics") {
    // already reduced
    Lattice z3 = builtin("Z3");
    LllResult r = lll(z3);
    CHECK(r.reduced.gram == z3.gram);
    CHECK(r.transform * z3.gram * r.transform.transpose() == r.reduced.gram);

    // skew basis of Z^2 reduces back to the identity gram
    IntMat b(2, 2);
    b(0, 0) = 1; b(0, 1) = 0;
    b(1, 0) = 1000; b(1, 1) = 1;
    Lattice skew(b * b.transpose());
    LllResult r2 = lll(skew);
    CHECK(r2.reduced.gram == IntMat::identity(2));

    // det preserved on E8
    Lattice e8 = builtin("E8");
    LllResult r3 = lll(e8);
    CHECK(det(r3.reduced.gram) == 1);
    CHECK(is_lll_reduced(r3.reduced.gram, Rat(99, 100)));

    CHECK_THROWS(lll(z3, Rat(1, 5)));
}

TEST_CASE("lll: lovasz condition holds exactly on random lattices") {
    Rng rng(5);
    for (int iter = 0; iter < 25; ++iter) {
        int n = 2 + static_cast<int>(rng.below(5));
        Lattice l = random_lattice(rng, n);
        LllResult r = lll(l);
        CHECK(is_lll_reduced(r.reduced.gram, Rat(99, 100)));
        CHECK(r.transform * l.gram * r.transform.transpose() == r.reduced.gram);
        CHECK(abs(det(r.transform)) == 1);
    }
}

TEST_CASE("short vectors on known lattices") {
    // Z3, bound 1: the three unit vectors
    ShortVectorList sv = short_vectors(builtin("Z3"), 1);
    CHECK(sv.vectors.size() == 3);

    // E8 roots: 120 pairs
    ShortVectorList e8 = short_vectors(builtin("E8"), 2);
    CHECK(e8.vectors.size() == 120);

    // A2: 3 pairs of roots
    CHECK(short_vectors(builtin("A2"), 2).vectors.size() == 3);

    // D16+ roots: 240 pairs
    CHECK(short_vectors(builtin("D16+"), 2).vectors.size() == 240);
}

TEST_CASE("short vectors agree with box search") {
    Rng rng(17);
    for (int iter = 0; iter < 50; ++iter) {
        int n = 1 + static_cast<int>(rng.below(4));
        Lattice l = random_lattice(rng, n, 2);
        long bound = 1 + static_cast<long>(rng.below(10));
        ShortVectorList sv = short_vectors(l, bound);
        std::set<std::vector<long>> got;
        for (const auto& e : sv.vectors) {
            std::vector<long> v(e.x.begin(), e.x.end());
            got.insert(v);
            // exact norm recheck against the lattice gram
            Int norm = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) norm += Int(e.x[i]) * l.gram(i, j) * Int(e.x[j]);
            CHECK(norm == e.norm);
            CHECK(norm <= bound);
        }
        CHECK(got.size() == sv.vectors.size());
        // box bound: coordinates of short vectors are bounded by
        // sqrt(bound * (gram^{-1})_ii); use a generous fixed box for rank<=4
        auto brute = oracles::brute_short_vectors(l.gram, bound, 12);
        CHECK(got == brute);
    }
}

TEST_CASE("theta prefix") {
    // Z1: 1, 2, 0, 0, 2
    auto t = theta_prefix(builtin("Z1"), 4);
    CHECK(t == std::vector<Int>({Int(1), Int(2), Int(0), Int(0), Int(2)}));

    auto a1 = theta_prefix(builtin("A1"), 2);
    CHECK(a1 == std::vector<Int>({Int(1), Int(0), Int(2)}));

    // D16+ and E8+E8 share theta prefixes (same Siegel theta series, genus 1)
    Lattice e8e8 = direct_sum(builtin("E8"), builtin("E8"));
    CHECK(theta_prefix(builtin("D16+"), 6) == theta_prefix(e8e8, 6));
}

TEST_CASE("theta prefix is an isometry invariant") {
    Rng rng(23);
    for (int iter = 0; iter < 20; ++iter) {
        int n = 2 + static_cast<int>(rng.below(7));
        Lattice l = random_lattice(rng, n, 2);
        IntMat t = random_unimodular(rng, n);
        Lattice lt = Lattice::unchecked(t * l.gram * t.transpose());
        CHECK(theta_prefix(l, 6) == theta_prefix(lt, 6));
    }
}

TEST_CASE("root decomposition") {
    CHECK(root_decomposition(builtin("E8")).to_string() == "E8");
    CHECK(root_decomposition(builtin("D16+")).to_string() == "D16");
    Lattice e8e8 = direct_sum(builtin("E8"), builtin("E8"));
    CHECK(root_decomposition(e8e8).to_string() == "E8+E8");

    // root counts A_n -> n(n+1), D_n -> 2n(n-1)
    for (int n = 1; n <= 16; ++n) {
        RootDecomposition rd = root_decomposition(builtin("A" + std::to_string(n)));
        REQUIRE(rd.components.size() == 1);
        CHECK(rd.components[0].type == 'A');
        CHECK(rd.components[0].rank == n);
        CHECK(rd.total_roots == long(n) * (n + 1));
    }
    for (int n = 4; n <= 16; ++n) {
        RootDecomposition rd = root_decomposition(builtin("D" + std::to_string(n)));
        REQUIRE(rd.components.size() == 1);
        CHECK(rd.components[0].type == 'D');
        CHECK(rd.total_roots == 2L * n * (n - 1));
    }
    // A3 = D3 reported as A3
    CHECK(root_decomposition(builtin("D3")).to_string() == "A3");

    // rootless lattice: min norm 4 (doubled Z2 has min 2... use 2*identity)
    IntMat g(2, 2);
    g(0, 0) = g(1, 1) = 4;
    g(0, 1) = g(1, 0) = 1;
    CHECK(root_decomposition(Lattice(g)).components.empty());

    // mixed: A1 + A2
    Lattice mix = direct_sum(builtin("A1"), builtin("A2"));
    CHECK(root_decomposition(mix).to_string() == "A1+A2");
}
