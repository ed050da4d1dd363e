#include "kneser/neighbors.hpp"
#include "kneser/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <climits>
#include <fstream>

namespace kneser {

namespace {

void check_prime_for(const Lattice& l, int64_t p) {
    if (p < 2 || !is_prime(Int(p))) throw std::invalid_argument("p must be prime");
    Int d = l.det();
    if (d % p == 0) throw std::invalid_argument("p divides det L");
    if (p == 2) {
        if (!l.is_even() || (d != 1 && d != -1))
            throw std::invalid_argument("p=2 neighbors require an even unimodular lattice");
    }
}

// odd p: v^T G v = 0 mod p; p = 2 (even lattice): v^T G v = 0 mod 4 on 0/1 lifts
bool isotropic_value(int64_t norm, int64_t p) {
    if (p == 2) return norm % 4 == 0;
    return norm % p == 0;
}

} // namespace

Int count_isotropic_lines(int n, const Int& det, const Int& p) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (det % p == 0) throw std::invalid_argument("p divides det");
    if (n < 2) return 0;
    Int total = 0, pw = 1;
    for (int i = 0; i <= n - 2; ++i) {
        total += pw;
        pw *= p;
    }
    if (n % 2 == 0) {
        Int a = (n / 2) % 2 == 0 ? det : -det;
        Int half = 1;
        for (int i = 0; i < n / 2 - 1; ++i) half *= p;
        total += kronecker(a, p) * half;
    }
    return total;
}

uint64_t line_candidate_count(int n, int64_t p) {
    uint64_t total = 0, pw = 1;
    for (int i = 0; i < n; ++i) {
        total += pw;
        uint64_t next = pw * static_cast<uint64_t>(p);
        if (i + 1 < n && next / static_cast<uint64_t>(p) != pw)
            throw std::overflow_error("candidate count overflow");
        pw = next;
    }
    return total;  // (p^n - 1)/(p - 1)
}

namespace {

// Chart walker: candidates are projective points ordered by (lead asc,
// then remaining coordinates lexicographically, most significant first).
// Per-candidate work is O(1) amortized via incremental norm accumulators.
template <typename Fn>
void walk_lines(const IntMat& gram, int64_t p, uint64_t lo, uint64_t hi, Fn&& emit) {
    int n = gram.rows;
    std::vector<std::vector<int64_t>> g(n, std::vector<int64_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i][j] = to_long(gram(i, j));

    uint64_t chart_start = 0;
    for (int lead = 0; lead < n; ++lead) {
        int L = n - 1 - lead;  // free digits
        uint64_t chart_size = 1;
        for (int t = 0; t < L; ++t) chart_size *= static_cast<uint64_t>(p);
        uint64_t chart_end = chart_start + chart_size;
        if (chart_end <= lo || chart_start >= hi) {
            chart_start = chart_end;
            continue;
        }
        uint64_t olo = lo > chart_start ? lo - chart_start : 0;
        uint64_t ohi = std::min(hi, chart_end) - chart_start;

        // digits d[0..L-1], d[t] = coordinate lead+1+t, d[0] most significant
        std::vector<int64_t> d(L, 0);
        {
            uint64_t rest = olo;
            for (int t = L - 1; t >= 0; --t) {
                d[t] = static_cast<int64_t>(rest % static_cast<uint64_t>(p));
                rest /= static_cast<uint64_t>(p);
            }
        }
        // acc[t][j] = sum over assigned coords i < lead+1+t of v_i * g[i][j]
        // partial[t] = norm of the prefix through digit t-1
        std::vector<std::vector<int64_t>> acc(L + 1, std::vector<int64_t>(n, 0));
        std::vector<int64_t> partial(L + 1, 0);
        for (int j = 0; j < n; ++j) acc[0][j] = g[lead][j];
        partial[0] = g[lead][lead];
        auto push_digit = [&](int t) {
            int c = lead + 1 + t;
            int64_t v = d[t];
            partial[t + 1] = partial[t] + v * v * g[c][c] + 2 * v * acc[t][c];
            if (t + 1 <= L - 1) {
                for (int j = 0; j < n; ++j) acc[t + 1][j] = acc[t][j] + v * g[c][j];
            }
        };
        for (int t = 0; t < L; ++t) push_digit(t);

        IsotropicLine line;
        line.p = p;
        line.rep.resize(n);
        for (uint64_t idx = olo; idx < ohi; ++idx) {
            if (isotropic_value(partial[L], p)) {
                for (int j = 0; j < lead; ++j) line.rep[j] = 0;
                line.rep[lead] = 1;
                for (int t = 0; t < L; ++t) line.rep[lead + 1 + t] = d[t];
                emit(line);
            }
            // odometer increment from the least significant digit
            int t = L - 1;
            while (t >= 0 && d[t] == p - 1) {
                d[t] = 0;
                --t;
            }
            if (t < 0) break;
            ++d[t];
            for (int s = t; s < L; ++s) push_digit(s);
        }
        chart_start = chart_end;
    }
}

} // namespace

void for_each_isotropic_line(const Lattice& l, int64_t p, uint64_t lo, uint64_t hi,
                             const std::function<void(const IsotropicLine&)>& fn) {
    check_prime_for(l, p);
    walk_lines(l.gram, p, lo, hi, fn);
}

std::vector<IsotropicLine> isotropic_lines(const Lattice& l, int64_t p) {
    std::vector<IsotropicLine> out;
    for_each_isotropic_line(l, p, 0, line_candidate_count(l.rank(), p),
                            [&](const IsotropicLine& li) { out.push_back(li); });
    return out;
}

std::vector<IsotropicLine> sample_isotropic_lines(const Lattice& l, int64_t p, int64_t count,
                                                  uint64_t seed) {
    check_prime_for(l, p);
    int n = l.rank();
    std::vector<std::vector<int64_t>> g(n, std::vector<int64_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i][j] = to_long(l.gram(i, j));
    Rng rng(seed);
    std::vector<IsotropicLine> out;
    out.reserve(count);
    std::vector<int64_t> v(n);
    while (static_cast<int64_t>(out.size()) < count) {
        bool zero = true;
        for (int i = 0; i < n; ++i) {
            v[i] = static_cast<int64_t>(rng.below(static_cast<uint64_t>(p)));
            if (v[i]) zero = false;
        }
        if (zero) continue;
        int64_t norm = 0;
        for (int i = 0; i < n; ++i) {
            if (v[i] == 0) continue;
            for (int j = 0; j < n; ++j) norm += v[i] * g[i][j] * v[j];
        }
        if (!isotropic_value(norm, p)) continue;
        // normalize: first nonzero coordinate = 1
        int lead = 0;
        while (v[lead] == 0) ++lead;
        int64_t inv = inv_mod(v[lead], p);
        IsotropicLine li;
        li.p = p;
        li.rep.resize(n);
        for (int i = 0; i < n; ++i) li.rep[i] = mod_pos(v[i] * inv % p, p);
        out.push_back(std::move(li));
    }
    return out;
}

NeighborLattice neighbor(const Lattice& l, const IsotropicLine& line) {
    int64_t p = line.p;
    check_prime_for(l, p);
    int n = l.rank();
    if (static_cast<int>(line.rep.size()) != n) throw std::invalid_argument("line has wrong rank");

    std::vector<Int> v(n);
    for (int i = 0; i < n; ++i) v[i] = mod_pos(line.rep[i], p);
    std::vector<Int> gv = v * l.gram;
    Int vv = 0;
    for (int i = 0; i < n; ++i) vv += v[i] * gv[i];
    if (!isotropic_value(to_long(vv % (4 * p * p)) , p))
        throw std::invalid_argument("line is not isotropic");
    // v not in p L# (guaranteed by p not dividing det; asserted anyway)
    int last_unit = -1;
    for (int i = n - 1; i >= 0; --i)
        if (gv[i] % p != 0) { last_unit = i; break; }
    if (last_unit < 0) throw std::logic_error("line generator lies in p * dual");

    // lift x = v + p w with x.x = 0 mod p^2 (odd p) or mod 8 (p = 2);
    // w supported on the last coordinate where it works (lexicographically
    // minimal solution)
    std::vector<Int> x = v;
    if (p != 2) {
        Int c = (vv / p) % p;
        // 2 t gv[j] = -c mod p
        int64_t t = mod_pos(
            to_long((-c % p + p) % p) * inv_mod(mod_pos(2 * to_long(gv[last_unit] % p), p), p) % p, p);
        x[last_unit] += Int(t) * p;
    } else {
        Int c = (vv / 4) % 2;  // v.w = c mod 2
        int64_t t = to_long(c);
        x[last_unit] += Int(t) * 2;
    }
    std::vector<Int> gx = x * l.gram;
    Int xx = 0;
    for (int i = 0; i < n; ++i) xx += x[i] * gx[i];
    assert(p != 2 ? xx % (p * p) == 0 : xx % 8 == 0);

    // M = { u : u.x = 0 mod p }: explicit basis from the first unit pivot
    int piv = -1;
    for (int i = 0; i < n; ++i)
        if (gx[i] % p != 0) { piv = i; break; }
    assert(piv >= 0);
    int64_t inv = inv_mod(mod_pos(to_long(gx[piv] % p), p), p);

    // stack p*M rows and x, then HNF and divide by p
    IntMat stack(n + 1, n);
    int r = 0;
    for (int i = 0; i < n; ++i) {
        if (i == piv) continue;
        stack(r, i) = p;
        stack(r, piv) = mod_pos(-to_long(gx[i] % p) * inv % p, p) * p;
        ++r;
    }
    stack(r, piv) = Int(p) * p;
    ++r;
    for (int j = 0; j < n; ++j) stack(n, j) = x[j];

    HnfResult h = hnf(stack);
    if (h.rank != n) throw std::logic_error("neighbor basis is rank-deficient");
    RatMat basis(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis(i, j) = Rat(h.hermite(i, j), Int(p));

    // gram = A G A^T / p^2 with A = p * basis
    IntMat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = h.hermite(i, j);
    IntMat big = a * l.gram * a.transpose();
    IntMat gram_n(n, n);
    Int pp = Int(p) * p;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (big(i, j) % pp != 0) throw std::logic_error("neighbor gram is not integral");
            gram_n(i, j) = big(i, j) / pp;
        }
    return NeighborLattice{std::move(basis), Lattice::unchecked(std::move(gram_n))};
}

namespace {

// basis of L cap N; N given by rational rows in L's coordinates
IntMat intersect_with_std(const RatMat& bn) {
    int n = bn.rows;
    RatMat inv_r = inverse(bn);
    Int dd = inv_r.denominator();
    IntMat e = inv_r.scaled_integral();  // u in N  <=>  u * e = 0 mod dd
    IntMat stack(2 * n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) stack(i, j) = e(i, j);
    for (int i = 0; i < n; ++i) stack(n + i, i) = dd;
    HnfResult h = hnf(stack);
    // left kernel of stack = rows of transform beyond rank; project to u part
    IntMat k(2 * n - h.rank, n);
    for (int i = 0; i < k.rows; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = h.transform(h.rank + i, j);
    if (k.rows != n) throw std::logic_error("unexpected intersection rank");
    return k;
}

} // namespace

IsotropicLine line_of(const Lattice& l, const RatMat& neighbor_basis, int64_t p) {
    int n = l.rank();
    if (neighbor_basis.rows != n || neighbor_basis.cols != n)
        throw std::invalid_argument("neighbor basis has wrong shape");
    // pN must be integral
    IntMat pn(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat s = neighbor_basis(i, j) * p;
            if (s.get_den() != 1) throw std::invalid_argument("not a p-neighbor: pN not integral");
            pn(i, j) = s.get_num();
        }
    // index checks both ways
    IntMat k = intersect_with_std(neighbor_basis);
    Int idx_l = abs(det(k));
    if (idx_l != p) throw std::invalid_argument("not a p-neighbor: [L : L cap N] != p");
    Rat idx_n = Rat(abs(det(k))) / abs(det(neighbor_basis));
    if (idx_n != p) throw std::invalid_argument("not a p-neighbor: [N : L cap N] != p");

    // line = row space of pN mod p (must be one-dimensional)
    IntMat red(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) red(i, j) = mod_pos(to_long(pn(i, j) % p), p);
    // Gaussian elimination mod p; expect rank 1
    int rank = rank_mod_p(red, Int(p));
    if (rank != 1) throw std::invalid_argument("not a p-neighbor: (pN+pL)/pL has rank != 1");
    IsotropicLine line;
    line.p = p;
    line.rep.assign(n, 0);
    for (int i = 0; i < n && line.rep == std::vector<int64_t>(n, 0); ++i) {
        std::vector<int64_t> row(n);
        bool nz = false;
        for (int j = 0; j < n; ++j) {
            row[j] = to_long(red(i, j));
            if (row[j]) nz = true;
        }
        if (!nz) continue;
        int lead = 0;
        while (row[lead] == 0) ++lead;
        int64_t inv = inv_mod(row[lead], p);
        for (int j = 0; j < n; ++j) line.rep[j] = mod_pos(row[j] * inv % p, p);
    }
    return line;
}

uint64_t biased_candidate_count(const Lattice& l, const Sublattice& a, int64_t p) {
    (void)l;
    int m = a.ambient->rank() - a.rank();
    return line_candidate_count(m, p);
}

void for_each_biased_line(const Lattice& l, const Sublattice& a, int64_t p, uint64_t lo,
                          uint64_t hi, const std::function<void(const IsotropicLine&)>& fn) {
    if (a.ambient != &l) throw std::invalid_argument("sublattice ambient mismatch");
    if (p == 2) throw std::invalid_argument("biased lines require odd p");
    if (!is_saturated(a)) throw std::invalid_argument("A must be saturated (call saturate first)");
    if (a.rank() > 0) {
        Int da = det(a.induced_gram());
        if (da % p == 0) throw std::invalid_argument("p divides det A");
    }
    Sublattice b = orthogonal_complement(a);
    Lattice bl = b.lattice();
    int n = l.rank(), m = b.rank();
    std::vector<std::vector<int64_t>> bb(m, std::vector<int64_t>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) bb[i][j] = to_long(b.basis(i, j));
    walk_lines(bl.gram, p, lo, hi, [&](const IsotropicLine& inner) {
        // embed the B-coordinates representative into L x F_p and normalize
        IsotropicLine out;
        out.p = p;
        out.rep.assign(n, 0);
        for (int i = 0; i < m; ++i) {
            if (inner.rep[i] == 0) continue;
            for (int j = 0; j < n; ++j)
                out.rep[j] = mod_pos(out.rep[j] + inner.rep[i] * bb[i][j], p);
        }
        int lead = 0;
        while (lead < n && out.rep[lead] == 0) ++lead;
        assert(lead < n);
        if (out.rep[lead] != 1) {
            int64_t inv = inv_mod(out.rep[lead], p);
            for (int j = 0; j < n; ++j) out.rep[j] = mod_pos(out.rep[j] * inv % p, p);
        }
        fn(out);
    });
}

std::vector<IsotropicLine> biased_lines(const Lattice& l, const Sublattice& a, int64_t p) {
    std::vector<IsotropicLine> out;
    for_each_biased_line(l, a, p, 0, biased_candidate_count(l, a, p),
                         [&](const IsotropicLine& li) { out.push_back(li); });
    return out;
}

SquareClass spinor_norm(const RatMat& g, const IntMat& gram) {
    int n = gram.rows;
    RatMat gr(gram);
    // isometry check
    RatMat check = g * gr * g.transpose();
    if (!(check == gr)) throw std::invalid_argument("spinor_norm: g is not an isometry of gram");

    RatMat h = g;
    SquareClass out;  // 1
    for (int i = 0; i < n; ++i) {
        // u = h(e_i) - e_i
        std::vector<Rat> u(n);
        bool zero = true;
        for (int j = 0; j < n; ++j) {
            u[j] = h(i, j) - (i == j ? 1 : 0);
            if (u[j] != 0) zero = false;
        }
        if (zero) continue;
        // q(u) = u G u^T / 2 > 0 (definite)
        std::vector<Rat> gu(n);
        for (int j = 0; j < n; ++j) {
            Rat s = 0;
            for (int k2 = 0; k2 < n; ++k2) s += u[k2] * gr(k2, j);
            gu[j] = s;
        }
        Rat uu = 0;
        for (int j = 0; j < n; ++j) uu += u[j] * gu[j];
        assert(uu > 0);
        out = out * SquareClass(uu / 2);
        // apply the reflection about u on the right: h <- h * S,
        // S = I - 2/(uGu) * (G u^T) (u)
        Rat f = Rat(2) / uu;
        // rows of h: row_r <- row_r - f * (row_r . G u^T) * u
        for (int r = 0; r < n; ++r) {
            Rat dot = 0;
            for (int j = 0; j < n; ++j) dot += h(r, j) * gu[j];
            if (dot == 0) continue;
            Rat c = f * dot;
            for (int j = 0; j < n; ++j) h(r, j) -= c * u[j];
        }
    }
    // h must now be the identity
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (h(i, j) != (i == j ? 1 : 0))
                throw std::logic_error("reflection factorization failed");
    return out;
}

SigmaCertificate sigma_trivial(const Lattice& l) {
    Int d = l.det();
    if (d == 1)
        return {true, "det L = 1: unimodular genus, single spinor genus"};
    if (d % 2 != 0 && l.is_even())
        return {true, "L_p unimodular at every p (det odd, L even): T empty"};
    return {false, "no triviality criterion applies; spinor genera may be several"};
}

SigmaCertificate inertial_sigma_trivial(const Lattice& l, const Sublattice& a) {
    if (l.det() != 1) return {false, "ambient lattice is not unimodular"};
    if (!is_saturated(a)) return {false, "A is not saturated"};
    int m = l.rank();
    Sublattice b = orthogonal_complement(a);
    Lattice bl = b.lattice();
    FiniteQuadraticModule res_a = residue(a.lattice());
    int g = res_a.ngens();
    int bound = bl.is_even() ? m - 2 : m - 3;
    if (a.rank() + g <= bound)
        return {true, "rank A + g(res A) = " + std::to_string(a.rank() + g) +
                          " <= " + std::to_string(bound) + ": inertial genus of B is a single spinor genus"};
    return {false, "rank/generator inequality fails; not certified"};
}

std::vector<JordanBlock> genus_symbol_odd(const Lattice& l, const Int& p) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("genus_symbol_odd needs an odd prime");
    int n = l.rank();
    RatMat w(l.gram);
    // diagonalize over Z_p: pivot on minimal-valuation entries
    auto val = [&](const Rat& x) -> long {
        if (x == 0) return LONG_MAX;
        return valuation(x.get_num(), p) - valuation(x.get_den(), p);
    };
    std::vector<Rat> diag;
    std::vector<int> alive(n);
    for (int i = 0; i < n; ++i) alive[i] = i;
    RatMat m = w;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    int start = 0;
    while (start < n) {
        // find min valuation in the trailing block
        long best = LONG_MAX;
        int bi = -1, bj = -1;
        for (int i = start; i < n; ++i)
            for (int j = start; j < n; ++j) {
                long v = val(m(i, j));
                if (v < best) { best = v; bi = i; bj = j; }
            }
        assert(bi >= 0);
        if (bi != bj) {
            long vd = std::min(val(m(bi, bi)), val(m(bj, bj)));
            if (vd > best) {
                // add row/col bj to bi to surface a diagonal unit (p odd)
                for (int j2 = 0; j2 < n; ++j2) m(bi, j2) += m(bj, j2);
                for (int i2 = 0; i2 < n; ++i2) m(i2, bi) += m(i2, bj);
            } else {
                bi = (val(m(bi, bi)) <= val(m(bj, bj))) ? bi : bj;
            }
        }
        // move pivot to start
        if (bi != start) {
            for (int j2 = 0; j2 < n; ++j2) std::swap(m(start, j2), m(bi, j2));
            for (int i2 = 0; i2 < n; ++i2) std::swap(m(i2, start), m(i2, bi));
        }
        // clear row/column
        for (int i2 = start + 1; i2 < n; ++i2) {
            if (m(i2, start) == 0) continue;
            Rat f = m(i2, start) / m(start, start);
            for (int j2 = 0; j2 < n; ++j2) m(i2, j2) -= f * m(start, j2);
            for (int j2 = 0; j2 < n; ++j2) m(j2, i2) -= f * m(j2, start);
        }
        diag.push_back(m(start, start));
        ++start;
    }
    std::map<long, std::pair<int, Int>> blocks;  // scale -> (rank, unit product)
    for (const Rat& dgl : diag) {
        long v = val(dgl);
        // unit part
        Int num = dgl.get_num(), den = dgl.get_den();
        Int rest;
        mpz_remove(rest.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t());
        num = rest;
        mpz_remove(rest.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
        den = rest;
        Int unit = num * den;  // same square class as num/den
        auto& blk = blocks.emplace(v, std::make_pair(0, Int(1))).first->second;
        blk.first += 1;
        blk.second *= unit;
    }
    std::vector<JordanBlock> out;
    for (auto& [scale, rk] : blocks) {
        JordanBlock b;
        b.scale_exp = scale;
        b.rank = rk.first;
        b.det_class = kronecker(rk.second, p);
        out.push_back(b);
    }
    return out;
}

bool same_genus_odd(const Lattice& a, const Lattice& b, const Int& p) {
    return genus_symbol_odd(a, p) == genus_symbol_odd(b, p);
}

namespace {

using nlohmann::json;

json int_to_json(const Int& v) {
    if (v >= -Int("9007199254740992") && v <= Int("9007199254740992"))
        return json(to_long(v));
    return json(v.get_str());
}

Int json_to_int(const json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    if (j.is_number_integer()) return Int(static_cast<long>(j.get<int64_t>()));
    throw std::invalid_argument("expected integer or decimal string");
}

} // namespace

void GenusCatalog::save(const std::string& path) const {
    json top;
    top["rank"] = rank;
    top["det"] = int_to_json(det);
    top["parity"] = even ? "even" : "odd";
    top["primes_used"] = primes_used;
    top["total_mass_num"] = int_to_json(total_mass.get_num());
    top["total_mass_den"] = int_to_json(total_mass.get_den());
    json arr = json::array();
    for (int i = 0; i < classes(); ++i) {
        json c;
        c["label"] = reps[i].label;
        json g = json::array();
        for (const Int& e : reps[i].gram.a) g.push_back(int_to_json(e));
        c["gram"] = g;
        c["aut_order"] = aut_orders[i].get_str();
        c["mass_num"] = int_to_json(masses[i].get_num());
        c["mass_den"] = int_to_json(masses[i].get_den());
        arr.push_back(c);
    }
    top["classes"] = arr;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << top.dump(1) << "\n";
}

GenusCatalog GenusCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json top;
    in >> top;
    GenusCatalog cat;
    cat.rank = top.at("rank").get<int>();
    cat.det = json_to_int(top.at("det"));
    cat.even = top.at("parity").get<std::string>() == "even";
    for (const auto& p : top.at("primes_used")) cat.primes_used.push_back(p.get<int64_t>());
    for (const auto& c : top.at("classes")) {
        int n = cat.rank;
        std::vector<Int> entries;
        for (const auto& e : c.at("gram")) entries.push_back(json_to_int(e));
        IntMat g(n, n, std::move(entries));
        cat.reps.push_back(Lattice(std::move(g), c.value("label", std::string())));
        cat.aut_orders.push_back(Int(c.at("aut_order").get<std::string>()));
        Rat m(json_to_int(c.at("mass_num")), json_to_int(c.at("mass_den")));
        m.canonicalize();
        cat.masses.push_back(m);
    }
    cat.total_mass = Rat(json_to_int(top.at("total_mass_num")), json_to_int(top.at("total_mass_den")));
    cat.total_mass.canonicalize();
    return cat;
}

namespace {

// pair count of the short-vector domain used by an isometry search against
// this lattice; gauges whether per-neighbor confirmation is affordable
int64_t confirm_domain_pairs(const Lattice& l) {
    LllResult red = lll_fast(l);
    Int md = 0;
    for (int i = 0; i < red.reduced.rank(); ++i) md = std::max(md, red.reduced.gram(i, i));
    ShortVectorList sv = short_vectors(red.reduced, md);
    return static_cast<int64_t>(sv.vectors.size());
}

} // namespace

GenusCatalog enumerate_genus(const Lattice& l, int64_t p, const GenusOptions& opt) {
    check_prime_for(l, p);
    auto say = [&](const std::string& s) {
        if (opt.progress) opt.progress(s);
    };

    GenusCatalog cat;
    cat.rank = l.rank();
    cat.det = l.det();
    cat.even = l.is_even();
    cat.primes_used.push_back(p);

    struct ClassInfo {
        Fingerprint fp;      // cheap: theta to 3, roots, no shells
        int64_t domain_pairs;
        bool explored_full = false;
        std::vector<int64_t> explored_sampled_at;
    };
    std::vector<ClassInfo> info;

    auto add_class = [&](const Lattice& rep, const Fingerprint& fp) {
        if (cat.classes() >= opt.max_classes)
            throw std::runtime_error("enumerate_genus: class cap exceeded");
        std::string label = l.label.empty() ? "class" : l.label;
        label += "#" + std::to_string(cat.classes());
        Lattice stored = Lattice::unchecked(rep.gram, cat.classes() == 0 && !l.label.empty()
                                                          ? l.label
                                                          : label);
        cat.reps.push_back(stored);
        AutGroup aut = automorphisms(stored);
        cat.aut_orders.push_back(aut.order);
        cat.masses.push_back(Rat(Int(1), aut.order));
        info.push_back({fp, confirm_domain_pairs(stored), false, {}});
        say("enumerate_genus: class " + std::to_string(cat.classes() - 1) + " |O| = " +
            aut.order.get_str());
    };

    Fingerprint f0 = fingerprint(l, 3, false);
    add_class(l, f0);

    // classify a neighbor against the current catalog; append when new
    auto classify_neighbor = [&](const Lattice& nb) {
        Fingerprint f = fingerprint(nb, 3, false);
        std::vector<int> matches;
        for (int i = 0; i < cat.classes(); ++i)
            if (info[i].fp == f) matches.push_back(i);
        if (matches.empty()) {
            add_class(nb, f);
            return cat.classes() - 1;
        }
        if (matches.size() == 1 && info[matches[0]].domain_pairs > opt.confirm_domain_limit)
            return matches[0];  // fingerprint decides; closure backed by the second prime
        for (int i : matches)
            if (info[i].domain_pairs <= opt.confirm_domain_limit && is_isometric(nb, cat.reps[i]))
                return i;
        // matched fingerprints but no isometry: genuinely new class
        add_class(nb, f);
        return cat.classes() - 1;
    };

    bool sampled_anywhere = false;
    std::vector<int64_t> primes{p};
    for (size_t pass = 0; pass < primes.size(); ++pass) {
        int64_t pp = primes[pass];
        bool progress_made = true;
        while (progress_made) {
            progress_made = false;
            for (int c = 0; c < cat.classes(); ++c) {
                bool need = pass == 0 ? !info[c].explored_full
                                      : std::find(info[c].explored_sampled_at.begin(),
                                                  info[c].explored_sampled_at.end(),
                                                  pp) == info[c].explored_sampled_at.end();
                if (!need) continue;
                const Lattice rep = cat.reps[c];
                Int nlines = count_isotropic_lines(cat.rank, cat.det, Int(pp));
                int before = cat.classes();
                if (nlines <= Int(static_cast<long>(opt.full_enumeration_limit)) && pass == 0) {
                    for_each_isotropic_line(rep, pp, 0, line_candidate_count(cat.rank, pp),
                                            [&](const IsotropicLine& li) {
                                                classify_neighbor(neighbor(rep, li).lat);
                                            });
                    info[c].explored_full = true;
                } else {
                    sampled_anywhere = true;
                    auto lines = sample_isotropic_lines(rep, pp, opt.sample_count,
                                                        opt.seed + 977 * c + 31 * pass);
                    for (const auto& li : lines) classify_neighbor(neighbor(rep, li).lat);
                    info[c].explored_sampled_at.push_back(pp);
                    if (pass == 0) info[c].explored_full = true;  // sampled in place of full
                }
                if (cat.classes() != before) progress_made = true;
                say("enumerate_genus: explored class " + std::to_string(c) + " at p=" +
                    std::to_string(pp) + ", classes now " + std::to_string(cat.classes()));
            }
        }
        // completeness re-pass at a second prime when sampling was used
        if (pass == 0 && sampled_anywhere) {
            int64_t p2 = pp + 1;
            while (true) {
                while (!is_prime(Int(p2))) ++p2;
                if (p2 != pp && cat.det % p2 != 0 && (p2 != 2)) break;
                ++p2;
            }
            primes.push_back(p2);
            cat.primes_used.push_back(p2);
        }
    }

    cat.total_mass = 0;
    for (const Rat& m : cat.masses) cat.total_mass += m;
    return cat;
}

} // namespace kneser
