#include "kneser/glue.hpp"
#include "kneser/isometry.hpp"

#include <algorithm>
#include <cassert>

namespace kneser {

std::vector<Int> AntiIsometry::apply(const FiniteQuadraticModule& target,
                                     const std::vector<Int>& x) const {
    std::vector<Int> out(target.ngens(), 0);
    for (int i = 0; i < map.rows; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < map.cols; ++j) out[j] += x[i] * map(i, j);
    }
    return target.reduce(std::move(out));
}

namespace {
FiniteQuadraticModule::Elt unit_elt(const FiniteQuadraticModule& m, int i) {
    auto e = m.zero();
    e[i] = 1;
    return e;
}
} // namespace

std::vector<AntiIsometry> anti_isometries(const Lattice& a, const Lattice& b) {
    FiniteQuadraticModule ra = residue(a), rb = residue(b);
    std::vector<AntiIsometry> out;
    if (ra.order() != rb.order()) return out;
    if (ra.order() > 10000) throw std::length_error("residue too large for anti-isometry search");
    if (ra.orders != rb.orders) return out;  // divisibility chains match iff isomorphic

    int g = ra.ngens();
    if (g == 0) {
        AntiIsometry trivial;
        trivial.map = IntMat(0, 0);
        trivial.quadratic = true;
        out.push_back(trivial);
        return out;
    }
    auto elements = rb.elements();
    bool both_even = ra.has_quadratic && rb.has_quadratic;

    std::vector<std::vector<Int>> chosen(g);
    std::function<void(int)> rec = [&](int i) {
        if (i == g) {
            AntiIsometry s;
            s.source_orders = ra.orders;
            s.target_orders = rb.orders;
            s.map = IntMat(g, g);
            for (int r = 0; r < g; ++r)
                for (int c = 0; c < g; ++c) s.map(r, c) = chosen[r][c];
            // the image must generate all of res B (isomorphism, not just a hom)
            // additive closure of the images
            std::map<std::vector<Int>, bool> span;
            std::vector<std::vector<Int>> frontier{rb.zero()};
            span[rb.zero()] = true;
            for (size_t head = 0; head < frontier.size(); ++head)
                for (int r = 0; r < g; ++r) {
                    auto nxt = rb.add(frontier[head], chosen[r]);
                    if (!span.count(nxt)) {
                        span[nxt] = true;
                        frontier.push_back(nxt);
                    }
                }
            if (Int(static_cast<long>(span.size())) != rb.order()) return;
            if (both_even) {
                s.quadratic = true;
                for (int r = 0; r < g && s.quadratic; ++r)
                    if (frac_mod1(rb.q(chosen[r]) + ra.q(unit_elt(ra, r))) != 0) s.quadratic = false;
            }
            out.push_back(std::move(s));
            return;
        }
        for (const auto& t : elements) {
            // order condition: d_i * t = 0
            if (rb.scale(ra.orders[i], t) != rb.zero()) continue;
            // anti-isometry on pairs with already chosen images
            if (frac_mod1(rb.b(t, t) + ra.bilinear(i, i)) != 0) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j)
                if (frac_mod1(rb.b(t, chosen[j]) + ra.bilinear(i, j)) != 0) ok = false;
            if (!ok) continue;
            chosen[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

GlueResult glue(const Lattice& a, const Lattice& b, const AntiIsometry& sigma) {
    FiniteQuadraticModule ra = residue(a), rb = residue(b);
    if (sigma.source_orders != ra.orders || sigma.target_orders != rb.orders)
        throw std::invalid_argument("glue: sigma does not match the residues");
    int na = a.rank(), nb = b.rank(), n = na + nb;
    Lattice ab = direct_sum(a, b);

    int g = ra.ngens();
    RatMat rows(n + g, n);
    for (int i = 0; i < n; ++i) rows(i, i) = 1;
    for (int t = 0; t < g; ++t) {
        auto la = ra.lift(unit_elt(ra, t));
        auto lb = rb.lift(sigma.apply(rb, unit_elt(ra, t)));
        for (int j = 0; j < na; ++j) rows(n + t, j) = la[j];
        for (int j = 0; j < nb; ++j) rows(n + t, na + j) = lb[j];
    }
    Int den = rows.denominator();
    IntMat scaled(n + g, n);
    for (int i = 0; i < n + g; ++i)
        for (int j = 0; j < n; ++j) {
            Rat s = rows(i, j) * Rat(den);
            scaled(i, j) = s.get_num();
        }
    HnfResult h = hnf(scaled);
    if (h.rank != n) throw std::logic_error("glue basis rank-deficient");
    RatMat basis(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis(i, j) = Rat(h.hermite(i, j), den);

    IntMat num(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) num(i, j) = h.hermite(i, j);
    IntMat big = num * ab.gram * num.transpose();
    IntMat gram(n, n);
    Int dd = den * den;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (big(i, j) % dd != 0) throw std::logic_error("glue produced a non-integral lattice");
            gram(i, j) = big(i, j) / dd;
        }
    GlueResult res;
    res.glued = Lattice(gram, "");
    if (res.glued.det() != 1) throw std::logic_error("glue output is not unimodular");
    res.basis = basis;
    RatMat binv = inverse(basis);
    // embeddings: rows of [I|0] (resp [0|I]) in glued coordinates
    auto embed = [&](int offset, int count) {
        IntMat e(count, n);
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < n; ++j) {
                Rat s = binv(offset + i, j);
                if (s.get_den() != 1) throw std::logic_error("glue embedding not integral");
                e(i, j) = s.get_num();
            }
        return e;
    };
    res.embed_a = embed(0, na);
    res.embed_b = embed(na, nb);
    return res;
}

AntiIsometry glue_map(const Lattice& a, const Lattice& b, const Lattice& u, const IntMat& ea,
                      const IntMat& eb) {
    int m = u.rank();
    if (ea.rows != a.rank() || eb.rows != b.rank() || ea.rows + eb.rows != m)
        throw std::invalid_argument("glue_map: rank mismatch");
    FiniteQuadraticModule ra = residue(a), rb = residue(b);

    IntMat s(m, m);
    for (int i = 0; i < ea.rows; ++i)
        for (int j = 0; j < m; ++j) s(i, j) = ea(i, j);
    for (int i = 0; i < eb.rows; ++i)
        for (int j = 0; j < m; ++j) s(ea.rows + i, j) = eb(i, j);

    // quotient U / (A + B) via SNF; generators are rows of right^{-1}
    SmithForm sf = snf(s);
    RatMat qinv = inverse(RatMat(sf.right));
    RatMat sinv = inverse(RatMat(s));

    std::vector<std::vector<Int>> qa, qb;  // residue coordinates of quotient generators
    std::vector<Int> qorders;
    for (int i = 0; i < m; ++i) {
        if (sf.diagonal[i] == 1) continue;
        // generator: row i of right^{-1} ... in U coordinates the quotient
        // Z^m / rowspace(S) = Z^m / rowspace(left^{-1} D right^{-1}) and the
        // class map is x -> x * right; generators lift to rows of right^{-1}
        std::vector<Rat> gen(m);
        for (int j = 0; j < m; ++j) gen[j] = qinv(i, j);
        // decompose into A# and B# parts: [alpha | beta] = gen * S^{-1}
        std::vector<Rat> parts = gen * sinv;
        std::vector<Rat> alpha(parts.begin(), parts.begin() + a.rank());
        std::vector<Rat> beta(parts.begin() + a.rank(), parts.end());
        qa.push_back(ra.discretize(alpha));
        qb.push_back(rb.discretize(beta));
        qorders.push_back(sf.diagonal[i]);
    }

    int g = ra.ngens();
    AntiIsometry out;
    out.source_orders = ra.orders;
    out.target_orders = rb.orders;
    out.map = IntMat(g, rb.ngens());
    int t = static_cast<int>(qa.size());
    // solve sum x_j qa_j = e_i in res A, then sigma(g_i) = sum x_j qb_j
    IntMat sys(t + g, g);
    for (int j = 0; j < t; ++j)
        for (int c = 0; c < g; ++c) sys(j, c) = qa[j][c];
    for (int r = 0; r < g; ++r) sys(t + r, r) = ra.orders[r];
    for (int i = 0; i < g; ++i) {
        std::vector<Int> target(g, 0);
        target[i] = 1;
        auto sol = solve_left(sys, target);
        if (!sol) throw std::logic_error("glue_map: quotient does not surject onto res A");
        std::vector<Int> img(rb.ngens(), 0);
        for (int j = 0; j < t; ++j)
            for (int c = 0; c < rb.ngens(); ++c) img[c] += (*sol)[j] * qb[j][c];
        img = rb.reduce(std::move(img));
        for (int c = 0; c < rb.ngens(); ++c) out.map(i, c) = img[c];
    }
    // verify the anti-isometry conditions on generators
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            auto si = out.apply(rb, unit_elt(ra, i));
            auto sj = out.apply(rb, unit_elt(ra, j));
            if (frac_mod1(rb.b(si, sj) + ra.bilinear(i, j)) != 0)
                throw std::logic_error("glue_map: recovered map is not an anti-isometry");
        }
    if (ra.has_quadratic && rb.has_quadratic) {
        out.quadratic = true;
        for (int i = 0; i < g && out.quadratic; ++i) {
            auto si = out.apply(rb, unit_elt(ra, i));
            if (frac_mod1(rb.q(si) + ra.q(unit_elt(ra, i))) != 0) out.quadratic = false;
        }
    }
    return out;
}

GluePair functor_h(const Lattice& a, const EmbeddedPair& x) {
    Sublattice img(x.u, x.e);
    if (!is_saturated(img)) throw std::invalid_argument("functor_h: e(A) is not saturated");
    Sublattice b = orthogonal_complement(img);
    Lattice bl = b.lattice();
    GluePair out;
    out.b = bl;
    out.sigma = glue_map(a, bl, x.u, x.e, b.basis);
    return out;
}

EmbeddedPair functor_g(const Lattice& a, const GluePair& y) {
    GlueResult res = glue(a, y.b, y.sigma);
    return EmbeddedPair{res.glued, res.embed_a};
}

namespace {

struct EmbedEngine {
    int k = 0, m = 0;
    std::vector<int> order;                      // source level -> A-basis index
    std::vector<std::vector<int64_t>> ta;        // A gram
    const Lattice* u = nullptr;
    ShortVectorList sv;
    int pairs = 0;
    std::vector<int32_t> coords;                 // pair x m
    std::vector<std::vector<int64_t>> gv;        // pair x m
    std::vector<int64_t> norms;
    std::vector<std::vector<std::vector<int32_t>>> lists;
    std::vector<int32_t> placed;
    // incremental F_q elimination for the saturation primes
    struct Elim {
        int64_t q;
        std::vector<std::vector<int16_t>> rows;  // reduced rows, with pivots
        std::vector<int> pivots;
    };
    std::vector<Elim> elims;
    uint64_t count = 0;
    int64_t cap = -1;                            // emit cap; <0 = count only
    std::vector<IntMat>* out = nullptr;

    int64_t prod(int32_t si, int32_t sj) const {
        int i = si >> 1, j = sj >> 1;
        int64_t v = 0;
        for (int a2 = 0; a2 < m; ++a2)
            v += int64_t(coords[static_cast<size_t>(i) * m + a2]) * gv[j][a2];
        return ((si ^ sj) & 1) ? -v : v;
    }

    std::vector<int32_t> vec(int32_t si) const {
        std::vector<int32_t> v(coords.begin() + static_cast<size_t>(si >> 1) * m,
                               coords.begin() + (static_cast<size_t>(si >> 1) + 1) * m);
        if (si & 1)
            for (auto& x : v) x = -x;
        return v;
    }

    // returns false (and leaves state unchanged) if the new vector drops the
    // mod-q rank, which no completion can repair
    bool elim_push(const std::vector<int32_t>& v) {
        for (auto& e : elims) {
            std::vector<int16_t> row(m);
            for (int j = 0; j < m; ++j) row[j] = static_cast<int16_t>(mod_pos(v[j], e.q));
            for (size_t r = 0; r < e.rows.size(); ++r) {
                int p2 = e.pivots[r];
                if (row[p2] == 0) continue;
                int64_t f = int64_t(row[p2]) * inv_mod(e.rows[r][p2], e.q) % e.q;
                for (int j = 0; j < m; ++j)
                    row[j] = static_cast<int16_t>(mod_pos(row[j] - f * e.rows[r][j], e.q));
            }
            int piv = -1;
            for (int j = 0; j < m; ++j)
                if (row[j] != 0) { piv = j; break; }
            if (piv < 0) {
                // roll back pushes already made on earlier primes
                for (auto& e2 : elims) {
                    if (&e2 == &e) break;
                    e2.rows.pop_back();
                    e2.pivots.pop_back();
                }
                return false;
            }
            e.rows.push_back(std::move(row));
            e.pivots.push_back(piv);
        }
        return true;
    }

    void elim_pop() {
        for (auto& e : elims) {
            e.rows.pop_back();
            e.pivots.pop_back();
        }
    }

    void leaf() {
        ++count;
        if (out) {
            if (cap >= 0 && static_cast<int64_t>(out->size()) >= cap)
                throw EmbedCapExceeded(Int(static_cast<unsigned long>(count)));
            IntMat e(k, m);
            for (int lvl = 0; lvl < k; ++lvl) {
                auto v = vec(placed[lvl]);
                for (int j = 0; j < m; ++j) e(order[lvl], j) = v[j];
            }
            out->push_back(std::move(e));
        }
    }

    void dfs(int lvl) {
        if (lvl == k) {
            leaf();
            return;
        }
        for (int32_t x : lists[lvl][lvl]) {
            auto v = vec(x);
            if (!elim_push(v)) continue;
            placed[lvl] = x;
            bool ok = true;
            for (int j = lvl + 1; j < k; ++j) {
                auto& dst = lists[lvl + 1][j];
                dst.clear();
                int64_t want = ta[order[j]][order[lvl]];
                for (int32_t c : lists[lvl][j])
                    if (prod(c, x) == want) dst.push_back(c);
                if (dst.empty()) { ok = false; break; }
            }
            if (ok) dfs(lvl + 1);
            elim_pop();
        }
    }
};

} // namespace

static Int run_embed(const Lattice& a, const Lattice& u, std::vector<IntMat>* out, int64_t cap) {
    int k = a.rank(), m = u.rank();
    if (k == 0) {
        if (out) out->push_back(IntMat(0, m));
        return 1;
    }
    if (k > m) return 0;

    EmbedEngine eng;
    eng.k = k;
    eng.m = m;
    eng.u = &u;
    eng.out = out;
    eng.cap = cap;
    eng.ta.assign(k, std::vector<int64_t>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) eng.ta[i][j] = to_long(a.gram(i, j));

    // levels by decreasing norm, ties in index order
    eng.order.resize(k);
    for (int i = 0; i < k; ++i) eng.order[i] = i;
    std::stable_sort(eng.order.begin(), eng.order.end(),
                     [&](int x, int y) { return eng.ta[x][x] > eng.ta[y][y]; });

    Int bound = 0;
    for (int i = 0; i < k; ++i) bound = std::max(bound, a.gram(i, i));
    eng.sv = short_vectors(u, bound);
    eng.pairs = static_cast<int>(eng.sv.vectors.size());
    eng.coords.resize(static_cast<size_t>(eng.pairs) * m);
    eng.norms.resize(eng.pairs);
    eng.gv.assign(eng.pairs, std::vector<int64_t>(m, 0));
    for (int i = 0; i < eng.pairs; ++i) {
        eng.norms[i] = eng.sv.vectors[i].norm;
        for (int j = 0; j < m; ++j)
            eng.coords[static_cast<size_t>(i) * m + j] = eng.sv.vectors[i].x[j];
        for (int a2 = 0; a2 < m; ++a2) {
            int64_t xa = eng.sv.vectors[i].x[a2];
            if (xa == 0) continue;
            for (int j = 0; j < m; ++j) eng.gv[i][j] += xa * to_long(u.gram(a2, j));
        }
    }

    // saturation primes: q with q^2 | det A
    Int da = a.det();
    for (int64_t q = 2; Int(q) * q <= da; ++q) {
        if (!is_prime(Int(q))) continue;
        if (da % (Int(q) * q) == 0) eng.elims.push_back({q, {}, {}});
    }

    eng.lists.assign(k + 1, std::vector<std::vector<int32_t>>(k));
    eng.placed.assign(k, -1);
    for (int lvl = 0; lvl < k; ++lvl) {
        auto& lst = eng.lists[0][lvl];
        int64_t want = eng.ta[eng.order[lvl]][eng.order[lvl]];
        for (int32_t s = 0; s < 2 * eng.pairs; ++s)
            if (eng.norms[s >> 1] == want) lst.push_back(s);
        if (lst.empty()) return 0;
    }
    eng.dfs(0);
    return Int(static_cast<unsigned long>(eng.count));
}

std::vector<IntMat> saturated_embeddings(const Lattice& a, const Lattice& u, int64_t cap) {
    std::vector<IntMat> out;
    run_embed(a, u, &out, cap);
    return out;
}

Int count_saturated_embeddings(const Lattice& a, const Lattice& u) {
    return run_embed(a, u, nullptr, -1);
}

Rat groupoid_mass(const Lattice& a, const GenusCatalog& catalog,
                  std::optional<bool> even_filter) {
    if (catalog.det != 1)
        throw std::invalid_argument("groupoid_mass: catalog is not a unimodular genus");
    Rat total = 0;
    for (int i = 0; i < catalog.classes(); ++i) {
        if (even_filter && catalog.reps[i].is_even() != *even_filter) continue;
        Int cnt = count_saturated_embeddings(a, catalog.reps[i]);
        total += Rat(cnt, catalog.aut_orders[i]);
    }
    return total;
}

int ob_orbit_count(const Lattice& b, const std::vector<AntiIsometry>& sigmas) {
    if (sigmas.empty()) return 0;
    FiniteQuadraticModule rb = residue(b);
    AutGroup aut = automorphisms(b);
    int g = rb.ngens();

    std::map<std::vector<Int>, int> index;
    auto key_of = [&](const AntiIsometry& s) {
        std::vector<Int> key;
        for (const Int& v : s.map.a) key.push_back(v);
        return key;
    };
    for (size_t i = 0; i < sigmas.size(); ++i) index[key_of(sigmas[i])] = static_cast<int>(i);

    std::vector<int> parent(sigmas.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    RatMat rbgram(b.gram);
    for (const IntMat& h : aut.generators) {
        // res h: coefficient tuple -> tuple of (lift * h)
        auto res_h = [&](const std::vector<Int>& c) {
            auto lift = rb.lift(c);
            std::vector<Rat> img(b.rank(), Rat(0));
            for (int i = 0; i < b.rank(); ++i) {
                if (lift[i] == 0) continue;
                for (int j = 0; j < b.rank(); ++j) img[j] += lift[i] * Rat(h(i, j));
            }
            return rb.discretize(img);
        };
        for (size_t i = 0; i < sigmas.size(); ++i) {
            AntiIsometry moved = sigmas[i];
            for (int r = 0; r < g; ++r) {
                std::vector<Int> row(g);
                for (int c = 0; c < g; ++c) row[c] = sigmas[i].map(r, c);
                auto img = res_h(rb.reduce(std::move(row)));
                for (int c = 0; c < g; ++c) moved.map(r, c) = img[c];
            }
            auto it = index.find(key_of(moved));
            if (it == index.end())
                throw std::logic_error("O(B) action leaves the sigma list (incomplete input)");
            int ra = find(static_cast<int>(i)), rb2 = find(it->second);
            if (ra != rb2) parent[ra] = rb2;
        }
    }
    int orbits = 0;
    for (size_t i = 0; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) ++orbits;
    return orbits;
}

} // namespace kneser
