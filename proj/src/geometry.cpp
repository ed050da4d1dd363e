#include "kneser/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace kneser {

std::map<int64_t, int64_t> ShortVectorList::shell_sizes() const {
    std::map<int64_t, int64_t> out;
    for (const auto& e : vectors) out[e.norm]++;
    return out;
}

namespace {

// LLL working state on a Gram matrix, exact rationals.
struct GramLll {
    int n;
    RatMat w;        // current gram
    IntMat t;        // transform
    std::vector<std::vector<Rat>> mu;
    std::vector<Rat> bstar;

    explicit GramLll(const IntMat& gram)
        : n(gram.rows), w(RatMat(gram)), t(IntMat::identity(gram.rows)),
          mu(gram.rows, std::vector<Rat>(gram.rows)), bstar(gram.rows) {}

    // recompute GSO data for row k from rows < k
    void gso_row(int k) {
        for (int j = 0; j < k; ++j) {
            Rat v = w(k, j);
            for (int i = 0; i < j; ++i) v -= mu[j][i] * mu[k][i] * bstar[i];
            mu[k][j] = v / bstar[j];
        }
        Rat b = w(k, k);
        for (int j = 0; j < k; ++j) b -= mu[k][j] * mu[k][j] * bstar[j];
        bstar[k] = b;
    }

    void row_op(int k, int l, const Int& q) {  // row_k -= q * row_l
        if (q == 0) return;
        for (int j = 0; j < n; ++j) t(k, j) -= q * t(l, j);
        for (int j = 0; j < n; ++j) w(k, j) -= Rat(q) * w(l, j);
        for (int i = 0; i < n; ++i) w(i, k) -= Rat(q) * w(i, l);
    }

    void swap_rows(int k) {  // swap k-1, k
        for (int j = 0; j < n; ++j) std::swap(t(k - 1, j), t(k, j));
        for (int j = 0; j < n; ++j) std::swap(w(k - 1, j), w(k, j));
        for (int i = 0; i < n; ++i) std::swap(w(i, k - 1), w(i, k));
    }

    void reduce_entry(int k, int l) {
        Rat m = mu[k][l];
        if (m * 2 > 1 || m * 2 < -1) {
            // nearest integer
            Rat half = m + Rat(1, 2);
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), half.get_num().get_mpz_t(), half.get_den().get_mpz_t());
            row_op(k, l, q);
            for (int j = 0; j < l; ++j) mu[k][j] -= Rat(q) * mu[l][j];
            mu[k][l] -= Rat(q);
        }
    }

    void run(const Rat& delta) {
        if (n <= 1) return;
        for (int i = 0; i < n; ++i) gso_row(i);
        int k = 1;
        while (k < n) {
            reduce_entry(k, k - 1);
            if (bstar[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
                swap_rows(k);
                for (int i = k - 1; i < n; ++i) gso_row(i);
                k = std::max(k - 1, 1);
            } else {
                for (int l = k - 2; l >= 0; --l) reduce_entry(k, l);
                ++k;
            }
        }
    }
};

// Floating-point LLL with integer transform; throws on numeric trouble.
struct FastLll {
    int n;
    std::vector<std::vector<double>> w;
    IntMat t;
    std::vector<std::vector<double>> mu;
    std::vector<double> bstar;
    long ops = 0;

    explicit FastLll(const IntMat& gram) : n(gram.rows), t(IntMat::identity(gram.rows)) {
        w.assign(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w[i][j] = gram(i, j).get_d();
        mu.assign(n, std::vector<double>(n, 0.0));
        bstar.assign(n, 0.0);
    }

    void gso_row(int k) {
        for (int j = 0; j < k; ++j) {
            double v = w[k][j];
            for (int i = 0; i < j; ++i) v -= mu[j][i] * mu[k][i] * bstar[i];
            mu[k][j] = v / bstar[j];
        }
        double b = w[k][k];
        for (int j = 0; j < k; ++j) b -= mu[k][j] * mu[k][j] * bstar[j];
        bstar[k] = b;
        if (!(bstar[k] > 0) || !std::isfinite(bstar[k]))
            throw std::runtime_error("fast lll: degenerate GSO");
    }

    void row_op(int k, int l, long q) {
        if (q == 0) return;
        Int qq(q);
        for (int j = 0; j < n; ++j) t(k, j) -= qq * t(l, j);
        for (int j = 0; j < n; ++j) w[k][j] -= double(q) * w[l][j];
        for (int i = 0; i < n; ++i) w[i][k] -= double(q) * w[i][l];
    }

    void reduce_entry(int k, int l) {
        double m = mu[k][l];
        if (std::fabs(m) > 0.5 + 1e-12) {
            double r = std::nearbyint(m);
            if (std::fabs(r) > 9e15) throw std::runtime_error("fast lll: huge multiplier");
            row_op(k, l, static_cast<long>(r));
            for (int j = 0; j < l; ++j) mu[k][j] -= r * mu[l][j];
            mu[k][l] -= r;
        }
    }

    void run(double delta) {
        if (n <= 1) return;
        for (int i = 0; i < n; ++i) gso_row(i);
        int k = 1;
        long limit = 100000L + 2000L * n * n;
        while (k < n) {
            if (++ops > limit) throw std::runtime_error("fast lll: iteration limit");
            reduce_entry(k, k - 1);
            if (bstar[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
                for (int j = 0; j < n; ++j) std::swap(t(k - 1, j), t(k, j));
                for (int j = 0; j < n; ++j) std::swap(w[k - 1][j], w[k][j]);
                for (int i = 0; i < n; ++i) std::swap(w[i][k - 1], w[i][k]);
                for (int i = k - 1; i < n; ++i) gso_row(i);
                k = std::max(k - 1, 1);
            } else {
                for (int l = k - 2; l >= 0; --l) reduce_entry(k, l);
                ++k;
            }
        }
    }
};

} // namespace

LllResult lll(const Lattice& l, const Rat& delta) {
    if (delta <= Rat(1, 4) || delta >= 1) throw std::invalid_argument("lll: delta must be in (1/4,1)");
    GramLll st(l.gram);
    st.run(delta);
    IntMat reduced = st.t * l.gram * st.t.transpose();
    return LllResult{Lattice(reduced, l.label), std::move(st.t)};
}

LllResult lll_fast(const Lattice& l) {
    try {
        FastLll st(l.gram);
        st.run(0.98);
        IntMat reduced = st.t * l.gram * st.t.transpose();
        // sanity: diagonal positive
        for (int i = 0; i < reduced.rows; ++i)
            if (reduced(i, i) <= 0) throw std::runtime_error("fast lll: bad output");
        return LllResult{Lattice(std::move(reduced), l.label), std::move(st.t)};
    } catch (const std::runtime_error&) {
        return lll(l);
    }
}

ShortVectorList short_vectors(const Lattice& l, const Int& bound) {
    if (bound < 1) throw std::invalid_argument("short_vectors: bound must be >= 1");
    int n = l.rank();
    ShortVectorList out;
    out.bound = bound;
    if (n == 0) return out;

    LllResult red = lll_fast(l);
    const IntMat& w = red.reduced.gram;

    // int64 copies; desk-scale guard
    std::vector<std::vector<int64_t>> wi(n, std::vector<int64_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) wi[i][j] = to_long(w(i, j));
    int64_t c = to_long(bound);

    // Cholesky-style quadratic completion: norm = sum_i d[i] (x_i + sum_{j>i} m[i][j] x_j)^2
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q[i][j] = double(wi[i][j]);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for (int k = i + 1; k < n; ++k)
            for (int j = k; j < n; ++j) q[k][j] -= q[k][i] * q[i][j];
    }

    const double margin = 0.75;
    std::vector<int64_t> x(n, 0);
    std::vector<double> partial(n + 1, 0.0);  // consumed bound above level i
    std::vector<double> center(n, 0.0);

    std::vector<int64_t> orig(n);

    // enumerate x != 0 with the highest nonzero coordinate positive
    long i = n - 1;
    bool descend = true;
    double cb = double(c) + margin;
    std::vector<int64_t> ub(n, 0);
    // transform rows as int64 for the coordinate map back
    std::vector<std::vector<int64_t>> tr(n, std::vector<int64_t>(n));
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j) tr[a][j] = to_long(red.transform(a, j));
    while (i < n) {
        if (descend) {
            descend = false;
            double ci = 0.0;
            for (int j = int(i) + 1; j < n; ++j) ci += q[i][j] * double(x[j]);
            center[i] = ci;
            double rem = cb - partial[i + 1];
            if (rem < 0) rem = 0;
            double r = std::sqrt(rem / q[i][i]);
            int64_t lo = int64_t(std::ceil(-r - ci - 1e-9));
            int64_t hi = int64_t(std::floor(r - ci + 1e-9));
            bool all_zero_above = true;
            for (int j = int(i) + 1; j < n; ++j)
                if (x[j] != 0) { all_zero_above = false; break; }
            if (all_zero_above && lo < 0) lo = 0;  // half-space: top nonzero coordinate positive
            x[i] = lo - 1;
            ub[i] = hi;
        }
        ++x[i];
        if (x[i] > ub[i]) {
            x[i] = 0;
            ++i;
            continue;
        }
        double d = double(x[i]) + center[i];
        partial[i] = partial[i + 1] + q[i][i] * d * d;
        if (partial[i] > cb + 1e-9) continue;  // keep scanning this level
        if (i > 0) {
            --i;
            descend = true;
            continue;
        }
        // complete vector: exact norm check in the reduced basis
        bool zero = true;
        for (int j = 0; j < n; ++j)
            if (x[j] != 0) { zero = false; break; }
        if (zero) continue;
        int64_t norm = 0;
        for (int a = 0; a < n; ++a) {
            if (x[a] == 0) continue;
            for (int b = 0; b < n; ++b) norm += x[a] * wi[a][b] * x[b];
        }
        if (norm <= 0 || norm > c) continue;
        // back to original coordinates, sign-normalize
        for (int j = 0; j < n; ++j) orig[j] = 0;
        for (int a = 0; a < n; ++a) {
            if (x[a] == 0) continue;
            for (int j = 0; j < n; ++j) orig[j] += x[a] * tr[a][j];
        }
        int sgn = 0;
        for (int j = 0; j < n; ++j)
            if (orig[j] != 0) { sgn = orig[j] > 0 ? 1 : -1; break; }
        ShortVectorList::Entry e;
        e.x.resize(n);
        for (int j = 0; j < n; ++j) {
            int64_t v = sgn * orig[j];
            if (v > INT32_MAX || v < INT32_MIN) throw std::overflow_error("short vector coordinate overflow");
            e.x[j] = static_cast<int32_t>(v);
        }
        e.norm = norm;
        out.vectors.push_back(std::move(e));
    }

    std::sort(out.vectors.begin(), out.vectors.end(),
              [](const ShortVectorList::Entry& a, const ShortVectorList::Entry& b) {
                  return a.x < b.x;
              });
    return out;
}

std::vector<Int> theta_prefix(const Lattice& l, long max_norm) {
    std::vector<Int> r(max_norm + 1, 0);
    r[0] = 1;
    if (max_norm >= 1 && l.rank() > 0) {
        ShortVectorList sv = short_vectors(l, Int(max_norm));
        for (const auto& e : sv.vectors)
            if (e.norm <= max_norm) r[e.norm] += 2;
    }
    return r;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

RootDecomposition::Component type_component(int rank, long roots) {
    RootDecomposition::Component c;
    c.rank = rank;
    c.roots = roots;
    if (roots == long(rank) * (rank + 1)) { c.type = 'A'; return c; }
    if (rank >= 4 && roots == 2L * rank * (rank - 1)) { c.type = 'D'; return c; }
    if ((rank == 6 && roots == 72) || (rank == 7 && roots == 126) || (rank == 8 && roots == 240)) {
        c.type = 'E';
        return c;
    }
    throw std::logic_error("unrecognized root system component (rank " + std::to_string(rank) +
                           ", " + std::to_string(roots) + " roots)");
}

} // namespace

RootDecomposition root_decomposition(const Lattice& l) {
    RootDecomposition out;
    if (l.rank() == 0) return out;
    ShortVectorList sv = short_vectors(l, 2);
    std::vector<const ShortVectorList::Entry*> roots;
    for (const auto& e : sv.vectors)
        if (e.norm == 2) roots.push_back(&e);
    int m = static_cast<int>(roots.size());
    out.total_roots = 2L * m;
    if (m == 0) return out;

    int n = l.rank();
    std::vector<std::vector<int64_t>> gv(m, std::vector<int64_t>(n, 0));
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < n; ++a) {
            if (roots[i]->x[a] == 0) continue;
            for (int j = 0; j < n; ++j) gv[i][j] += int64_t(roots[i]->x[a]) * to_long(l.gram(a, j));
        }
    UnionFind uf(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            int64_t d = 0;
            for (int a = 0; a < n; ++a) d += int64_t(roots[i]->x[a]) * gv[j][a];
            if (d != 0) uf.unite(i, j);
        }
    std::map<int, std::vector<int>> comps;
    for (int i = 0; i < m; ++i) comps[uf.find(i)].push_back(i);
    for (auto& [root, members] : comps) {
        IntMat mat(static_cast<int>(members.size()), n);
        for (size_t r = 0; r < members.size(); ++r)
            for (int j = 0; j < n; ++j) mat(static_cast<int>(r), j) = roots[members[r]]->x[j];
        int rank = hnf(mat).rank;
        out.components.push_back(type_component(rank, 2L * members.size()));
    }
    std::sort(out.components.begin(), out.components.end());
    return out;
}

std::string RootDecomposition::to_string() const {
    if (components.empty()) return "(empty)";
    std::ostringstream os;
    for (size_t i = 0; i < components.size(); ++i) {
        if (i) os << "+";
        os << components[i].type << components[i].rank;
    }
    return os.str();
}

bool is_lll_reduced(const IntMat& gram, const Rat& delta) {
    int n = gram.rows;
    if (n <= 1) return true;
    RatMat w(gram);
    std::vector<std::vector<Rat>> mu(n, std::vector<Rat>(n));
    std::vector<Rat> bstar(n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            Rat v = w(k, j);
            for (int i = 0; i < j; ++i) v -= mu[j][i] * mu[k][i] * bstar[i];
            mu[k][j] = v / bstar[j];
            if (mu[k][j] * 2 > 1 || mu[k][j] * 2 < -1) return false;
        }
        Rat b = w(k, k);
        for (int j = 0; j < k; ++j) b -= mu[k][j] * mu[k][j] * bstar[j];
        bstar[k] = b;
        if (k > 0 && bstar[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) return false;
    }
    return true;
}

} // namespace kneser
