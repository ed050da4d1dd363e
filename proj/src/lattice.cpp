#include "kneser/lattice.hpp"

#include <cassert>
#include <fstream>
#include <map>
#include <sstream>

namespace kneser {

namespace {

void check_gram(const IntMat& g) {
    if (g.rows != g.cols) throw std::invalid_argument("gram matrix is not square");
    if (!g.is_symmetric()) throw std::invalid_argument("gram matrix is not symmetric");
    // positive definite <=> all leading principal minors positive
    for (int k = 1; k <= g.rows; ++k) {
        IntMat lead(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) lead(i, j) = g(i, j);
        if (det(lead) <= 0) throw std::invalid_argument("gram matrix is not positive definite");
    }
}

} // namespace

Lattice::Lattice(IntMat g, std::string name) : gram(std::move(g)), label(std::move(name)) {
    check_gram(gram);
}

Lattice Lattice::unchecked(IntMat g, std::string name) {
    Lattice l;
    l.gram = std::move(g);
    l.label = std::move(name);
    return l;
}

Int Lattice::det() const { return kneser::det(gram); }

bool Lattice::is_even() const {
    for (int i = 0; i < gram.rows; ++i)
        if (gram(i, i) % 2 != 0) return false;
    return true;
}

Int Lattice::inner(const std::vector<Int>& x, const std::vector<Int>& y) const {
    Int s = 0;
    for (int i = 0; i < gram.rows; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < gram.cols; ++j) s += x[i] * gram(i, j) * y[j];
    }
    return s;
}

RatMat dual(const Lattice& l) { return inverse(l.gram); }

Sublattice::Sublattice(const Lattice& amb, IntMat b) : ambient(&amb), basis(std::move(b)) {
    if (basis.cols != amb.rank()) throw std::invalid_argument("sublattice basis has wrong width");
    if (basis.rows > 0) {
        SmithForm s = snf(basis);
        for (const Int& d : s.diagonal)
            if (d == 0) throw std::invalid_argument("sublattice basis rows are dependent");
    }
}

IntMat Sublattice::induced_gram() const {
    return basis * ambient->gram * basis.transpose();
}

Sublattice saturate(const Sublattice& a) {
    int k = a.rank();
    if (k == 0) return a;
    SmithForm s = snf(a.basis);
    RatMat qinv = inverse(s.right);
    IntMat out(k, a.basis.cols);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < a.basis.cols; ++j) {
            assert(qinv(i, j).get_den() == 1);
            out(i, j) = qinv(i, j).get_num();
        }
    return Sublattice(*a.ambient, std::move(out));
}

bool is_saturated(const Sublattice& a) {
    if (a.rank() == 0) return true;
    SmithForm s = snf(a.basis);
    for (const Int& d : s.diagonal)
        if (d != 1) return false;
    return true;
}

Sublattice orthogonal_complement(const Sublattice& a) {
    const Lattice& l = *a.ambient;
    int n = l.rank();
    if (a.rank() == 0) return Sublattice(l, IntMat::identity(n));
    IntMat m = l.gram * a.basis.transpose();  // n x k
    HnfResult h = hnf(m);
    IntMat out(n - h.rank, n);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = h.transform(h.rank + i, j);
    return Sublattice(l, std::move(out));
}

Lattice direct_sum(const Lattice& a, const Lattice& b) {
    IntMat g(a.rank() + b.rank(), a.rank() + b.rank());
    for (int i = 0; i < a.rank(); ++i)
        for (int j = 0; j < a.rank(); ++j) g(i, j) = a.gram(i, j);
    for (int i = 0; i < b.rank(); ++i)
        for (int j = 0; j < b.rank(); ++j) g(a.rank() + i, a.rank() + j) = b.gram(i, j);
    std::string name;
    if (!a.label.empty() && !b.label.empty()) name = a.label + "+" + b.label;
    return Lattice(std::move(g), std::move(name));
}

Int FiniteQuadraticModule::order() const {
    Int o = 1;
    for (const Int& d : orders) o *= d;
    return o;
}

FiniteQuadraticModule::Elt FiniteQuadraticModule::reduce(Elt e) const {
    for (size_t i = 0; i < e.size(); ++i) {
        mpz_fdiv_r(e[i].get_mpz_t(), e[i].get_mpz_t(), orders[i].get_mpz_t());
    }
    return e;
}

FiniteQuadraticModule::Elt FiniteQuadraticModule::add(const Elt& x, const Elt& y) const {
    Elt z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return reduce(std::move(z));
}

FiniteQuadraticModule::Elt FiniteQuadraticModule::neg(const Elt& x) const {
    Elt z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = -x[i];
    return reduce(std::move(z));
}

FiniteQuadraticModule::Elt FiniteQuadraticModule::scale(const Int& c, const Elt& x) const {
    Elt z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = c * x[i];
    return reduce(std::move(z));
}

Rat FiniteQuadraticModule::b(const Elt& x, const Elt& y) const {
    Rat s = 0;
    for (int i = 0; i < ngens(); ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < ngens(); ++j) s += Rat(x[i] * y[j]) * bilinear(i, j);
    }
    return frac_mod1(s);
}

Rat FiniteQuadraticModule::q(const Elt& x) const {
    if (!has_quadratic) throw std::logic_error("module has no quadratic form (odd lattice)");
    Rat s = 0;
    for (int i = 0; i < ngens(); ++i) {
        if (x[i] == 0) continue;
        s += Rat(x[i] * x[i]) * quadratic[i];
        for (int j = i + 1; j < ngens(); ++j) s += Rat(x[i] * x[j]) * bilinear(i, j);
    }
    return frac_mod1(s);
}

std::vector<FiniteQuadraticModule::Elt> FiniteQuadraticModule::elements(const Int& cap) const {
    if (order() > cap) throw std::length_error("residue too large to enumerate");
    std::vector<Elt> out;
    Elt cur = zero();
    size_t g = orders.size();
    while (true) {
        out.push_back(cur);
        size_t i = 0;
        while (i < g) {
            cur[i] += 1;
            if (cur[i] < orders[i]) break;
            cur[i] = 0;
            ++i;
        }
        if (i == g) break;
        if (g == 0) break;
    }
    return out;
}

std::vector<Rat> FiniteQuadraticModule::lift(const Elt& x) const {
    std::vector<Rat> out(gram.rows, Rat(0));
    for (int i = 0; i < ngens(); ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < gram.rows; ++j) out[j] += Rat(x[i]) * gen_lifts(i, j);
    }
    return out;
}

FiniteQuadraticModule::Elt FiniteQuadraticModule::discretize(const std::vector<Rat>& v) const {
    // dual coordinates c = v * gram must be integral for v in L#
    std::vector<Rat> c(gram.rows, Rat(0));
    for (int i = 0; i < gram.rows; ++i)
        for (int j = 0; j < gram.rows; ++j) c[j] += v[i] * Rat(gram(i, j));
    std::vector<Int> ci(gram.rows);
    for (int j = 0; j < gram.rows; ++j) {
        if (c[j].get_den() != 1) throw std::invalid_argument("vector is not in the dual lattice");
        ci[j] = c[j].get_num();
    }
    // apply snf right transform, keep the nontrivial components
    Elt out(kept.size());
    for (size_t t = 0; t < kept.size(); ++t) {
        Int s = 0;
        for (int j = 0; j < gram.rows; ++j) s += ci[j] * coord_map(j, kept[t]);
        out[t] = s;
    }
    return reduce(std::move(out));
}

FiniteQuadraticModule residue(const Lattice& l) {
    FiniteQuadraticModule m;
    int n = l.rank();
    m.gram = l.gram;
    SmithForm s = snf(l.gram);
    m.diag_full = s.diagonal;
    for (int i = 0; i < n; ++i)
        if (s.diagonal[i] > 1) m.kept.push_back(i);
    m.coord_map = s.right;  // dual coords row * right = SNF coords

    // generator lifts: rows kept[i] of (gram * right)^{-1}
    RatMat lifts_full = inverse(l.gram * s.right);
    int g = static_cast<int>(m.kept.size());
    m.gen_lifts = RatMat(g, n);
    m.orders.resize(g);
    for (int i = 0; i < g; ++i) {
        m.orders[i] = s.diagonal[m.kept[i]];
        for (int j = 0; j < n; ++j) m.gen_lifts(i, j) = lifts_full(m.kept[i], j);
    }

    m.bilinear = RatMat(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            Rat v = 0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    v += m.gen_lifts(i, r) * Rat(l.gram(r, c)) * m.gen_lifts(j, c);
            m.bilinear(i, j) = frac_mod1(v);
        }
    if (l.is_even()) {
        m.has_quadratic = true;
        m.quadratic.resize(g);
        for (int i = 0; i < g; ++i) {
            Rat v = 0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    v += m.gen_lifts(i, r) * Rat(l.gram(r, c)) * m.gen_lifts(i, c);
            m.quadratic[i] = frac_mod1(v / 2);
        }
    }
    return m;
}

namespace {

IntMat cartan_like(const std::vector<std::pair<int, int>>& edges, int n) {
    IntMat g(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = 2;
    for (auto [i, j] : edges) { g(i, j) = -1; g(j, i) = -1; }
    return g;
}

IntMat a_n(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return cartan_like(e, n);
}

IntMat d_n(int n) {
    if (n < 3) throw std::invalid_argument("Dn needs n >= 3");
    // chain 0-1-...-(n-2), fork (n-3)-(n-1)
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 2 < n; ++i) e.push_back({i, i + 1});
    e.push_back({n - 3, n - 1});
    return cartan_like(e, n);
}

IntMat e_n(int n) {
    // Bourbaki: chain 0-2-3-4-..., node 1 attached to 3
    std::vector<std::pair<int, int>> e = {{0, 2}, {2, 3}, {1, 3}};
    for (int i = 3; i + 1 < n; ++i) e.push_back({i, i + 1});
    return cartan_like(e, n);
}

// Dn+ = Dn with the glue vector (1/2,...,1/2); 8 | n makes it even unimodular
IntMat d_n_plus(int n) {
    if (n % 8 != 0) throw std::invalid_argument("Dn+ requires 8 | n");
    // basis rows in R^n: s = (1/2,...,1/2), e_i - e_{i+1} (i=1..n-2), e_{n-1}+e_n
    RatMat b(n, n);
    for (int j = 0; j < n; ++j) b(0, j) = Rat(1, 2);
    for (int i = 1; i <= n - 2; ++i) { b(i, i - 1) = 1; b(i, i) = -1; }
    b(n - 1, n - 2) = 1;
    b(n - 1, n - 1) = 1;
    RatMat g = b * b.transpose();
    if (!g.is_integral()) throw std::logic_error("Dn+ gram not integral");
    return g.to_int();
}

} // namespace

Lattice builtin(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty lattice name");
    if (name == "E16") return Lattice(d_n_plus(16), "E16");
    char fam = name[0];
    bool plus = name.back() == '+';
    std::string num = name.substr(1, name.size() - 1 - (plus ? 1 : 0));
    int n = 0;
    try {
        n = std::stoi(num);
    } catch (...) {
        throw std::invalid_argument("bad lattice name: " + name);
    }
    if (fam == 'Z' && !plus) {
        if (n < 0) throw std::invalid_argument("bad rank");
        return Lattice(IntMat::identity(n), name);
    }
    if (fam == 'A' && !plus && n >= 1) return Lattice(a_n(n), name);
    if (fam == 'D' && !plus && n >= 3) return Lattice(d_n(n), name);
    if (fam == 'D' && plus) return Lattice(d_n_plus(n), name);
    if (fam == 'E' && (n == 6 || n == 7 || n == 8) && !plus) return Lattice(e_n(n), name);
    throw std::invalid_argument("unknown lattice name: " + name);
}

Lattice read_lat(std::istream& in, const std::string& name) {
    std::vector<Int> nums;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) nums.emplace_back(tok);
    }
    if (nums.empty()) throw std::invalid_argument("empty lattice file");
    long n = to_long(nums[0]);
    if (n < 0 || static_cast<size_t>(n) * n + 1 != nums.size())
        throw std::invalid_argument("lattice file: expected rank line plus rank^2 entries");
    IntMat g(static_cast<int>(n), static_cast<int>(n),
             std::vector<Int>(nums.begin() + 1, nums.end()));
    return Lattice(std::move(g), name);
}

Lattice read_lat_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto slash = path.find_last_of('/');
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.substr(base.size() - 4) == ".lat") base.resize(base.size() - 4);
    return read_lat(in, base);
}

void write_lat(std::ostream& out, const Lattice& l) {
    if (!l.label.empty()) out << "# " << l.label << "\n";
    out << l.rank() << "\n";
    for (int i = 0; i < l.rank(); ++i) {
        for (int j = 0; j < l.rank(); ++j) {
            if (j) out << ' ';
            out << l.gram(i, j).get_str();
        }
        out << "\n";
    }
}

void write_lat_file(const std::string& path, const Lattice& l) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_lat(out, l);
}

} // namespace kneser
