#include "kneser/stats.hpp"
#include "kneser/rng.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace kneser {

namespace {

std::string theta_key(const std::vector<Int>& t) {
    std::string s;
    for (const Int& v : t) {
        s += v.get_str();
        s += ',';
    }
    return s;
}

} // namespace

Classifier::Classifier(const GenusCatalog& cat) : cat_(&cat) {
    int k = cat.classes();
    for (int m = 1; m <= 4 && !separating_; ++m) {
        // theta alone
        std::map<std::string, int> keys;
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            std::string key = theta_key(theta_prefix(cat.reps[i], m));
            if (!keys.emplace(key, i).second) ok = false;
        }
        if (ok) {
            separating_ = true;
            theta_bound_ = m;
            use_roots_ = false;
            keys_ = std::move(keys);
            return;
        }
        // theta + root decomposition
        keys.clear();
        ok = true;
        for (int i = 0; i < k && ok; ++i) {
            std::string key = theta_key(theta_prefix(cat.reps[i], m)) + "|" +
                              root_decomposition(cat.reps[i]).to_string();
            if (!keys.emplace(key, i).second) ok = false;
        }
        if (ok) {
            separating_ = true;
            theta_bound_ = m;
            use_roots_ = true;
            keys_ = std::move(keys);
            return;
        }
    }
}

std::string Classifier::key_of(const Lattice& l) const {
    std::string key = theta_key(theta_prefix(l, theta_bound_));
    if (use_roots_) key += "|" + root_decomposition(l).to_string();
    return key;
}

int Classifier::classify(const Lattice& l) const {
    if (separating_) {
        auto it = keys_.find(key_of(l));
        if (it == keys_.end())
            throw std::runtime_error(
                "classification failed: lattice matches no class invariant (genus violation?)");
        return it->second;
    }
    return kneser::classify(l, cat_->reps);
}

namespace {

struct ChunkPlan {
    uint64_t total = 0;
    uint64_t chunk = 1;
    uint64_t chunks() const { return total == 0 ? 0 : (total + chunk - 1) / chunk; }
};

// parallel map over candidate chunks with additive merge
template <typename Work>
void run_chunks(const ChunkPlan& plan, int threads, Work&& work) {
    if (threads <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        threads = hc ? static_cast<int>(hc) : 1;
    }
    uint64_t nchunks = plan.chunks();
    if (nchunks == 0) return;
    threads = static_cast<int>(std::min<uint64_t>(threads, nchunks));
    if (threads <= 1) {
        for (uint64_t c = 0; c < nchunks; ++c)
            work(c, c * plan.chunk, std::min(plan.total, (c + 1) * plan.chunk));
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            try {
                while (true) {
                    uint64_t c = next.fetch_add(1);
                    if (c >= nchunks) break;
                    work(c, c * plan.chunk, std::min(plan.total, (c + 1) * plan.chunk));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace

NeighborStats neighbor_matrix(const GenusCatalog& cat, int64_t p, StatsMode mode, int64_t samples,
                              uint64_t seed, const StatsOptions& opt) {
    int k = cat.classes();
    NeighborStats s;
    s.p = p;
    s.mode = mode;
    s.samples = samples;
    s.seed = seed;
    s.counts = IntMat(k, k);
    s.aut_orders = cat.aut_orders;
    for (const auto& r : cat.reps) s.labels.push_back(r.label);
    s.lines_total = mode == StatsMode::Exact ? count_isotropic_lines(cat.rank, cat.det, Int(p))
                                             : Int(static_cast<long>(samples));

    Classifier cls(cat);
    std::mutex merge_mu;
    for (int row = 0; row < k; ++row) {
        const Lattice& rep = cat.reps[row];
        std::vector<Int> total_row(k, 0);
        if (mode == StatsMode::Exact) {
            ChunkPlan plan{line_candidate_count(cat.rank, p), opt.chunk_candidates};
            run_chunks(plan, opt.threads, [&](uint64_t, uint64_t lo, uint64_t hi) {
                std::vector<Int> local(k, 0);
                for_each_isotropic_line(rep, p, lo, hi, [&](const IsotropicLine& li) {
                    local[cls.classify(neighbor(rep, li).lat)] += 1;
                });
                std::lock_guard<std::mutex> lk(merge_mu);
                for (int j = 0; j < k; ++j) total_row[j] += local[j];
            });
            Int sum = 0;
            for (int j = 0; j < k; ++j) sum += total_row[j];
            if (sum != s.lines_total)
                throw std::logic_error("row sum disagrees with the line-count formula");
        } else {
            // sampled: split the sample budget into chunks with derived streams
            uint64_t chunk = 4096;
            ChunkPlan plan{static_cast<uint64_t>(samples), chunk};
            run_chunks(plan, opt.threads, [&](uint64_t c, uint64_t lo, uint64_t hi) {
                auto lines = sample_isotropic_lines(
                    rep, p, static_cast<int64_t>(hi - lo),
                    Rng::stream(seed + 7919 * static_cast<uint64_t>(row), c).next());
                std::vector<Int> local(k, 0);
                for (const auto& li : lines) local[cls.classify(neighbor(rep, li).lat)] += 1;
                std::lock_guard<std::mutex> lk(merge_mu);
                for (int j = 0; j < k; ++j) total_row[j] += local[j];
            });
        }
        for (int j = 0; j < k; ++j) s.counts(row, j) = total_row[j];
        if (opt.progress)
            opt.progress("neighbor_matrix: row " + std::to_string(row) + " done");
    }
    return s;
}

std::vector<PeterssonViolation> petersson_check(const NeighborStats& s) {
    if (s.mode != StatsMode::Exact) throw std::invalid_argument("petersson_check needs exact mode");
    std::vector<PeterssonViolation> out;
    int k = s.counts.rows;
    for (int x = 0; x < k; ++x)
        for (int y = x + 1; y < k; ++y) {
            Int lhs = s.counts(x, y) * s.aut_orders[y];
            Int rhs = s.counts(y, x) * s.aut_orders[x];
            if (lhs != rhs) out.push_back({x, y, lhs, rhs});
        }
    return out;
}

namespace {

// exact monic characteristic polynomial, low-degree coefficients first
std::vector<Rat> charpoly_exact(const IntMat& m) {
    int n = m.rows;
    RatMat a(m);
    RatMat b = RatMat::identity(n);
    std::vector<Rat> coeff(n + 1, Rat(0));
    coeff[n] = 1;
    Rat c;
    RatMat mk = a;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) mk = a * b;
        Rat tr = 0;
        for (int i = 0; i < n; ++i) tr += mk(i, i);
        c = tr / k;
        coeff[n - k] = -c;
        b = mk;
        for (int i = 0; i < n; ++i) b(i, i) -= c;
    }
    return coeff;
}

Rat eval_poly(const std::vector<Rat>& c, const Rat& x) {
    Rat v = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
    return v;
}

// Jacobi eigenvalues of a symmetric matrix
std::vector<double> jacobi_eigen(std::vector<std::vector<double>> a) {
    int n = static_cast<int>(a.size());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-22) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s2 = t * c;
                for (int i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s2 * aiq;
                    a[i][q] = s2 * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s2 * aqi;
                    a[q][i] = s2 * api + c * aqi;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i][i];
    return ev;
}

} // namespace

SpectrumReport spectrum(const NeighborStats& s) {
    if (s.mode != StatsMode::Exact) throw std::invalid_argument("spectrum needs exact mode");
    int k = s.counts.rows;
    SpectrumReport rep;
    rep.p = s.p;
    rep.charpoly = charpoly_exact(s.counts);

    // symmetrize D^{1/2} N D^{-1/2}, D = diag(1/|Gamma_x|)
    std::vector<std::vector<double>> sym(k, std::vector<double>(k));
    std::vector<double> g(k);
    for (int i = 0; i < k; ++i) g[i] = s.aut_orders[i].get_d();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            sym[i][j] = s.counts(i, j).get_d() * std::sqrt(g[j] / g[i]);
    rep.eigenvalues = jacobi_eigen(sym);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](double a, double b) { return std::fabs(a) > std::fabs(b); });

    Rat cv(s.lines_total);
    rep.top_exact = eval_poly(rep.charpoly, cv) == 0;
    for (int i = 0; i < k && rep.top_exact; ++i) {
        Int sum = 0;
        for (int j = 0; j < k; ++j) sum += s.counts(i, j);
        if (sum != s.lines_total) rep.top_exact = false;
    }
    rep.gap_ratio = k >= 2 ? std::fabs(rep.eigenvalues[1]) / s.lines_total.get_d() : 0.0;
    return rep;
}

std::vector<ConvergenceRow> convergence_report(const GenusCatalog& cat, int from_class,
                                               int to_class, const std::vector<int64_t>& primes,
                                               StatsMode mode, int64_t samples, uint64_t seed,
                                               const StatsOptions& opt) {
    SigmaCertificate cert = sigma_trivial(cat.reps[0]);
    if (!cert.certified)
        throw std::runtime_error(
            "convergence statistics refused: no spinor-triviality certificate (" + cert.reason +
            "); with several spinor genera the neighbor statistics depend on arithmetic "
            "progressions of p and the single-mass normalization is wrong");
    std::vector<ConvergenceRow> rows;
    Rat mass_frac = cat.masses[to_class] / cat.total_mass;
    for (int64_t p : primes) {
        NeighborStats s = neighbor_matrix(cat, p, mode, samples, seed, opt);
        ConvergenceRow r;
        r.p = p;
        r.count = s.counts(from_class, to_class);
        r.lines = s.lines_total;
        r.ratio = Rat(r.count, r.lines);
        r.ratio.canonicalize();
        r.mass_frac = mass_frac;
        r.residual = abs(r.ratio - mass_frac);
        rows.push_back(std::move(r));
    }
    return rows;
}

BiasedStats biased_neighbor_counts(const Lattice& l, const Sublattice& a,
                                   const GenusCatalog& cat, int64_t p, const StatsOptions& opt) {
    Classifier cls(cat);
    int k = cat.classes();
    BiasedStats out;
    out.p = p;
    out.counts.assign(k, 0);
    Sublattice b = orthogonal_complement(a);
    Lattice bl = b.lattice();
    out.lines_total = count_isotropic_lines(bl.rank(), bl.det(), Int(p));

    std::mutex merge_mu;
    ChunkPlan plan{biased_candidate_count(l, a, p), opt.chunk_candidates};
    std::atomic<int64_t> seen{0};
    run_chunks(plan, opt.threads, [&](uint64_t, uint64_t lo, uint64_t hi) {
        std::vector<Int> local(k, 0);
        for_each_biased_line(l, a, p, lo, hi, [&](const IsotropicLine& li) {
            local[cls.classify(neighbor(l, li).lat)] += 1;
        });
        std::lock_guard<std::mutex> lk(merge_mu);
        for (int j = 0; j < k; ++j) out.counts[j] += local[j];
        if (opt.progress) {
            int64_t s = ++seen;
            if (s % 64 == 0) opt.progress("biased: " + std::to_string(s) + " chunks");
        }
    });
    Int sum = 0;
    for (const Int& c : out.counts) sum += c;
    if (sum != out.lines_total)
        throw std::logic_error("biased line total disagrees with the complement formula");
    return out;
}

std::vector<ConvergenceRow> biased_convergence_report(const Lattice& l, const Sublattice& a,
                                                      const GenusCatalog& cat, int target_class,
                                                      const std::vector<int64_t>& primes,
                                                      const Rat& mu, const StatsOptions& opt) {
    SigmaCertificate cert = inertial_sigma_trivial(l, a);
    if (!cert.certified)
        throw std::runtime_error("biased statistics refused: " + cert.reason);
    std::vector<ConvergenceRow> rows;
    for (int64_t p : primes) {
        BiasedStats s = biased_neighbor_counts(l, a, cat, p, opt);
        ConvergenceRow r;
        r.p = p;
        r.count = s.counts[target_class];
        r.lines = s.lines_total;
        r.ratio = Rat(r.count, r.lines);
        r.ratio.canonicalize();
        r.mass_frac = mu;
        r.residual = abs(r.ratio - mu);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_stats_csv(std::ostream& out, const NeighborStats& s) {
    bool exact = s.mode == StatsMode::Exact;
    out << "p,class_from,class_to,count,lines_total,"
        << (exact ? "ratio_num,ratio_den" : "ratio_float")
        << ",mass_frac_num,mass_frac_den,residual\n";
    int k = s.counts.rows;
    Rat total_mass = 0;
    std::vector<Rat> masses(k);
    for (int i = 0; i < k; ++i) {
        masses[i] = Rat(Int(1), s.aut_orders[i]);
        total_mass += masses[i];
    }
    for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) {
            Rat ratio(s.counts(x, y), s.lines_total);
            ratio.canonicalize();
            Rat mf = masses[y] / total_mass;
            Rat res = abs(ratio - mf);
            out << s.p << ',' << x << ',' << y << ',' << s.counts(x, y).get_str() << ','
                << s.lines_total.get_str() << ',';
            if (exact)
                out << ratio.get_num().get_str() << ',' << ratio.get_den().get_str();
            else
                out << ratio.get_d();
            out << ',' << mf.get_num().get_str() << ',' << mf.get_den().get_str() << ','
                << res.get_d() << "\n";
        }
}

} // namespace kneser
