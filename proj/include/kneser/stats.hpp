#pragma once

#include "kneser/glue.hpp"

#include <iosfwd>

namespace kneser {

enum class StatsMode { Exact, Sampled };

/// Neighbor-count matrix N_p(x, y) over a catalog.
struct NeighborStats {
    int64_t p = 0;
    StatsMode mode = StatsMode::Exact;
    int64_t samples = 0;  // per row, sampled mode
    uint64_t seed = 0;
    IntMat counts;
    Int lines_total;  // c_V(p) in exact mode, sample count otherwise
    std::vector<Int> aut_orders;
    std::vector<std::string> labels;
};

struct StatsOptions {
    int threads = 0;  // 0 = hardware_concurrency
    uint64_t chunk_candidates = 1u << 16;
    std::function<void(const std::string&)> progress;
};

/// Classifies lattices of a fixed genus by the cheapest separating invariant
/// (theta prefix, then root decomposition), falling back to isometry tests.
class Classifier {
public:
    explicit Classifier(const GenusCatalog& cat);
    int classify(const Lattice& l) const;
    bool separating() const { return separating_; }

private:
    const GenusCatalog* cat_;
    bool separating_ = false;
    int theta_bound_ = 0;
    bool use_roots_ = false;
    std::map<std::string, int> keys_;
    std::string key_of(const Lattice& l) const;
};

NeighborStats neighbor_matrix(const GenusCatalog& cat, int64_t p, StatsMode mode,
                              int64_t samples = 0, uint64_t seed = 1,
                              const StatsOptions& opt = {});

struct PeterssonViolation {
    int x, y;
    Int lhs, rhs;  // N(x,y)|G_y| vs N(y,x)|G_x|
};
/// Exact self-adjointness identity; empty result means it holds.
std::vector<PeterssonViolation> petersson_check(const NeighborStats& s);

struct SpectrumReport {
    int64_t p = 0;
    std::vector<double> eigenvalues;  // sorted by decreasing |.|
    double gap_ratio = 0;             // |lambda_2| / c_V(p)
    std::vector<Rat> charpoly;        // exact monic charpoly coefficients, low degree first
    bool top_exact = false;           // charpoly(c_V) == 0 and all row sums == c_V
};
SpectrumReport spectrum(const NeighborStats& s);

struct ConvergenceRow {
    int64_t p = 0;
    Int count;
    Int lines;
    Rat ratio;       // count / lines
    Rat mass_frac;   // target fraction
    Rat residual;    // |ratio - mass_frac|
};

/// Theorem-A style table: requires a spinor-triviality certificate.
std::vector<ConvergenceRow> convergence_report(const GenusCatalog& cat, int from_class,
                                               int to_class, const std::vector<int64_t>& primes,
                                               StatsMode mode, int64_t samples, uint64_t seed,
                                               const StatsOptions& opt = {});

struct BiasedStats {
    int64_t p = 0;
    std::vector<Int> counts;  // per catalog class
    Int lines_total;
};
BiasedStats biased_neighbor_counts(const Lattice& l, const Sublattice& a,
                                   const GenusCatalog& cat, int64_t p,
                                   const StatsOptions& opt = {});

/// Theorem-B style table against a groupoid-mass fraction mu.
std::vector<ConvergenceRow> biased_convergence_report(const Lattice& l, const Sublattice& a,
                                                      const GenusCatalog& cat, int target_class,
                                                      const std::vector<int64_t>& primes,
                                                      const Rat& mu,
                                                      const StatsOptions& opt = {});

void write_stats_csv(std::ostream& out, const NeighborStats& s);

} // namespace kneser
