#ifndef PERRON_SEARCH_HPP
#define PERRON_SEARCH_HPP

#include "perron/perturb.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace perron {

using Problem = PerturbationProblem<double>;

// H = 0.1 I + J_n with 10^-n in entry (n,1); rho(H) = 0.2 for every n >= 4.
NonnegativeMatrix<double> paper_family(int n);

// The 4x4 counterexample: paper_family(4), v = (2, 0.1, 0.1, 2), w = (2, 0.1, 2, 0.1).
Problem paper_counterexample_4();

// 3x3 cycle H with 1e-4 closing entry, v = (0.6, 0.1, 0.3), w = (0.5, 1, 1).
Problem paper_example_33();

// Cyclic permutation H, v = e1, w = (0, 6, 1): w^T v = 0 with w^T A v = -1.
Problem paper_example_34();

// Same H and v as paper_example_34 with w = e2: w^T v = w^T A v = 0.
Problem paper_example_34b();

struct SearchConfig {
    int n = 4;
    int samples = 1000;
    std::uint64_t seed = 0;
    double entry_scale = 1.0;   // filler entries of H, and v, w, drawn from U[0, entry_scale]
    double cycle_scale = 1.0;   // superdiagonal cycle entries when force_cycle is set
    double sparsity = 0.3;      // probability that a filler entry is zero
    bool force_cycle = false;   // make H(i, i+1 mod n) > 0 so every sample is irreducible
    bool allow_reducible = false;
    bool require_positive_wv = false;
    bool inject_paper = false;  // evaluate the built-in instance for this n before the random samples
    int threads = 0;            // 0: hardware concurrency, capped by PERRON_PERTURB_THREADS
};

struct CounterexampleRecord {
    Problem prob;
    StabilityVerdict<double> verdict;
    RealPolynomial<double> pvw;
    std::uint64_t seed = 0;
    std::optional<int> index;  // empty for injected instances
    std::string source;        // "random" or the built-in instance name
    double check_t = 0.0;      // t used for the eigenvalue confirmation
    double check_min_re = 0.0;
};

struct SearchStats {
    int sampled = 0;
    int unstable = 0;      // Hurwitz-based verdicts before confirmation
    int confirmed = 0;
    int dropped = 0;       // verdict not confirmed by the eigenvalue check
    int indeterminate = 0;
    int generation_failures = 0;
    std::vector<std::string> log;
};

// Deterministic in (config.seed, index). Throws GenerationFailure after 1000 rejected draws.
Problem random_problem(const SearchConfig& config, int index);

// Confirms an EventuallyUnstable verdict by the eigenvalues of B(t) at a large t.
// Returns the t used and min Re of the spectrum there.
std::pair<double, double> confirm_unstable(const Problem& prob, const StabilityVerdict<double>& verdict);

// All confirmed EventuallyUnstable samples, injected instances first, then in sample order.
std::vector<CounterexampleRecord> falsify(const SearchConfig& config, SearchStats* stats = nullptr);

int search_threads(const SearchConfig& config);

}  // namespace perron

#endif  // PERRON_SEARCH_HPP
