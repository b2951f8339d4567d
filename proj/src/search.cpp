#include "perron/search.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

namespace perron {

NonnegativeMatrix<double> paper_family(int n)
{
    if (n < 4) {
        throw InputError("paper_family requires n >= 4");
    }
    Matrix<double> h = 0.1 * Matrix<double>::Identity(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        h(i, i + 1) = 1.0;
    }
    h(n - 1, 0) = std::pow(10.0, -n);
    return NonnegativeMatrix<double>(std::move(h));
}

Problem paper_counterexample_4()
{
    Vector<double> v(4);
    v << 2.0, 0.1, 0.1, 2.0;
    Vector<double> w(4);
    w << 2.0, 0.1, 2.0, 0.1;
    return make_problem(paper_family(4), v, w, "cx4");
}

Problem paper_example_33()
{
    Matrix<double> h(3, 3);
    h << 0.1, 1.0, 0.0, 0.0, 0.1, 1.0, 1e-4, 0.0, 0.1;
    Vector<double> v(3);
    v << 0.6, 0.1, 0.3;
    Vector<double> w(3);
    w << 0.5, 1.0, 1.0;
    return make_problem(h, v, w, "ex33");
}

namespace {

Matrix<double> cyclic3()
{
    Matrix<double> h(3, 3);
    h << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    return h;
}

}  // namespace

Problem paper_example_34()
{
    Vector<double> v(3);
    v << 1, 0, 0;
    Vector<double> w(3);
    w << 0, 6, 1;
    return make_problem(cyclic3(), v, w, "ex34");
}

Problem paper_example_34b()
{
    Vector<double> v(3);
    v << 1, 0, 0;
    Vector<double> w(3);
    w << 0, 1, 0;
    return make_problem(cyclic3(), v, w, "ex34b");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so samples are reproducible across toolchains.
double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, scale].
double positive(std::mt19937_64& rng, double scale)
{
    return scale * (1.0 - unit(rng));
}

// An all-zero draw counts as a rejection in random_problem.
std::optional<Vector<double>> random_vector(std::mt19937_64& rng, int n, const SearchConfig& cfg)
{
    Vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        x(i) = unit(rng) < cfg.sparsity ? 0.0 : positive(rng, cfg.entry_scale);
    }
    if (x.maxCoeff() > 0.0) {
        return x;
    }
    return std::nullopt;
}

}  // namespace

Problem random_problem(const SearchConfig& config, int index)
{
    if (config.n < 2) {
        throw InputError("search requires n >= 2");
    }
    const int n = config.n;
    std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix<double> h(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                h(i, j) = unit(rng) < config.sparsity ? 0.0 : positive(rng, config.entry_scale);
            }
        }
        if (config.force_cycle) {
            for (int i = 0; i < n; ++i) {
                h(i, (i + 1) % n) = positive(rng, config.cycle_scale);
            }
        }
        std::optional<Vector<double>> v = random_vector(rng, n, config);
        std::optional<Vector<double>> w = random_vector(rng, n, config);
        if (!v || !w) {
            continue;
        }
        NonnegativeMatrix<double> hm(std::move(h));
        if (!config.allow_reducible && !is_irreducible(hm)) {
            continue;
        }
        if (config.require_positive_wv && w->dot(*v) <= tol::nzp) {
            continue;
        }
        try {
            Problem prob = make_problem(std::move(hm), std::move(*v), std::move(*w));
            if (!prob.nzp.holds) {
                continue;
            }
            return prob;
        } catch (const NotSimple&) {
            continue;
        }
    }
    throw GenerationFailure("random_problem: 1000 consecutive draws rejected for sample " + std::to_string(index));
}

std::pair<double, double> confirm_unstable(const Problem& prob, const StabilityVerdict<double>& verdict)
{
    double scale = 1.0 + inf_norm(prob.a.entries);
    for (const auto& r : verdict.witness_roots.roots) {
        scale = std::max(scale, 1.0 + std::abs(r.value));
    }
    if (verdict.branch_real_part) {
        scale = std::max(scale, 1.0 + std::abs(*verdict.branch_real_part));
    }
    // The finite eigenvalues approach the roots of p_vw like O(1/t), the sqrt(t)
    // branches approach their limiting real part like O(1/sqrt(t)).
    const double heuristic = verdict.branch_real_part ? 1e6 * scale * scale : 1e3 * scale / std::max(prob.wv, 1e-3);
    const double t = 10.0 * heuristic;
    return {t, min_real_eigenvalue(prob, t)};
}

int search_threads(const SearchConfig& config)
{
    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PERRON_PERTURB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            threads = std::min(threads, cap);
        }
    }
    return std::max(threads, 1);
}

namespace {

struct Outcome {
    std::optional<CounterexampleRecord> record;
    bool unstable = false;
    bool indeterminate = false;
    bool generation_failure = false;
    std::string log;
};

Outcome evaluate(Problem prob, std::uint64_t seed, std::optional<int> index, std::string source)
{
    Outcome out;
    ClassifyOptions opts;
    opts.estimate_threshold = false;
    StabilityVerdict<double> verdict = classify(prob, opts);
    if (verdict.status == StabilityStatus::Indeterminate) {
        out.indeterminate = true;
        return out;
    }
    if (verdict.status != StabilityStatus::EventuallyUnstable) {
        return out;
    }
    out.unstable = true;
    const auto [t, min_re] = confirm_unstable(prob, verdict);
    const std::string tag = index ? "sample " + std::to_string(*index) : source;
    if (min_re > 0.0) {
        out.log = tag + ": Hurwitz verdict not confirmed (min Re = " + std::to_string(min_re) +
                  " at t = " + std::to_string(t) + "), dropped";
        return out;
    }
    RealPolynomial<double> pvw = p_vw_lemma16(prob).trimmed();
    out.record = CounterexampleRecord{std::move(prob), std::move(verdict), std::move(pvw), seed, index,
                                      std::move(source), t, min_re};
    return out;
}

}  // namespace

std::vector<CounterexampleRecord> falsify(const SearchConfig& config, SearchStats* stats)
{
    if (config.n < 2) {
        throw InputError("search requires n >= 2");
    }
    std::vector<Outcome> injected;
    if (config.inject_paper) {
        if (config.n == 4) {
            injected.push_back(evaluate(paper_counterexample_4(), config.seed, std::nullopt, "cx4"));
        } else if (config.n == 3 && !config.require_positive_wv) {
            injected.push_back(evaluate(paper_example_34(), config.seed, std::nullopt, "ex34"));
        }
    }

    const int samples = std::max(config.samples, 0);
    std::vector<Outcome> outcomes(samples);
    const int threads = std::min(search_threads(config), std::max(samples, 1));
    auto work = [&](int first) {
        for (int i = first; i < samples; i += threads) {
            try {
                outcomes[i] = evaluate(random_problem(config, i), config.seed, i, "random");
            } catch (const GenerationFailure& e) {
                outcomes[i].generation_failure = true;
                outcomes[i].log = e.what();
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) {
            pool.emplace_back(work, k);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<CounterexampleRecord> records;
    SearchStats local;
    local.sampled = samples;
    for (auto* group : {&injected, &outcomes}) {
        for (Outcome& o : *group) {
            local.unstable += o.unstable ? 1 : 0;
            local.indeterminate += o.indeterminate ? 1 : 0;
            local.generation_failures += o.generation_failure ? 1 : 0;
            if (!o.log.empty()) {
                local.log.push_back(o.log);
            }
            if (o.record) {
                records.push_back(std::move(*o.record));
            } else if (o.unstable) {
                ++local.dropped;
            }
        }
    }
    local.confirmed = static_cast<int>(records.size());
    if (stats) {
        *stats = std::move(local);
    }
    return records;
}

}  // namespace perron
