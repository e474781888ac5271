#include "bvs/exact_posterior.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "bvs/chol_state.hpp"
#include "bvs/error.hpp"
#include "bvs/numeric.hpp"
#include "bvs/scoring.hpp"
#include "bvs/sufficient_stats.hpp"

namespace bvs {

double ExactPosterior::probability(std::uint64_t code) const { return std::exp(log_post(static_cast<Eigen::Index>(code))); }

namespace {

struct ShardResult {
    std::size_t fallbacks = 0;
    std::exception_ptr error;
};

void walk_shard(const Dataset& d, const ModelScorer& scorer, const GramSystem<double>& sys,
                const std::vector<int>& free, const ModelIndex& base, int shard_bits, std::uint64_t shard,
                const EnumerationOptions& opts, ExactPosterior& out, ShardResult& res) {
    try {
        const int nf = static_cast<int>(free.size());
        const int inner = nf - shard_bits;
        const std::uint64_t offset = shard << inner;
        const ModelIndex start = model_from_code(offset, free, base);
        std::vector<int> walk_cols(free.begin() + shard_bits, free.end());
        std::vector<int> bit_of(d.p(), -1);
        for (int f = 0; f < nf; ++f) bit_of[free[f]] = nf - 1 - f;

        GrayCodeWalk walk(walk_cols, start);
        CholState<double> state(sys, start);
        std::uint64_t code = offset;
        const auto score = [&] {
            const SufficientStats s = opts.from_scratch ? stats_from_scratch(d, walk.current()) : state.stats();
            const auto e = scorer.bayes_factor(s, true);
            const auto i = static_cast<Eigen::Index>(code);
            out.log_bf(i) = e.log_bf;
            out.shrinkage(i) = e.shrinkage;
            out.log_prior(i) = scorer.log_prior(walk.current().size());
            out.sse(i) = s.sse;
        };
        score();
        while (!walk.done()) {
            const int col = walk.next();
            state.toggle(col);
            code ^= std::uint64_t{1} << bit_of[col];
            if (walk.step() % opts.refresh_interval == 0) state.refresh();
            score();
        }
        res.fallbacks = state.fallbacks();
    } catch (...) {
        res.error = std::current_exception();
    }
}

}  // namespace

ExactPosterior enumerate(const Dataset& d, const GPriorSpec& gspec, const ModelPriorSpec& mspec,
                         const QuadratureConfig& q, const EnumerationOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const int nf = d.p_free();
    if (nf > opts.cap)
        throw cap_error("enumeration over " + std::to_string(nf) + " free covariates exceeds cap " +
                        std::to_string(opts.cap));
    if (opts.refresh_interval == 0) throw config_error("refresh interval must be positive");

    const ModelScorer scorer(d, gspec, mspec, q);
    const auto sys = GramSystem<double>::from(d);

    ExactPosterior out;
    out.p = d.p();
    out.free = d.free_columns();
    out.base = d.base_model();
    const auto total = static_cast<Eigen::Index>(std::uint64_t{1} << nf);
    out.log_bf.resize(total);
    out.log_prior.resize(total);
    out.shrinkage.resize(total);
    out.sse.resize(total);

    const int threads = std::max(1, opts.threads);
    int bits = 0;
    while ((1 << bits) < threads && bits < nf) ++bits;
    out.shard_bits = bits;
    const std::uint64_t shards = std::uint64_t{1} << bits;

    std::vector<ShardResult> results(shards);
    if (threads == 1) {
        for (std::uint64_t s = 0; s < shards; ++s)
            walk_shard(d, scorer, sys, out.free, out.base, bits, s, opts, out, results[s]);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t s = 0; s < shards; ++s)
            pool.emplace_back(walk_shard, std::cref(d), std::cref(scorer), std::cref(sys), std::cref(out.free),
                              std::cref(out.base), bits, s, std::cref(opts), std::ref(out), std::ref(results[s]));
        for (auto& t : pool) t.join();
    }
    for (const auto& r : results) {
        if (r.error) std::rethrow_exception(r.error);
        out.fallbacks += r.fallbacks;
    }

    const Eigen::VectorXd joint = out.log_bf + out.log_prior;
    out.log_z = log_sum_exp(joint);
    if (!std::isfinite(out.log_z)) throw numeric_error("posterior normalizing constant is not finite");
    out.log_post = joint.array() - out.log_z;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<std::uint64_t> top_codes(const ExactPosterior& post, std::size_t k) {
    std::vector<std::uint64_t> idx(post.size());
    std::iota(idx.begin(), idx.end(), std::uint64_t{0});
    k = std::min<std::size_t>(k, idx.size());
    const auto by_prob = [&](std::uint64_t a, std::uint64_t b) {
        const auto la = post.log_post(static_cast<Eigen::Index>(a)), lb = post.log_post(static_cast<Eigen::Index>(b));
        return la > lb || (la == lb && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), by_prob);
    idx.resize(k);
    return idx;
}

void write_model_table(std::ostream& os, const ExactPosterior& post, std::size_t top_k, char delim) {
    std::vector<std::uint64_t> codes;
    if (top_k == 0) {
        codes.resize(post.size());
        std::iota(codes.begin(), codes.end(), std::uint64_t{0});
    } else {
        codes = top_codes(post, top_k);
    }
    const auto old = os.precision(17);
    os << "model" << delim << "log_bf" << delim << "log_prior" << delim << "probability\n";
    for (auto c : codes) {
        const auto i = static_cast<Eigen::Index>(c);
        os << post.model(c).to_string() << delim << post.log_bf(i) << delim << post.log_prior(i) << delim
           << post.probability(c) << '\n';
    }
    os.precision(old);
}

}  // namespace bvs
