#include "bvs/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "bvs/error.hpp"
#include "bvs/numeric.hpp"

namespace bvs {

void SamplerConfig::validate() const {
    if (iterations <= burn_in) throw config_error("no retained samples (iterations must exceed burn-in)");
    if (thin == 0) throw config_error("thin must be at least 1");
    if (max_unique == 0) throw config_error("visit map cap must be positive");
    if (refresh_interval == 0) throw config_error("refresh interval must be positive");
}

StartSpec parse_start(std::string_view text) {
    if (text == "null") return StartSpec::null_model();
    if (text == "full") return StartSpec::full();
    if (text == "random") return StartSpec::random();
    return StartSpec::given(ModelIndex::from_string(text));
}

PipEstimator parse_estimator(std::string_view text) {
    if (text == "frequency" || text == "freq") return PipEstimator::frequency;
    if (text == "rb" || text == "rao-blackwell") return PipEstimator::rao_blackwell;
    if (text == "renorm" || text == "renormalized") return PipEstimator::renormalized;
    throw config_error("unknown estimator '" + std::string(text) + "'");
}

std::string to_string(PipEstimator e) {
    switch (e) {
        case PipEstimator::frequency: return "frequency";
        case PipEstimator::rao_blackwell: return "rb";
        case PipEstimator::renormalized: return "renorm";
    }
    return "?";
}

std::string to_string(SamplerKind k) { return k == SamplerKind::gibbs_scan ? "gibbs" : "mc3"; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t chain_seed(std::uint64_t master, int chain) {
    return splitmix64(master ^ (static_cast<std::uint64_t>(chain) * 0x9E3779B97F4A7C15ull));
}

std::vector<std::pair<ModelIndex, VisitRecord>> ChainTrace::sorted_models() const {
    std::vector<std::pair<ModelIndex, VisitRecord>> out(unique_models.begin(), unique_models.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

namespace {

ModelIndex start_model(const Dataset& d, const StartSpec& start, Rng& rng) {
    ModelIndex m = d.base_model();
    switch (start.kind) {
        case StartKind::null_model: break;
        case StartKind::full:
            for (int j : d.free_columns()) m.set(j, true);
            break;
        case StartKind::random:
            for (int j : d.free_columns()) m.set(j, rng.uniform() < 0.5);
            break;
        case StartKind::given:
            if (start.model.p() != d.p()) throw config_error("start model has the wrong length");
            if (!d.admissible(start.model)) throw config_error("start model must contain every fixed covariate");
            m = start.model;
            break;
    }
    return m;
}

}  // namespace

Chain::Chain(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, const StartSpec& start)
    : d_(&d),
      scorer_(&scorer),
      cfg_(cfg),
      sys_(GramSystem<double>::from(d)),
      chol_(sys_),
      free_(d.free_columns()),
      rng_(cfg.seed) {
    trace_.p = d.p();
    trace_.base = d.base_model();
    trace_.kind = cfg.kind;
    trace_.rb_accumulator = Eigen::VectorXd::Zero(d.p());
    trace_.freq_accumulator = Eigen::VectorXd::Zero(d.p());
    reset(start_model(d, start, rng_));
}

void Chain::reset(const ModelIndex& m) {
    if (m.p() != d_->p() || !d_->admissible(m)) throw config_error("chain state must contain every fixed covariate");
    for (int j : chol_.included().included())
        if (!m.test(j)) chol_.drop(j);
    for (int j : m.included())
        if (!chol_.included().test(j)) chol_.add(j);
    chol_.refresh();
    cur_ = score_current();
}

VisitRecord Chain::score_current() {
    VisitRecord r;
    const ModelIndex& m = chol_.included();
    try {
        if (scorer_->gprior().random_g() && !scorer_->prior_only()) {
            auto it = bf_cache_.find(m);
            if (it == bf_cache_.end()) {
                if (bf_cache_.size() >= cfg_.max_unique) bf_cache_.clear();
                it = bf_cache_.emplace(m, scorer_->bayes_factor(chol_.stats()).log_bf).first;
            }
            r.log_bf = it->second;
        } else {
            r.log_bf = scorer_->bayes_factor(chol_.stats()).log_bf;
        }
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (model " + m.to_string() + ")");
    }
    r.log_prior = scorer_->log_prior(m.size());
    return r;
}

void Chain::toggle(int j) {
    chol_.toggle(j);
    if (++updates_ % cfg_.refresh_interval == 0) chol_.refresh();
}

Eigen::VectorXd Chain::gibbs_scan(Rng& rng) {
    Eigen::VectorXd q = Eigen::VectorXd::Ones(d_->p());
    for (int j : free_) {
        const bool was_in = chol_.included().test(j);
        toggle(j);
        const VisitRecord other = score_current();
        const double l1 = was_in ? cur_.log_post() : other.log_post();
        const double l0 = was_in ? other.log_post() : cur_.log_post();
        const double qj = logistic(l1 - l0);
        q(j) = qj;
        const bool take = rng.uniform() < qj;
        if (take != was_in) {
            cur_ = other;
        } else {
            toggle(j);
        }
    }
    return q;
}

bool Chain::birth_death(Rng& rng) {
    if (free_.empty()) return false;
    const int j = free_[rng.below(free_.size())];
    toggle(j);
    const VisitRecord other = score_current();
    const double delta = other.log_post() - cur_.log_post();
    ++trace_.proposals;
    if (delta >= 0 || rng.uniform() < std::exp(delta)) {
        cur_ = other;
        ++trace_.accepted;
        return true;
    }
    toggle(j);
    return false;
}

void Chain::run(std::uint64_t k) {
    for (std::uint64_t i = 0; i < k; ++i) {
        ++trace_.steps;
        Eigen::VectorXd q;
        if (cfg_.kind == SamplerKind::gibbs_scan) {
            q = gibbs_scan(rng_);
        } else {
            birth_death(rng_);
        }
        if (trace_.steps > cfg_.burn_in && (trace_.steps - cfg_.burn_in - 1) % cfg_.thin == 0)
            record(cfg_.kind == SamplerKind::gibbs_scan ? &q : nullptr);
    }
}

void Chain::record(const Eigen::VectorXd* q) {
    const ModelIndex& m = chol_.included();
    ++trace_.retained;
    if (cfg_.keep_visited) trace_.visited.push_back(m);
    for (int j : m.included()) trace_.freq_accumulator(j) += 1.0;
    if (q != nullptr) trace_.rb_accumulator += *q;
    auto it = trace_.unique_models.find(m);
    if (it == trace_.unique_models.end()) {
        VisitRecord r = cur_;
        r.count = 0;
        it = trace_.unique_models.emplace(m, r).first;
    }
    ++it->second.count;
    if (trace_.unique_models.size() > cfg_.max_unique) prune();
}

namespace {

void prune_map(ChainTrace& t, std::size_t cap) {
    if (t.unique_models.size() <= cap) return;
    auto all = t.sorted_models();
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.second.count > b.second.count; });
    const auto keep = std::max<std::size_t>(1, cap - cap / 10);
    all.resize(std::min(keep, all.size()));
    t.unique_models.clear();
    for (auto& [m, r] : all) t.unique_models.emplace(std::move(m), r);
    t.truncated = true;
}

}  // namespace

void Chain::prune() { prune_map(trace_, cfg_.max_unique); }

ChainTrace Chain::take_trace() {
    trace_.fallbacks = chol_.fallbacks();
    return std::move(trace_);
}

ChainTrace run_sampler(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg,
                       const StartSpec& start) {
    cfg.validate();
    Chain chain(d, scorer, cfg, start);
    chain.run(cfg.iterations);
    return chain.take_trace();
}

ChainTrace run_sampler(const Dataset& d, const GPriorSpec& g, const ModelPriorSpec& m, const SamplerConfig& cfg,
                       const StartSpec& start, const QuadratureConfig& q) {
    const ModelScorer scorer(d, g, m, q);
    return run_sampler(d, scorer, cfg, start);
}

ChainTrace run_chains(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, int chains,
                      int threads, const StartSpec& start) {
    cfg.validate();
    if (chains < 1) throw config_error("need at least one chain");
    threads = std::clamp(threads, 1, chains);
    std::vector<ChainTrace> traces(chains);
    std::vector<std::exception_ptr> errors(chains);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int c = next++; c < chains; c = next++) {
            try {
                SamplerConfig cc = cfg;
                cc.seed = chain_seed(cfg.seed, c);
                traces[c] = run_sampler(d, scorer, cc, start);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return merge_traces(std::move(traces), cfg.max_unique);
}

ChainTrace merge_traces(std::vector<ChainTrace> traces, std::size_t max_unique) {
    if (traces.empty()) throw config_error("no traces to merge");
    ChainTrace out;
    out.p = traces.front().p;
    out.base = traces.front().base;
    out.kind = traces.front().kind;
    out.rb_accumulator = Eigen::VectorXd::Zero(out.p);
    out.freq_accumulator = Eigen::VectorXd::Zero(out.p);
    out.chains = 0;
    for (auto& t : traces) {
        if (t.p != out.p || t.kind != out.kind) throw config_error("cannot pool traces of different problems");
        out.visited.insert(out.visited.end(), std::make_move_iterator(t.visited.begin()),
                           std::make_move_iterator(t.visited.end()));
        for (const auto& [m, r] : t.sorted_models()) {
            auto [it, fresh] = out.unique_models.emplace(m, r);
            if (!fresh) it->second.count += r.count;
        }
        out.rb_accumulator += t.rb_accumulator;
        out.freq_accumulator += t.freq_accumulator;
        out.retained += t.retained;
        out.steps += t.steps;
        out.proposals += t.proposals;
        out.accepted += t.accepted;
        out.truncated = out.truncated || t.truncated;
        out.chains += t.chains;
        out.fallbacks += t.fallbacks;
    }
    prune_map(out, max_unique);
    return out;
}

Eigen::VectorXd renormalized_weights(const std::vector<std::pair<ModelIndex, VisitRecord>>& models) {
    Eigen::VectorXd lp(static_cast<Eigen::Index>(models.size()));
    for (std::size_t k = 0; k < models.size(); ++k) lp(static_cast<Eigen::Index>(k)) = models[k].second.log_post();
    const double lz = log_sum_exp(lp);
    if (!std::isfinite(lz)) throw numeric_error("renormalizing constant is not finite");
    return (lp.array() - lz).exp().matrix();
}

Eigen::VectorXd frequency_weights(const std::vector<std::pair<ModelIndex, VisitRecord>>& models) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(models.size()));
    double total = 0;
    for (std::size_t k = 0; k < models.size(); ++k) {
        w(static_cast<Eigen::Index>(k)) = static_cast<double>(models[k].second.count);
        total += static_cast<double>(models[k].second.count);
    }
    return w / total;
}

Eigen::VectorXd estimate_pip(const ChainTrace& trace, PipEstimator method) {
    if (trace.retained == 0 || trace.unique_models.empty()) throw config_error("no retained samples");
    Eigen::VectorXd pip;
    switch (method) {
        case PipEstimator::frequency: pip = trace.freq_accumulator / static_cast<double>(trace.retained); break;
        case PipEstimator::rao_blackwell:
            if (trace.kind != SamplerKind::gibbs_scan)
                throw config_error("Rao-Blackwell estimates need a Gibbs scan trace");
            pip = trace.rb_accumulator / static_cast<double>(trace.retained);
            break;
        case PipEstimator::renormalized: {
            const auto models = trace.sorted_models();
            const Eigen::VectorXd w = renormalized_weights(models);
            pip = Eigen::VectorXd::Zero(trace.p);
            for (std::size_t k = 0; k < models.size(); ++k)
                for (int j : models[k].first.included()) pip(j) += w(static_cast<Eigen::Index>(k));
            break;
        }
    }
    for (int j : trace.base.included()) pip(j) = 1.0;
    return pip;
}

void write_visit_table(std::ostream& os, const ChainTrace& trace, std::size_t top_k, char delim) {
    auto models = trace.sorted_models();
    std::stable_sort(models.begin(), models.end(),
                     [](const auto& a, const auto& b) { return a.second.count > b.second.count; });
    if (top_k != 0 && models.size() > top_k) models.resize(top_k);
    const auto old = os.precision(17);
    os << "model" << delim << "count" << delim << "log_bf" << delim << "log_prior\n";
    for (const auto& [m, r] : models)
        os << m.to_string() << delim << r.count << delim << r.log_bf << delim << r.log_prior << '\n';
    os.precision(old);
}

}  // namespace bvs
