#include "bvs/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "bvs/error.hpp"

namespace bvs {

std::string to_string(CurveMetric m) { return m == CurveMetric::delta_exact ? "delta-exact" : "delta-self"; }

CurveMetric parse_metric(std::string_view text) {
    if (text == "delta-exact") return CurveMetric::delta_exact;
    if (text == "delta-self") return CurveMetric::delta_self;
    throw config_error("unknown metric '" + std::string(text) + "'");
}

void ConvergenceCurve::validate() const {
    if (times.size() != values.size()) throw numeric_error("curve has mismatched columns");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) throw numeric_error("curve times must increase strictly");
        if (!std::isfinite(values[k]) || values[k] < 0) throw numeric_error("curve value is not a finite distance");
    }
}

double ConvergenceCurve::first_below(double level) const {
    for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] <= level) return times[k];
    return -1;
}

ChainStream::ChainStream(const Dataset& d, const ModelScorer& scorer, SamplerConfig cfg, const StartSpec& start)
    : burn_in_(cfg.burn_in) {
    cfg.keep_visited = false;
    if (cfg.thin == 0) throw config_error("thin must be at least 1");
    chain_ = std::make_unique<Chain>(d, scorer, cfg, start);
    chain_->run(cfg.burn_in);
}

void ChainStream::advance(std::uint64_t k) { chain_->run(k); }

std::uint64_t ChainStream::iterations() const { return chain_->iterations_done() - burn_in_; }

Eigen::VectorXd ChainStream::estimate(PipEstimator e) const { return estimate_pip(chain_->trace(), e); }

void FixedStream::advance(std::uint64_t k) {
    done_ += k;
    std::this_thread::sleep_for(std::chrono::microseconds(200));
}

std::vector<Snapshot> take_snapshots(PipStream& stream, CheckpointClock clock, const std::vector<double>& checkpoints,
                                     const std::vector<PipEstimator>& estimators) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
        if (!(checkpoints[k] > 0) || (k > 0 && !(checkpoints[k] > checkpoints[k - 1])))
            throw config_error("checkpoints must be positive and strictly increasing");
    std::vector<Snapshot> out;
    out.reserve(checkpoints.size());
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    for (double at : checkpoints) {
        Snapshot s;
        if (clock == CheckpointClock::iterations) {
            const auto target = static_cast<std::uint64_t>(std::llround(at));
            if (target > stream.iterations()) stream.advance(target - stream.iterations());
            s.time = at;
        } else {
            while (elapsed() < at) stream.advance(1);
            s.time = at;
        }
        s.iterations = stream.iterations();
        for (auto e : estimators) s.pip[e] = stream.estimate(e);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

ConvergenceCurve empty_curve(CurveMetric m, PipEstimator e, CheckpointClock clock) {
    ConvergenceCurve c;
    c.metric = m;
    c.estimator = e;
    c.clock = clock;
    return c;
}

const Eigen::VectorXd& pip_of(const Snapshot& s, PipEstimator e) {
    const auto it = s.pip.find(e);
    if (it == s.pip.end()) throw config_error("snapshot lacks estimator " + to_string(e));
    return it->second;
}

}  // namespace

ConvergenceCurve delta_exact(const std::vector<Snapshot>& snaps, PipEstimator e, const Eigen::VectorXd& reference,
                             CheckpointClock clock) {
    auto c = empty_curve(CurveMetric::delta_exact, e, clock);
    for (const auto& s : snaps) {
        const auto& pip = pip_of(s, e);
        if (pip.size() != reference.size())
            throw config_error("reference has " + std::to_string(reference.size()) + " entries, expected " +
                               std::to_string(pip.size()));
        c.times.push_back(s.time);
        c.iterations.push_back(s.iterations);
        c.values.push_back((pip - reference).cwiseAbs().maxCoeff());
    }
    return c;
}

ConvergenceCurve delta_self(const std::vector<Snapshot>& snaps, PipEstimator e, double dt, CheckpointClock clock) {
    if (!(dt > 0)) throw config_error("dt must be positive");
    auto c = empty_curve(CurveMetric::delta_self, e, clock);
    c.dt = dt;
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        if (std::abs(snaps[k].time - snaps[k - 1].time - dt) > 1e-9 * dt)
            throw config_error("snapshots are not dt apart");
        c.times.push_back(snaps[k].time);
        c.iterations.push_back(snaps[k].iterations);
        c.values.push_back((pip_of(snaps[k], e) - pip_of(snaps[k - 1], e)).cwiseAbs().maxCoeff());
    }
    return c;
}

std::vector<double> regular_checkpoints(double dt, double horizon) {
    if (!(dt > 0)) throw config_error("dt must be positive");
    std::vector<double> out;
    for (int k = 1;; ++k) {
        const double t = k * dt;
        if (t > horizon * (1 + 1e-12)) break;
        out.push_back(t);
    }
    return out;
}

ConvergenceCurve delta_exact_curve(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg,
                                   const Eigen::VectorXd& reference, const std::vector<double>& checkpoints,
                                   PipEstimator e, CheckpointClock clock) {
    if (reference.size() != d.p())
        throw config_error("reference has " + std::to_string(reference.size()) + " entries, expected " +
                           std::to_string(d.p()));
    ChainStream stream(d, scorer, cfg);
    const auto snaps = take_snapshots(stream, clock, checkpoints, {e});
    return delta_exact(snaps, e, reference, clock);
}

ConvergenceCurve delta_self_curve(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, double dt,
                                  double horizon, PipEstimator e, CheckpointClock clock) {
    if (!(dt > 0) || !(horizon > 2 * dt)) throw config_error("need dt > 0 and horizon > 2 dt");
    ChainStream stream(d, scorer, cfg);
    const auto snaps = take_snapshots(stream, clock, regular_checkpoints(dt, horizon), {e});
    return delta_self(snaps, e, dt, clock);
}

void write_curve(std::ostream& os, const ConvergenceCurve& c,
                 const std::vector<std::pair<std::string, std::string>>& metadata, char delim) {
    const auto old = os.precision(17);
    os << "# metric: " << to_string(c.metric) << '\n';
    os << "# estimator: " << to_string(c.estimator) << '\n';
    os << "# clock: " << (c.clock == CheckpointClock::wall ? "wall" : "iterations") << '\n';
    if (c.metric == CurveMetric::delta_self) os << "# dt: " << c.dt << '\n';
    for (const auto& [k, v] : metadata) os << "# " << k << ": " << v << '\n';
    os << "# iterations:";
    for (auto it : c.iterations) os << ' ' << it;
    os << '\n';
    os << (c.clock == CheckpointClock::wall ? "seconds" : "iterations") << delim << "value\n";
    for (std::size_t k = 0; k < c.times.size(); ++k) os << c.times[k] << delim << c.values[k] << '\n';
    os.precision(old);
}

}  // namespace bvs
