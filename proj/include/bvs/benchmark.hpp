#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bvs/sampler.hpp"

namespace bvs {

enum class CurveMetric { delta_exact, delta_self };

/// Checkpoints in wall-clock seconds, or in iterations for machine-independent runs.
enum class CheckpointClock { wall, iterations };

std::string to_string(CurveMetric m);
CurveMetric parse_metric(std::string_view text);

struct ConvergenceCurve {
    CurveMetric metric = CurveMetric::delta_exact;
    CheckpointClock clock = CheckpointClock::wall;
    PipEstimator estimator = PipEstimator::rao_blackwell;
    std::vector<double> times;  ///< seconds (wall) or iterations since burn-in
    std::vector<double> values;
    std::vector<std::uint64_t> iterations;  ///< chain iterations after burn-in at each checkpoint
    double dt = 0;                          ///< delta_self only

    /// Throws unless times increase strictly and values are finite and nonnegative.
    void validate() const;
    /// First checkpoint time with value <= level, or a negative number if never reached.
    double first_below(double level) const;
};

/// Anything that produces PIP estimates as it is advanced.
class PipStream {
public:
    virtual ~PipStream() = default;
    virtual void advance(std::uint64_t k) = 0;
    virtual std::uint64_t iterations() const = 0;
    virtual Eigen::VectorXd estimate(PipEstimator e) const = 0;
};

/// One chain; burn-in runs in the constructor.
class ChainStream : public PipStream {
public:
    ChainStream(const Dataset& d, const ModelScorer& scorer, SamplerConfig cfg, const StartSpec& start = {});
    void advance(std::uint64_t k) override;
    std::uint64_t iterations() const override;
    Eigen::VectorXd estimate(PipEstimator e) const override;
    const Chain& chain() const { return *chain_; }

private:
    std::unique_ptr<Chain> chain_;
    std::uint64_t burn_in_;
};

/// Returns the same vector for every estimator and never changes.
class FixedStream : public PipStream {
public:
    explicit FixedStream(Eigen::VectorXd pip) : pip_(std::move(pip)) {}
    void advance(std::uint64_t k) override;
    std::uint64_t iterations() const override { return done_; }
    Eigen::VectorXd estimate(PipEstimator) const override { return pip_; }

private:
    Eigen::VectorXd pip_;
    std::uint64_t done_ = 0;
};

struct Snapshot {
    double time = 0;
    std::uint64_t iterations = 0;
    std::map<PipEstimator, Eigen::VectorXd> pip;
};

/// Advances the stream to every checkpoint in turn and records each estimator there.
std::vector<Snapshot> take_snapshots(PipStream& stream, CheckpointClock clock, const std::vector<double>& checkpoints,
                                     const std::vector<PipEstimator>& estimators);

/// max_i |pip_t(i) - reference(i)| per snapshot.
ConvergenceCurve delta_exact(const std::vector<Snapshot>& snaps, PipEstimator e, const Eigen::VectorXd& reference,
                             CheckpointClock clock);
/// max_i |pip_t(i) - pip_{t-dt}(i)| using consecutive snapshots, which must be dt apart.
ConvergenceCurve delta_self(const std::vector<Snapshot>& snaps, PipEstimator e, double dt, CheckpointClock clock);

/// dt, 2 dt, ... up to and including horizon.
std::vector<double> regular_checkpoints(double dt, double horizon);

ConvergenceCurve delta_exact_curve(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg,
                                   const Eigen::VectorXd& reference, const std::vector<double>& checkpoints,
                                   PipEstimator e, CheckpointClock clock = CheckpointClock::wall);

ConvergenceCurve delta_self_curve(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, double dt,
                                  double horizon, PipEstimator e, CheckpointClock clock = CheckpointClock::wall);

/// '#'-prefixed "key: value" lines, then "seconds,value" (or "iterations,value") rows.
void write_curve(std::ostream& os, const ConvergenceCurve& c,
                 const std::vector<std::pair<std::string, std::string>>& metadata, char delim = ',');

}  // namespace bvs
