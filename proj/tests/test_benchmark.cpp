#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "bvs/benchmark.hpp"
#include "bvs/error.hpp"
#include "bvs/exact_posterior.hpp"
#include "bvs/summary.hpp"
#include "support/synthetic.hpp"

using namespace bvs;

namespace {

SamplerConfig gibbs(std::uint64_t seed, std::uint64_t burn = 100) {
    SamplerConfig c;
    c.iterations = burn + 1;
    c.burn_in = burn;
    c.seed = seed;
    return c;
}

Eigen::VectorXd exact_pip(const Dataset& d, const GPriorSpec& g, const ModelPriorSpec& m) {
    return summarize(enumerate(d, g, m), d).pip;
}

}  // namespace

TEST_CASE("exact distribution as the stream gives a zero curve") {
    const auto d = testing::crime_like();
    const auto ref = exact_pip(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    FixedStream stream(ref);
    const auto snaps = take_snapshots(stream, CheckpointClock::wall, {0.01, 0.02, 0.03},
                                      {PipEstimator::rao_blackwell, PipEstimator::frequency});
    for (auto e : {PipEstimator::rao_blackwell, PipEstimator::frequency}) {
        const auto c = delta_exact(snaps, e, ref, CheckpointClock::wall);
        REQUIRE(c.values.size() == 3);
        for (double v : c.values) CHECK(v == 0.0);
        c.validate();
    }
}

TEST_CASE("frozen estimator gives a zero self-convergence curve") {
    Eigen::VectorXd pip(4);
    pip << 0.1, 0.5, 0.25, 0.9;
    FixedStream stream(pip);
    const auto snaps = take_snapshots(stream, CheckpointClock::iterations, regular_checkpoints(10, 60),
                                      {PipEstimator::frequency});
    const auto c = delta_self(snaps, PipEstimator::frequency, 10, CheckpointClock::iterations);
    CHECK(c.values.size() == 5);
    for (double v : c.values) CHECK(v == 0.0);
    CHECK(c.times.front() == 20);
}

TEST_CASE("iteration-clock curves are reproducible given the seed") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    const auto ref = exact_pip(d, scorer.gprior(), scorer.model_prior());
    const auto cps = regular_checkpoints(200, 2000);
    const auto a = delta_exact_curve(d, scorer, gibbs(5), ref, cps, PipEstimator::rao_blackwell,
                                     CheckpointClock::iterations);
    const auto b = delta_exact_curve(d, scorer, gibbs(5), ref, cps, PipEstimator::rao_blackwell,
                                     CheckpointClock::iterations);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
    CHECK(a.iterations.back() == 2000);
    a.validate();
    const auto s1 = delta_self_curve(d, scorer, gibbs(6), 100, 1000, PipEstimator::frequency,
                                     CheckpointClock::iterations);
    const auto s2 = delta_self_curve(d, scorer, gibbs(6), 100, 1000, PipEstimator::frequency,
                                     CheckpointClock::iterations);
    CHECK(s1.values == s2.values);
}

TEST_CASE("snapshots do not perturb the chain") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    ChainStream stream(d, scorer, gibbs(9));
    take_snapshots(stream, CheckpointClock::iterations, {7, 50, 300, 1000},
                   {PipEstimator::rao_blackwell, PipEstimator::renormalized, PipEstimator::frequency});
    SamplerConfig plain = gibbs(9);
    plain.iterations = 1100;
    const auto t = run_sampler(d, scorer, plain);
    CHECK(stream.estimate(PipEstimator::rao_blackwell) == estimate_pip(t, PipEstimator::rao_blackwell));
    CHECK(stream.estimate(PipEstimator::frequency) == estimate_pip(t, PipEstimator::frequency));
}

TEST_CASE("triangle inequality between self and exact curves from one trace") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    const auto ref = exact_pip(d, scorer.gprior(), scorer.model_prior());
    ChainStream stream(d, scorer, gibbs(3));
    const std::vector<PipEstimator> es{PipEstimator::rao_blackwell, PipEstimator::frequency,
                                       PipEstimator::renormalized};
    const auto snaps = take_snapshots(stream, CheckpointClock::iterations, regular_checkpoints(100, 3000), es);
    for (auto e : es) {
        const auto ex = delta_exact(snaps, e, ref, CheckpointClock::iterations);
        const auto se = delta_self(snaps, e, 100, CheckpointClock::iterations);
        REQUIRE(se.values.size() + 1 == ex.values.size());
        for (std::size_t k = 0; k < se.values.size(); ++k) {
            CHECK(se.times[k] == ex.times[k + 1]);
            CHECK(se.values[k] <= ex.values[k + 1] + ex.values[k] + 1e-15);
        }
    }
    const auto rb = delta_exact(snaps, PipEstimator::rao_blackwell, ref, CheckpointClock::iterations);
    const auto fr = delta_exact(snaps, PipEstimator::frequency, ref, CheckpointClock::iterations);
    CHECK(rb.times == fr.times);
    CHECK(rb.iterations == fr.iterations);
}

TEST_CASE("halving dt: the coarse curve is bounded by adjacent fine values") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    const auto coarse = delta_self_curve(d, scorer, gibbs(4), 200, 2000, PipEstimator::rao_blackwell,
                                         CheckpointClock::iterations);
    const auto fine = delta_self_curve(d, scorer, gibbs(4), 100, 2000, PipEstimator::rao_blackwell,
                                       CheckpointClock::iterations);
    // fine point k sits at (k + 2) * 100; coarse point m at (m + 2) * 200 = fine index 2m + 2.
    for (std::size_t m = 0; m < coarse.values.size(); ++m) {
        const std::size_t k = 2 * m + 2;
        REQUIRE(fine.times[k] == coarse.times[m]);
        CHECK(coarse.values[m] <= fine.values[k] + fine.values[k - 1] + 1e-15);
    }
}

TEST_CASE("wall-clock curve reaches the exact answer on the Crime-shaped data") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    const auto ref = exact_pip(d, scorer.gprior(), scorer.model_prior());
    const auto c = delta_exact_curve(d, scorer, gibbs(1, 1000), ref, regular_checkpoints(0.25, 3.0),
                                     PipEstimator::rao_blackwell);
    c.validate();
    CHECK(c.values.size() == 12);
    const double t = c.first_below(0.01);
    INFO("values " << c.values.front() << " ... " << c.values.back());
    CHECK(t > 0);
    CHECK(t <= 3.0);
}

TEST_CASE("p = 20 self-convergence settles below 0.01") {
    testing::SyntheticSpec s;
    s.n = 100;
    s.p = 20;
    s.seed = 20;
    s.noise = 3.0;
    s.beta = {0.5, 0.0, 0.3, 0.0, 0.0, 0.2, 0.0, 0.0, 0.0, 0.1};
    const auto d = testing::synthetic_dataset(s);
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::scott_berger());
    const auto c = delta_self_curve(d, scorer, gibbs(20, 1000), 5000, 40000, PipEstimator::rao_blackwell,
                                    CheckpointClock::iterations);
    c.validate();
    REQUIRE(c.values.size() == 7);
    INFO("last " << c.values.back());
    CHECK(c.values.back() < 0.01);
    CHECK(c.values.back() <= c.values.front());
    for (std::size_t k = 2; k < c.values.size(); ++k) CHECK(c.values[k] < 0.01);
}

TEST_CASE("argument checks") {
    const auto d = testing::crime_like();
    const ModelScorer scorer(d, parse_gprior("uip"), ModelPriorSpec::fixed(0.5));
    CHECK_THROWS_AS(delta_exact_curve(d, scorer, gibbs(1), Eigen::VectorXd::Zero(3), {1.0},
                                      PipEstimator::rao_blackwell, CheckpointClock::iterations),
                    Error);
    CHECK_THROWS_AS(delta_self_curve(d, scorer, gibbs(1), 10, 20, PipEstimator::rao_blackwell,
                                     CheckpointClock::iterations),
                    Error);
    FixedStream fs(Eigen::VectorXd::Zero(2));
    CHECK_THROWS_AS(take_snapshots(fs, CheckpointClock::iterations, {2, 1}, {PipEstimator::frequency}), Error);
    CHECK(parse_metric("delta-self") == CurveMetric::delta_self);
    CHECK_THROWS_AS(parse_metric("delta"), Error);
    CHECK(regular_checkpoints(0.5, 2.0) == std::vector<double>{0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("curve file has a metadata header and two columns") {
    ConvergenceCurve c;
    c.metric = CurveMetric::delta_self;
    c.dt = 60;
    c.times = {120, 180};
    c.values = {0.02, 0.005};
    c.iterations = {1000, 1500};
    std::ostringstream os;
    write_curve(os, c, {{"seed", "7"}, {"gprior", "uip"}});
    const std::string out = os.str();
    CHECK(out.find("# metric: delta-self\n") == 0);
    CHECK(out.find("# seed: 7\n") != std::string::npos);
    CHECK(out.find("# dt: 60\n") != std::string::npos);
    CHECK(out.find("# iterations: 1000 1500\n") != std::string::npos);
    CHECK(out.find("seconds,value\n120,0.02\n180,0.0050000000000000001\n") != std::string::npos);
}
