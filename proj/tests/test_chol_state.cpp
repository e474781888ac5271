#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bvs/chol_state.hpp"
#include "bvs/sufficient_stats.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace bvs;

namespace {

Dataset walk_data(std::uint64_t seed = 3) {
    testing::SyntheticSpec s;
    s.n = 50;
    s.p = 10;
    s.seed = seed;
    s.correlation = 0.6;
    s.beta = {0.4, -0.2, 0.0, 0.3, 0.0, 0.0, 0.1, 0.0, 0.0, 0.2};
    return testing::synthetic_dataset(s);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("add to the empty state is simple regression") {
    const auto d = walk_data();
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys);
    st.add(3);
    const Eigen::VectorXd yc = d.y.array() - d.y.mean();
    const double want = d.sst() - std::pow(d.X.col(3).dot(yc), 2) / d.X.col(3).squaredNorm();
    CHECK(rel(st.sse(), want) < 1e-12);
    st.drop(3);
    CHECK(st.sse() == doctest::Approx(d.sst()).epsilon(1e-12));
    CHECK(st.size() == 0);
}

TEST_CASE("add then drop restores sse; drops commute") {
    const auto d = walk_data();
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys, ModelIndex::from_string("1101000100"));
    const double before = st.sse();
    st.add(5);
    CHECK(st.sse() <= before);
    st.drop(5);
    CHECK(rel(st.sse(), before) < 1e-9);

    CholState<> a(sys, ModelIndex::from_string("1101100110"));
    CholState<> b = a;
    a.drop(1);
    a.drop(7);
    b.drop(7);
    b.drop(1);
    CHECK(rel(a.sse(), b.sse()) < 1e-9);
    CHECK(a.included() == b.included());
}

TEST_CASE("500-step random add/drop walk tracks the from-scratch sse") {
    const auto d = walk_data(9);
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys);
    std::mt19937_64 rng(17);
    double worst = 0;
    for (int step = 0; step < 500; ++step) {
        st.toggle(static_cast<int>(rng() % 10));
        double oracle_sse = 0;
        oracle::mgs_least_squares(d.X, d.y, st.included().included(), oracle_sse);
        worst = std::max(worst, rel(st.sse(), oracle_sse));
    }
    CHECK(worst < 1e-8);
    CHECK(st.fallbacks() == 0);
}

TEST_CASE("coefficients and factor agree with independent least squares") {
    const auto d = walk_data(4);
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys, ModelIndex::from_string("0110100011"));
    st.drop(2);
    st.add(0);
    const auto& cols = st.columns();
    double sse = 0;
    const Eigen::VectorXd want = oracle::mgs_least_squares(d.X, d.y, cols, sse);
    const Eigen::VectorXd got = st.coefficients();
    for (Eigen::Index k = 0; k < want.size(); ++k) CHECK(got(k) == doctest::Approx(want(k)).epsilon(1e-10));
    Eigen::MatrixXd sub(cols.size(), cols.size());
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) sub(a, b) = sys.gram(cols[a], cols[b]);
    const Eigen::MatrixXd R = st.factor();
    CHECK((R.transpose() * R - sub).norm() < 1e-9 * sub.norm());
}

TEST_CASE("refresh removes drift without changing the answer") {
    const auto d = walk_data(5);
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys, ModelIndex::from_string("1111011111"));
    const double before = st.sse();
    st.refresh();
    CHECK(rel(st.sse(), before) < 1e-10);
}

TEST_CASE("pivot breakdown falls back to a from-scratch recomputation") {
    testing::SyntheticSpec s;
    s.n = 40;
    s.p = 3;
    s.seed = 8;
    s.beta = {1.0, 0.5, 0.0};
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    testing::simulate(s, X, y);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, 2) = X(i, 0) + 1e-7 * z(rng);
    const auto d = make_dataset(X, y, {});
    const auto sys = GramSystem<double>::from(d);
    CholState<> st(sys);
    st.add(0);
    st.add(2);
    CHECK(st.fallbacks() == 1);
    const auto ref = stats_from_scratch(d, st.included());
    CHECK(rel(st.sse(), ref.sse) < 1e-8);
}

TEST_CASE("single-precision instantiation") {
    const auto d = walk_data();
    const auto sys = GramSystem<float>::from(d);
    CholState<float> st(sys, ModelIndex::from_string("1000000001"));
    const auto ref = stats_from_scratch(d, ModelIndex::from_string("1000000001"));
    CHECK(std::abs(st.sse() - ref.sse) / ref.sse < 1e-4);
}
