#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bvs/error.hpp"
#include "bvs/gray_code.hpp"

using namespace bvs;

namespace {

std::vector<std::string> collect(int p, const std::vector<bool>& mask) {
    auto walk = index_iter(p, mask);
    std::vector<std::string> out;
    for (const auto& m : walk) out.push_back(m.to_string());
    return out;
}

}  // namespace

TEST_CASE("p = 3 follows the reflected Gray code") {
    CHECK(collect(3, {}) == std::vector<std::string>{"000", "001", "011", "010", "110", "111", "101", "100"});
}

TEST_CASE("a fixed coordinate stays pinned") {
    CHECK(collect(2, {true, false}) == std::vector<std::string>{"10", "11"});
}

TEST_CASE("p = 15 yields 32768 models") {
    auto walk = index_iter(15, {});
    std::uint64_t count = 0;
    for (const auto& m : walk) {
        (void)m;
        ++count;
    }
    CHECK(count == 32768);
}

TEST_CASE("completeness and unit Hamming steps for p <= 12") {
    for (int p = 1; p <= 12; ++p) {
        std::vector<bool> mask(p, false);
        if (p > 3) mask[p / 2] = true;
        auto walk = index_iter(p, mask);
        std::set<std::string> seen;
        std::string prev;
        for (const auto& m : walk) {
            const auto s = m.to_string();
            if (!prev.empty()) {
                int dist = 0;
                for (int i = 0; i < p; ++i) dist += s[i] != prev[i];
                CHECK(dist == 1);
            }
            if (p > 3) CHECK(s[p / 2] == '1');
            seen.insert(s);
            prev = s;
        }
        const int free = p > 3 ? p - 1 : p;
        CHECK(seen.size() == (std::size_t{1} << free));
    }
}

TEST_CASE("model codes put the first free column in the top bit") {
    const std::vector<int> free{0, 2, 3};
    const auto m = ModelIndex::from_string("1001");
    CHECK(model_code(m, free) == 0b101);
    CHECK(model_from_code(0b011, free, ModelIndex(4)).to_string() == "0011");
    auto walk = index_iter(4, {});
    std::uint64_t k = 0;
    for (const auto& x : walk) CHECK(model_code(x, {0, 1, 2, 3}) == gray_code(k++));
}

TEST_CASE("enumeration cap") {
    CHECK_THROWS_AS(index_iter(31, {}), Error);
    try {
        index_iter(12, {}, 10);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resource_cap);
    }
}
