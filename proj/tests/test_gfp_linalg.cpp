#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "multclose/errors.hpp"
#include "multclose/gfp_linalg.hpp"
#include "oracles.hpp"

using namespace multclose;

namespace {

FpVec v(std::uint32_t p, std::vector<Residue> c) { return FpVec(p, std::move(c)); }

Subspace span2(std::vector<std::vector<Residue>> rows, std::uint32_t p = 2) {
    std::vector<FpVec> vs;
    for (auto& r : rows) vs.push_back(v(p, r));
    return rref(vs, p, vs.empty() ? 0 : vs[0].size());
}

Subspace random_subspace(std::mt19937_64& rng, std::uint32_t p, std::size_t n) {
    std::uniform_int_distribution<std::size_t> count(0, n + 1);
    std::uniform_int_distribution<Residue> coord(0, p - 1);
    std::vector<FpVec> rows;
    for (std::size_t k = count(rng); k > 0; --k) {
        std::vector<Residue> c(n);
        for (auto& x : c) x = coord(rng);
        rows.push_back(v(p, c));
    }
    return rref(rows, p, n);
}

}  // namespace

TEST_CASE("rref examples") {
    CHECK(span2({{1, 1}, {0, 1}}).serialize() == "1 0;0 1");
    CHECK(span2({{0, 0}}).is_zero());
    CHECK(span2({{0, 0}}).serialize() == "0");
    CHECK(span2({{1, 1, 0}, {1, 1, 1}}).serialize() == "1 1 0;0 0 1");
}

TEST_CASE("rref rejects mixed input") {
    std::vector<FpVec> mixed_len{v(2, {1, 0}), v(2, {1, 0, 1})};
    CHECK_THROWS_AS(rref(mixed_len, 2, 2), InputError);
    std::vector<FpVec> mixed_p{v(2, {1, 0}), v(3, {1, 2})};
    CHECK_THROWS_AS(rref(mixed_p, 2, 2), InputError);
}

TEST_CASE("meet and sum examples") {
    auto a = span2({{1, 0}}), b = span2({{0, 1}});
    CHECK(subspace_meet(a, b).is_zero());
    CHECK(subspace_meet(a, a) == a);
    CHECK(subspace_sum(a, b).is_full());
    CHECK(subspace_sum(a, Subspace(2, 2)) == a);
    CHECK(contains(a, a));
    auto u = span2({{1, 0, 0}, {0, 1, 0}}), w = span2({{0, 1, 0}, {0, 0, 1}});
    CHECK(subspace_meet(u, w) == span2({{0, 1, 0}}));
    CHECK_THROWS_AS(subspace_meet(a, u), InputError);
}

TEST_CASE("serialization round trip") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        std::uint32_t p = t % 2 ? 3 : 2;
        auto s = random_subspace(rng, p, 1 + t % 4);
        CHECK(Subspace::deserialize(p, s.ambient_dim(), s.serialize()) == s);
    }
}

TEST_CASE("subspace counts match the Gaussian binomial sum") {
    CHECK(count_subspaces(2, 2) == 5);
    CHECK(count_subspaces(2, 0) == 1);
    CHECK(count_subspaces(2, 3) == 16);
    for (std::uint32_t p : {2u, 3u, 5u})
        for (std::size_t n = 0; n <= 5; ++n) {
            CAPTURE(p);
            CAPTURE(n);
            auto all = all_subspaces(p, n);
            CHECK(all.size() == oracle::gaussian_sum(p, n));
            CHECK(count_subspaces(p, n) == oracle::gaussian_sum(p, n));
            std::set<std::string> distinct;
            for (auto& s : all) distinct.insert(s.serialize());
            CHECK(distinct.size() == all.size());
            CHECK(std::is_sorted(all.begin(), all.end(), canonical_less));
        }
}

TEST_CASE("enumeration equals brute-force subgroup search") {
    for (auto [p, n] : {std::pair<std::uint32_t, std::size_t>{2, 1}, {2, 2}, {2, 3}, {3, 2}, {2, 4}}) {
        auto brute = oracle::all_subgroups(p, n);
        std::set<oracle::ElemSet> ours;
        for (auto& s : all_subspaces(p, n)) ours.insert(oracle::elements(s));
        CHECK(ours == brute);
    }
}

TEST_CASE("enumeration respects the bound") {
    Bounds b;
    b.max_subspaces = 10;
    CHECK_THROWS_AS(all_subspaces(2, 3, b), ResourceError);
}

TEST_CASE("property: rref is idempotent, meet and sum bound their inputs") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        std::uint32_t p = (t % 3 == 0) ? 3 : (t % 3 == 1 ? 2 : 5);
        std::size_t n = 1 + t % 5;
        auto a = random_subspace(rng, p, n), b = random_subspace(rng, p, n);
        CHECK(rref(a.basis(), p, n) == a);
        auto m = subspace_meet(a, b), s = subspace_sum(a, b);
        CHECK(contains(a, m));
        CHECK(contains(b, m));
        CHECK(contains(s, a));
        CHECK(contains(s, b));
        CHECK(m.rank() + s.rank() == a.rank() + b.rank());
        if (p == 2 && n <= 4) {
            auto ea = oracle::elements(a), eb = oracle::elements(b), em = oracle::elements(m);
            oracle::ElemSet inter;
            std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(inter));
            CHECK(em == inter);
        }
    }
}

TEST_CASE("linear kernel") {
    // F_2^3 -> F_2^1, (a,b,c) -> a+b
    std::vector<Residue> images{1, 1, 0};
    CHECK(linear_kernel(2, 3, 1, images) == span2({{1, 1, 0}, {0, 0, 1}}));
}
