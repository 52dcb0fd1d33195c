#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "instances.hpp"
#include "multclose/errors.hpp"
#include "multclose/functorial.hpp"

using namespace multclose;
using inst::span;

namespace {

/// F2[x]/(x^3) -> F2[x]/(x^2) with A = F2.
ExtensionQuotient cube_to_square() {
    auto ext = inst::twoext();
    return quotient_of(ext, span(ext->ring(), {{0, 0, 1}}));
}

/// Members of the source lattice containing the kernel.
FamilyPtr above_kernel(const ExtensionQuotient& q) {
    const auto& lat = q.source_lattice();
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < lat->size(); ++k)
        if (contains((*lat)[k], q.phi().kernel())) idx.push_back(k);
    return std::make_shared<const ModuleFamily>(lat, idx, FamilyKind::CUSTOM);
}

std::vector<Subspace> proper_ideals(const FiniteRing& b) {
    std::vector<Subspace> out;
    for (const auto& s : all_subspaces(b.p(), b.dim())) {
        if (s.is_full()) continue;
        bool ideal = true;
        for (std::size_t i = 0; i < b.dim() && ideal; ++i)
            for (const auto& row : s.basis()) ideal &= s.contains(b.mul(b.basis(i), row));
        if (ideal) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("quotient construction") {
    auto q = cube_to_square();
    CHECK(q.target()->ring() == chain_ring(2, 1, 2));
    CHECK(q.target()->subring() == span(q.target()->ring(), {{1, 0}}));
    CHECK_FALSE(q.is_strict());  // ker = span{x^2} is not inside A = F2
    CHECK(q.source_lattice()->size() == 16);
    CHECK(q.target_lattice()->size() == 5);

    auto strict = quotient_of(inst::whole_ext(chain_ring(2, 1, 3)), span(chain_ring(2, 1, 3), {{0, 0, 1}}));
    CHECK(strict.is_strict());

    // phi(A) must be A'
    auto b = chain_ring(2, 1, 3);
    auto phi = quotient_surjection(b, span(b, {{0, 0, 1}}));
    auto wrong = inst::whole_ext(phi.target());
    CHECK_THROWS_AS(ExtensionQuotient(inst::twoext(), wrong, phi), InputError);
}

TEST_CASE("pushforward of the pullback is the identity") {
    auto q = cube_to_square();
    for (auto kind : {FamilyKind::ALL, FamilyKind::ALL_NONZERO, FamilyKind::F0}) {
        auto target = make_family(q.target_lattice(), kind);
        for (auto domain : {PullbackDomain::broad, PullbackDomain::saturated}) {
            auto ops = enumerate_ops(target);
            CHECK(!ops.empty());
            for (const auto& op : ops) {
                auto pulled = pullback_op(q, op, domain);
                CHECK(check_multiplicative(pulled).ok);
                auto back = pushforward_op(q, pulled);
                CHECK(*back.family() == *target);
                CHECK(back == op);
            }
        }
    }
}

TEST_CASE("pullback of the pushforward is the identity above the kernel") {
    auto q = cube_to_square();
    auto fam = above_kernel(q);
    CHECK(fam->flags().upward_closed);
    CHECK(*pullback_family(q, pushforward_family(q, fam), PullbackDomain::saturated) == *fam);
    auto ops = enumerate_ops(fam);
    CHECK(ops.size() == enumerate_ops(pushforward_family(q, fam)).size());
    for (const auto& op : ops) {
        auto pushed = pushforward_op(q, op);
        CHECK(check_multiplicative(pushed).ok);
        CHECK(pullback_op(q, pushed, PullbackDomain::saturated) == op);
    }
}

TEST_CASE("pullback and pushforward preserve the order") {
    auto q = cube_to_square();
    auto target = make_family(q.target_lattice(), FamilyKind::ALL);
    auto ops = enumerate_ops(target);
    for (const auto& a : ops)
        for (const auto& b : ops)
            if (op_leq(a, b)) CHECK(op_leq(pullback_op(q, a), pullback_op(q, b)));
    auto source = pullback_family(q, target);
    auto src_ops = enumerate_ops(source);
    for (const auto& a : src_ops)
        for (const auto& b : src_ops)
            if (op_leq(a, b)) CHECK(op_leq(pushforward_op(q, a), pushforward_op(q, b)));
}

TEST_CASE("modules inside the kernel close to the preimage of the closure of zero") {
    auto q = cube_to_square();
    auto target = make_family(q.target_lattice(), FamilyKind::ALL);
    auto zero = *target->position(Subspace(2, 2));
    for (const auto& op : enumerate_ops(target)) {
        auto pulled = pullback_op(q, op);
        const auto& src = *pulled.family();
        auto expect = q.pull(op.evaluate_module(zero));
        for (std::size_t k = 0; k < src.size(); ++k)
            if (contains(q.phi().kernel(), src[k])) CHECK(pulled.evaluate_module(k) == expect);
    }
}

TEST_CASE("quotient correspondence") {
    auto q = cube_to_square();
    auto fam = above_kernel(q);
    auto report = quotient_iso_check(q, fam);
    CHECK(report.ok);
    CHECK(report.source_count == report.target_count);
    CHECK(report.source_count == 4);
    CHECK(report.pairs.size() == 4);

    // members below the kernel are refused
    auto all = enumerate_submodules(q.source_lattice());
    CHECK_THROWS_AS(quotient_iso_check(q, all), InputError);

    // F2 x F2 -> F2 (kernel outside A)
    auto ext = inst::prime_ext(inst::f2xf2());
    auto q2 = quotient_of(ext, span(ext->ring(), {{0, 1}}));
    CHECK_FALSE(q2.is_strict());
    auto r2 = quotient_iso_check(q2, above_kernel(q2));
    CHECK(r2.ok);
    CHECK(r2.source_count == r2.target_count);
}

TEST_CASE("zero ideal gives the identity correspondence") {
    auto ext = inst::twoext();
    auto q = quotient_of(ext, Subspace(2, 3));
    auto fam = family_f0(q.source_lattice());
    for (const auto& op : enumerate_ops(fam)) {
        auto pushed = pushforward_op(q, op);
        CHECK(pushed.closed_indices() == op.closed_indices());
    }
}

TEST_CASE("property: random quotients and families above the kernel") {
    std::mt19937_64 rng(17);
    std::vector<FiniteRing> rings{chain_ring(2, 1, 3), chain_ring(2, 1, 4), chain_ring(3, 1, 2), chain_ring(2, 2, 2)};
    std::vector<FiniteRing> two{chain_ring(2, 1, 2), chain_ring(2, 1, 1)};
    rings.push_back(product_ring(two));
    std::size_t checked = 0;
    for (const auto& b : rings) {
        auto ideals = proper_ideals(b);
        for (int t = 0; t < 6; ++t) {
            const auto& ideal = ideals[std::uniform_int_distribution<std::size_t>(0, ideals.size() - 1)(rng)];
            auto q = quotient_of(inst::prime_ext(b), ideal);
            auto g0 = above_kernel(q);
            // a random subfamily small enough for the oracle
            std::bernoulli_distribution keep(std::min(1.0, 7.0 / static_cast<double>(g0->size())));
            std::vector<std::size_t> idx;
            for (auto li : g0->lattice_indices())
                if (keep(rng)) idx.push_back(li);
            if (idx.empty()) continue;
            auto sub = std::make_shared<const ModuleFamily>(g0->lattice(), idx, FamilyKind::CUSTOM);
            auto report = quotient_iso_check(q, sub);
            INFO(report.detail);
            CHECK(report.ok);
            if (g0->size() <= 20) CHECK(quotient_iso_check(q, g0).ok);
            ++checked;
        }
    }
    CHECK(checked >= 20);
}
