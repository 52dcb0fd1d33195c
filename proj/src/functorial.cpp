#include "multclose/functorial.hpp"

#include <algorithm>

#include "multclose/errors.hpp"

namespace multclose {

ExtensionQuotient::ExtensionQuotient(ExtensionPtr source, ExtensionPtr target, RingSurjection phi, const Bounds& bounds)
    : source_(std::move(source)), target_(std::move(target)), phi_(std::move(phi)) {
    if (!source_ || !target_) throw InputError("quotient needs both extensions");
    if (!(phi_.source() == source_->ring()) || !(phi_.target() == target_->ring()))
        throw InputError("surjection does not connect the two extensions");
    if (phi_.image(source_->subring()) != target_->subring())
        throw InputError("phi(A) must equal A'");
    source_lattice_ = SubmoduleLattice::build(source_, bounds);
    target_lattice_ = SubmoduleLattice::build(target_, bounds);
}

Subspace ExtensionQuotient::push(const Subspace& i) const { return target_->stable_hull(phi_.image(i)); }

ExtensionQuotient quotient_of(const ExtensionPtr& ext, const Subspace& ideal, const Bounds& bounds) {
    RingSurjection phi = quotient_surjection(ext->ring(), ideal);
    auto a_image = phi.image(ext->subring()).basis();
    auto target = std::make_shared<const RingExtension>(phi.target(), a_image);
    return ExtensionQuotient(ext, std::move(target), std::move(phi), bounds);
}

FamilyPtr pullback_family(const ExtensionQuotient& q, const FamilyPtr& target_family, PullbackDomain domain) {
    if (target_family->lattice() != q.target_lattice()) throw InputError("family does not live on the target lattice");
    const auto& src = *q.source_lattice();
    std::vector<std::size_t> idx;
    if (domain == PullbackDomain::broad) {
        for (std::size_t k = 0; k < src.size(); ++k)
            if (target_family->contains(q.push(src[k]))) idx.push_back(k);
    } else {
        for (std::size_t k = 0; k < target_family->size(); ++k)
            idx.push_back(src.require_index(q.pull((*target_family)[k])));
    }
    return std::make_shared<const ModuleFamily>(q.source_lattice(), std::move(idx), FamilyKind::CUSTOM);
}

FamilyPtr pushforward_family(const ExtensionQuotient& q, const FamilyPtr& source_family) {
    if (source_family->lattice() != q.source_lattice()) throw InputError("family does not live on the source lattice");
    const auto& tgt = *q.target_lattice();
    std::vector<std::size_t> idx;
    // distinct members may share an image; the family constructor deduplicates
    for (std::size_t k = 0; k < source_family->size(); ++k) idx.push_back(tgt.require_index(q.push((*source_family)[k])));
    return std::make_shared<const ModuleFamily>(q.target_lattice(), std::move(idx), FamilyKind::CUSTOM);
}

namespace {

ClosureOp checked(ClosureOp op, const char* what) {
    auto r = check_multiplicative(op);
    if (!r.ok) throw InvariantError(std::string(what) + " is not multiplicative: " + r.axiom);
    return op;
}

}  // namespace

ClosureOp pullback_op(const ExtensionQuotient& q, const ClosureOp& op, PullbackDomain domain) {
    const ModuleFamily& tgt = *op.family();
    if (!tgt.flags().upward_closed) throw UnsupportedError("pullback needs an upward closed target family");
    FamilyPtr family = pullback_family(q, op.family(), domain);
    std::vector<std::size_t> image(family->size());
    for (std::size_t k = 0; k < family->size(); ++k) {
        auto t = tgt.position(q.push((*family)[k]));
        if (!t) throw InvariantError("pushed member left the target family");
        auto s = family->position(q.pull(op.evaluate_module(*t)));
        if (!s) throw InvariantError("pulled-back closure left the source family");
        image[k] = *s;
    }
    return checked(ClosureOp::from_map(family, image), "pullback");
}

ClosureOp pushforward_op(const ExtensionQuotient& q, const ClosureOp& op) {
    const ModuleFamily& src = *op.family();
    bool all_contain_kernel = true;
    for (std::size_t k = 0; k < src.size() && all_contain_kernel; ++k)
        all_contain_kernel = src[k].contains(q.phi().kernel());
    if (!src.flags().upward_closed && !all_contain_kernel)
        throw UnsupportedError("pushforward needs an upward closed family or members containing the kernel");
    FamilyPtr family = pushforward_family(q, op.family());
    std::vector<std::size_t> image(family->size());
    for (std::size_t k = 0; k < family->size(); ++k) {
        auto s = src.position(q.pull((*family)[k]));
        if (!s) throw InvariantError("preimage of a pushed member left the source family");
        auto t = family->position(q.push(op.evaluate_module(*s)));
        if (!t) throw InvariantError("pushed closure left the target family");
        image[k] = *t;
    }
    return checked(ClosureOp::from_map(family, image), "pushforward");
}

namespace {

std::vector<ClosureOp> all_ops(const FamilyPtr& family, const Bounds& bounds) {
    if (family->flags().upward_closed) return enumerate_ops(family, bounds);
    std::vector<ClosureOp> ops;
    for (const auto& img : oracle_enumerate(family, bounds)) ops.push_back(ClosureOp::from_map(family, img));
    return ops;
}

}  // namespace

QuotientIsoReport quotient_iso_check(const ExtensionQuotient& q, const FamilyPtr& family, const Bounds& bounds) {
    for (std::size_t k = 0; k < family->size(); ++k)
        if (!(*family)[k].contains(q.phi().kernel()))
            throw InputError("member " + std::to_string(k) + " does not contain the kernel");
    QuotientIsoReport report;
    auto source_ops = all_ops(family, bounds);
    FamilyPtr target_family = pushforward_family(q, family);
    auto target_ops = all_ops(target_family, bounds);
    report.source_count = source_ops.size();
    report.target_count = target_ops.size();

    std::vector<char> hit(target_ops.size(), 0);
    for (std::size_t s = 0; s < source_ops.size(); ++s) {
        ClosureOp pushed = pushforward_op(q, source_ops[s]);
        auto it = std::find(target_ops.begin(), target_ops.end(), pushed);
        if (it == target_ops.end()) {
            report.detail = "pushforward of op " + std::to_string(s) + " is not among the target operations";
            return report;
        }
        std::size_t t = static_cast<std::size_t>(it - target_ops.begin());
        if (hit[t]) {
            report.detail = "target op " + std::to_string(t) + " is hit twice";
            return report;
        }
        hit[t] = 1;
        report.pairs.emplace_back(s, t);
    }
    if (report.source_count != report.target_count) {
        report.detail = "pushforward is not onto";
        return report;
    }
    for (const auto& [s1, t1] : report.pairs)
        for (const auto& [s2, t2] : report.pairs)
            if (op_leq(source_ops[s1], source_ops[s2]) != op_leq(target_ops[t1], target_ops[t2])) {
                report.detail = "pushforward does not preserve the order";
                return report;
            }
    report.ok = true;
    return report;
}

}  // namespace multclose
