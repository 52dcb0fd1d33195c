#include "multclose/submodules.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <thread>

#include "multclose/errors.hpp"

namespace multclose {

namespace {

void require_ambient(const FiniteRing& b, const Subspace& s) {
    if (s.p() != b.p() || s.ambient_dim() != b.dim()) throw InputError("subspace does not live in B");
}

}  // namespace

Subspace colon(const FiniteRing& b, const Subspace& i, const Subspace& j) {
    require_ambient(b, i);
    require_ambient(b, j);
    const std::size_t d = b.dim();
    if (j.is_zero()) return Subspace::full(b.p(), d);
    const std::size_t r = j.rank();
    // row t of the map: (e_t j_1 mod I, ..., e_t j_r mod I)
    std::vector<Residue> images(d * d * r);
    for (std::size_t k = 0; k < r; ++k) {
        auto m = b.multiplication_rows(j.row(k));
        for (std::size_t t = 0; t < d; ++t) {
            std::span<Residue> dst(images.data() + t * d * r + k * d, d);
            std::copy(m.begin() + t * d, m.begin() + (t + 1) * d, dst.begin());
            i.reduce_in_place(dst);
        }
    }
    return linear_kernel(b.p(), d, d * r, images);
}

Subspace colon(const FiniteRing& b, const Subspace& i, const FpVec& elem) {
    return colon(b, i, rref(std::span<const FpVec>(&elem, 1), b.p(), b.dim()));
}

Subspace product(const FiniteRing& b, const Subspace& i, const Subspace& j) {
    require_ambient(b, i);
    require_ambient(b, j);
    const std::size_t d = b.dim();
    std::vector<Residue> m(i.rank() * j.rank() * d);
    for (std::size_t x = 0; x < i.rank(); ++x)
        for (std::size_t y = 0; y < j.rank(); ++y)
            b.mul_into(i.row(x), j.row(y), std::span<Residue>(m.data() + (x * j.rank() + y) * d, d));
    return rref_flat(b.p(), d, std::move(m));
}

// ---------------------------------------------------------------------------

Submodule::Submodule(ExtensionPtr ext, Subspace space) : ext_(std::move(ext)), space_(std::move(space)) {
    if (!ext_) throw InputError("submodule without an extension");
    require_ambient(ext_->ring(), space_);
    if (!ext_->is_stable(space_)) throw InputError("subspace is not an A-submodule");
}

static void require_same_ext(const Submodule& i, const Submodule& j) {
    if (i.ext() != j.ext() && !(*i.ext() == *j.ext()))
        throw InputError("submodules belong to different extensions");
}

Submodule colon_module(const Submodule& i, const Submodule& j) {
    require_same_ext(i, j);
    Subspace c = colon(i.ext()->ring(), i.space(), j.space());
    // I A-stable is what makes (I:J) A-stable; J plays no role.
    if (!i.ext()->is_stable(c)) throw InvariantError("colon of A-submodules is not A-stable");
    return Submodule(i.ext(), std::move(c));
}

Submodule colon_element(const Submodule& i, const FpVec& b) {
    Subspace c = colon(i.ext()->ring(), i.space(), b);
    if (!i.ext()->is_stable(c)) throw InvariantError("element colon of an A-submodule is not A-stable");
    return Submodule(i.ext(), std::move(c));
}

Submodule module_product(const Submodule& i, const Submodule& j) {
    require_same_ext(i, j);
    return Submodule(i.ext(), product(i.ext()->ring(), i.space(), j.space()));
}

// ---------------------------------------------------------------------------

std::shared_ptr<const SubmoduleLattice> SubmoduleLattice::build(ExtensionPtr ext, const Bounds& bounds) {
    if (!ext) throw InputError("lattice without an extension");
    if (ext->dim() > bounds.max_dim)
        throw ResourceError("dimension " + std::to_string(ext->dim()) + " of B exceeds the bound " +
                            std::to_string(bounds.max_dim));
    if (ext->p() > bounds.max_prime)
        throw ResourceError("prime " + std::to_string(ext->p()) + " exceeds the bound " +
                            std::to_string(bounds.max_prime));

    std::shared_ptr<SubmoduleLattice> lat(new SubmoduleLattice());
    lat->ext_ = ext;
    enumerate_subspaces(
        ext->p(), ext->dim(),
        [&](const Subspace& s) {
            if (ext->is_stable(s)) lat->members_.push_back(s);
        },
        bounds);
    for (std::size_t k = 0; k < lat->members_.size(); ++k) lat->index_.emplace(lat->members_[k], k);
    lat->whole_ = lat->require_index(Subspace::full(ext->p(), ext->dim()));

    const std::uint32_t p = ext->p();
    const std::size_t d = ext->dim();
    const std::size_t n = lat->members_.size();
    lat->up_.assign(n, {});
    lat->down_.assign(n, {});

    auto work = [&](std::size_t first, std::size_t step) {
        std::vector<Residue> v(d), prod(d);
        for (std::size_t k = first; k < n; k += step) {
            const Subspace& s = lat->members_[k];
            std::vector<std::size_t> free;
            for (std::size_t c = 0, t = 0; c < d; ++c) {
                if (t < s.rank() && s.pivots()[t] == c)
                    ++t;
                else
                    free.push_back(c);
            }
            // normal forms with leading free coordinate 1, one per line
            std::vector<std::size_t> nb;
            for (std::size_t lead = 0; lead < free.size(); ++lead) {
                std::vector<Residue> tail(free.size() - lead - 1, 0);
                while (true) {
                    std::fill(v.begin(), v.end(), 0);
                    v[free[lead]] = 1;
                    for (std::size_t t = 0; t < tail.size(); ++t) v[free[lead + 1 + t]] = tail[t];
                    std::vector<Residue> m(s.flat_rows());
                    const Subspace& a = ext->subring();
                    for (std::size_t r = 0; r < a.rank(); ++r) {
                        ext->ring().mul_into(a.row(r), v, prod);
                        m.insert(m.end(), prod.begin(), prod.end());
                    }
                    nb.push_back(lat->require_index(rref_flat(p, d, std::move(m))));
                    std::size_t t = 0;
                    while (t < tail.size() && ++tail[t] == p) tail[t++] = 0;
                    if (t == tail.size()) break;
                }
            }
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            lat->up_[k] = std::move(nb);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(bounds.workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j : lat->up_[k]) lat->down_[j].push_back(k);
    return lat;
}

std::optional<std::size_t> SubmoduleLattice::index_of(const Subspace& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t SubmoduleLattice::require_index(const Subspace& s) const {
    auto k = index_of(s);
    if (!k) throw InvariantError("module " + s.serialize() + " is missing from the submodule lattice");
    return *k;
}

// ---------------------------------------------------------------------------

std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::F0: return "f0";
        case FamilyKind::ALL: return "all";
        case FamilyKind::ALL_NONZERO: return "all-nonzero";
        case FamilyKind::IDEALS: return "ideals";
        case FamilyKind::CUSTOM: return "custom";
    }
    return "?";
}

FamilyKind parse_family_kind(const std::string& s) {
    if (s == "f0") return FamilyKind::F0;
    if (s == "all") return FamilyKind::ALL;
    if (s == "all-nonzero") return FamilyKind::ALL_NONZERO;
    if (s == "ideals") return FamilyKind::IDEALS;
    throw InputError("unknown family '" + s + "' (expected f0, all, all-nonzero or ideals)");
}

ModuleFamily::ModuleFamily(LatticePtr lattice, std::vector<std::size_t> idx, FamilyKind kind)
    : lattice_(std::move(lattice)), members_(std::move(idx)), kind_(kind) {
    if (!lattice_) throw InputError("family without a lattice");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (members_.empty()) throw InputError("a family must have at least one member");
    const std::size_t n = lattice_->size();
    if (members_.back() >= n) throw InputError("family member outside the lattice");
    pos_.assign(n, -1);
    for (std::size_t k = 0; k < members_.size(); ++k) pos_[members_[k]] = static_cast<std::int32_t>(k);

    auto in = [&](std::size_t li) { return pos_[li] >= 0; };
    flags_.upward_closed = flags_.downward_closed = true;
    for (std::size_t li : members_) {
        for (std::size_t u : lattice_->up(li))
            if (!in(u)) flags_.upward_closed = false;
        for (std::size_t u : lattice_->down(li))
            if (!in(u)) flags_.downward_closed = false;
    }
    auto saturate = [&](bool upward) {
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> q(members_.begin(), members_.end());
        for (std::size_t li : members_) seen[li] = 1;
        while (!q.empty()) {
            std::size_t li = q.front();
            q.pop_front();
            for (std::size_t nb : upward ? lattice_->up(li) : lattice_->down(li))
                if (!seen[nb]) {
                    seen[nb] = 1;
                    q.push_back(nb);
                }
        }
        return seen;
    };
    auto above = saturate(true), below = saturate(false);
    flags_.interval = true;
    for (std::size_t li = 0; li < n; ++li)
        if (above[li] && below[li] && !in(li)) flags_.interval = false;

    const FiniteRing& b = lattice_->ring();
    Subspace total(b.p(), b.dim()), meet = Subspace::full(b.p(), b.dim());
    for (std::size_t li : members_) {
        total = subspace_sum(total, (*lattice_)[li]);
        meet = subspace_meet(meet, (*lattice_)[li]);
    }
    max_ = position(total);
    min_ = position(meet);
    flags_.has_maximum = max_.has_value();
    flags_.has_minimum = min_.has_value();
}

std::optional<std::size_t> ModuleFamily::position(const Subspace& s) const {
    auto li = lattice_->index_of(s);
    if (!li) return std::nullopt;
    return position_of_lattice(*li);
}

void ModuleFamily::build_order_tables() const {
    const std::size_t n = size();
    auto& t = *tables_;
    t.supersets.assign(n, boost::dynamic_bitset<>(n));
    t.meet.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if ((*this)[j].contains((*this)[i])) t.supersets[i].set(j);
            if (j < i) continue;
            auto m = position(subspace_meet((*this)[i], (*this)[j]));
            std::int32_t v = m ? static_cast<std::int32_t>(*m) : -1;
            t.meet[i * n + j] = t.meet[j * n + i] = v;
        }
}

void ModuleFamily::build_colon_tables() const {
    auto& t = *tables_;
    const FiniteRing& b = ring();
    for (auto& v : all_vectors(b.p(), b.dim())) {
        auto lead = std::find_if(v.coords().begin(), v.coords().end(), [](Residue c) { return c != 0; });
        if (lead != v.coords().end() && *lead == 1) t.lines.push_back(std::move(v));
    }
    const std::size_t n = size(), m = t.lines.size();
    t.colons.assign(n * m, 0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t e = 0; e < m; ++e) t.colons[k * m + e] = lattice_->require_index(colon(b, (*this)[k], t.lines[e]));
}

const boost::dynamic_bitset<>& ModuleFamily::supersets(std::size_t k) const {
    std::call_once(tables_->order_once, [this] { build_order_tables(); });
    return tables_->supersets[k];
}

std::int32_t ModuleFamily::meet(std::size_t k, std::size_t j) const {
    std::call_once(tables_->order_once, [this] { build_order_tables(); });
    return tables_->meet[k * size() + j];
}

const std::vector<FpVec>& ModuleFamily::line_elements() const {
    std::call_once(tables_->colon_once, [this] { build_colon_tables(); });
    return tables_->lines;
}

std::size_t ModuleFamily::element_colon(std::size_t k, std::size_t e) const {
    std::call_once(tables_->colon_once, [this] { build_colon_tables(); });
    return tables_->colons[k * tables_->lines.size() + e];
}

FamilyPtr enumerate_submodules(const LatticePtr& lattice) {
    std::vector<std::size_t> idx(lattice->size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    return std::make_shared<const ModuleFamily>(lattice, std::move(idx), FamilyKind::ALL);
}

FamilyPtr family_all_nonzero(const LatticePtr& lattice) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < lattice->size(); ++k)
        if (!(*lattice)[k].is_zero()) idx.push_back(k);
    return std::make_shared<const ModuleFamily>(lattice, std::move(idx), FamilyKind::ALL_NONZERO);
}

FamilyPtr family_f0(const LatticePtr& lattice) {
    const FiniteRing& b = lattice->ring();
    const Subspace whole = Subspace::full(b.p(), b.dim());
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < lattice->size(); ++k)
        if (product(b, (*lattice)[k], whole).is_full()) idx.push_back(k);
    return std::make_shared<const ModuleFamily>(lattice, std::move(idx), FamilyKind::F0);
}

FamilyPtr family_ideals(const LatticePtr& lattice) {
    if (!lattice->ext()->subring().is_full())
        throw InputError("the ideals family needs A = B");
    std::vector<std::size_t> idx(lattice->size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    return std::make_shared<const ModuleFamily>(lattice, std::move(idx), FamilyKind::IDEALS);
}

FamilyPtr make_family(const LatticePtr& lattice, FamilyKind kind) {
    switch (kind) {
        case FamilyKind::F0: return family_f0(lattice);
        case FamilyKind::ALL: return enumerate_submodules(lattice);
        case FamilyKind::ALL_NONZERO: return family_all_nonzero(lattice);
        case FamilyKind::IDEALS: return family_ideals(lattice);
        case FamilyKind::CUSTOM: break;
    }
    throw InputError("custom families need an explicit member list");
}

FamilyPtr custom_family(const LatticePtr& lattice, std::span<const Subspace> members) {
    std::vector<std::size_t> idx;
    for (const auto& s : members) {
        auto li = lattice->index_of(s);
        if (!li) throw InputError("family member " + s.serialize() + " is not an A-submodule of B");
        idx.push_back(*li);
    }
    return std::make_shared<const ModuleFamily>(lattice, std::move(idx), FamilyKind::CUSTOM);
}

std::string format_family(const ModuleFamily& fam) {
    std::ostringstream out;
    for (std::size_t k = 0; k < fam.size(); ++k)
        out << k << '\t' << fam[k].rank() << '\t' << fam[k].serialize() << '\n';
    return out.str();
}

}  // namespace multclose
