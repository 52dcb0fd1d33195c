#include "multclose/finring.hpp"

#include <algorithm>
#include <sstream>

#include "multclose/errors.hpp"

namespace multclose {

namespace {

void require_vec(const FpVec& v, std::uint32_t p, std::size_t n, const char* what) {
    if (v.p() != p || v.size() != n)
        throw InputError(std::string(what) + ": vector has wrong modulus or length");
}

// Remainder of a modulo the monic b (coefficients low degree first).
std::vector<Residue> poly_mod(std::vector<Residue> a, const std::vector<Residue>& b, const PrimeField& f) {
    const std::size_t db = b.size() - 1;
    while (a.size() > db) {
        Residue lead = a.back();
        std::size_t shift = a.size() - 1 - db;
        if (lead != 0)
            for (std::size_t i = 0; i <= db; ++i)
                a[shift + i] = f.sub(a[shift + i], f.mul(lead, b[i]));
        a.pop_back();
    }
    return a;
}

bool has_root_or_factor(const std::vector<Residue>& poly, std::uint32_t p, std::size_t deg) {
    PrimeField field(p);
    // every monic polynomial of degree k in [1, deg/2]
    for (std::size_t k = 1; 2 * k <= deg; ++k) {
        std::vector<Residue> cand(k + 1, 0);
        cand[k] = 1;
        while (true) {
            auto r = poly_mod(poly, cand, field);
            if (std::all_of(r.begin(), r.end(), [](Residue c) { return c == 0; })) return true;
            std::size_t i = 0;
            while (i < k && ++cand[i] == p) cand[i++] = 0;
            if (i == k) break;
        }
    }
    return false;
}

std::string monomial_label(std::size_t a, std::size_t b, std::size_t f) {
    std::string w, x;
    if (f > 1 && a > 0) w = a == 1 ? "w" : "w^" + std::to_string(a);
    if (b > 0) x = b == 1 ? "x" : "x^" + std::to_string(b);
    if (w.empty() && x.empty()) return "1";
    if (w.empty()) return x;
    if (x.empty()) return w;
    return w + "*" + x;
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteRing::FiniteRing(std::uint32_t p, std::size_t dim, std::vector<FpVec> products, FpVec one,
                       std::vector<std::string> labels)
    : p_(p), dim_(dim), one_(std::move(one)), labels_(std::move(labels)) {
    if (!is_prime(p)) throw InputError("ring characteristic " + std::to_string(p) + " is not prime");
    if (dim == 0) throw InputError("the zero ring is not allowed");
    if (products.size() != dim * dim) throw InputError("structure table must have dim^2 entries");
    require_vec(one_, p, dim, "identity");
    table_.assign(dim * dim * dim, 0);
    for (std::size_t i = 0; i < dim * dim; ++i) {
        require_vec(products[i], p, dim, "structure constant");
        std::copy(products[i].coords().begin(), products[i].coords().end(), table_.begin() + i * dim);
    }
    if (labels_.empty())
        for (std::size_t i = 0; i < dim; ++i) labels_.push_back("e" + std::to_string(i));
    if (labels_.size() != dim) throw InputError("label count must equal dimension");

    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            if (product(i, j) != product(j, i)) throw InputError("multiplication is not commutative");
    for (std::size_t i = 0; i < dim; ++i)
        if (mul(one_, basis(i)) != basis(i)) throw InputError("identity law fails");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                if (mul(product(i, j), basis(k)) != mul(basis(i), product(j, k)))
                    throw InputError("multiplication is not associative");
}

FpVec FiniteRing::product(std::size_t i, std::size_t j) const {
    auto first = table_.begin() + (i * dim_ + j) * dim_;
    return FpVec(p_, std::vector<Residue>(first, first + dim_));
}

void FiniteRing::mul_into(std::span<const Residue> a, std::span<const Residue> b, std::span<Residue> out) const {
    std::vector<std::uint64_t> acc(dim_, 0);
    for (std::size_t i = 0; i < dim_; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < dim_; ++j) {
            if (b[j] == 0) continue;
            std::uint64_t c = std::uint64_t{a[i]} * b[j] % p_;
            const Residue* row = table_.data() + (i * dim_ + j) * dim_;
            for (std::size_t k = 0; k < dim_; ++k) acc[k] += c * row[k];
        }
    }
    for (std::size_t k = 0; k < dim_; ++k) out[k] = static_cast<Residue>(acc[k] % p_);
}

FpVec FiniteRing::mul(const FpVec& a, const FpVec& b) const {
    require_vec(a, p_, dim_, "mul");
    require_vec(b, p_, dim_, "mul");
    std::vector<Residue> out(dim_);
    mul_into(a.coords(), b.coords(), out);
    return FpVec(p_, std::move(out));
}

std::vector<Residue> FiniteRing::multiplication_rows(std::span<const Residue> v) const {
    std::vector<Residue> m(dim_ * dim_, 0);
    std::vector<Residue> e(dim_, 0);
    for (std::size_t k = 0; k < dim_; ++k) {
        e[k] = 1;
        mul_into(e, v, std::span<Residue>(m.data() + k * dim_, dim_));
        e[k] = 0;
    }
    return m;
}

bool FiniteRing::is_unit(const FpVec& v) const {
    require_vec(v, p_, dim_, "is_unit");
    return rref_flat(p_, dim_, multiplication_rows(v.coords())).is_full();
}

std::string FiniteRing::format(const FpVec& v) const {
    std::string out;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (v[i] == 0) continue;
        if (!out.empty()) out += "+";
        if (labels_[i] == "1")
            out += std::to_string(v[i]);
        else if (v[i] == 1)
            out += labels_[i];
        else
            out += std::to_string(v[i]) + "*" + labels_[i];
    }
    return out.empty() ? "0" : out;
}

std::string FiniteRing::format(const Subspace& s) const {
    if (s.is_zero()) return "0";
    std::string out = "span{";
    for (std::size_t r = 0; r < s.rank(); ++r) {
        if (r) out += ",";
        out += format(s.row_vec(r));
    }
    return out + "}";
}

// ---------------------------------------------------------------------------

std::vector<Residue> smallest_irreducible(std::uint32_t p, std::size_t f) {
    if (!is_prime(p)) throw InputError("p must be prime");
    if (f == 0) throw InputError("degree must be positive");
    // c_0 is the most significant coordinate of the comparison, so it varies slowest.
    std::vector<Residue> c(f, 0);
    while (true) {
        std::vector<Residue> poly(c);
        poly.push_back(1);
        if (f == 1 || (c[0] != 0 && !has_root_or_factor(poly, p, f))) return c;
        std::size_t i = f;
        while (i > 0 && ++c[i - 1] == p) c[--i] = 0;
        if (i == 0) throw InvariantError("no irreducible polynomial found");
    }
}

FiniteRing chain_ring(std::uint32_t p, std::size_t f, std::size_t e) {
    if (!is_prime(p)) throw InputError("p must be prime");
    if (f == 0 || e == 0) throw InputError("chain ring needs f >= 1 and e >= 1");
    const std::size_t d = f * e;
    PrimeField field(p);
    std::vector<Residue> g = smallest_irreducible(p, f);
    g.push_back(1);

    std::vector<FpVec> products;
    products.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t a1 = i % f, b1 = i / f;
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t a2 = j % f, b2 = j / f;
            std::vector<Residue> out(d, 0);
            if (b1 + b2 < e) {
                std::vector<Residue> w(a1 + a2 + 1, 0);
                w[a1 + a2] = 1;
                auto r = poly_mod(std::move(w), g, field);
                for (std::size_t k = 0; k < r.size(); ++k) out[(b1 + b2) * f + k] = r[k];
            }
            products.emplace_back(p, std::move(out));
        }
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < d; ++i) labels.push_back(monomial_label(i % f, i / f, f));
    return FiniteRing(p, d, std::move(products), FpVec::unit(p, d, 0), std::move(labels));
}

FiniteRing product_ring(std::span<const FiniteRing> factors) {
    if (factors.empty()) throw InputError("product of no factors is the zero ring");
    if (factors.size() == 1) return factors[0];
    const std::uint32_t p = factors[0].p();
    std::size_t d = 0;
    for (const auto& r : factors) {
        if (r.p() != p) throw InputError("product factors have different characteristic");
        d += r.dim();
    }
    std::vector<FpVec> products(d * d, FpVec::zero(p, d));
    std::vector<Residue> one(d, 0);
    std::vector<std::string> labels;
    std::size_t off = 0;
    for (std::size_t t = 0; t < factors.size(); ++t) {
        const auto& r = factors[t];
        for (std::size_t i = 0; i < r.dim(); ++i) {
            one[off + i] = r.one()[i];
            labels.push_back(r.labels()[i] + "_" + std::to_string(t + 1));
            for (std::size_t j = 0; j < r.dim(); ++j) {
                FpVec local = r.product(i, j);
                std::vector<Residue> out(d, 0);
                for (std::size_t k = 0; k < r.dim(); ++k) out[off + k] = local[k];
                products[(off + i) * d + off + j] = FpVec(p, std::move(out));
            }
        }
        off += r.dim();
    }
    return FiniteRing(p, d, std::move(products), FpVec(p, std::move(one)), std::move(labels));
}

// ---------------------------------------------------------------------------

RingExtension::RingExtension(FiniteRing ring, std::span<const FpVec> subring_basis)
    : ring_(std::move(ring)), subring_(ring_.p(), ring_.dim()) {
    for (const auto& v : subring_basis) require_vec(v, ring_.p(), ring_.dim(), "subring basis");
    subring_ = rref(subring_basis, ring_.p(), ring_.dim());
    if (subring_.rank() != subring_basis.size())
        throw InputError("subring basis is not linearly independent");
    if (!subring_.contains(ring_.one())) throw InputError("subring does not contain 1");
    for (std::size_t i = 0; i < subring_.rank(); ++i)
        for (std::size_t j = i; j < subring_.rank(); ++j)
            if (!subring_.contains(ring_.mul(subring_.row_vec(i), subring_.row_vec(j))))
                throw InputError("subring is not closed under multiplication");
}

bool RingExtension::is_stable(const Subspace& u) const {
    const std::size_t n = dim();
    std::vector<Residue> out(n);
    for (std::size_t a = 0; a < subring_.rank(); ++a)
        for (std::size_t r = 0; r < u.rank(); ++r) {
            ring_.mul_into(subring_.row(a), u.row(r), out);
            if (!u.contains(std::span<const Residue>(out))) return false;
        }
    return true;
}

Subspace RingExtension::stable_hull(const Subspace& u) const {
    const std::size_t n = dim();
    std::vector<Residue> m;
    std::vector<Residue> out(n);
    for (std::size_t a = 0; a < subring_.rank(); ++a)
        for (std::size_t r = 0; r < u.rank(); ++r) {
            ring_.mul_into(subring_.row(a), u.row(r), out);
            m.insert(m.end(), out.begin(), out.end());
        }
    // A contains 1, so A*U is already a sum of images of U and is A-stable.
    return rref_flat(p(), n, std::move(m));
}

RingExtension prime_diagonal_extension(const FiniteRing& b) {
    FpVec one = b.one();
    return RingExtension(b, std::span<const FpVec>(&one, 1));
}

RingExtension generated_subring(const FiniteRing& b, std::span<const FpVec> gens) {
    std::vector<FpVec> rows{b.one()};
    for (const auto& g : gens) {
        require_vec(g, b.p(), b.dim(), "generator");
        rows.push_back(g);
    }
    Subspace s = rref(rows, b.p(), b.dim());
    while (true) {
        std::vector<FpVec> next = s.basis();
        for (std::size_t i = 0; i < s.rank(); ++i)
            for (std::size_t j = i; j < s.rank(); ++j) next.push_back(b.mul(s.row_vec(i), s.row_vec(j)));
        Subspace grown = rref(next, b.p(), b.dim());
        if (grown == s) break;
        s = std::move(grown);
    }
    auto basis = s.basis();
    return RingExtension(b, basis);
}

// ---------------------------------------------------------------------------

RingSurjection::RingSurjection(FiniteRing source, FiniteRing target, std::vector<FpVec> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
    const std::size_t n = source_.dim(), m = target_.dim();
    if (source_.p() != target_.p()) throw InputError("surjection between rings of different characteristic");
    if (images_.size() != n) throw InputError("need one image per source basis element");
    for (const auto& v : images_) require_vec(v, target_.p(), m, "image");
    if (apply(source_.one()) != target_.one()) throw InputError("map does not send 1 to 1");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (apply(source_.product(i, j)) != target_.mul(images_[i], images_[j]))
                throw InputError("map is not multiplicative");
    if (!rref(images_, target_.p(), m).is_full()) throw InputError("map is not surjective");
    std::vector<Residue> flat;
    for (const auto& v : images_) flat.insert(flat.end(), v.coords().begin(), v.coords().end());
    kernel_ = linear_kernel(source_.p(), n, m, flat);
}

void RingSurjection::apply_into(std::span<const Residue> v, std::span<Residue> out) const {
    const std::uint32_t p = target_.p();
    std::fill(out.begin(), out.end(), 0);
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (v[i] == 0) continue;
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = static_cast<Residue>((out[k] + std::uint64_t{v[i]} * images_[i][k]) % p);
    }
}

FpVec RingSurjection::apply(const FpVec& v) const {
    require_vec(v, source_.p(), source_.dim(), "apply");
    std::vector<Residue> out(target_.dim());
    apply_into(v.coords(), out);
    return FpVec(target_.p(), std::move(out));
}

Subspace RingSurjection::image(const Subspace& u) const {
    const std::size_t m = target_.dim();
    std::vector<Residue> flat(u.rank() * m);
    for (std::size_t r = 0; r < u.rank(); ++r) apply_into(u.row(r), std::span<Residue>(flat.data() + r * m, m));
    return rref_flat(target_.p(), m, std::move(flat));
}

Subspace RingSurjection::preimage(const Subspace& u) const {
    // kernel of  v |-> phi(v) mod U, plus nothing else: that kernel is phi^{-1}(U).
    const std::size_t n = source_.dim(), m = target_.dim();
    std::vector<Residue> flat(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<Residue> row(flat.data() + i * m, m);
        std::copy(images_[i].coords().begin(), images_[i].coords().end(), row.begin());
        u.reduce_in_place(row);
    }
    return linear_kernel(source_.p(), n, m, flat);
}

RingSurjection quotient_surjection(const FiniteRing& b, const Subspace& ideal) {
    const std::uint32_t p = b.p();
    const std::size_t n = b.dim();
    if (ideal.p() != p || ideal.ambient_dim() != n) throw InputError("ideal lives in a different space");
    if (ideal.is_full()) throw InputError("quotient by the whole ring is the zero ring");
    std::vector<Residue> out(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < ideal.rank(); ++r) {
            b.mul_into(b.basis(k).coords(), ideal.row(r), out);
            if (!ideal.contains(std::span<const Residue>(out))) throw InputError("subspace is not an ideal");
        }

    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0, k = 0; c < n; ++c) {
        if (k < ideal.rank() && ideal.pivots()[k] == c)
            ++k;
        else
            free_cols.push_back(c);
    }
    const std::size_t m = free_cols.size();
    auto project = [&](std::vector<Residue> v) {
        ideal.reduce_in_place(v);
        std::vector<Residue> q(m);
        for (std::size_t t = 0; t < m; ++t) q[t] = v[free_cols[t]];
        return FpVec(p, std::move(q));
    };

    std::vector<FpVec> products;
    products.reserve(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) products.push_back(project(b.product(free_cols[i], free_cols[j]).coords()));
    std::vector<std::string> labels;
    for (std::size_t c : free_cols) labels.push_back(b.labels()[c]);
    FiniteRing target(p, m, std::move(products), project(b.one().coords()), std::move(labels));

    std::vector<FpVec> images;
    for (std::size_t k = 0; k < n; ++k) images.push_back(project(b.basis(k).coords()));
    return RingSurjection(b, std::move(target), std::move(images));
}

}  // namespace multclose
