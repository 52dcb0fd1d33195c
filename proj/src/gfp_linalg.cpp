#include "multclose/gfp_linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "multclose/errors.hpp"

namespace multclose {

Subspace subspace_from_rref(std::uint32_t p, std::size_t n, std::vector<Residue> rows,
                            std::vector<std::size_t> pivots);

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Bounds Bounds::from_environment() {
    Bounds b;
    if (const char* env = std::getenv("MULTCLOSE_MAX_DIM")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0)
            throw InputError("MULTCLOSE_MAX_DIM must be a positive integer");
        b.max_dim = v;
    }
    return b;
}

// ---------------------------------------------------------------------------

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) throw InputError("modulus " + std::to_string(p) + " is not prime");
}

Residue PrimeField::inv(Residue a) const {
    if (a % p_ == 0) throw InputError("division by zero in F_p");
    // a^(p-2) mod p
    std::uint64_t result = 1, base = a % p_;
    std::uint64_t e = p_ - 2;
    while (e) {
        if (e & 1) result = result * base % p_;
        base = base * base % p_;
        e >>= 1;
    }
    return static_cast<Residue>(result);
}

Residue PrimeField::reduce(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Residue>(r);
}

// ---------------------------------------------------------------------------

FpVec::FpVec(std::uint32_t p, std::vector<Residue> coords) : p_(p), coords_(std::move(coords)) {
    if (p < 2) throw InputError("modulus must be at least 2");
    for (auto& c : coords_) c %= p_;
}

FpVec FpVec::zero(std::uint32_t p, std::size_t n) { return FpVec(p, std::vector<Residue>(n, 0)); }

FpVec FpVec::unit(std::uint32_t p, std::size_t n, std::size_t k) {
    std::vector<Residue> c(n, 0);
    c.at(k) = 1;
    return FpVec(p, std::move(c));
}

bool FpVec::is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](Residue r) { return r == 0; });
}

FpVec FpVec::operator+(const FpVec& o) const {
    if (o.p_ != p_ || o.size() != size()) throw InputError("vector shape mismatch");
    std::vector<Residue> c(size());
    for (std::size_t i = 0; i < size(); ++i) c[i] = (coords_[i] + o.coords_[i]) % p_;
    return FpVec(p_, std::move(c));
}

FpVec FpVec::operator-(const FpVec& o) const {
    if (o.p_ != p_ || o.size() != size()) throw InputError("vector shape mismatch");
    std::vector<Residue> c(size());
    for (std::size_t i = 0; i < size(); ++i) c[i] = (coords_[i] + p_ - o.coords_[i]) % p_;
    return FpVec(p_, std::move(c));
}

FpVec FpVec::scaled(Residue k) const {
    std::vector<Residue> c(size());
    for (std::size_t i = 0; i < size(); ++i)
        c[i] = static_cast<Residue>(std::uint64_t{coords_[i]} * k % p_);
    return FpVec(p_, std::move(c));
}

std::string FpVec::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? " " : "") << coords_[i];
    return os.str();
}

// ---------------------------------------------------------------------------

Subspace::Subspace(std::uint32_t p, std::size_t n) : p_(p), n_(n) {}

Subspace Subspace::full(std::uint32_t p, std::size_t n) {
    std::vector<Residue> m(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1;
    return subspace_from_rref(p, n, std::move(m), [n] {
        std::vector<std::size_t> piv(n);
        for (std::size_t i = 0; i < n; ++i) piv[i] = i;
        return piv;
    }());
}

Subspace subspace_from_rref(std::uint32_t p, std::size_t n, std::vector<Residue> rows,
                            std::vector<std::size_t> pivots) {
    Subspace s(p, n);
    s.rows_ = std::move(rows);
    s.pivots_ = std::move(pivots);
    return s;
}

FpVec Subspace::row_vec(std::size_t i) const {
    auto r = row(i);
    return FpVec(p_, std::vector<Residue>(r.begin(), r.end()));
}

std::vector<FpVec> Subspace::basis() const {
    std::vector<FpVec> out;
    out.reserve(rank());
    for (std::size_t i = 0; i < rank(); ++i) out.push_back(row_vec(i));
    return out;
}

void Subspace::reduce_in_place(std::span<Residue> v) const {
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
        Residue c = v[pivots_[i]];
        if (c == 0) continue;
        const Residue* r = rows_.data() + i * n_;
        Residue f = p_ - c;
        for (std::size_t j = pivots_[i]; j < n_; ++j)
            if (r[j]) v[j] = static_cast<Residue>((v[j] + std::uint64_t{f} * r[j]) % p_);
    }
}

FpVec Subspace::reduce(const FpVec& v) const {
    if (v.size() != n_ || v.p() != p_) throw InputError("vector does not lie in the ambient space");
    std::vector<Residue> c = v.coords();
    reduce_in_place(c);
    return FpVec(p_, std::move(c));
}

bool Subspace::contains(std::span<const Residue> v) const {
    std::vector<Residue> c(v.begin(), v.end());
    reduce_in_place(c);
    return std::all_of(c.begin(), c.end(), [](Residue r) { return r == 0; });
}

bool Subspace::contains(const FpVec& v) const {
    if (v.size() != n_ || v.p() != p_) throw InputError("vector does not lie in the ambient space");
    return contains(std::span<const Residue>(v.coords()));
}

bool Subspace::contains(const Subspace& other) const {
    if (other.n_ != n_ || other.p_ != p_) throw InputError("ambient space mismatch");
    if (other.rank() > rank()) return false;
    for (std::size_t i = 0; i < other.rank(); ++i)
        if (!contains(other.row(i))) return false;
    return true;
}

std::string Subspace::serialize() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < rank(); ++i) {
        if (i) os << ';';
        auto r = row(i);
        for (std::size_t j = 0; j < n_; ++j) os << (j ? " " : "") << r[j];
    }
    return os.str();
}

Subspace Subspace::deserialize(std::uint32_t p, std::size_t n, const std::string& text) {
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    if (t == "0") return Subspace(p, n);
    std::vector<Residue> m;
    std::stringstream rows(t);
    std::string row;
    while (std::getline(rows, row, ';')) {
        std::istringstream in(row);
        std::vector<Residue> r;
        long long v;
        while (in >> v) {
            if (v < 0 || v >= static_cast<long long>(p))
                throw InputError("residue " + std::to_string(v) + " out of range for p=" + std::to_string(p));
            r.push_back(static_cast<Residue>(v));
        }
        if (!in.eof()) throw InputError("malformed vector '" + row + "'");
        if (r.size() != n)
            throw InputError("vector '" + row + "' has length " + std::to_string(r.size()) +
                             ", expected " + std::to_string(n));
        m.insert(m.end(), r.begin(), r.end());
    }
    return rref_flat(p, n, std::move(m));
}

bool canonical_less(const Subspace& a, const Subspace& b) {
    if (a.rank() != b.rank()) return a.rank() < b.rank();
    return a.rows_ < b.rows_;
}

std::size_t Subspace::hash() const {
    std::size_t h = std::hash<std::size_t>{}(n_ * 131 + p_);
    for (Residue r : rows_) h = h * 1000003u ^ r;
    return h;
}

// ---------------------------------------------------------------------------

Subspace rref_flat(std::uint32_t p, std::size_t n, std::vector<Residue> m) {
    PrimeField f(p);
    if (n == 0) return Subspace(p, 0);
    if (m.size() % n != 0) throw InputError("matrix size is not a multiple of the row length");
    const std::size_t rows = m.size() / n;
    for (auto& x : m) x %= p;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < rows; ++col) {
        std::size_t sel = r;
        while (sel < rows && m[sel * n + col] == 0) ++sel;
        if (sel == rows) continue;
        if (sel != r)
            std::swap_ranges(m.begin() + sel * n, m.begin() + sel * n + n, m.begin() + r * n);
        Residue inv = f.inv(m[r * n + col]);
        if (inv != 1)
            for (std::size_t j = col; j < n; ++j) m[r * n + j] = f.mul(m[r * n + j], inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            Residue c = m[i * n + col];
            if (c == 0) continue;
            Residue neg = f.neg(c);
            for (std::size_t j = col; j < n; ++j)
                if (m[r * n + j]) m[i * n + j] = f.add(m[i * n + j], f.mul(neg, m[r * n + j]));
        }
        pivots.push_back(col);
        ++r;
    }
    m.resize(r * n);
    return subspace_from_rref(p, n, std::move(m), std::move(pivots));
}

Subspace rref(std::span<const FpVec> rows, std::uint32_t p, std::size_t n) {
    std::vector<Residue> m;
    m.reserve(rows.size() * n);
    for (const auto& v : rows) {
        if (v.p() != p) throw InputError("rows have mixed moduli");
        if (v.size() != n) throw InputError("rows have mixed lengths");
        m.insert(m.end(), v.coords().begin(), v.coords().end());
    }
    return rref_flat(p, n, std::move(m));
}

Subspace span_of(std::span<const FpVec> rows, std::uint32_t p, std::size_t n) { return rref(rows, p, n); }

static void require_same_ambient(const Subspace& u, const Subspace& v) {
    if (u.p() != v.p() || u.ambient_dim() != v.ambient_dim())
        throw InputError("subspaces live in different ambient spaces");
}

Subspace subspace_sum(const Subspace& u, const Subspace& v) {
    require_same_ambient(u, v);
    std::vector<Residue> m = u.flat_rows();
    m.insert(m.end(), v.flat_rows().begin(), v.flat_rows().end());
    return rref_flat(u.p(), u.ambient_dim(), std::move(m));
}

Subspace subspace_meet(const Subspace& u, const Subspace& v) {
    require_same_ambient(u, v);
    const std::size_t n = u.ambient_dim();
    if (u.is_zero() || v.is_zero()) return Subspace(u.p(), n);
    if (v.contains(u)) return u;
    if (u.contains(v)) return v;
    // coefficient vectors a with sum a_i u_i in v
    std::vector<Residue> images;
    images.reserve(u.rank() * n);
    for (std::size_t i = 0; i < u.rank(); ++i) {
        std::vector<Residue> r(u.row(i).begin(), u.row(i).end());
        v.reduce_in_place(r);
        images.insert(images.end(), r.begin(), r.end());
    }
    Subspace coeffs = linear_kernel(u.p(), u.rank(), n, images);
    PrimeField f(u.p());
    std::vector<Residue> m(coeffs.rank() * n, 0);
    for (std::size_t k = 0; k < coeffs.rank(); ++k)
        for (std::size_t i = 0; i < u.rank(); ++i) {
            Residue a = coeffs.row(k)[i];
            if (!a) continue;
            for (std::size_t j = 0; j < n; ++j)
                m[k * n + j] = f.add(m[k * n + j], f.mul(a, u.row(i)[j]));
        }
    return rref_flat(u.p(), n, std::move(m));
}

bool contains(const Subspace& u, const Subspace& v) { return u.contains(v); }

Subspace linear_kernel(std::uint32_t p, std::size_t src, std::size_t dst, std::span<const Residue> images) {
    if (images.size() != src * dst) throw InputError("image table has the wrong size");
    if (src == 0) return Subspace(p, 0);
    // Row-reduce [images | I]; rows with a zero left block span the kernel.
    const std::size_t w = dst + src;
    std::vector<Residue> m(src * w, 0);
    for (std::size_t k = 0; k < src; ++k) {
        for (std::size_t j = 0; j < dst; ++j) m[k * w + j] = images[k * dst + j] % p;
        m[k * w + dst + k] = 1;
    }
    Subspace red = rref_flat(p, w, std::move(m));
    std::vector<Residue> ker;
    for (std::size_t i = 0; i < red.rank(); ++i) {
        if (red.pivots()[i] < dst) continue;
        auto r = red.row(i);
        ker.insert(ker.end(), r.begin() + dst, r.end());
    }
    return rref_flat(p, src, std::move(ker));
}

// ---------------------------------------------------------------------------

namespace {

using u128 = unsigned __int128;

std::uint64_t sat(u128 v) {
    return v > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                         : static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t count_subspaces(std::uint32_t p, std::size_t n) {
    // g[k] = Gaussian binomial [m choose k]_p, built row by row.
    std::vector<std::uint64_t> g(n + 1, 0);
    g[0] = 1;
    for (std::size_t m = 1; m <= n; ++m) {
        for (std::size_t k = m; k >= 1; --k) {
            u128 qk = 1;
            for (std::size_t i = 0; i < k && qk <= std::numeric_limits<std::uint64_t>::max(); ++i) qk *= p;
            g[k] = sat(u128{g[k - 1]} + u128{sat(qk)} * g[k]);
        }
    }
    u128 total = 0;
    for (auto x : g) total += x;
    return sat(total);
}

void enumerate_subspaces(std::uint32_t p, std::size_t n, const std::function<void(const Subspace&)>& emit,
                         const Bounds& bounds) {
    PrimeField f(p);
    if (count_subspaces(p, n) > bounds.max_subspaces)
        throw ResourceError("F_" + std::to_string(p) + "^" + std::to_string(n) + " has more than " +
                            std::to_string(bounds.max_subspaces) + " subspaces");
    for (std::size_t r = 0; r <= n; ++r) {
        std::vector<Subspace> layer;
        std::vector<std::size_t> piv(r);
        for (std::size_t i = 0; i < r; ++i) piv[i] = i;
        while (true) {
            // free positions: row i, column j > piv[i], j not a pivot
            std::vector<std::pair<std::size_t, std::size_t>> free;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = piv[i] + 1; j < n; ++j)
                    if (!std::binary_search(piv.begin(), piv.end(), j)) free.emplace_back(i, j);
            std::vector<Residue> m(r * n, 0);
            for (std::size_t i = 0; i < r; ++i) m[i * n + piv[i]] = 1;
            std::vector<Residue> digits(free.size(), 0);
            while (true) {
                for (std::size_t k = 0; k < free.size(); ++k)
                    m[free[k].first * n + free[k].second] = digits[k];
                layer.push_back(subspace_from_rref(p, n, m, piv));
                std::size_t k = 0;
                while (k < digits.size() && ++digits[k] == p) digits[k++] = 0;
                if (k == digits.size()) break;
            }
            // next combination of r pivot columns
            std::size_t i = r;
            while (i > 0 && piv[i - 1] == n - r + i - 1) --i;
            if (i == 0) break;
            ++piv[i - 1];
            for (std::size_t j = i; j < r; ++j) piv[j] = piv[j - 1] + 1;
        }
        std::sort(layer.begin(), layer.end(), canonical_less);
        for (const auto& s : layer) emit(s);
    }
}

std::vector<Subspace> all_subspaces(std::uint32_t p, std::size_t n, const Bounds& bounds) {
    std::vector<Subspace> out;
    enumerate_subspaces(p, n, [&](const Subspace& s) { out.push_back(s); }, bounds);
    return out;
}

std::vector<FpVec> all_vectors(std::uint32_t p, std::size_t n) {
    std::vector<FpVec> out;
    std::vector<Residue> c(n, 0);
    while (true) {
        out.emplace_back(p, c);
        std::size_t k = n;
        while (k > 0 && ++c[k - 1] == p) c[--k] = 0;
        if (k == 0) break;
    }
    return out;
}

}  // namespace multclose
