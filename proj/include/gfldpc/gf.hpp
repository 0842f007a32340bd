#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfldpc {

// Arithmetic in GF(p^m), element indices in [0, q). Index 0 is the additive
// identity and index 1 the multiplicative identity. An element's base-p digit
// vector (least-significant first) is its coefficient representation, so
// addition is digit-wise mod p and multiplication is polynomial
// multiplication modulo a fixed irreducible reduction polynomial.
class FieldSpec {
  public:
    // q must be a prime power p^m with p in {2,3,5,7}, m <= 6 and q <= 2^16.
    static FieldSpec make(int q);

    // custom reduction polynomial, coefficients low-to-high, monic degree m
    static FieldSpec make(int p, int m, std::vector<int> reduction_poly);

    int p() const { return p_; }
    int m() const { return m_; }
    int q() const { return q_; }
    const std::vector<int>& reduction_poly() const { return poly_; }

    int add(int a, int b) const {
        check(a);
        check(b);
        if (p_ == 2) return a ^ b;
        return addsub(a, b, +1);
    }

    int sub(int a, int b) const {
        check(a);
        check(b);
        if (p_ == 2) return a ^ b;
        return addsub(a, b, -1);
    }

    int neg(int a) const {
        check(a);
        return neg_[static_cast<std::size_t>(a)];
    }

    int mul(int a, int b) const {
        check(a);
        check(b);
        if (a == 0 || b == 0) return 0;
        return exp_[static_cast<std::size_t>(log_[static_cast<std::size_t>(a)]) +
                    static_cast<std::size_t>(log_[static_cast<std::size_t>(b)])];
    }

    int inv(int a) const {
        check(a);
        if (a == 0) throw std::domain_error("gf: zero has no multiplicative inverse");
        return exp_[static_cast<std::size_t>(q_) - 1 - static_cast<std::size_t>(log_[static_cast<std::size_t>(a)])];
    }

    std::vector<int> digits(int a) const {
        check(a);
        std::vector<int> d(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) {
            d[static_cast<std::size_t>(i)] = a % p_;
            a /= p_;
        }
        return d;
    }

    int from_digits(const std::vector<int>& d) const {
        if (static_cast<int>(d.size()) != m_) throw std::domain_error("gf: digit vector has wrong length");
        int a = 0;
        for (int i = m_ - 1; i >= 0; --i) {
            const int di = d[static_cast<std::size_t>(i)];
            if (di < 0 || di >= p_) throw std::domain_error("gf: digit out of range");
            a = a * p_ + di;
        }
        return a;
    }

  private:
    FieldSpec() = default;

    void check(int a) const {
        if (a < 0 || a >= q_) throw std::domain_error("gf: element index out of range");
    }

    int addsub(int a, int b, int sign) const {
        int r = 0;
        int pw = 1;
        for (int i = 0; i < m_; ++i) {
            const int da = a % p_;
            const int db = b % p_;
            r += ((da + sign * db + p_) % p_) * pw;
            a /= p_;
            b /= p_;
            pw *= p_;
        }
        return r;
    }

    int p_ = 2, m_ = 1, q_ = 2;
    std::vector<int> poly_;
    std::vector<std::uint16_t> exp_;  // size 2(q-1): g^k for k in [0, 2(q-1))
    std::vector<std::uint16_t> log_;  // size q, log_[0] unused
    std::vector<std::uint16_t> neg_;
};

namespace detail {

// polynomial product of digit vectors reduced mod (poly, p); indices as ints
inline int gf_mul_slow(int p, int m, const std::vector<int>& poly, int a, int b) {
    std::vector<int> prod(static_cast<std::size_t>(2 * m - 1), 0);
    std::vector<int> da(static_cast<std::size_t>(m)), db(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        da[static_cast<std::size_t>(i)] = a % p;
        a /= p;
        db[static_cast<std::size_t>(i)] = b % p;
        b /= p;
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            prod[static_cast<std::size_t>(i + j)] =
                (prod[static_cast<std::size_t>(i + j)] + da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(j)]) % p;
    // reduce: poly is monic, so x^m = -(poly_0 + ... + poly_{m-1} x^{m-1})
    for (int d = 2 * m - 2; d >= m; --d) {
        const int c = prod[static_cast<std::size_t>(d)];
        if (c == 0) continue;
        prod[static_cast<std::size_t>(d)] = 0;
        for (int k = 0; k < m; ++k)
            prod[static_cast<std::size_t>(d - m + k)] =
                ((prod[static_cast<std::size_t>(d - m + k)] - c * poly[static_cast<std::size_t>(k)]) % p + p) % p;
    }
    int r = 0;
    for (int i = m - 1; i >= 0; --i) r = r * p + prod[static_cast<std::size_t>(i)];
    return r;
}

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// divides f by monic g over GF(p), true if remainder is zero
inline bool divides(int p, std::vector<int> f, const std::vector<int>& g) {
    while (f.size() >= g.size()) {
        const int c = f.back();
        if (c != 0) {
            const std::size_t k = f.size() - g.size();
            // g is monic, lead coefficient 1
            for (std::size_t i = 0; i < g.size(); ++i) f[i + k] = ((f[i + k] - c * g[i]) % p + p) % p;
        }
        f.pop_back();
    }
    for (int c : f)
        if (c != 0) return false;
    return true;
}

// Exhaustive root/factor check up to degree 8. Above that only roots are
// tested here; table construction still certifies the field structure, since
// finding a multiplicative generator of order q-1 rules out zero divisors.
inline bool is_irreducible(int p, const std::vector<int>& f) {
    const int deg = static_cast<int>(f.size()) - 1;
    for (int x = 0; x < p; ++x) {
        int v = 0;
        for (int i = deg; i >= 0; --i) v = (v * x + f[static_cast<std::size_t>(i)]) % p;
        if (v == 0) return false;
    }
    if (deg <= 3 || deg > 8) return true;
    // trial division by all monic polynomials of degree 2..deg/2
    for (int d = 2; d <= deg / 2; ++d) {
        std::vector<int> g(static_cast<std::size_t>(d + 1), 0);
        g.back() = 1;
        int count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (int n = 0; n < count; ++n) {
            int t = n;
            for (int i = 0; i < d; ++i) {
                g[static_cast<std::size_t>(i)] = t % p;
                t /= p;
            }
            if (divides(p, f, g)) return false;
        }
    }
    return true;
}

struct PolyEntry {
    int p, m;
    int coeffs[17];  // low-to-high, degree m
};

// Fixed reduction polynomials, one per (p, m) with p^m <= 2^16. Any
// irreducible choice gives an isomorphic field; these are the smallest under
// base-p integer encoding, pinned so serialized artifacts reproduce across
// builds.
inline const PolyEntry* poly_table() {
    static const PolyEntry table[] = {
        {2, 2, {1, 1, 1}},           // x^2+x+1
        {2, 3, {1, 1, 0, 1}},        // x^3+x+1
        {2, 4, {1, 1, 0, 0, 1}},     // x^4+x+1
        {2, 5, {1, 0, 1, 0, 0, 1}},  // x^5+x^2+1
        {2, 6, {1, 1, 0, 0, 0, 0, 1}},
        {2, 7, {1, 1, 0, 0, 0, 0, 0, 1}},
        {2, 8, {1, 1, 0, 1, 1, 0, 0, 0, 1}},
        {2, 9, {1, 1, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 10, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1}},
        {2, 11, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 12, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 13, {1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 14, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 15, {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 16, {1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {3, 2, {1, 0, 1}},
        {3, 3, {1, 2, 0, 1}},
        {3, 4, {2, 1, 0, 0, 1}},
        {3, 5, {1, 2, 0, 0, 0, 1}},
        {3, 6, {2, 1, 0, 0, 0, 0, 1}},
        {3, 7, {2, 0, 1, 0, 0, 0, 0, 1}},
        {3, 8, {2, 0, 1, 0, 0, 0, 0, 0, 1}},
        {3, 9, {1, 0, 1, 2, 0, 0, 0, 0, 0, 1}},
        {3, 10, {1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1}},
        {5, 2, {2, 0, 1}},
        {5, 3, {1, 1, 0, 1}},
        {5, 4, {2, 0, 0, 0, 1}},
        {5, 5, {1, 4, 0, 0, 0, 1}},
        {5, 6, {2, 1, 0, 0, 0, 0, 1}},
        {7, 2, {1, 0, 1}},
        {7, 3, {2, 0, 0, 1}},
        {7, 4, {1, 1, 0, 0, 1}},
        {7, 5, {3, 1, 0, 0, 0, 1}},
        {0, 0, {0}},
    };
    return table;
}

}  // namespace detail

inline FieldSpec FieldSpec::make(int p, int m, std::vector<int> reduction_poly) {
    if (!detail::is_prime(p)) throw std::domain_error("gf: characteristic must be prime");
    if (m < 1) throw std::domain_error("gf: extension degree must be >= 1");
    long long qll = 1;
    for (int i = 0; i < m; ++i) qll *= p;
    if (qll > 65536) throw std::domain_error("gf: field order exceeds 2^16");
    FieldSpec fs;
    fs.p_ = p;
    fs.m_ = m;
    fs.q_ = static_cast<int>(qll);
    if (m > 1) {
        if (static_cast<int>(reduction_poly.size()) != m + 1 || reduction_poly[static_cast<std::size_t>(m)] != 1)
            throw std::domain_error("gf: reduction polynomial must be monic of degree m");
        for (int c : reduction_poly)
            if (c < 0 || c >= p) throw std::domain_error("gf: reduction polynomial coefficient out of range");
        if (!detail::is_irreducible(p, reduction_poly))
            throw std::domain_error("gf: reduction polynomial is reducible over GF(p)");
    }
    fs.poly_ = std::move(reduction_poly);

    const int q = fs.q_;
    fs.neg_.resize(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
        int r = 0, pw = 1, t = a;
        for (int i = 0; i < m; ++i) {
            r += ((p - t % p) % p) * pw;
            t /= p;
            pw *= p;
        }
        fs.neg_[static_cast<std::size_t>(a)] = static_cast<std::uint16_t>(r);
    }

    // log/antilog tables from a multiplicative generator
    fs.log_.assign(static_cast<std::size_t>(q), 0);
    fs.exp_.assign(static_cast<std::size_t>(2 * (q - 1)), 0);
    auto mul_slow = [&](int a, int b) {
        if (m == 1) return a * b % p;
        return detail::gf_mul_slow(p, m, fs.poly_, a, b);
    };
    int gen = -1;
    for (int cand = 2; cand < q && gen < 0; ++cand) {
        int x = 1;
        int order = 0;
        do {
            x = mul_slow(x, cand);
            ++order;
        } while (x != 1 && x != 0 && order < q);
        if (x == 1 && order == q - 1) gen = cand;
    }
    if (gen < 0) {
        if (q == 2) gen = 1;
        else throw std::domain_error("gf: no multiplicative generator found");
    }
    int x = 1;
    for (int k = 0; k < q - 1; ++k) {
        fs.exp_[static_cast<std::size_t>(k)] = static_cast<std::uint16_t>(x);
        fs.exp_[static_cast<std::size_t>(k + q - 1)] = static_cast<std::uint16_t>(x);
        fs.log_[static_cast<std::size_t>(x)] = static_cast<std::uint16_t>(k);
        x = mul_slow(x, gen);
    }
    return fs;
}

inline FieldSpec FieldSpec::make(int q) {
    if (q < 2) throw std::domain_error("gf: field order must be >= 2");
    int p = 0;
    for (int d = 2; d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    int m = 0;
    int t = q;
    while (t > 1) {
        if (t % p != 0) throw std::domain_error("gf: field order is not a prime power");
        t /= p;
        ++m;
    }
    if (m == 1) return make(p, 1, {});
    for (const detail::PolyEntry* e = detail::poly_table(); e->p != 0; ++e) {
        if (e->p == p && e->m == m)
            return make(p, m, std::vector<int>(e->coeffs, e->coeffs + m + 1));
    }
    throw std::domain_error("gf: no fixed reduction polynomial for GF(" + std::to_string(q) + ")");
}

}  // namespace gfldpc
