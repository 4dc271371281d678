#pragma once

// Scalar backends. Every algorithm in bijac is templated on a field policy
// object K that owns the arithmetic; scalars themselves are plain values
// (K::value_type). Two policies are provided: a 31-bit prime field used as
// the fast path, and exact rationals on top of GMP.

#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace bijac {

inline constexpr std::uint32_t kDefaultPrime = 2147483647u;  // 2^31 - 1
inline constexpr std::uint32_t kSecondPrime = 2147483629u;

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint32_t q = 3; static_cast<std::uint64_t>(q) * q <= n; q += 2)
        if (n % q == 0) return false;
    return true;
}

template <class K>
concept Field = requires(const K& k, const typename K::value_type& a, const mpq_class& q) {
    typename K::value_type;
    { k.zero() } -> std::same_as<typename K::value_type>;
    { k.one() } -> std::same_as<typename K::value_type>;
    { k.add(a, a) } -> std::same_as<typename K::value_type>;
    { k.sub(a, a) } -> std::same_as<typename K::value_type>;
    { k.mul(a, a) } -> std::same_as<typename K::value_type>;
    { k.neg(a) } -> std::same_as<typename K::value_type>;
    { k.inv(a) } -> std::same_as<typename K::value_type>;
    { k.is_zero(a) } -> std::same_as<bool>;
    { k.from_rational(q) } -> std::same_as<typename K::value_type>;
    { k.to_string(a) } -> std::same_as<std::string>;
    { k.descriptor() } -> std::same_as<nlohmann::ordered_json>;
};

class PrimeField {
public:
    using value_type = std::uint32_t;

    explicit PrimeField(std::uint32_t p = kDefaultPrime) : p_(p) {
        if (!is_prime_u32(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
        if (p < 3) throw std::invalid_argument("modulus must be an odd prime");
    }

    std::uint32_t modulus() const { return p_; }

    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type add(value_type a, value_type b) const {
        std::uint64_t s = std::uint64_t{a} + b;
        return static_cast<value_type>(s >= p_ ? s - p_ : s);
    }
    value_type sub(value_type a, value_type b) const { return a >= b ? a - b : static_cast<value_type>(std::uint64_t{a} + p_ - b); }
    value_type neg(value_type a) const { return a == 0 ? 0 : p_ - a; }
    value_type mul(value_type a, value_type b) const {
        return static_cast<value_type>((std::uint64_t{a} * b) % p_);
    }
    value_type inv(value_type a) const {
        if (a == 0) throw std::domain_error("inverse of zero in F_p");
        return pow(a, p_ - 2);
    }
    value_type div(value_type a, value_type b) const { return mul(a, inv(b)); }
    bool is_zero(value_type a) const { return a == 0; }
    bool equal(value_type a, value_type b) const { return a == b; }

    value_type from_int(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<value_type>(r);
    }

    value_type from_mpz(const mpz_class& z) const {
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), p_);
        return static_cast<value_type>(r.get_ui());
    }

    // Throws when the denominator vanishes mod p: the reduction is undefined.
    value_type from_rational(const mpq_class& q) const {
        value_type den = from_mpz(q.get_den());
        if (den == 0)
            throw std::domain_error("denominator of " + q.get_str() + " vanishes modulo " + std::to_string(p_));
        return div(from_mpz(q.get_num()), den);
    }

    std::string to_string(value_type a) const { return std::to_string(a); }

    nlohmann::ordered_json descriptor() const {
        return {{"kind", "prime"}, {"modulus", p_}};
    }

    std::string name() const { return "F_" + std::to_string(p_); }

private:
    value_type pow(value_type b, std::uint32_t e) const {
        std::uint64_t r = 1, x = b;
        while (e) {
            if (e & 1) r = r * x % p_;
            x = x * x % p_;
            e >>= 1;
        }
        return static_cast<value_type>(r);
    }

    std::uint32_t p_;
};

class RationalField {
public:
    using value_type = mpq_class;

    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type add(const value_type& a, const value_type& b) const { return a + b; }
    value_type sub(const value_type& a, const value_type& b) const { return a - b; }
    value_type neg(const value_type& a) const { return -a; }
    value_type mul(const value_type& a, const value_type& b) const { return a * b; }
    value_type inv(const value_type& a) const {
        if (sgn(a) == 0) throw std::domain_error("inverse of zero in Q");
        return 1 / a;
    }
    value_type div(const value_type& a, const value_type& b) const { return a * inv(b); }
    bool is_zero(const value_type& a) const { return sgn(a) == 0; }
    bool equal(const value_type& a, const value_type& b) const { return a == b; }
    value_type from_int(std::int64_t v) const { return mpq_class(mpz_class(static_cast<long>(v))); }
    value_type from_rational(const mpq_class& q) const { return q; }

    std::string to_string(const value_type& a) const { return a.get_str(); }

    nlohmann::ordered_json descriptor() const { return {{"kind", "rational"}}; }

    std::string name() const { return "Q"; }
};

static_assert(Field<PrimeField>);
static_assert(Field<RationalField>);

}  // namespace bijac
