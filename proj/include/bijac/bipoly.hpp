#pragma once

// Sparse bihomogeneous polynomials in Q[x0, x1, y0, y1] with the bigrading
// deg(x_i) = (1,0), deg(y_i) = (0,1).
//
// Coordinates on S_{a,b} follow one fixed order: exponent of x0 descending,
// then exponent of y0 descending. Every matrix built downstream uses it, so
// reports are reproducible bit for bit.

#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "field.hpp"
#include "rng.hpp"

namespace bijac {

struct BiDegree {
    int a = 0;
    int b = 0;

    constexpr bool nonnegative() const { return a >= 0 && b >= 0; }
    /// dim S_{a,b}
    constexpr std::size_t dim() const {
        return nonnegative() ? static_cast<std::size_t>(a + 1) * static_cast<std::size_t>(b + 1) : 0;
    }

    friend constexpr BiDegree operator+(BiDegree u, BiDegree v) { return {u.a + v.a, u.b + v.b}; }
    friend constexpr BiDegree operator-(BiDegree u, BiDegree v) { return {u.a - v.a, u.b - v.b}; }
    friend constexpr auto operator<=>(const BiDegree&, const BiDegree&) = default;

    std::string str() const { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }
};

enum class Var : int { x0 = 0, x1 = 1, y0 = 2, y1 = 3 };

inline constexpr std::array<Var, 4> kAllVars{Var::x0, Var::x1, Var::y0, Var::y1};

inline const char* var_name(Var v) {
    static constexpr const char* names[] = {"x0", "x1", "y0", "y1"};
    return names[static_cast<int>(v)];
}

/// x0^e[0] x1^e[1] y0^e[2] y1^e[3]
struct Monomial {
    std::array<int, 4> e{0, 0, 0, 0};

    constexpr BiDegree degree() const { return {e[0] + e[1], e[2] + e[3]}; }
    constexpr int exp(Var v) const { return e[static_cast<int>(v)]; }

    friend constexpr Monomial operator*(const Monomial& u, const Monomial& v) {
        return {{u.e[0] + v.e[0], u.e[1] + v.e[1], u.e[2] + v.e[2], u.e[3] + v.e[3]}};
    }
    friend constexpr bool operator==(const Monomial&, const Monomial&) = default;

    std::string str() const;
};

/// Canonical order: x0 exponent descending, then y0 exponent descending.
/// Ties (only possible across bidegrees) are broken on x1, y1 so the order is total.
struct CanonicalLess {
    constexpr bool operator()(const Monomial& u, const Monomial& v) const {
        if (u.e[0] != v.e[0]) return u.e[0] > v.e[0];
        if (u.e[2] != v.e[2]) return u.e[2] > v.e[2];
        if (u.e[1] != v.e[1]) return u.e[1] < v.e[1];
        return u.e[3] < v.e[3];
    }
};

inline std::string Monomial::str() const {
    std::string out;
    for (Var v : kAllVars) {
        int k = exp(v);
        if (k == 0) continue;
        if (!out.empty()) out += '*';
        out += var_name(v);
        if (k > 1) out += '^' + std::to_string(k);
    }
    return out.empty() ? "1" : out;
}

/// Position of m in the canonical basis of S_{deg}. m must have bidegree deg.
constexpr std::size_t monomial_index(const Monomial& m, BiDegree deg) {
    return static_cast<std::size_t>(deg.a - m.e[0]) * static_cast<std::size_t>(deg.b + 1) +
           static_cast<std::size_t>(deg.b - m.e[2]);
}

inline std::vector<Monomial> monomial_basis(BiDegree deg) {
    std::vector<Monomial> out;
    if (!deg.nonnegative()) return out;
    out.reserve(deg.dim());
    for (int i = deg.a; i >= 0; --i)
        for (int k = deg.b; k >= 0; --k) out.push_back({{i, deg.a - i, k, deg.b - k}});
    return out;
}

class BidegreeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BiPoly {
public:
    using Coeff = mpq_class;
    using TermMap = std::map<Monomial, Coeff, CanonicalLess>;

    BiPoly() = default;
    explicit BiPoly(BiDegree deg) : degree_(deg) {}

    static BiPoly zero(BiDegree deg) { return BiPoly(deg); }

    static BiPoly monomial(const Monomial& m, const Coeff& c = 1) {
        BiPoly p(m.degree());
        p.add_term(m, c);
        return p;
    }

    /// Dense coefficients in canonical order; length must be dim S_{deg}.
    static BiPoly from_coeffs(BiDegree deg, std::span<const Coeff> coeffs) {
        if (coeffs.size() != deg.dim()) throw std::invalid_argument("coefficient vector has wrong length");
        BiPoly p(deg);
        auto basis = monomial_basis(deg);
        for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coeffs[i]);
        return p;
    }

    BiDegree degree() const { return degree_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    Coeff coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    /// Adds c*m, dropping the entry if the coefficient cancels.
    void add_term(const Monomial& m, const Coeff& c) {
        if (m.degree() != degree_)
            throw BidegreeError("monomial " + m.str() + " has bidegree " + m.degree().str() +
                                ", expected " + degree_.str());
        if (sgn(c) == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (inserted) {
            it->second.canonicalize();
        } else {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    std::vector<Coeff> coeff_vector() const {
        std::vector<Coeff> out(degree_.dim(), Coeff(0));
        for (const auto& [m, c] : terms_) out[monomial_index(m, degree_)] = c;
        return out;
    }

    /// Coordinates reduced into the working field.
    template <Field K>
    std::vector<typename K::value_type> coords(const K& k) const {
        std::vector<typename K::value_type> out(degree_.dim(), k.zero());
        for (const auto& [m, c] : terms_) out[monomial_index(m, degree_)] = k.from_rational(c);
        return out;
    }

    BiPoly& operator+=(const BiPoly& o) {
        require_same_degree(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    BiPoly& operator-=(const BiPoly& o) {
        require_same_degree(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    BiPoly& operator*=(const Coeff& s) {
        if (sgn(s) == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    friend BiPoly operator+(BiPoly p, const BiPoly& q) { return p += q; }
    friend BiPoly operator-(BiPoly p, const BiPoly& q) { return p -= q; }
    friend BiPoly operator*(BiPoly p, const Coeff& s) { return p *= s; }
    friend BiPoly operator*(const Coeff& s, BiPoly p) { return p *= s; }
    friend BiPoly operator-(BiPoly p) { return p *= Coeff(-1); }

    friend bool operator==(const BiPoly& p, const BiPoly& q) {
        return p.degree_ == q.degree_ && p.terms_ == q.terms_;
    }

private:
    void require_same_degree(const BiPoly& o) const {
        if (o.degree_ != degree_)
            throw BidegreeError("bidegree mismatch: " + degree_.str() + " vs " + o.degree_.str());
    }

    BiDegree degree_;
    TermMap terms_;
};

inline BiPoly multiply(const BiPoly& p, const BiPoly& q) {
    BiPoly out(p.degree() + q.degree());
    for (const auto& [m, c] : p.terms())
        for (const auto& [n, d] : q.terms()) out.add_term(m * n, c * d);
    return out;
}

inline BiPoly multiply(const Monomial& m, const BiPoly& q) {
    BiPoly out(m.degree() + q.degree());
    for (const auto& [n, d] : q.terms()) out.add_term(m * n, d);
    return out;
}

inline BiPoly partial(const BiPoly& p, Var v) {
    const int idx = static_cast<int>(v);
    BiDegree deg = p.degree() - (idx < 2 ? BiDegree{1, 0} : BiDegree{0, 1});
    BiPoly out(deg);
    for (const auto& [m, c] : p.terms()) {
        if (m.e[idx] == 0) continue;
        Monomial n = m;
        --n.e[idx];
        out.add_term(n, c * m.e[idx]);
    }
    return out;
}

/// (x0 F_x0 + x1 F_x1 - d F, y0 F_y0 + y1 F_y1 - e F); both vanish for bihomogeneous F.
inline std::pair<BiPoly, BiPoly> euler_defect(const BiPoly& f) {
    const BiDegree deg = f.degree();
    auto var_mono = [](Var v) {
        Monomial m;
        m.e[static_cast<int>(v)] = 1;
        return m;
    };
    BiPoly ex = multiply(var_mono(Var::x0), partial(f, Var::x0)) + multiply(var_mono(Var::x1), partial(f, Var::x1));
    ex -= f * BiPoly::Coeff(deg.a);
    BiPoly ey = multiply(var_mono(Var::y0), partial(f, Var::y0)) + multiply(var_mono(Var::y1), partial(f, Var::y1));
    ey -= f * BiPoly::Coeff(deg.b);
    return {std::move(ex), std::move(ey)};
}

/// Evaluates p at (x0, x1, y0, y1) in the working field.
template <Field K>
typename K::value_type evaluate(const K& k, const BiPoly& p, const std::array<typename K::value_type, 4>& pt) {
    auto acc = k.zero();
    for (const auto& [m, c] : p.terms()) {
        auto term = k.from_rational(c);
        for (int v = 0; v < 4; ++v)
            for (int r = 0; r < m.e[v]; ++r) term = k.mul(term, pt[v]);
        acc = k.add(acc, term);
    }
    return acc;
}

/// Integer coefficients uniform in [-height, height], drawn in canonical order.
inline BiPoly random_bipoly(BiDegree deg, std::uint64_t seed, std::int64_t height) {
    if (!deg.nonnegative()) throw std::invalid_argument("random_bipoly needs a nonnegative bidegree");
    if (height < 0) throw std::invalid_argument("height must be nonnegative");
    BiPoly p(deg);
    Rng rng(seed);
    for (const auto& m : monomial_basis(deg)) {
        std::int64_t c = rng.uniform(-height, height);
        p.add_term(m, BiPoly::Coeff(static_cast<long>(c)));
    }
    return p;
}

/// Dense product of coordinate vectors: S_u x S_v -> S_{u+v}.
template <Field K>
std::vector<typename K::value_type> multiply_coords(const K& k, BiDegree du, std::span<const typename K::value_type> u,
                                                    BiDegree dv, std::span<const typename K::value_type> v) {
    const BiDegree dw = du + dv;
    std::vector<typename K::value_type> w(dw.dim(), k.zero());
    const auto bu = monomial_basis(du);
    const auto bv = monomial_basis(dv);
    for (std::size_t i = 0; i < bu.size(); ++i) {
        if (k.is_zero(u[i])) continue;
        for (std::size_t j = 0; j < bv.size(); ++j) {
            if (k.is_zero(v[j])) continue;
            auto& slot = w[monomial_index(bu[i] * bv[j], dw)];
            slot = k.add(slot, k.mul(u[i], v[j]));
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Text form
//
//   poly   := ['+'|'-'] term (('+'|'-') term)*
//   term   := coef | [coef '*'] factor ('*' factor)*
//   factor := var ['^' nat]
//   var    := 'x0' | 'x1' | 'y0' | 'y1'
//   coef   := ['-'] nat ['/' nat]
//
// Whitespace is insignificant. A bare coefficient term is a constant; the
// zero polynomial of any bidegree is written "0".

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg), position_(pos) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

inline std::string format(const BiPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        const bool negative = sgn(c) < 0;
        const mpq_class mag = abs(c);
        if (first)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        first = false;
        const bool constant = m.degree() == BiDegree{0, 0};
        if (constant) {
            out += mag.get_str();
        } else {
            if (mag != 1) out += mag.get_str() + "*";
            out += m.str();
        }
    }
    return out;
}

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, BiDegree expected) : s_(text), expected_(expected) {}

    BiPoly parse() {
        BiPoly out(expected_);
        skip_ws();
        if (at_end()) throw ParseError(pos_, "empty polynomial");
        int sign = 1;
        if (peek() == '+' || peek() == '-') {
            sign = peek() == '-' ? -1 : 1;
            ++pos_;
        }
        term(out, sign);
        for (;;) {
            skip_ws();
            if (at_end()) break;
            char c = peek();
            if (c != '+' && c != '-') throw ParseError(pos_, std::string("expected '+' or '-', found '") + c + "'");
            ++pos_;
            term(out, c == '-' ? -1 : 1);
        }
        return out;
    }

private:
    void term(BiPoly& out, int sign) {
        skip_ws();
        const std::size_t start = pos_;
        mpq_class coef = sign;
        bool have_factor = false;
        Monomial m;
        if (!at_end() && (peek() == '-' || std::isdigit(static_cast<unsigned char>(peek())))) {
            coef *= coefficient();
            skip_ws();
            if (at_end() || peek() != '*') {
                add(out, m, coef, start, false);
                return;
            }
            ++pos_;
        }
        for (;;) {
            factor(m);
            have_factor = true;
            skip_ws();
            if (at_end() || peek() != '*') break;
            ++pos_;
        }
        add(out, m, coef, start, have_factor);
    }

    void add(BiPoly& out, const Monomial& m, const mpq_class& coef, std::size_t start, bool has_factor) {
        if (!has_factor && sgn(coef) == 0) return;  // "0" is the zero polynomial of any bidegree
        if (m.degree() != expected_) {
            std::string text(s_.substr(start, pos_ - start));
            while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
            throw BidegreeError("term '" + text + "' at position " + std::to_string(start) + " has bidegree " +
                                m.degree().str() + ", expected " + expected_.str());
        }
        out.add_term(m, coef);
    }

    mpq_class coefficient() {
        int sign = 1;
        if (peek() == '-') {
            sign = -1;
            ++pos_;
            skip_ws();
        }
        mpz_class num = natural();
        skip_ws();
        mpz_class den = 1;
        if (!at_end() && peek() == '/') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            den = natural();
            if (den == 0) throw ParseError(at, "zero denominator");
        }
        mpq_class q(num * sign, den);
        q.canonicalize();
        return q;
    }

    void factor(Monomial& m) {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ + 2 > s_.size()) throw ParseError(at, "expected variable x0, x1, y0 or y1");
        const char v = s_[pos_], i = s_[pos_ + 1];
        if ((v != 'x' && v != 'y') || (i != '0' && i != '1'))
            throw ParseError(at, "expected variable x0, x1, y0 or y1");
        pos_ += 2;
        if (!at_end() && std::isalnum(static_cast<unsigned char>(peek())))
            throw ParseError(at, "unknown variable");
        const int idx = (v == 'x' ? 0 : 2) + (i - '0');
        skip_ws();
        long e = 1;
        if (!at_end() && peek() == '^') {
            ++pos_;
            skip_ws();
            const std::size_t ep = pos_;
            mpz_class n = natural();
            if (n > 100000) throw ParseError(ep, "exponent too large");
            e = n.get_si();
        }
        m.e[idx] += static_cast<int>(e);
    }

    mpz_class natural() {
        const std::size_t at = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == at) throw ParseError(at, "expected a natural number");
        return mpz_class(std::string(s_.substr(at, pos_ - at)));
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    std::string_view s_;
    BiDegree expected_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Throws ParseError on bad syntax and BidegreeError when a term has the wrong bidegree.
inline BiPoly parse_bipoly(std::string_view text, BiDegree expected) {
    return detail::PolyParser(text, expected).parse();
}

}  // namespace bijac
