#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qtm/common.hpp"

namespace qtm {

// Exponent vectors are packed 12 bits per variable, at most 5 variables.
inline constexpr int kSymVars = 5;
using Exponents = std::array<int, kSymVars>;

// Canonical variable slots: x, y, z, w, q (p = q^2).
enum Var : int { VX = 0, VY = 1, VZ = 2, VW = 3, VQ = 4 };

class SparsePoly {
public:
    SparsePoly() = default;
    explicit SparsePoly(const mpq_class& c);
    static SparsePoly var(int i, int power = 1);
    static SparsePoly monomial(const Exponents& e, const mpq_class& c);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    mpq_class constant_term() const;
    mpq_class coeff(const Exponents& e) const;
    const std::map<std::uint64_t, mpq_class>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    int total_degree(const Exponents& weight = {1, 1, 1, 1, 1}) const;

    SparsePoly& operator+=(const SparsePoly& o);
    SparsePoly& operator-=(const SparsePoly& o);
    SparsePoly& operator*=(const mpq_class& c);
    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b);
    friend SparsePoly operator*(SparsePoly a, const mpq_class& c) { return a *= c; }
    SparsePoly operator-() const { return *this * mpq_class(-1); }
    bool operator==(const SparsePoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const SparsePoly& o) const { return !(*this == o); }

    SparsePoly pow(int k) const;
    // keep terms whose weighted degree is <= d
    SparsePoly truncate(int d, const Exponents& weight = {1, 1, 1, 0, 0}) const;
    // product truncated to weighted degree <= d
    static SparsePoly mul_trunc(const SparsePoly& a, const SparsePoly& b, int d, const Exponents& weight);

    cplx eval(const std::array<cplx, kSymVars>& v) const;
    // highest-key term, used to normalize denominator factors
    std::pair<std::uint64_t, mpq_class> lead() const;
    // the term of lowest total degree (ties by key), for witnesses
    std::pair<Exponents, mpq_class> lowest_term() const;
    std::string to_string(const std::array<const char*, kSymVars>& names = {"x", "y", "z", "w", "q"}) const;

    static std::uint64_t pack(const Exponents& e);
    static Exponents unpack(std::uint64_t k);

private:
    std::map<std::uint64_t, mpq_class> terms_;
    void add_term(std::uint64_t k, const mpq_class& c);
};

// num / prod(den). Denominator factors are non-constant and normalized to a
// leading coefficient of 1, so identical factors can be matched structurally.
class RationalFunc {
public:
    RationalFunc() : num_(mpq_class(0)) {}
    RationalFunc(const SparsePoly& n) : num_(n) {}  // NOLINT implicit
    RationalFunc(long c) : num_(mpq_class(c)) {}    // NOLINT implicit
    RationalFunc(const mpq_class& c) : num_(c) {}   // NOLINT implicit
    static RationalFunc var(int i) { return RationalFunc(SparsePoly::var(i)); }

    const SparsePoly& num() const { return num_; }
    const std::vector<SparsePoly>& den() const { return den_; }
    SparsePoly den_product() const;

    friend RationalFunc operator+(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator-(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator*(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator/(const RationalFunc& a, const RationalFunc& b);
    RationalFunc operator-() const;
    RationalFunc inverse() const;
    RationalFunc pow(int k) const;

    cplx eval(const std::array<cplx, kSymVars>& v) const;
    RationalFunc substitute(int var, const RationalFunc& value) const;
    // f(x,y,z) -> f(ax, by, cz) style substitution of several variables at once
    RationalFunc substitute_all(const std::array<const RationalFunc*, kSymVars>& values) const;

private:
    SparsePoly num_;
    std::vector<SparsePoly> den_;
    void push_den(SparsePoly f);
};

// Power series of f to weighted degree <= d. Requires every denominator factor
// to have nonzero constant term.
SparsePoly power_series(const RationalFunc& f, int d, const Exponents& weight = {1, 1, 1, 0, 0});

struct IdentityCheck {
    bool equal = false;
    std::string witness;  // lowest-degree monomial of lhs.num*rhs.den - rhs.num*lhs.den
    size_t terms_checked = 0;  // monomials in the larger cross-multiplied side
};

IdentityCheck verify_identity(const RationalFunc& lhs, const RationalFunc& rhs);

enum class PrimeClass { p_eq_2, p_generic, p_div_a, p_div_l_odd, p_div_l_even };
const char* prime_class_name(PrimeClass c);
PrimeClass prime_class_from_name(const std::string& s);
inline constexpr std::array<PrimeClass, 5> kAllPrimeClasses = {PrimeClass::p_eq_2, PrimeClass::p_generic,
                                                               PrimeClass::p_div_a, PrimeClass::p_div_l_odd,
                                                               PrimeClass::p_div_l_even};

namespace sym {
RationalFunc x();
RationalFunc y();
RationalFunc z();
RationalFunc w();
RationalFunc q();
RationalFunc p();  // q^2
}  // namespace sym

RationalFunc series_T();
RationalFunc series_U();
RationalFunc series_V();  // T with x replaced by x w
RationalFunc series_W();  // U with x replaced by x w
RationalFunc ap_prime_closed();
RationalFunc ap_odd_closed();

RationalFunc dn_k0_factor(PrimeClass c);
RationalFunc dr_111_factor(PrimeClass c);
// Same as dr_111_factor but normalized by 1/zeta_{2l}(2) throughout,
// kept to document the discrepancy at p | l.
RationalFunc dr_111_factor_literal(PrimeClass c);
RationalFunc dn_square_factor(PrimeClass c);
RationalFunc dr_m111_factor(PrimeClass c);
// w -> 1/(p x^2)
RationalFunc impose_w_relation(const RationalFunc& f);

// Closed generic-prime forms, used to cross-check the assembled factors.
RationalFunc dn_k0_generic_display();
RationalFunc dr_111_generic_display();
RationalFunc dn_square_generic_display();
RationalFunc dr_m111_generic_display();
RationalFunc dn_square_div_a_display();
RationalFunc dr_m111_div_a_display();

struct EulerClassReport {
    PrimeClass cls;
    IdentityCheck k0;      // D_N(k=0) vs D_R(1,1,1)
    IdentityCheck square;  // D_N(k=square) vs D_R(-1,1,1)
};
std::vector<EulerClassReport> verify_euler_identities(const std::vector<PrimeClass>& classes);

struct JCheckCase {
    int l_p;
    bool p_divides_k1;
    int chi;  // (eps k1 / p) when p does not divide k1
    IdentityCheck result;
};
struct JCheckReport {
    int truncation;
    std::vector<JCheckCase> cases;
    bool pass() const;
};
// Defining double sum of J_{eps k1; p}(v, w) vs its resummed closed form, as
// truncated series in X = p^{-alpha-w} (and Y, Z), P = p^{-v}, r = p^{-1/2}.
JCheckReport j_euler_generic(int truncation);

using MonomialKey = std::array<int, 3>;
// Exponents e_m with f = prod_m (1 - m)^{e_m} * (1 + O(degree >= M)), m = x^a y^b z^c
// of degree 1..M-1. The zeta exponent of zeta((a+b+c)/2 + a alpha + b beta + c gamma)
// is -e_m.
std::map<MonomialKey, long> zeta_exponent_extract(const RationalFunc& f, int M);
// prod_m (1 - m)^{e_m} as a power series truncated at degree d
SparsePoly reconstruct_from_exponents(const std::map<MonomialKey, long>& e, int d);

}  // namespace qtm
