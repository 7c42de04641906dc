#include "qtm/symbolic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qtm {

namespace {

// gmp only canonicalizes results of arithmetic, not two-argument construction
mpq_class frac(long a, long b) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

constexpr int kBits = 12;
constexpr std::uint64_t kMask = (1u << kBits) - 1;
}  // namespace

std::uint64_t SparsePoly::pack(const Exponents& e) {
    std::uint64_t k = 0;
    for (int i = 0; i < kSymVars; ++i) {
        if (e[i] < 0 || static_cast<std::uint64_t>(e[i]) > kMask)
            throw DomainError("SparsePoly: exponent out of range");
        k |= static_cast<std::uint64_t>(e[i]) << (kBits * i);
    }
    return k;
}

Exponents SparsePoly::unpack(std::uint64_t k) {
    Exponents e{};
    for (int i = 0; i < kSymVars; ++i) e[i] = static_cast<int>((k >> (kBits * i)) & kMask);
    return e;
}

SparsePoly::SparsePoly(const mpq_class& c) {
    if (c != 0) terms_.emplace(0, c);
}

SparsePoly SparsePoly::var(int i, int power) {
    if (i < 0 || i >= kSymVars) throw DomainError("SparsePoly: variable index out of range");
    Exponents e{};
    e[i] = power;
    return monomial(e, 1);
}

SparsePoly SparsePoly::monomial(const Exponents& e, const mpq_class& c) {
    SparsePoly r;
    if (c != 0) r.terms_.emplace(pack(e), c);
    return r;
}

bool SparsePoly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0); }

mpq_class SparsePoly::constant_term() const {
    auto it = terms_.find(0);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

mpq_class SparsePoly::coeff(const Exponents& e) const {
    auto it = terms_.find(pack(e));
    return it == terms_.end() ? mpq_class(0) : it->second;
}

int SparsePoly::total_degree(const Exponents& weight) const {
    int d = -1;
    for (const auto& [k, c] : terms_) {
        auto e = unpack(k);
        int s = 0;
        for (int i = 0; i < kSymVars; ++i) s += weight[i] * e[i];
        d = std::max(d, s);
    }
    return d;
}

void SparsePoly::add_term(std::uint64_t k, const mpq_class& c) {
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    } else if (c == 0) {
        terms_.erase(it);
    }
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
}

SparsePoly& SparsePoly::operator*=(const mpq_class& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

namespace {
// adds packed exponents; fields never carry because every product we form
// stays far below 2^12 per variable, but check anyway
inline std::uint64_t add_keys(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    for (int i = 0; i < kSymVars; ++i)
        if (((a >> (kBits * i)) & kMask) + ((b >> (kBits * i)) & kMask) > kMask)
            throw DomainError("SparsePoly: exponent overflow");
    return s;
}

inline int weighted(std::uint64_t k, const Exponents& w) {
    int s = 0;
    for (int i = 0; i < kSymVars; ++i) s += w[i] * static_cast<int>((k >> (kBits * i)) & kMask);
    return s;
}
}  // namespace

SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    SparsePoly r;
    if (a.is_zero() || b.is_zero()) return r;
    mpq_class t;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) {
            t = ca * cb;
            r.add_term(add_keys(ka, kb), t);
        }
    return r;
}

SparsePoly SparsePoly::mul_trunc(const SparsePoly& a, const SparsePoly& b, int d, const Exponents& weight) {
    SparsePoly r;
    mpq_class t;
    for (const auto& [ka, ca] : a.terms_) {
        int da = weighted(ka, weight);
        if (da > d) continue;
        for (const auto& [kb, cb] : b.terms_) {
            if (da + weighted(kb, weight) > d) continue;
            t = ca * cb;
            r.add_term(add_keys(ka, kb), t);
        }
    }
    return r;
}

SparsePoly SparsePoly::pow(int k) const {
    if (k < 0) throw DomainError("SparsePoly::pow: negative exponent");
    SparsePoly r(mpq_class(1)), base = *this;
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

SparsePoly SparsePoly::truncate(int d, const Exponents& weight) const {
    SparsePoly r;
    for (const auto& [k, c] : terms_)
        if (weighted(k, weight) <= d) r.terms_.emplace_hint(r.terms_.end(), k, c);
    return r;
}

cplx SparsePoly::eval(const std::array<cplx, kSymVars>& v) const {
    cplx s = 0;
    for (const auto& [k, c] : terms_) {
        cplx t = c.get_d();
        auto e = unpack(k);
        for (int i = 0; i < kSymVars; ++i)
            if (e[i]) t *= std::pow(v[i], e[i]);
        s += t;
    }
    return s;
}

std::pair<std::uint64_t, mpq_class> SparsePoly::lead() const {
    if (terms_.empty()) throw DomainError("SparsePoly::lead of zero");
    auto it = std::prev(terms_.end());
    return {it->first, it->second};
}

std::pair<Exponents, mpq_class> SparsePoly::lowest_term() const {
    if (terms_.empty()) throw DomainError("SparsePoly::lowest_term of zero");
    const Exponents one{1, 1, 1, 1, 1};
    auto best = terms_.begin();
    int bd = weighted(best->first, one);
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        int d = weighted(it->first, one);
        if (d < bd) {
            bd = d;
            best = it;
        }
    }
    return {unpack(best->first), best->second};
}

std::string SparsePoly::to_string(const std::array<const char*, kSymVars>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        mpq_class a = abs(c);
        auto e = unpack(k);
        bool has_var = k != 0;
        if (a != 1 || !has_var) os << a.get_str();
        bool need_star = a != 1;
        for (int i = 0; i < kSymVars; ++i) {
            if (!e[i]) continue;
            if (need_star) os << "*";
            os << names[i];
            if (e[i] > 1) os << "^" << e[i];
            need_star = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- RationalFunc

void RationalFunc::push_den(SparsePoly f) {
    if (f.is_zero()) throw DomainError("RationalFunc: zero denominator");
    mpq_class c = f.lead().second;
    if (f.is_constant()) {
        num_ *= mpq_class(1 / c);
        return;
    }
    if (c != 1) {
        f *= mpq_class(1 / c);
        num_ *= mpq_class(1 / c);
    }
    den_.push_back(std::move(f));
}

SparsePoly RationalFunc::den_product() const {
    SparsePoly r(mpq_class(1));
    for (const auto& f : den_) r = r * f;
    return r;
}

namespace {
// removes from `pool` one copy of each factor of `fs` that it contains;
// returns the factors of `fs` that were not found
std::vector<SparsePoly> take_common(std::vector<SparsePoly>& pool, const std::vector<SparsePoly>& fs) {
    std::vector<SparsePoly> missing;
    for (const auto& f : fs) {
        auto it = std::find(pool.begin(), pool.end(), f);
        if (it != pool.end()) pool.erase(it);
        else missing.push_back(f);
    }
    return missing;
}

SparsePoly product(const std::vector<SparsePoly>& fs) {
    SparsePoly r(mpq_class(1));
    for (const auto& f : fs) r = r * f;
    return r;
}
}  // namespace

RationalFunc operator+(const RationalFunc& a, const RationalFunc& b) {
    if (a.num_.is_zero()) return b;
    if (b.num_.is_zero()) return a;
    // lcm of the factor multisets
    std::vector<SparsePoly> pool = a.den_;
    std::vector<SparsePoly> only_b = take_common(pool, b.den_);
    // pool now holds factors of a not in b
    RationalFunc r;
    r.num_ = a.num_ * product(only_b) + b.num_ * product(pool);
    r.den_ = a.den_;
    r.den_.insert(r.den_.end(), only_b.begin(), only_b.end());
    if (r.num_.is_zero()) r.den_.clear();
    return r;
}

RationalFunc RationalFunc::operator-() const {
    RationalFunc r = *this;
    r.num_ *= mpq_class(-1);
    return r;
}

RationalFunc operator-(const RationalFunc& a, const RationalFunc& b) { return a + (-b); }

RationalFunc operator*(const RationalFunc& a, const RationalFunc& b) {
    RationalFunc r;
    r.num_ = a.num_ * b.num_;
    if (r.num_.is_zero()) return r;
    r.den_ = a.den_;
    r.den_.insert(r.den_.end(), b.den_.begin(), b.den_.end());
    return r;
}

RationalFunc RationalFunc::inverse() const {
    if (num_.is_zero()) throw DomainError("RationalFunc: division by zero");
    RationalFunc r(product(den_));
    r.push_den(num_);
    return r;
}

RationalFunc operator/(const RationalFunc& a, const RationalFunc& b) {
    // cancel structurally identical factors: b's numerator may equal one of a's
    // denominator factors only after normalization, so keep it simple
    return a * b.inverse();
}

RationalFunc RationalFunc::pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    RationalFunc r(1L);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

cplx RationalFunc::eval(const std::array<cplx, kSymVars>& v) const {
    cplx n = num_.eval(v);
    for (const auto& f : den_) n /= f.eval(v);
    return n;
}

namespace {
// P(var -> N/D) as a RationalFunc, where value = N / prod(Dfs)
RationalFunc subst_poly(const SparsePoly& P, int var, const SparsePoly& N, const std::vector<SparsePoly>& Dfs) {
    // split P by powers of var
    std::map<int, SparsePoly> parts;
    int kmax = 0;
    for (const auto& [k, c] : P.terms()) {
        auto e = SparsePoly::unpack(k);
        int j = e[var];
        e[var] = 0;
        parts[j] += SparsePoly::monomial(e, c);
        kmax = std::max(kmax, j);
    }
    if (kmax == 0) return RationalFunc(P);
    SparsePoly D = product(Dfs);
    std::vector<SparsePoly> Npow(kmax + 1), Dpow(kmax + 1);
    Npow[0] = SparsePoly(mpq_class(1));
    Dpow[0] = SparsePoly(mpq_class(1));
    for (int j = 1; j <= kmax; ++j) {
        Npow[j] = Npow[j - 1] * N;
        Dpow[j] = Dfs.empty() ? Dpow[0] : Dpow[j - 1] * D;
    }
    SparsePoly num;
    for (const auto& [j, Pj] : parts) num += Pj * Npow[j] * Dpow[kmax - j];
    RationalFunc r(num);
    std::vector<SparsePoly> den;
    for (int j = 0; j < kmax; ++j) den.insert(den.end(), Dfs.begin(), Dfs.end());
    RationalFunc dr(1L);
    for (auto& f : den) dr = dr * RationalFunc(f);
    return r / dr;
}
}  // namespace

RationalFunc RationalFunc::substitute(int var, const RationalFunc& value) const {
    RationalFunc r = subst_poly(num_, var, value.num_, value.den_);
    for (const auto& f : den_) r = r / subst_poly(f, var, value.num_, value.den_);
    return r;
}

RationalFunc RationalFunc::substitute_all(const std::array<const RationalFunc*, kSymVars>& values) const {
    // rename through fresh slots is not possible with 5 slots, so substitutions
    // must not reference variables that are substituted later
    RationalFunc r = *this;
    for (int i = 0; i < kSymVars; ++i)
        if (values[i]) r = r.substitute(i, *values[i]);
    return r;
}

// ---------------------------------------------------------------- series

namespace {
SparsePoly inverse_series(const SparsePoly& f, int d, const Exponents& weight) {
    mpq_class c0;
    SparsePoly g;  // f = c0 (1 - g)
    for (const auto& [k, c] : f.terms()) {
        if (weighted(k, weight) == 0) {
            if (k != 0) throw DomainError("power_series: denominator has a weight-zero non-constant term");
            c0 = c;
        }
    }
    if (c0 == 0) throw DomainError("power_series: denominator vanishes at the origin");
    g = SparsePoly(mpq_class(1)) - f * mpq_class(1 / c0);
    SparsePoly s(mpq_class(1)), gp(mpq_class(1));
    for (int k = 1; k <= d; ++k) {
        gp = SparsePoly::mul_trunc(gp, g, d, weight);
        if (gp.is_zero()) break;
        s += gp;
    }
    return s * mpq_class(1 / c0);
}
}  // namespace

SparsePoly power_series(const RationalFunc& f, int d, const Exponents& weight) {
    SparsePoly s = f.num().truncate(d, weight);
    for (const auto& fac : f.den()) s = SparsePoly::mul_trunc(s, inverse_series(fac, d, weight), d, weight);
    return s;
}

IdentityCheck verify_identity(const RationalFunc& lhs, const RationalFunc& rhs) {
    // cross-multiply after cancelling structurally shared denominator factors
    std::vector<SparsePoly> ld = lhs.den();
    std::vector<SparsePoly> rd_only = take_common(ld, rhs.den());
    const SparsePoly a = lhs.num() * product(rd_only), b = rhs.num() * product(ld);
    SparsePoly diff = a - b;
    IdentityCheck r;
    r.equal = diff.is_zero();
    r.terms_checked = std::max(a.size(), b.size());
    if (!r.equal) {
        auto [e, c] = diff.lowest_term();
        r.witness = SparsePoly::monomial(e, c).to_string();
    }
    return r;
}

// ---------------------------------------------------------------- prime classes

const char* prime_class_name(PrimeClass c) {
    switch (c) {
        case PrimeClass::p_eq_2: return "p_eq_2";
        case PrimeClass::p_generic: return "p_generic";
        case PrimeClass::p_div_a: return "p_div_a";
        case PrimeClass::p_div_l_odd: return "p_div_l_odd";
        case PrimeClass::p_div_l_even: return "p_div_l_even";
    }
    throw DomainError("unknown prime class");
}

PrimeClass prime_class_from_name(const std::string& s) {
    for (auto c : kAllPrimeClasses)
        if (s == prime_class_name(c)) return c;
    throw DomainError("unknown prime class: " + s);
}

namespace sym {
RationalFunc x() { return RationalFunc::var(VX); }
RationalFunc y() { return RationalFunc::var(VY); }
RationalFunc z() { return RationalFunc::var(VZ); }
RationalFunc w() { return RationalFunc::var(VW); }
RationalFunc q() { return RationalFunc::var(VQ); }
RationalFunc p() { return RationalFunc(SparsePoly::var(VQ, 2)); }
}  // namespace sym

namespace {
using namespace sym;

RationalFunc half() { return RationalFunc(mpq_class(1, 2)); }

// even / odd parts of 1/((1-X)(1-y)(1-z)) for an arbitrary first variable X
RationalFunc even_series(const RationalFunc& X) {
    RationalFunc one(1L);
    RationalFunc a = ((one - X) * (one - y()) * (one - z())).inverse();
    RationalFunc b = ((one + X) * (one + y()) * (one + z())).inverse();
    return half() * (a + b);
}
RationalFunc odd_series(const RationalFunc& X) {
    RationalFunc one(1L);
    RationalFunc a = ((one - X) * (one - y()) * (one - z())).inverse();
    RationalFunc b = ((one + X) * (one + y()) * (one + z())).inverse();
    return half() * (a - b);
}

RationalFunc inv_p() { return p().inverse(); }
// (1 + 1/p)^{-1}
RationalFunc c_flag() { return (RationalFunc(1L) + inv_p()).inverse(); }

void require_class(PrimeClass c) { (void)prime_class_name(c); }

// Local factor of sum_{(b,2l)=1} bw^{v_p(b)} sum_{r_i | ab} mu(r) x^{e1} y^{e2} z^{e3}
// * S(E) where S(E) is the local A-value at p^E divided by sqrt of its
// squarefree part, E = l_p + e1 + e2 + e3. `even`/`odd` are the
// parity-restricted sigma series (T,U or V,W). The 1/zeta(2) prefactor is
// applied by the caller.
RationalFunc dr_local(PrimeClass c, const RationalFunc& bw, const RationalFunc& even, const RationalFunc& odd) {
    RationalFunc one(1L);
    RationalFunc cf = c_flag();
    // sum_j sigma(p^{E%2+2j}) p^{-...}, flagged by (1+1/p)^{-1} when p | n l r
    auto S = [&](int E) -> RationalFunc {
        if (E == 0) return one + cf * (even - one);
        return cf * ((E % 2) ? odd : even);
    };
    auto e_sum = [&]() {
        RationalFunc s(0L);
        for (int m = 0; m < 8; ++m) {
            RationalFunc mono(1L);
            int E = 0;
            if (m & 1) mono = mono * x(), ++E;
            if (m & 2) mono = mono * y(), ++E;
            if (m & 4) mono = mono * z(), ++E;
            if (E & 1) mono = -mono;
            s = s + mono * S(E);
        }
        return s;
    };
    switch (c) {
        case PrimeClass::p_eq_2: return one;
        case PrimeClass::p_generic: {
            // v_p(b) = 0 forces r = 1; v_p(b) >= 1 frees the r_i
            RationalFunc tail = bw * (one - bw).inverse();
            return S(0) + tail * e_sum();
        }
        case PrimeClass::p_div_a: return (one - bw).inverse() * e_sum();
        case PrimeClass::p_div_l_odd: return S(1);
        case PrimeClass::p_div_l_even: return S(2);
    }
    throw DomainError("unknown prime class");
}

RationalFunc zeta2_recip_local(PrimeClass c) {
    if (c == PrimeClass::p_eq_2) return RationalFunc(1L);
    return RationalFunc(1L) - inv_p().pow(2);
}

// sqrt(w) = p^{alpha+s} = 1/(q x)
RationalFunc sqrt_w() { return (q() * x()).inverse(); }
}  // namespace

RationalFunc series_T() { return even_series(x()); }
RationalFunc series_U() { return odd_series(x()); }
RationalFunc series_V() { return even_series(x() * w()); }
RationalFunc series_W() { return odd_series(x() * w()); }

RationalFunc ap_prime_closed() {
    RationalFunc one(1L);
    RationalFunc n = one + x() * y() + x() * z() + y() * z();
    return n / ((one - x() * x()) * (one - y() * y()) * (one - z() * z()));
}

RationalFunc ap_odd_closed() {
    RationalFunc one(1L);
    RationalFunc n = q() * (x() + y() + z() + x() * y() * z());
    return n / ((one - x() * x()) * (one - y() * y()) * (one - z() * z()));
}

RationalFunc dn_k0_factor(PrimeClass c) {
    // sum_{(n,2a)=1} sigma(l_1 n^2)/(l_1 n^2)^{1/2+s} phi(ln)/(ln), local at p
    RationalFunc one(1L);
    RationalFunc phi = one - inv_p();
    switch (c) {
        case PrimeClass::p_eq_2:
        case PrimeClass::p_div_a: return one;
        case PrimeClass::p_generic: return one + phi * (series_T() - one);
        case PrimeClass::p_div_l_odd: return phi * series_U();
        case PrimeClass::p_div_l_even: return phi * series_T();
    }
    throw DomainError("unknown prime class");
}

RationalFunc dr_111_factor(PrimeClass c) {
    require_class(c);
    return zeta2_recip_local(c) * dr_local(c, inv_p().pow(2), series_T(), series_U());
}

RationalFunc dr_111_factor_literal(PrimeClass c) {
    RationalFunc f = dr_local(c, inv_p().pow(2), series_T(), series_U());
    if (c == PrimeClass::p_generic || c == PrimeClass::p_div_a) f = zeta2_recip_local(c) * f;
    return f;
}

RationalFunc dn_square_factor(PrimeClass c) {
    // 2 l^{s+alpha} zeta_2(1-2alpha-2s) J_1(v, 1/2-alpha) / (zeta(v) zeta(1)) local,
    // v = 2s+2alpha, so p^{-v} = 1/w; zeta(1) contributes (1 - 1/p).
    RationalFunc one(1L);
    RationalFunc iw = w().inverse();
    RationalFunc phi = one - inv_p();
    if (c == PrimeClass::p_eq_2) {
        // 2 (1 - 2^{-v}) (1 - 1/2) J_2 with J_2 = (1 - 2^{-v})^{-1}
        return one;
    }
    RationalFunc pre = (one - w() * inv_p()).inverse() * (one - iw) * phi;
    RationalFunc geo = (one - iw).inverse();
    // sigma(p^n) p^{-n(1/2-alpha)} = [even/odd series in x,y,z] * w^{n/2};
    // combined with p^{-(n+l_p)v/2} the w-powers collapse to w^{-l_p/2}.
    const RationalFunc T = series_T(), U = series_U();
    switch (c) {
        case PrimeClass::p_div_a: return pre * geo;
        case PrimeClass::p_generic: {
            // even n: phi-weighted, odd n = 2k2+1: (1/p)/sqrt(p) * sqrt(w) U
            RationalFunc first = geo * (one + phi * (T - one));
            RationalFunc second = q().inverse() * sqrt_w() * U;
            return pre * (first + second);
        }
        case PrimeClass::p_div_l_odd: {
            RationalFunc first = geo * sqrt_w().inverse() * phi * U;
            RationalFunc second = q().inverse() * T;
            return sqrt_w() * pre * (first + second);
        }
        case PrimeClass::p_div_l_even: {
            RationalFunc first = geo * iw * phi * T;
            // n = 2k2-1 >= 1: w^{n/2} w^{-k2} = w^{-1/2}
            RationalFunc second = q().inverse() * sqrt_w().inverse() * U;
            return w() * pre * (first + second);
        }
        case PrimeClass::p_eq_2: break;
    }
    throw DomainError("unknown prime class");
}

RationalFunc dr_m111_factor(PrimeClass c) {
    require_class(c);
    // b^{-2(1-alpha-s)} local weight w/p^2; A_{-alpha-s, beta+s, gamma+s} uses V, W
    RationalFunc bw = w() * inv_p().pow(2);
    return zeta2_recip_local(c) * dr_local(c, bw, series_V(), series_W());
}

RationalFunc impose_w_relation(const RationalFunc& f) {
    RationalFunc val = (p() * x() * x()).inverse();
    return f.substitute(VW, val);
}

RationalFunc dn_k0_generic_display() {
    RationalFunc one(1L);
    return one + (one - inv_p()) * (series_T() - one);
}

RationalFunc dr_111_generic_display() {
    RationalFunc one(1L);
    RationalFunc T = series_T(), U = series_U();
    RationalFunc ip2 = inv_p().pow(2);
    RationalFunc e1 = x() + y() + z(), e2 = x() * y() + x() * z() + y() * z(), e3 = x() * y() * z();
    RationalFunc inner = T - e1 * U + e2 * T - e3 * U;
    RationalFunc Q = (one - ip2) * (T + (ip2 * (one - ip2).inverse()) * inner);
    return one + c_flag() * (Q - one);
}

RationalFunc dn_square_generic_display() {
    RationalFunc one(1L);
    RationalFunc iw = w().inverse();
    RationalFunc A = (one - iw).inverse() * (one + (one - inv_p()) * (series_T() - one));
    RationalFunc B = w() * x() * series_U();
    return (one - w() * inv_p()).inverse() * (one - iw) * (one - inv_p()) * (A + B);
}

RationalFunc dr_m111_generic_display() {
    RationalFunc one(1L);
    RationalFunc V = series_V(), W = series_W();
    RationalFunc cf = c_flag();
    RationalFunc A1 = one + cf * (V - one);
    RationalFunc Ap = cf * W;   // A(p)/sqrt(p)
    RationalFunc Ap2 = cf * V;  // A(p^2)
    RationalFunc e1 = x() + y() + z(), e2 = x() * y() + x() * z() + y() * z(), e3 = x() * y() * z();
    RationalFunc wp2 = w() * inv_p().pow(2);
    return (one - inv_p().pow(2)) * (A1 + wp2 * (one - wp2).inverse() * (A1 - (e1 + e3) * Ap + e2 * Ap2));
}

RationalFunc dn_square_div_a_display() {
    RationalFunc one(1L);
    return (one - inv_p()) * (one - w() * inv_p()).inverse();
}

RationalFunc dr_m111_div_a_display() {
    RationalFunc one(1L);
    RationalFunc V = series_V(), W = series_W();
    RationalFunc e1 = x() + y() + z(), e2 = x() * y() + x() * z() + y() * z(), e3 = x() * y() * z();
    RationalFunc Qp = V - e1 * W + e2 * V - e3 * W;
    RationalFunc wp2 = w() * inv_p().pow(2);
    return (one - inv_p().pow(2)) * (one - wp2).inverse() * (one + c_flag() * (Qp - one));
}

std::vector<EulerClassReport> verify_euler_identities(const std::vector<PrimeClass>& classes) {
    std::vector<EulerClassReport> out(classes.size());
    // independent per class; the GMP work is not thread-hostile but the
    // classes are few and cheap, so stay serial
    for (size_t i = 0; i < classes.size(); ++i) {
        auto c = classes[i];
        out[i].cls = c;
        out[i].k0 = verify_identity(dn_k0_factor(c), dr_111_factor(c));
        out[i].square =
            verify_identity(impose_w_relation(dn_square_factor(c)), impose_w_relation(dr_m111_factor(c)));
    }
    return out;
}

// ---------------------------------------------------------------- J check

bool JCheckReport::pass() const {
    return std::all_of(cases.begin(), cases.end(), [](const JCheckCase& c) { return c.result.equal; });
}

namespace {
// variables: X, Y, Z (slots 0..2), P = p^{-v} (slot 3), r = p^{-1/2} (slot 4)
constexpr Exponents kJWeight{1, 1, 1, 1, 0};

// sum_{a+b+c=n} X^a Y^b Z^c
SparsePoly h_poly(int n) {
    SparsePoly s;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) s += SparsePoly::monomial({a, b, n - a - b, 0, 0}, 1);
    return s;
}

SparsePoly Ppow(int k) { return SparsePoly::var(3, k); }
SparsePoly rpow(int k) { return SparsePoly::var(4, k); }
SparsePoly one_poly() { return SparsePoly(mpq_class(1)); }

// phi(p^b)/p^b
SparsePoly phi_ratio(int b) { return b == 0 ? one_poly() : one_poly() - rpow(2); }

// G_{eps k1 p^{2 k2}}(p^beta) / p^beta, with p-adic valuation vk of the index
SparsePoly gauss_ratio(int vk, int beta, int chi) {
    if (beta <= vk) return (beta % 2) ? SparsePoly() : phi_ratio(beta);
    if (beta == vk + 1) {
        if (beta % 2 == 0) return rpow(2) * mpq_class(-1);  // -p^{vk}/p^{vk+1}
        return rpow(1) * mpq_class(chi);                      // chi p^{vk} sqrt(p)/p^{vk+1}
    }
    return SparsePoly();
}

SparsePoly j_defining(int lp, bool p_div_k1, int chi, int d) {
    SparsePoly s;
    for (int n = 0; n <= d; ++n) {
        SparsePoly h = h_poly(n);
        for (int k2 = 0; n + k2 <= d; ++k2) {
            int vk = 2 * k2 + (p_div_k1 ? 1 : 0);
            SparsePoly g = gauss_ratio(vk, n + lp, chi);
            if (g.is_zero()) continue;
            s += h * Ppow(k2) * g;
        }
    }
    return s;
}

SparsePoly j_closed(int lp, bool p_div_k1, int chi, int d) {
    // (1-P)^{-1} sum_{n = lp mod 2} sigma(p^n) P^{(n+lp)/2} phi(p^{n+lp})/p^{n+lp} + tail
    SparsePoly geo;
    for (int k = 0; k <= d; ++k) geo += Ppow(k);
    SparsePoly first;
    for (int n = lp % 2; n <= d; n += 2) first += h_poly(n) * Ppow((n + lp) / 2) * phi_ratio(n + lp);
    first = SparsePoly::mul_trunc(geo, first, d, kJWeight);
    SparsePoly tail;
    if (!p_div_k1) {
        // chi p^{-1/2} sum_{2k2 >= lp-1} sigma(p^{2k2+1-lp}) P^{k2}
        for (int k2 = 0; k2 <= d; ++k2) {
            int n = 2 * k2 + 1 - lp;
            if (n < 0) continue;
            tail += h_poly(n) * Ppow(k2);
        }
        tail = tail * rpow(1) * mpq_class(chi);
    } else {
        // -p^{-1} sum_{2k2+2 >= lp} sigma(p^{2k2+2-lp}) P^{k2}
        for (int k2 = 0; k2 <= d; ++k2) {
            int n = 2 * k2 + 2 - lp;
            if (n < 0) continue;
            tail += h_poly(n) * Ppow(k2);
        }
        tail = tail * rpow(2) * mpq_class(-1);
    }
    return (first + tail).truncate(d, kJWeight);
}
}  // namespace

JCheckReport j_euler_generic(int truncation) {
    if (truncation < 6) throw DomainError("j_euler_generic: truncation must be >= 6");
    JCheckReport rep;
    rep.truncation = truncation;
    for (int lp = 0; lp <= 2; ++lp) {
        for (int chi : {1, -1}) rep.cases.push_back({lp, false, chi, {}});
        rep.cases.push_back({lp, true, 0, {}});
    }
    for (auto& cs : rep.cases) {
        SparsePoly a = j_defining(cs.l_p, cs.p_divides_k1, cs.chi, truncation).truncate(truncation, kJWeight);
        SparsePoly b = j_closed(cs.l_p, cs.p_divides_k1, cs.chi, truncation);
        SparsePoly diff = a - b;
        cs.result.equal = diff.is_zero();
        cs.result.terms_checked = a.size();
        if (!cs.result.equal) {
            auto [e, c] = diff.lowest_term();
            cs.result.witness = SparsePoly::monomial(e, c).to_string({"X", "Y", "Z", "P", "r"});
        }
    }
    return rep;
}

// ---------------------------------------------------------------- zeta-factor extraction

std::map<MonomialKey, long> zeta_exponent_extract(const RationalFunc& f, int M) {
    if (M < 2) throw DomainError("zeta_exponent_extract: M must be >= 2");
    const Exponents wt{1, 1, 1, 0, 0};
    for (const auto* poly : {&f.num()})
        for (const auto& [k, c] : poly->terms())
            if (SparsePoly::unpack(k)[VW] || SparsePoly::unpack(k)[VQ])
                throw DomainError("zeta_exponent_extract: f must depend on x, y, z only");
    for (const auto& fac : f.den())
        for (const auto& [k, c] : fac.terms())
            if (SparsePoly::unpack(k)[VW] || SparsePoly::unpack(k)[VQ])
                throw DomainError("zeta_exponent_extract: f must depend on x, y, z only");
    const int d = M - 1;
    SparsePoly s = power_series(f, d, wt);
    if (s.constant_term() != 1) throw DomainError("zeta_exponent_extract: f(0,0,0) must be 1");
    // formal log
    SparsePoly g = s - one_poly();
    SparsePoly L, gp = one_poly();
    for (int k = 1; k <= d; ++k) {
        gp = SparsePoly::mul_trunc(gp, g, d, wt);
        if (gp.is_zero()) break;
        L += gp * mpq_class((k % 2) ? 1 : -1, k);
    }
    std::map<MonomialKey, long> out;
    for (int deg = 1; deg <= d; ++deg) {
        for (int a = deg; a >= 0; --a)
            for (int b = deg - a; b >= 0; --b) {
                int c = deg - a - b;
                Exponents e{a, b, c, 0, 0};
                mpq_class cm = L.coeff(e);
                if (cm == 0) continue;
                // log (1-m)^{e_m} = -e_m sum_j m^j / j
                mpq_class em = -cm;
                if (em.get_den() != 1) throw DomainError("zeta_exponent_extract: non-integer exponent");
                long ev = em.get_num().get_si();
                out[{a, b, c}] = ev;
                for (int j = 1; j * deg <= d; ++j)
                    L += SparsePoly::monomial({a * j, b * j, c * j, 0, 0}, frac(ev, j));
            }
    }
    return out;
}

SparsePoly reconstruct_from_exponents(const std::map<MonomialKey, long>& e, int d) {
    const Exponents wt{1, 1, 1, 0, 0};
    SparsePoly r = one_poly();
    for (const auto& [m, ev] : e) {
        SparsePoly mono = SparsePoly::monomial({m[0], m[1], m[2], 0, 0}, 1);
        // (1 - m)^{ev} via binomial series
        SparsePoly f = one_poly(), term = one_poly();
        mpq_class coef = 1;
        for (int j = 1; j * (m[0] + m[1] + m[2]) <= d; ++j) {
            coef = coef * frac(ev - j + 1, j) * mpq_class(-1);
            term = term * mono;
            f += term * coef;
        }
        r = SparsePoly::mul_trunc(r, f, d, wt);
    }
    return r;
}

}  // namespace qtm
