#include "smx/ratfunc.hpp"

#include "smx/errors.hpp"

namespace smx {

UPoly::UPoly(const Rational& c) {
    if (c != 0) c_.push_back(c);
}

UPoly::UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void UPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

unsigned UPoly::valuation() const {
    unsigned v = 0;
    while (v < c_.size() && c_[v] == 0) ++v;
    return v;
}

UPoly& UPoly::operator+=(const UPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

UPoly& UPoly::operator-=(const UPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(r));
}

void UPoly::divmod(const UPoly& d, UPoly& q, UPoly& r) const {
    if (d.is_zero()) throw InvalidArgument("polynomial division by zero");
    r = *this;
    std::vector<Rational> qc(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0, Rational(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
        int shift = r.degree() - d.degree();
        Rational f = r.leading() / d.leading();
        qc[static_cast<std::size_t>(shift)] = f;
        std::vector<Rational> t(static_cast<std::size_t>(shift) + 1, Rational(0));
        t.back() = f;
        r -= UPoly(std::move(t)) * d;
    }
    q = UPoly(std::move(qc));
}

Rational UPoly::evaluate(const Rational& x) const {
    Rational v(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
}

UPoly UPoly::scaled(const Rational& s) const {
    std::vector<Rational> r = c_;
    Rational p(1);
    for (auto& c : r) {
        c *= p;
        p *= s;
    }
    return UPoly(std::move(r));
}

UPoly UPoly::monic() const {
    if (is_zero()) return *this;
    std::vector<Rational> r = c_;
    Rational l = leading();
    for (auto& c : r) c /= l;
    return UPoly(std::move(r));
}

CoeffPoly UPoly::to_coeff(const std::string& var) const {
    CoeffPoly p;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) p += CoeffPoly(c_[i]) * (i ? CoeffPoly::symbol(var, static_cast<unsigned>(i)) : CoeffPoly(1));
    return p;
}

UPoly UPoly::from_coeff(const CoeffPoly& p, const std::string& var) {
    std::vector<Rational> r(p.degree_in(var) + 1, Rational(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.coefficient_in(var, static_cast<unsigned>(i)).as_rational();
    return UPoly(std::move(r));
}

std::string UPoly::to_string(const std::string& var) const { return to_coeff(var).to_string(); }

UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        UPoly q, r;
        a.divmod(b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

RatFunc::RatFunc(const UPoly& num) : num_(num), den_(1) {}

RatFunc::RatFunc(const UPoly& num, const UPoly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw InvalidArgument("rational function with zero denominator");
    reduce();
}

void RatFunc::reduce() {
    if (num_.is_zero()) {
        den_ = UPoly(1);
        return;
    }
    UPoly g = gcd(num_, den_);
    UPoly q, r;
    num_.divmod(g, q, r);
    num_ = q;
    den_.divmod(g, q, r);
    den_ = q;
    Rational l = den_.leading();
    num_ = num_ * UPoly(Rational(1) / l);
    den_ = den_ * UPoly(Rational(1) / l);
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
RatFunc operator-(const RatFunc& a, const RatFunc& b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
RatFunc operator*(const RatFunc& a, const RatFunc& b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw InvalidArgument("rational function division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
}

RatFunc RatFunc::scaled(const Rational& s) const { return {num_.scaled(s), den_.scaled(s)}; }

Rational RatFunc::evaluate(const Rational& x) const {
    Rational d = den_.evaluate(x);
    if (d == 0) throw ResonantDegree("pole at " + smx::to_string(x));
    return num_.evaluate(x) / d;
}

std::map<int, Rational> RatFunc::laurent(int max_exponent) const {
    std::map<int, Rational> out;
    if (num_.is_zero()) return out;
    unsigned vn = num_.valuation(), vd = den_.valuation();
    int lead = static_cast<int>(vn) - static_cast<int>(vd);
    if (max_exponent < lead) return out;
    auto n_at = [&](std::size_t i) { return num_[vn + i]; };
    auto d_at = [&](std::size_t i) { return den_[vd + i]; };
    std::size_t terms = static_cast<std::size_t>(max_exponent - lead) + 1;
    std::vector<Rational> s(terms, Rational(0));
    for (std::size_t i = 0; i < terms; ++i) {
        Rational acc = n_at(i);
        for (std::size_t j = 1; j <= i; ++j) acc -= d_at(j) * s[i - j];
        s[i] = acc / d_at(0);
        if (s[i] != 0) out[lead + static_cast<int>(i)] = s[i];
    }
    return out;
}

std::string RatFunc::to_string(const std::string& var) const {
    if (den_ == UPoly(1)) return num_.to_string(var);
    return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
}

} // namespace smx
