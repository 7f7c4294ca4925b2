#include "smx/coeff_poly.hpp"

#include "smx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace smx {

namespace {

// Graded-lex "leading" order for exact division: higher total degree first,
// then lexicographically larger power vector.
unsigned total_degree(const SymbolPowers& p) {
    unsigned d = 0;
    for (const auto& [s, e] : p) d += e;
    return d;
}

bool lead_less(const SymbolPowers& a, const SymbolPowers& b) {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    // Compare as exponent vectors over the union of names (name-ascending).
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) return false;
        if (ia == a.end() || ib->first < ia->first) return true;
        if (ia->second != ib->second) return ia->second < ib->second;
        ++ia;
        ++ib;
    }
    return false;
}

const SymbolPowers& leading_key(const CoeffPoly::TermMap& t) {
    auto best = t.begin();
    for (auto it = t.begin(); it != t.end(); ++it)
        if (lead_less(best->first, it->first)) best = it;
    return best->first;
}

// a / b if every exponent of b is <= the one in a.
bool divide_powers(const SymbolPowers& a, const SymbolPowers& b, SymbolPowers& out) {
    out.clear();
    auto ia = a.begin();
    for (const auto& [s, e] : b) {
        while (ia != a.end() && ia->first < s) out.push_back(*ia++);
        if (ia == a.end() || ia->first != s || ia->second < e) return false;
        if (ia->second > e) out.emplace_back(s, ia->second - e);
        ++ia;
    }
    while (ia != a.end()) out.push_back(*ia++);
    return true;
}

} // namespace

SymbolPowers multiply_powers(const SymbolPowers& a, const SymbolPowers& b) {
    SymbolPowers out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            out.push_back(*ia++);
        } else if (ia == a.end() || ib->first < ia->first) {
            out.push_back(*ib++);
        } else {
            out.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        }
    }
    return out;
}

CoeffPoly::CoeffPoly(const Rational& c) {
    if (c != 0) terms_.emplace(SymbolPowers{}, c);
}

CoeffPoly CoeffPoly::symbol(const std::string& name, unsigned power) {
    if (name.empty()) throw InvalidArgument("empty symbol name");
    CoeffPoly p;
    if (power == 0)
        p.terms_.emplace(SymbolPowers{}, Rational(1));
    else
        p.terms_.emplace(SymbolPowers{{name, power}}, Rational(1));
    return p;
}

bool CoeffPoly::is_constant() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational CoeffPoly::constant_term() const {
    auto it = terms_.find(SymbolPowers{});
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational CoeffPoly::as_rational() const {
    if (!is_constant()) throw InvalidArgument("coefficient is not a number: " + to_string());
    return constant_term();
}

void CoeffPoly::add_term(const SymbolPowers& key, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

CoeffPoly& CoeffPoly::operator+=(const CoeffPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

CoeffPoly& CoeffPoly::operator-=(const CoeffPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
}

CoeffPoly operator*(const CoeffPoly& a, const CoeffPoly& b) {
    CoeffPoly out;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) out.add_term(multiply_powers(ka, kb), ca * cb);
    return out;
}

CoeffPoly& CoeffPoly::operator*=(const CoeffPoly& o) { return *this = *this * o; }

CoeffPoly& CoeffPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

CoeffPoly CoeffPoly::pow(unsigned n) const {
    CoeffPoly result(1), base = *this;
    while (n) {
        if (n & 1u) result *= base;
        n >>= 1u;
        if (n) base = base * base;
    }
    return result;
}

unsigned CoeffPoly::degree_in(const std::string& sym) const {
    unsigned d = 0;
    for (const auto& [k, c] : terms_)
        for (const auto& [s, e] : k)
            if (s == sym) d = std::max(d, e);
    return d;
}

CoeffPoly CoeffPoly::coefficient_in(const std::string& sym, unsigned j) const {
    CoeffPoly out;
    for (const auto& [k, c] : terms_) {
        unsigned e = 0;
        SymbolPowers rest;
        for (const auto& sp : k) {
            if (sp.first == sym)
                e = sp.second;
            else
                rest.push_back(sp);
        }
        if (e == j) out.add_term(rest, c);
    }
    return out;
}

CoeffPoly CoeffPoly::substitute(const std::string& sym, const CoeffPoly& value) const {
    CoeffPoly out;
    for (unsigned j = 0, n = degree_in(sym); j <= n; ++j) {
        CoeffPoly cj = coefficient_in(sym, j);
        if (!cj.is_zero()) out += cj * value.pow(j);
    }
    return out;
}

bool CoeffPoly::depends_on(const std::string& sym) const { return degree_in(sym) > 0; }

std::vector<std::string> CoeffPoly::symbols() const {
    std::set<std::string> names;
    for (const auto& [k, c] : terms_)
        for (const auto& [s, e] : k) names.insert(s);
    return {names.begin(), names.end()};
}

bool CoeffPoly::divide_exact(const CoeffPoly& divisor, CoeffPoly& quotient) const {
    if (divisor.is_zero()) throw InvalidArgument("division by zero polynomial");
    quotient = CoeffPoly();
    CoeffPoly rem = *this;
    const SymbolPowers& dlead = leading_key(divisor.terms_);
    const Rational dcoef = divisor.terms_.at(dlead);
    SymbolPowers q;
    while (!rem.is_zero()) {
        const SymbolPowers rlead = leading_key(rem.terms_);
        if (!divide_powers(rlead, dlead, q)) return false;
        Rational c = rem.terms_.at(rlead) / dcoef;
        CoeffPoly t;
        t.terms_.emplace(q, c);
        quotient += t;
        rem -= t * divisor;
    }
    return true;
}

double CoeffPoly::evaluate(const std::map<std::string, double>& values) const {
    double sum = 0.0;
    for (const auto& [k, c] : terms_) {
        double v = to_double(c);
        for (const auto& [s, e] : k) {
            auto it = values.find(s);
            if (it == values.end()) throw InvalidArgument("no numeric value for symbol '" + s + "'");
            v *= std::pow(it->second, static_cast<double>(e));
        }
        sum += v;
    }
    return sum;
}

std::string CoeffPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool unit = (mag == 1) && !k.empty();
        if (!unit) os << smx::to_string(mag);
        bool need_star = !unit;
        for (const auto& [s, e] : k) {
            if (need_star) os << "*";
            os << s;
            if (e != 1) os << "^" << e;
            need_star = true;
        }
    }
    return os.str();
}

int compare(const CoeffPoly& a, const CoeffPoly& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        if (int c = compare(ia->second, ib->second)) return c;
    }
    if (ia == a.terms_.end() && ib == b.terms_.end()) return 0;
    return ia == a.terms_.end() ? -1 : 1;
}

} // namespace smx
