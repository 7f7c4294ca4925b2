#include "smx/field_monomial.hpp"

#include <functional>

namespace smx {

namespace {

unsigned long binomial(unsigned n, unsigned k) {
    unsigned long r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

unsigned long factorial(unsigned n) {
    unsigned long r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

FieldMonomial FieldMonomial::power(const std::string& field, unsigned n) {
    FieldMonomial m;
    m.set(field, n);
    return m;
}

void FieldMonomial::set(const std::string& field, unsigned n) {
    if (n == 0) factors_.erase(field);
    else factors_[field] = n;
}

unsigned FieldMonomial::degree() const {
    unsigned d = 0;
    for (const auto& [f, n] : factors_) d += n;
    return d;
}

std::string FieldMonomial::to_string() const {
    if (factors_.empty()) return "1";
    std::string s;
    for (const auto& [f, n] : factors_) {
        if (!s.empty()) s += "*";
        s += f + (n > 1 ? "^" + std::to_string(n) : "");
    }
    return s;
}

FieldMonomial& FieldMonomial::operator*=(const FieldMonomial& o) {
    for (const auto& [f, n] : o.factors_) factors_[f] += n;
    return *this;
}

std::vector<Submonomial> submonomials(const FieldMonomial& a) {
    std::vector<std::pair<std::string, unsigned>> fs(a.factors().begin(), a.factors().end());
    std::vector<Submonomial> out;
    Submonomial cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == fs.size()) {
            out.push_back(cur);
            return;
        }
        const auto& [name, n] = fs[i];
        for (unsigned k = n + 1; k-- > 0;) {
            Submonomial saved = cur;
            cur.sub.set(name, k);
            cur.complement.set(name, n - k);
            cur.multiplicity *= binomial(n, k);
            rec(i + 1);
            cur = saved;
        }
    };
    rec(0);
    return out;
}

unsigned long complete_pairings(const FieldMonomial& a, const FieldMonomial& b) {
    if (!(a == b)) return 0;
    unsigned long r = 1;
    for (const auto& [f, n] : a.factors()) r *= factorial(n);
    return r;
}

Rational field_mass_dimension(const FieldMonomial& a, unsigned d,
                              const std::map<std::string, unsigned>& derivative_order) {
    Rational dim(0);
    for (const auto& [f, n] : a.factors()) {
        auto it = derivative_order.find(f);
        unsigned beta = it == derivative_order.end() ? 0 : it->second;
        dim += Rational(n) * (make_rational(static_cast<long>(d) - 2, 2) + beta);
    }
    dim.canonicalize();
    return dim;
}

} // namespace smx
