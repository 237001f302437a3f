#include "snse/rational.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace snse {

namespace {

long long checked(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error(std::string("rational overflow in ") + what);
    return static_cast<long long>(v);
}

} // namespace

Rational::Rational(long long n, long long d) : num_(n), den_(d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    reduce();
}

void Rational::reduce() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    __int128 n = (__int128)num_ * o.den_ + (__int128)o.num_ * den_;
    __int128 d = (__int128)den_ * o.den_;
    num_ = checked(n, "+");
    den_ = checked(d, "+");
    reduce();
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    num_ = checked((__int128)num_ * o.num_, "*");
    den_ = checked((__int128)den_ * o.den_, "*");
    reduce();
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
    num_ = checked((__int128)num_ * o.den_, "/");
    den_ = checked((__int128)den_ * o.num_, "/");
    reduce();
    return *this;
}

bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

Rational Rational::binomial(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Rational r(1);
    for (int i = 0; i < k; ++i) {
        r *= Rational(n - i);
        r /= Rational(i + 1);
    }
    return r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

} // namespace snse
