#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace snse {

// Exact rational scalar. All symbolic coefficients in the engine are
// rationals: the contraction combinatorics (factorials, binomials) are
// integer-valued and must never round.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d);

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);

    double to_double() const { return double(num_) / double(den_); }
    std::string str() const;

    static Rational factorial(int n);
    static Rational binomial(int n, int k);

private:
    void reduce();
    long long num_ = 0;
    long long den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

} // namespace snse
