#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace hsvol::detail {

/// Forward-mode dual number with up to N tangent directions.
template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants

    static Dual variable(double value, std::size_t slot) {
        Dual out(value);
        out.d[slot] = 1.0;
        return out;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
        v *= inv;
        return *this;
    }
};

template <std::size_t N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <std::size_t N> Dual<N> operator+(Dual<N> a, double b) { return a += Dual<N>(b); }
template <std::size_t N> Dual<N> operator-(Dual<N> a, double b) { return a -= Dual<N>(b); }
template <std::size_t N> Dual<N> operator*(Dual<N> a, double b) {
    a.v *= b;
    for (auto& x : a.d) x *= b;
    return a;
}
template <std::size_t N> Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <std::size_t N> Dual<N> operator+(double a, const Dual<N>& b) { return b + a; }
template <std::size_t N> Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <std::size_t N> Dual<N> operator*(double a, const Dual<N>& b) { return b * a; }
template <std::size_t N> Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }
template <std::size_t N> Dual<N> operator-(const Dual<N>& a) { return a * -1.0; }

template <std::size_t N>
Dual<N> chain(const Dual<N>& a, double value, double slope) {
    Dual<N> out(value);
    for (std::size_t i = 0; i < N; ++i) out.d[i] = slope * a.d[i];
    return out;
}

template <std::size_t N> Dual<N> log(const Dual<N>& a) { return chain(a, std::log(a.v), 1.0 / a.v); }
template <std::size_t N> Dual<N> exp(const Dual<N>& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e);
}
template <std::size_t N> Dual<N> tanh(const Dual<N>& a) {
    const double t = std::tanh(a.v);
    return chain(a, t, 1.0 - t * t);
}
// d|x|/dx taken as 0 at x = 0.
template <std::size_t N> Dual<N> abs(const Dual<N>& a) {
    return chain(a, std::abs(a.v), a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0));
}

inline double value_of(double x) { return x; }
template <std::size_t N> double value_of(const Dual<N>& x) { return x.v; }

} // namespace hsvol::detail
