#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace biharm {

template <class S>
concept PlainScalar = std::is_arithmetic_v<S>;

/// Truncated second-order Taylor jet in three variables: value, gradient and
/// (symmetric) Hessian. `T` may itself be a jet, in which case the outer
/// derivatives carry their own derivative data; that is how fourth-order
/// information is obtained without a separate order-4 type.
template <class T>
struct Jet2 {
    using value_type = T;

    T value{};
    std::array<T, 3> grad{};
    std::array<T, 6> hess{}; // packed: xx xy xz yy yz zz

    Jet2() = default;
    Jet2(const T& v) : value(v) {}
    template <PlainScalar S>
        requires(!std::is_same_v<S, T>)
    Jet2(S s) : value(T(s)) {}

    static constexpr int packed(int i, int j) {
        constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return table[i][j];
    }

    T& h(int i, int j) { return hess[packed(i, j)]; }
    const T& h(int i, int j) const { return hess[packed(i, j)]; }

    /// Independent variable number `i` with value `v`.
    static Jet2 variable(const T& v, int i) {
        Jet2 r(v);
        r.grad[i] = T(1);
        return r;
    }

    T laplacian() const { return hess[0] + hess[3] + hess[5]; }

    Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
    Jet2& operator-=(const Jet2& o) { return *this = *this - o; }
    Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
    Jet2& operator/=(const Jet2& o) { return *this = *this / o; }
};

template <class T>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet2<T>> : std::true_type {};

// ---------------------------------------------------------------- arithmetic

template <class T>
Jet2<T> operator-(const Jet2<T>& a) {
    Jet2<T> r;
    r.value = -a.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = -a.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = -a.hess[i];
    return r;
}

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    r.value = a.value + b.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.grad[i] + b.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = a.hess[i] + b.hess[i];
    return r;
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    r.value = a.value - b.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.grad[i] - b.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = a.hess[i] - b.hess[i];
    return r;
}

template <class T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
    Jet2<T> r;
    r.value = a.value * b.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.value * b.grad[i] + a.grad[i] * b.value;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const int k = Jet2<T>::packed(i, j);
            r.hess[k] = a.value * b.hess[k] + a.hess[k] * b.value + a.grad[i] * b.grad[j] +
                        a.grad[j] * b.grad[i];
        }
    }
    return r;
}

/// Applies a scalar function with derivatives f0 = f(a), f1 = f'(a), f2 = f''(a).
template <class T>
Jet2<T> chain(const Jet2<T>& a, const T& f0, const T& f1, const T& f2) {
    Jet2<T> r;
    r.value = f0;
    for (int i = 0; i < 3; ++i) r.grad[i] = f1 * a.grad[i];
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const int k = Jet2<T>::packed(i, j);
            r.hess[k] = f1 * a.hess[k] + f2 * (a.grad[i] * a.grad[j]);
        }
    }
    return r;
}

template <class T>
Jet2<T> reciprocal(const Jet2<T>& a) {
    const T inv = T(1.0) / a.value;
    const T inv2 = inv * inv;
    return chain(a, inv, -inv2, T(2.0) * inv2 * inv);
}

template <class T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) {
    return a * reciprocal(b);
}

template <class T, PlainScalar S>
Jet2<T> operator+(const Jet2<T>& a, S s) {
    Jet2<T> r = a;
    r.value = r.value + s;
    return r;
}
template <class T, PlainScalar S>
Jet2<T> operator+(S s, const Jet2<T>& a) {
    return a + s;
}
template <class T, PlainScalar S>
Jet2<T> operator-(const Jet2<T>& a, S s) {
    Jet2<T> r = a;
    r.value = r.value - s;
    return r;
}
template <class T, PlainScalar S>
Jet2<T> operator-(S s, const Jet2<T>& a) {
    return -a + s;
}
template <class T, PlainScalar S>
Jet2<T> operator*(const Jet2<T>& a, S s) {
    Jet2<T> r;
    r.value = a.value * s;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.grad[i] * s;
    for (int i = 0; i < 6; ++i) r.hess[i] = a.hess[i] * s;
    return r;
}
template <class T, PlainScalar S>
Jet2<T> operator*(S s, const Jet2<T>& a) {
    return a * s;
}
template <class T, PlainScalar S>
Jet2<T> operator/(const Jet2<T>& a, S s) {
    return a * (1.0 / static_cast<double>(s));
}
template <class T, PlainScalar S>
Jet2<T> operator/(S s, const Jet2<T>& a) {
    return reciprocal(a) * s;
}

// ------------------------------------------------------------ elementary fns

template <class T>
Jet2<T> sqrt(const Jet2<T>& a) {
    using std::sqrt;
    const T r = sqrt(a.value);
    const T d1 = T(0.5) / r;
    const T d2 = -T(0.25) / (r * a.value);
    return chain(a, r, d1, d2);
}

template <class T>
Jet2<T> exp(const Jet2<T>& a) {
    using std::exp;
    const T e = exp(a.value);
    return chain(a, e, e, e);
}

template <class T>
Jet2<T> log(const Jet2<T>& a) {
    using std::log;
    const T inv = T(1.0) / a.value;
    return chain(a, log(a.value), inv, -(inv * inv));
}

template <class T>
Jet2<T> sin(const Jet2<T>& a) {
    using std::cos;
    using std::sin;
    const T s = sin(a.value);
    return chain(a, s, cos(a.value), -s);
}

template <class T>
Jet2<T> cos(const Jet2<T>& a) {
    using std::cos;
    using std::sin;
    const T c = cos(a.value);
    return chain(a, c, -sin(a.value), -c);
}

/// Integer power by repeated squaring; exact for polynomial inputs.
template <class T>
Jet2<T> pow(const Jet2<T>& a, int n) {
    if (n < 0) return reciprocal(pow(a, -n));
    Jet2<T> result(T(1.0));
    Jet2<T> base = a;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

template <class T>
Jet2<T> pow(const Jet2<T>& a, double p) {
    using std::pow;
    const T f0 = pow(a.value, p);
    const T f1 = p * pow(a.value, p - 1.0);
    const T f2 = p * (p - 1.0) * pow(a.value, p - 2.0);
    return chain(a, f0, f1, f2);
}

} // namespace biharm
