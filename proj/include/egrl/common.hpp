#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;

template <typename T>
T clip(T v, T lo, T hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

/// Elementwise clip of an action-like vector into a box.
template <typename Derived>
Vector clip_box(const Eigen::MatrixBase<Derived>& a, double lo = -1.0, double hi = 1.0) {
    return a.cwiseMax(lo).cwiseMin(hi);
}

/// Overflow-safe logistic sigmoid.
template <typename T>
T logistic(T x) {
    if (x >= T(0)) {
        const T e = std::exp(-x);
        return T(1) / (T(1) + e);
    }
    const T e = std::exp(x);
    return e / (T(1) + e);
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
    return v.allFinite();
}

/// Elementwise tanh through vectorized exp; exact up to rounding. Eigen's
/// double tanh falls back to scalar libm calls, which dominate small-net
/// forward passes.
inline Matrix tanh_fast(const Matrix& x) {
    const auto t = (-2.0 * x.array().abs()).exp();
    return (x.array().sign() * (1.0 - t) / (1.0 + t)).matrix();
}

/// Bounded setpoint-tracking factor in (0, 1].
inline double tracking_factor(double error, double scale) {
    return std::exp(-std::abs(error) / scale);
}

/// Classic RK4 step; State must support scalar*State and State+State
/// (works with Eigen vectors and plain doubles).
template <typename State, typename Rhs>
State rk4_step(const State& x, double dt, Rhs&& f) {
    const State k1 = f(x);
    const State k2 = f(x + (0.5 * dt) * k1);
    const State k3 = f(x + (0.5 * dt) * k2);
    const State k4 = f(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// FNV-1a, used for config hashes and named rng stream derivation.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Derive a child seed from a master seed and a stream name.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
    std::uint64_t h = fnv1a64(stream);
    h ^= master + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace egrl
