#include "egrl/rl/mlp.hpp"

namespace egrl::rl {

void MlpGrads::resize(const MlpShape& s) {
    w1.resize(s.hidden, s.in);
    w2.resize(s.hidden, s.hidden);
    w3.resize(s.out, s.hidden);
    b1.resize(s.hidden);
    b2.resize(s.hidden);
    b3.resize(s.out);
    set_zero();
}

void MlpGrads::set_zero() {
    w1.setZero();
    w2.setZero();
    w3.setZero();
    b1.setZero();
    b2.setZero();
    b3.setZero();
}

Vector MlpGrads::flatten() const {
    Vector p(w1.size() + w2.size() + w3.size() + b1.size() + b2.size() + b3.size());
    Eigen::Index o = 0;
    auto put = [&](const auto& m) {
        p.segment(o, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
        o += m.size();
    };
    put(w1);
    put(b1);
    put(w2);
    put(b2);
    put(w3);
    put(b3);
    return p;
}

namespace {
// Uniform fan-in init, the usual default for small dense nets.
void init_layer(Matrix& w, Vector& b, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-bound, bound);
}
}  // namespace

Mlp::Mlp(const MlpShape& shape, Rng& rng, bool zero_output_layer) : shape_(shape) {
    w1.resize(shape.hidden, shape.in);
    w2.resize(shape.hidden, shape.hidden);
    w3.resize(shape.out, shape.hidden);
    b1.resize(shape.hidden);
    b2.resize(shape.hidden);
    b3.resize(shape.out);
    init_layer(w1, b1, rng);
    init_layer(w2, b2, rng);
    init_layer(w3, b3, rng);
    if (zero_output_layer) {
        w3.setZero();
        b3.setZero();
    }
}

Matrix Mlp::forward(const Matrix& x) const {
    Cache unused;
    return forward(x, unused);
}

Matrix Mlp::forward(const Matrix& x, Cache& cache) const {
    cache.x = x;
    cache.h1 = tanh_fast((w1 * x).colwise() + b1);
    cache.h2 = tanh_fast((w2 * cache.h1).colwise() + b2);
    return (w3 * cache.h2).colwise() + b3;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& dy, MlpGrads& g) const {
    g.w3.noalias() += dy * cache.h2.transpose();
    g.b3 += dy.rowwise().sum();
    const Matrix dz2 =
        (w3.transpose() * dy).cwiseProduct((1.0 - cache.h2.array().square()).matrix());
    g.w2.noalias() += dz2 * cache.h1.transpose();
    g.b2 += dz2.rowwise().sum();
    const Matrix dz1 =
        (w2.transpose() * dz2).cwiseProduct((1.0 - cache.h1.array().square()).matrix());
    g.w1.noalias() += dz1 * cache.x.transpose();
    g.b1 += dz1.rowwise().sum();
    return w1.transpose() * dz1;
}

int Mlp::param_count() const {
    return static_cast<int>(w1.size() + w2.size() + w3.size() + b1.size() + b2.size() + b3.size());
}

Vector Mlp::flatten() const {
    Vector p(param_count());
    Eigen::Index o = 0;
    auto put = [&](const auto& m) {
        p.segment(o, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
        o += m.size();
    };
    put(w1);
    put(b1);
    put(w2);
    put(b2);
    put(w3);
    put(b3);
    return p;
}

void Mlp::unflatten(const Vector& p) {
    if (p.size() != param_count()) throw std::invalid_argument("mlp: bad parameter vector size");
    Eigen::Index o = 0;
    auto take = [&](auto& m) {
        Eigen::Map<Vector>(m.data(), m.size()) = p.segment(o, m.size());
        o += m.size();
    };
    take(w1);
    take(b1);
    take(w2);
    take(b2);
    take(w3);
    take(b3);
}

void Mlp::add_scaled(const MlpGrads& g, double scale) {
    w1 += scale * g.w1;
    b1 += scale * g.b1;
    w2 += scale * g.w2;
    b2 += scale * g.b2;
    w3 += scale * g.w3;
    b3 += scale * g.b3;
}

void Mlp::lerp_toward(const Mlp& other, double rate) {
    w1 = (1.0 - rate) * w1 + rate * other.w1;
    b1 = (1.0 - rate) * b1 + rate * other.b1;
    w2 = (1.0 - rate) * w2 + rate * other.w2;
    b2 = (1.0 - rate) * b2 + rate * other.b2;
    w3 = (1.0 - rate) * w3 + rate * other.w3;
    b3 = (1.0 - rate) * b3 + rate * other.b3;
}

}  // namespace egrl::rl
