#pragma once

#include "egrl/common.hpp"
#include "egrl/rng.hpp"

namespace egrl::rl {

struct MlpShape {
    int in = 0;
    int hidden = 0;
    int out = 0;
};

struct MlpGrads {
    Matrix w1, w2, w3;
    Vector b1, b2, b3;

    void resize(const MlpShape& s);
    void set_zero();
    Vector flatten() const;
};

// Two tanh hidden layers, linear output. Batches are columns, so forward maps
// (in x B) -> (out x B). Reverse mode is hand-written against this fixed
// topology; backward() also returns the input gradient, which the actor
// update needs for dQ/da.
class Mlp {
public:
    Mlp() = default;
    Mlp(const MlpShape& shape, Rng& rng, bool zero_output_layer = false);

    struct Cache {
        Matrix x, h1, h2;
    };

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, Cache& cache) const;

    /// dY is (out x B); accumulates into g and returns dX (in x B).
    Matrix backward(const Cache& cache, const Matrix& dy, MlpGrads& g) const;

    const MlpShape& shape() const { return shape_; }
    int param_count() const;
    Vector flatten() const;
    void unflatten(const Vector& p);

    /// In-place axpy over all parameter blocks: this += scale * g.
    void add_scaled(const MlpGrads& g, double scale);
    /// this = (1 - rate) * this + rate * other (polyak averaging).
    void lerp_toward(const Mlp& other, double rate);

    Matrix w1, w2, w3;
    Vector b1, b2, b3;

private:
    MlpShape shape_;
};

}  // namespace egrl::rl
