#pragma once

#include "egrl/common.hpp"
#include "egrl/rng.hpp"

#include <vector>

namespace egrl::rl {

// One replay tuple. `s` and `s2` are raw (un-normalized) augmented
// observations; `a` is the executed action unless the off-policy-correctness
// breaker is active.
struct Transition {
    Vector s;
    Vector a;
    double r = 0.0;
    Vector s2;
    bool done = false;
};

class ReplayBuffer {
public:
    ReplayBuffer(size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
        data_.reserve(std::min<size_t>(capacity, 1 << 20));
    }

    void add(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }
    const Transition& operator[](size_t i) const { return data_[i]; }

    /// Uniform sample of n indices (with replacement) from the seeded stream.
    std::vector<size_t> sample_indices(size_t n) {
        if (data_.empty()) throw std::runtime_error("replay buffer: sample from empty buffer");
        std::vector<size_t> idx(n);
        for (auto& i : idx) i = static_cast<size_t>(rng_.uniform_int(data_.size()));
        return idx;
    }

private:
    size_t capacity_;
    size_t head_ = 0;
    std::vector<Transition> data_;
    Rng rng_;
};

}  // namespace egrl::rl
