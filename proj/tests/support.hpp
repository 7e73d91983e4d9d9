// Shared helpers for the unit tests.

#pragma once

#include "ste/ste.hpp"

#include <random>

namespace ste::test {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240531);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Mat2 random_matrix() {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = cd(uniform(-1, 1), uniform(-1, 1));
    return m;
}

// Random full-rank density matrix from a Bloch vector of length < 1.
inline Mat2 random_state(double max_radius = 0.95) {
    Eigen::Vector3d r(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    r = r.normalized() * uniform(0.0, max_radius);
    return 0.5 * Mat2::Identity() + r(0) * spin::sx() + r(1) * spin::sy() + r(2) * spin::sz();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

// Config with a coarser grid for fast tests.
inline SynthesisConfig preset(const std::string& name, double tf = kDefaultDuration) {
    SynthesisConfig c = preset_config(name);
    c.tf = tf;
    return c;
}

}  // namespace ste::test
