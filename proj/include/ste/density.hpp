// density.hpp: validated 2x2 density matrices

#pragma once

#include "ste/errors.hpp"
#include "ste/matrix2.hpp"
#include "ste/su2.hpp"

#include <cmath>
#include <string>

namespace ste {

struct StateTolerance {
    double trace{1e-8};
    double eigenvalue{1e-10};
    double hermiticity{1e-10};
};

// Hermitian, unit trace, eigenvalues >= -tol. Construction validates; the
// stored matrix is symmetrized.
class DensityMatrix {
public:
    DensityMatrix() : rho_(0.5 * Mat2::Identity()) {}

    explicit DensityMatrix(const Mat2& m, StateTolerance tol = {}) : rho_(hermitian_part(m)) {
        const double herm = hermiticity_defect(m);
        if (!(herm <= tol.hermiticity * std::max(1.0, m.norm()))) {
            throw InvalidState("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
        }
        const double tr_err = std::abs(m.trace() - 1.0);
        if (!(tr_err <= tol.trace)) {
            throw InvalidState("density matrix trace deviates from 1 by " + std::to_string(tr_err));
        }
        const double min_eig = eigh2(rho_).values(0);
        if (!(min_eig >= -tol.eigenvalue)) {
            throw InvalidState("density matrix has negative eigenvalue " + std::to_string(min_eig));
        }
    }

    static DensityMatrix maximally_mixed() { return DensityMatrix(); }

    // Gibbs state exp(-H/T)/Z.
    static DensityMatrix thermal(const Mat2& hamiltonian, double temperature) {
        if (!(temperature > 0.0)) throw InvalidState("thermal state needs T > 0");
        const Eigh2 e = eigh2(hamiltonian);
        const double shift = e.values(0);
        Eigen::Vector2cd w;
        w << std::exp(-(e.values(0) - shift) / temperature), std::exp(-(e.values(1) - shift) / temperature);
        Mat2 rho = e.vectors * w.asDiagonal() * e.vectors.adjoint();
        return DensityMatrix(rho / rho.trace().real());
    }

    const Mat2& matrix() const { return rho_; }

    Eigen::Vector2d eigenvalues() const { return eigh2(rho_).values; }

    double purity() const { return (rho_ * rho_).trace().real(); }

    // (<S_x>, <S_y>, <S_z>); |r| <= 1/2 for a valid state.
    Eigen::Vector3d spin_expectations() const {
        return {(rho_ * spin::sx()).trace().real(), (rho_ * spin::sy()).trace().real(),
                (rho_ * spin::sz()).trace().real()};
    }

private:
    Mat2 rho_;
};

inline double trace_distance(const Mat2& a, const Mat2& b) {
    const Eigh2 e = eigh2(a - b);
    return 0.5 * (std::abs(e.values(0)) + std::abs(e.values(1)));
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

}  // namespace ste
