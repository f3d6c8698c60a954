#ifndef PLATOON_STATE_SPACE_HPP
#define PLATOON_STATE_SPACE_HPP

#include <Eigen/Core>
#include <complex>

#include "platoon/rational.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Continuous-time realization dx = Ax + Bu, y = Cx + Du.
struct StateSpace {
    Eigen::MatrixXd A, B, C, D;

    int order() const { return static_cast<int>(A.rows()); }
    int inputs() const { return static_cast<int>(B.cols()); }
    int outputs() const { return static_cast<int>(C.rows()); }

    bool is_stable(double margin = kStabilityMargin) const;
    Eigen::MatrixXcd operator()(std::complex<double> s) const;
    Eigen::MatrixXcd at_omega(double w) const;
};

// Controllable canonical realization. Throws ImproperSystem when the relative
// degree is negative.
StateSpace to_state_space(const RationalFn& f);

// Block-diagonal realization: one canonical block per nonzero entry. Not
// minimal in general; A inherits entry pole stability, so norm computations
// that only need stability and the transfer map remain valid.
StateSpace to_state_space(const TfMatrix& m);

// Orthogonal staircase reduction to the controllable and observable part.
// `tol` is the relative rank threshold.
StateSpace minreal(const StateSpace& ss, double tol = 1e-9);

// Exact zero-order-hold discretization: returns {Ad, Bd} with C, D unchanged.
struct DiscreteSS {
    Eigen::MatrixXd Ad, Bd, C, D;
};
DiscreteSS zoh_discretize(const StateSpace& ss, double dt);

} // namespace platoon

#endif
