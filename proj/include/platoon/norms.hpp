#ifndef PLATOON_NORMS_HPP
#define PLATOON_NORMS_HPP

#include <vector>

#include "platoon/rational.hpp"
#include "platoon/state_space.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Logarithmically spaced frequency grid, endpoints included.
std::vector<double> log_grid(double lo, double hi, int points);

// Solves A' P + P A + Q = 0 for stable A via complex Schur reduction.
Eigen::MatrixXd lyap_ct(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// H2 norm via the observability Gramian. Requires stability and strict
// properness; throws UnstableSystem / NotStrictlyProper otherwise.
double h2_norm(const RationalFn& f);
// Matrix H2 norm: sqrt of the entrywise sum of squared scalar H2 norms
// (equals the Gramian trace definition for the block-diagonal realization).
double h2_norm(const TfMatrix& m);

struct HinfOptions {
    double tol = 1e-6;    // absolute bisection gap
    int grid_points = 200; // initial lower-bound sweep
    double grid_lo = 1e-3;
    double grid_hi = 1e3;
};

// H-infinity norm by Hamiltonian imaginary-axis bisection seeded from a
// frequency sweep. Requires stability (poles strictly in the open left half
// plane) and properness.
double hinf_norm(const StateSpace& ss, const HinfOptions& opt = {});
double hinf_norm(const RationalFn& f, const HinfOptions& opt = {});
double hinf_norm(const TfMatrix& m, const HinfOptions& opt = {});

// Largest singular value of the frequency response over a fixed grid; used
// to cross-check the bisection result.
double grid_sup_sv(const TfMatrix& m, const std::vector<double>& omegas);

} // namespace platoon

#endif
