#ifndef PLATOON_SYNTHESIS_HPP
#define PLATOON_SYNTHESIS_HPP

#include <utility>
#include <vector>

#include "platoon/coprime.hpp"
#include "platoon/model.hpp"
#include "platoon/rational.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Diagonal Youla parameter: one stable proper entry per follower.
struct DiagonalYoula {
    std::vector<RationalFn> q;
    void validate(int n) const; // throws UnstableParameter / InvalidParameter
};

// Distributed controller realization: vehicle 1 runs u_1 = (H^{-1}K_1) z_1,
// vehicle k runs u_k = (H^{-1}ff_k) u_{k-1} + (H^{-1}K_k) z_k. The gains
// stored in local_gain / ff_gain are the proper H^{-1}-scaled blocks; local_k
// keeps the raw K_k (one degree improper when h > 0).
struct LeaderInfoController {
    int n = 0;
    double headway = 0.0;
    double alpha = 1.0;
    std::vector<RationalFn> phi; // size n+1, leader at index 0

    TfMatrix yq, xq; // shifted left factors: yq lower-bidiagonal, xq diagonal
    std::vector<RationalFn> local_k;     // K_k, k = 1..n
    std::vector<RationalFn> local_gain;  // H^{-1} K_k (proper)
    std::vector<RationalFn> feedforward; // phi_k^{-1} phi_{k-1}, k = 2..n
    std::vector<RationalFn> ff_gain;     // H^{-1} feedforward (proper)
    DiagonalYoula youla;

    double design_delay_s = 0.0; // delay absorbed in the design plant core
    int design_pade_order = 0;
    // Deployment annotations, set by the delay module: the broadcast latency
    // the realization tolerates and the sensor delay that compensates it.
    double broadcast_delay_s = 0.0;
    double measurement_delay_s = 0.0;
};

struct ClosedLoopMaps {
    TfMatrix t_zw0; // n x 1, leader disturbance to spacing errors
    TfMatrix t_uw0; // n x 1, leader disturbance to controls
    TfMatrix t_zw;  // n x n, vehicle disturbances to spacing errors
    TfMatrix t_uw;  // n x n, vehicle disturbances to controls
};

// Fixed stable basis for the Youla entries: {1, 1/(ls+1), ..., 1/(ls+1)^d}.
struct QBasis {
    int degree = 8;
    double lambda = 0.1;
    std::vector<RationalFn> atoms() const;
};

struct DesignOptions {
    int grid_points = 200;
    double grid_lo = 1e-3;
    double grid_hi = 1e3;
    bool parallel = false; // OpenMP across independent channels
};

enum class DesignNorm { h2, hinf };

struct LocalDesign {
    RationalFn q;
    double cost = 0.0;               // certified by the exact norm routines
    double grid_estimate = 0.0;      // optimizer's frequency-grid value
    double two_parameter_cost = -1., // set by local_optimal_qjj only
        diagonal_cost = -1.;
    bool basis_limited = false; // coefficient blow-up: basis too small
};

LeaderInfoController build_controller(const PlatoonDcf& dcf, const DiagonalYoula& q);

// Assembled lower-triangular transfer matrix of the distributed recursion:
// entry (i,j) = H^{-(i-j)} phi_i^{-1} phi_j (H^{-1}K_j), i >= j.
TfMatrix controller_tfm(const LeaderInfoController& c);

// Same matrix assembled the way the deployment actually computes it: row i
// chains the realized feedforward block onto row i-1. Agrees with
// controller_tfm for a consistent controller; diverges when the stored
// realization blocks have been tampered with, which is exactly what the
// verification battery wants to detect.
TfMatrix controller_tfm_recursion(const LeaderInfoController& c);

// All four closed-loop maps. The diagonal-parameter overload additionally
// cross-checks every entry against the per-index closed forms to 1e-8 on a
// frequency grid and fails loudly on mismatch.
ClosedLoopMaps closed_loop(const PlatoonDcf& dcf, const DiagonalYoula& q);
ClosedLoopMaps closed_loop(const PlatoonDcf& dcf, const TfMatrix& q);

// Local H-infinity disturbance rejection: minimize the peak gain of the
// stacked [spacing error; control] response to the vehicle's own disturbance
// over the basis.
LocalDesign local_hinf_design(const PlatoonDcf& dcf, int j, const QBasis& basis,
                              const DesignOptions& opt = {});

// Single-channel optimum of ||T_{z_j w_j}|| with the two-parameter collapse
// check: optimizing (Q_jj, Q_{j,j+1}) jointly must not beat the diagonal-only
// optimum by more than the reported gap.
LocalDesign local_optimal_qjj(const PlatoonDcf& dcf, int j, DesignNorm norm, const QBasis& basis,
                              const DesignOptions& opt = {});

// Full-platoon H2 design: minimizes ||(Y_r - N_r Q) N_l||_2 over diagonal Q.
// The cost separates per channel; channels may run in parallel.
std::pair<DiagonalYoula, double> h2_design(const PlatoonDcf& dcf, const QBasis& basis,
                                           const DesignOptions& opt = {});

struct HomogeneousH2 {
    RationalFn q0;            // per-channel optimizer, shared by all entries
    double per_channel = 0.0; // single-channel optimal H2 cost
    double bound = 0.0;       // squared lower bound: (2n-1) * per_channel^2
    double assembled = 0.0;   // exact H2 cost of the assembled error map
    bool basis_limited = false;
};

// Identical-vehicle, zero-headway global H2 optimum: the per-channel scalar
// problem solves the whole platoon. Requires h = 0 and identical phi.
HomogeneousH2 homogeneous_h2_optimal(const PlatoonDcf& dcf, const QBasis& basis,
                                     const DesignOptions& opt = {});

// Unconstrained (full-matrix) H2 optimization over the same basis; used to
// confirm that the diagonal restriction costs nothing for homogeneous h=0.
std::pair<TfMatrix, double> full_matrix_h2_design(const PlatoonDcf& dcf, const QBasis& basis,
                                                  const DesignOptions& opt = {});

struct BoundRow {
    int j = 0; // disturbed vehicle (0 = leader)
    int k = 0; // affected vehicle, k > j
    double actual = 0.0;
    double bound = 0.0;
};

// Disturbance-propagation inequalities: for every pair j < k, the peak gain
// of the stacked response at vehicle k to the disturbance at vehicle j is
// bounded by products of neighbour attenuations and H powers.
std::vector<BoundRow> string_stability_bounds(const PlatoonDcf& dcf, const ClosedLoopMaps& maps);

// True iff T Phi k is diagonal on the grid: membership in the subspace of
// distributed controllers realizable with predecessor broadcast.
bool qi_subspace_check(const PlatoonConfig& cfg, const TfMatrix& k, double tol = 1e-8,
                       int grid_points = 50);
// Quadratic-invariance helper: K G K stays in the subspace for members.
bool kgk_in_subspace(const PlatoonConfig& cfg, const RationalFn& g_core, const TfMatrix& k,
                     double tol = 1e-8, int grid_points = 50);

// Minimize the H2 cost of the leader-disturbance-to-controls column; only
// the first Youla entry enters this column.
LocalDesign leader_effort_h2(const PlatoonDcf& dcf, const QBasis& basis,
                             const DesignOptions& opt = {});

// Aggregated plant reconstructed from the factorization metadata.
TfMatrix plant_of(const PlatoonDcf& dcf);
// Leader model column V1 G0 (n x 1).
TfMatrix leader_column_of(const PlatoonDcf& dcf);

// Direct numeric checks used by tests and verification: largest off-diagonal
// magnitude of (I + G K)^{-1}, and of its product with the leader column,
// over the grid.
double sensitivity_offdiag_max(const PlatoonDcf& dcf, const TfMatrix& k, int grid_points = 50);
double leader_response_tail_max(const PlatoonDcf& dcf, const TfMatrix& k, int grid_points = 50);
// Same tail magnitude at a single frequency.
double leader_response_tail_at(const PlatoonDcf& dcf, const TfMatrix& k, double omega);

} // namespace platoon

#endif
