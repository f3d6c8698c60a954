#ifndef PLATOON_MODEL_HPP
#define PLATOON_MODEL_HPP

#include <vector>

#include "platoon/rational.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Per-vehicle deviation dynamics around the common double integrator:
// phi = (s + sigma) / (mass (tau s + 1)), a stable, minimum-phase, biproper
// (unimodular) factor.
struct VehicleParams {
    double mass = 1.0;
    double tau = 0.1;
    double sigma = 1.0;
};

struct PlatoonConfig {
    int n = 0;                 // follower count; vehicles are indexed 1..n
    double headway = 0.0;      // constant time headway h >= 0
    VehicleParams leader;      // vehicle 0
    std::vector<VehicleParams> vehicles; // size n, index k-1 holds vehicle k

    void validate() const; // throws InvalidParameter on any violation
    const VehicleParams& vehicle(int k) const; // k in 0..n, 0 = leader
};

// Spacing filter H = h s + 1.
RationalFn headway_filter(double h);

// Common double-integrator core 1/s^2, optionally with an input delay
// absorbed as a Pade factor (used to design against delayed plants).
RationalFn base_plant();
RationalFn base_plant_with_delay(double delay, int pade_order);

RationalFn build_phi(const VehicleParams& p);
RationalFn build_vehicle_tf(const VehicleParams& p, const RationalFn& g_core);

// Error map T: H on the diagonal, -1 on the first subdiagonal.
TfMatrix build_T(int n, double h);
// Inverse of T: lower-triangular Toeplitz with (i,j) entry H^{-(i-j+1)}.
TfMatrix build_T_inv(int n, double h);

// H^{-1} T is unimodular exactly when h > 0 (H must be invertible in the
// proper stable ring). Throws RequiresPositiveHeadway at h == 0.
bool check_HinvT_unimodular(int n, double h);

// Aggregated plant G = T D{G_1..G_n}: diagonal H G_k, subdiagonal -G_{k-1}.
TfMatrix build_plant(const PlatoonConfig& cfg, const RationalFn& g_core);

// Structured square matrices over the entries list (all size n):
//   diagonal:       (i,i) = e_i
//   toeplitz_lower: (i,j) = e_{i-j+1}, i >= j
//   row_lower:      (i,j) = e_i,       i >= j
enum class StructuredKind { diagonal, toeplitz_lower, row_lower };
TfMatrix structured_matrix(StructuredKind kind, const std::vector<RationalFn>& entries);

} // namespace platoon

#endif
