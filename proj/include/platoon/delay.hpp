#ifndef PLATOON_DELAY_HPP
#define PLATOON_DELAY_HPP

#include "platoon/model.hpp"
#include "platoon/synthesis.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Uniform communication / actuation latencies. The wireless latency theta is
// the worst case across the string; every vehicle uses the same value so that
// delayed signals stay mutually synchronized.
struct DelayConfig {
    double theta_s = 0.0; // broadcast and measurement latency
    double phi_s = 0.0;   // actuation lag
    int pade_order = 3;
    void validate() const; // throws NegativeDelay / InvalidParameter
    double total() const { return theta_s + phi_s; }
};

// What an unsynchronized deployment actually implements: the broadcast
// latency accumulates through the recursion, so entry (i,j) of the aggregate
// controller picks up the (i-j)-th power of the delay (Pade rational).
TfMatrix delayed_controller_tfm(const LeaderInfoController& c, const DelayConfig& d);

// Synchronization-based compensation: every sensor measurement is delayed by
// exactly theta so the local error signal lines up with the broadcast inputs,
// and the actuation lag is absorbed into the design plant. Requires the
// controller to have been designed against the delay-absorbed plant core;
// throws MismatchedPlantDelay otherwise. The realization blocks are
// unchanged; the deployment annotations record the latencies.
LeaderInfoController compensated_controller(const LeaderInfoController& c, const DelayConfig& d);

// True iff T Phi k is diagonal on the grid (the distributed-realizability
// subspace, heterogeneous form).
bool membership_in_S(const TfMatrix& k, const PlatoonConfig& cfg, double tol = 1e-8,
                     int grid_points = 50);

} // namespace platoon

#endif
