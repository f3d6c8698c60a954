#include "platoon/delay.hpp"

#include <cmath>

#include "platoon/errors.hpp"
#include "platoon/pade.hpp"

namespace platoon {

void DelayConfig::validate() const {
    if (theta_s < 0.0 || phi_s < 0.0) throw NegativeDelay("latencies must be nonnegative");
    if (pade_order < 1) throw InvalidParameter("rational delay order must be at least 1");
}

TfMatrix delayed_controller_tfm(const LeaderInfoController& c, const DelayConfig& d) {
    d.validate();
    TfMatrix k = controller_tfm(c);
    if (d.theta_s == 0.0) return k;
    RationalFn unit = pade_approx(d.theta_s, d.pade_order);
    TfMatrix out(k.rows(), k.cols());
    for (int i = 0; i < k.rows(); ++i) {
        for (int j = 0; j <= i; ++j) {
            if (k.at(i, j).is_zero()) continue;
            out.set(i, j, k.at(i, j) * unit.pow(i - j));
        }
    }
    return out;
}

LeaderInfoController compensated_controller(const LeaderInfoController& c, const DelayConfig& d) {
    d.validate();
    double want = d.total();
    if (std::abs(c.design_delay_s - want) > 1e-9) {
        throw MismatchedPlantDelay("controller was designed for an absorbed delay of " +
                                   std::to_string(c.design_delay_s) + " s, deployment needs " +
                                   std::to_string(want) + " s");
    }
    if (want > 0.0 && c.design_pade_order != d.pade_order)
        throw MismatchedPlantDelay("rational delay order differs from the design plant");
    LeaderInfoController out = c;
    out.measurement_delay_s = d.theta_s;
    out.broadcast_delay_s = d.theta_s;
    return out;
}

bool membership_in_S(const TfMatrix& k, const PlatoonConfig& cfg, double tol, int grid_points) {
    return qi_subspace_check(cfg, k, tol, grid_points);
}

} // namespace platoon
