#include "platoon/pade.hpp"

#include "platoon/errors.hpp"

namespace platoon {

RationalFn pade_approx(double delay, int order) {
    if (delay < 0.0) throw NegativeDelay("pade_approx requires delay >= 0");
    if (order < 1) throw InvalidParameter("pade_approx requires order >= 1");
    if (delay == 0.0) return RationalFn::one();
    const int m = order;
    // c_k = (2m-k)! m! / ((2m)! k! (m-k)!), computed by the stable recurrence
    // c_0 = 1, c_{k+1} = c_k (m-k) / ((2m-k)(k+1)).
    std::vector<double> num(static_cast<size_t>(m) + 1), den(static_cast<size_t>(m) + 1);
    double c = 1.0, tp = 1.0; // tp = delay^k
    for (int k = 0; k <= m; ++k) {
        num[static_cast<size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * c * tp;
        den[static_cast<size_t>(k)] = c * tp;
        if (k < m) {
            c *= static_cast<double>(m - k) / (static_cast<double>(2 * m - k) * (k + 1));
            tp *= delay;
        }
    }
    return RationalFn(Polynomial(num), Polynomial(den));
}

} // namespace platoon
