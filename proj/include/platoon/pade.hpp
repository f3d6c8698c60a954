#ifndef PLATOON_PADE_HPP
#define PLATOON_PADE_HPP

#include "platoon/rational.hpp"

namespace platoon {

// Diagonal Pade approximant of e^{-delay s}. All-pass, stable for delay > 0.
// delay == 0 returns the constant 1. Throws NegativeDelay / InvalidParameter.
RationalFn pade_approx(double delay, int order);

} // namespace platoon

#endif
