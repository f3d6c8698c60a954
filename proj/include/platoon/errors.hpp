#ifndef PLATOON_ERRORS_HPP
#define PLATOON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace platoon {

// Base class for every library error. Message text is diagnostic, not API.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PLATOON_DEFINE_ERROR(NAME)                                        \
    struct NAME : Error {                                                 \
        explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
    }

// Rational algebra
PLATOON_DEFINE_ERROR(DivisionByZeroFn);
PLATOON_DEFINE_ERROR(DegreeCapExceeded);
PLATOON_DEFINE_ERROR(DegenerateCancellation);

// System analysis
PLATOON_DEFINE_ERROR(ImproperSystem);
PLATOON_DEFINE_ERROR(UnstableSystem);
PLATOON_DEFINE_ERROR(NotStrictlyProper);
PLATOON_DEFINE_ERROR(NegativeDelay);

// Platoon model
PLATOON_DEFINE_ERROR(InvalidParameter);
PLATOON_DEFINE_ERROR(RequiresPositiveHeadway);

// Factorization and synthesis
PLATOON_DEFINE_ERROR(BezoutViolation);
PLATOON_DEFINE_ERROR(UnstableParameter);
PLATOON_DEFINE_ERROR(SingularYFactor);
PLATOON_DEFINE_ERROR(SingularFactor);
PLATOON_DEFINE_ERROR(RequiresHomogeneous);
PLATOON_DEFINE_ERROR(RequiresZeroHeadway);
PLATOON_DEFINE_ERROR(InfiniteCost);

// Delay handling
PLATOON_DEFINE_ERROR(MismatchedPlantDelay);
PLATOON_DEFINE_ERROR(NonIntegerDelay);

// Simulation
PLATOON_DEFINE_ERROR(Divergence);

// Configuration files
PLATOON_DEFINE_ERROR(SchemaError);

#undef PLATOON_DEFINE_ERROR

} // namespace platoon

#endif
