#pragma once

#include <stdexcept>
#include <string>

namespace vforge {

/* Base class for all library errors. */
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Violated parameter constraint or invalid configuration.  The CLI maps
 * this family to exit code 2 (precondition failure, not a check failure). */
struct ConstraintError : Error {
    using Error::Error;
};

/* Evaluation requested within the guard radius of an interval endpoint,
 * where the kernel has a logarithmic singularity. */
struct SingularEndpointError : ConstraintError {
    using ConstraintError::ConstraintError;
};

/* Real evaluation point lies on the boundary of the interval set. */
struct BoundaryPointError : ConstraintError {
    using ConstraintError::ConstraintError;
};

/* Argument outside the closed strip 0 <= Re w <= 1 (or at an excluded
 * boundary point of it). */
struct OutOfStripError : ConstraintError {
    using ConstraintError::ConstraintError;
};

/* Adaptive quadrature could not reach the requested tolerance. */
struct QuadratureError : Error {
    using Error::Error;
};

/* Root bracketing or bisection failure. */
struct RootFindError : Error {
    using Error::Error;
};

/* Collision search or constants estimation failure. */
struct SeedError : Error {
    using Error::Error;
};

/* Winding-number computation refused: the image loop passes too close to
 * the target, or the accumulated argument is not near a multiple of 2*pi. */
struct WindingError : Error {
    using Error::Error;
};

} // namespace vforge
