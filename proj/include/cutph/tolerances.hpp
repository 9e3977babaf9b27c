#pragma once

namespace cutph {

// Central tolerance record shared by validation and the numerical-property
// checks. Structural tolerances guard definitional constraints (simplex sums,
// row sums); the numeric tolerance is for floating-point property checks.
struct Tolerances {
    double structural = 1e-12;
    double numeric = 1e-10;
    // A matrix counts as singular when the residual of a solve against the
    // all-ones vector exceeds this factor times the matrix inf-norm.
    double singular_residual = 1e-8;
};

const Tolerances& default_tolerances();

}  // namespace cutph
