#pragma once

#include <stdexcept>
#include <string>

namespace monopole {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MONOPOLE_DEFINE_ERROR(Name)                         \
    struct Name : Error {                                   \
        using Error::Error;                                 \
        Name() : Error(#Name) {}                            \
    }

MONOPOLE_DEFINE_ERROR(SingularMatrix);
MONOPOLE_DEFINE_ERROR(DegenerateConstraint);
MONOPOLE_DEFINE_ERROR(ConvergenceFailure);
MONOPOLE_DEFINE_ERROR(SchemaError);
MONOPOLE_DEFINE_ERROR(ValidationError);
MONOPOLE_DEFINE_ERROR(DegenerateLeadingForm);
MONOPOLE_DEFINE_ERROR(PathCrossesBranchPoint);
MONOPOLE_DEFINE_ERROR(PoleProximity);
MONOPOLE_DEFINE_ERROR(DivisorCollision);
MONOPOLE_DEFINE_ERROR(Unsupported);
MONOPOLE_DEFINE_ERROR(StepSizeUnderflow);
MONOPOLE_DEFINE_ERROR(ConditionBlowup);
MONOPOLE_DEFINE_ERROR(ExtrapolationUnstable);
MONOPOLE_DEFINE_ERROR(KernelSpinor);
MONOPOLE_DEFINE_ERROR(RankDeficientW);
MONOPOLE_DEFINE_ERROR(SubspaceAmbiguous);
MONOPOLE_DEFINE_ERROR(QSingular);
MONOPOLE_DEFINE_ERROR(CalibrationFailure);
MONOPOLE_DEFINE_ERROR(PivotVanishes);

#undef MONOPOLE_DEFINE_ERROR

}  // namespace monopole
