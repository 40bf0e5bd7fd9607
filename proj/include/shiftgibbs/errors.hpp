#pragma once

#include <stdexcept>
#include <string>

namespace shiftgibbs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SHIFTGIBBS_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                         \
    public:                                                              \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

SHIFTGIBBS_DEFINE_ERROR(SpaceMismatch);
SHIFTGIBBS_DEFINE_ERROR(SizeMismatch);
SHIFTGIBBS_DEFINE_ERROR(UnsupportedKind);
SHIFTGIBBS_DEFINE_ERROR(MissingTailClass);
SHIFTGIBBS_DEFINE_ERROR(NonpositiveEigenfunction);
SHIFTGIBBS_DEFINE_ERROR(NonFinite);
SHIFTGIBBS_DEFINE_ERROR(BudgetExceeded);
SHIFTGIBBS_DEFINE_ERROR(ScheduleDiverged);
SHIFTGIBBS_DEFINE_ERROR(Stagnation);
SHIFTGIBBS_DEFINE_ERROR(NotNormalized);
SHIFTGIBBS_DEFINE_ERROR(ClosureViolation);
SHIFTGIBBS_DEFINE_ERROR(NotStochastic);
SHIFTGIBBS_DEFINE_ERROR(PremiseViolated);
SHIFTGIBBS_DEFINE_ERROR(LipschitzAuditFailed);
SHIFTGIBBS_DEFINE_ERROR(ConfigInvalid);

#undef SHIFTGIBBS_DEFINE_ERROR

} // namespace shiftgibbs
