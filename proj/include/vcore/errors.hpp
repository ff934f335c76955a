#pragma once

#include <stdexcept>
#include <string>

namespace vcore {

/// Base class for every data error raised by the library. The CLI maps these
/// to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VCORE_DEFINE_ERROR(Name)                  \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

VCORE_DEFINE_ERROR(IoError);
VCORE_DEFINE_ERROR(MalformedLine);
VCORE_DEFINE_ERROR(WildcardToken);
VCORE_DEFINE_ERROR(ConfigInvalid);
VCORE_DEFINE_ERROR(EmptyYearError);
VCORE_DEFINE_ERROR(FormatVersionMismatch);
VCORE_DEFINE_ERROR(ChecksumMismatch);
VCORE_DEFINE_ERROR(SpanTooShort);
VCORE_DEFINE_ERROR(EmptyWindow);
VCORE_DEFINE_ERROR(MixedCoreMethods);
VCORE_DEFINE_ERROR(EmptyGroup);
VCORE_DEFINE_ERROR(DegenerateVariance);
VCORE_DEFINE_ERROR(TargetUnreachable);
VCORE_DEFINE_ERROR(ManifestMismatch);

#undef VCORE_DEFINE_ERROR

}  // namespace vcore
