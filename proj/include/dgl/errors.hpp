#pragma once

#include <stdexcept>
#include <string>

namespace dgl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Precondition or input-validation failure.
struct InvalidArgument : Error {
    using Error::Error;
};

/// The requested object has no representation in the target form (e.g. the dual of a vertical line).
struct Unrepresentable : Error {
    using Error::Error;
};

/// A regularity certificate did not meet the declared constant.
struct CertificationError : Error {
    using Error::Error;
};

/// A stage would exceed its work budget.
struct SizingError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidArgument(what);
}

} // namespace dgl
