#pragma once

#include <stdexcept>
#include <string>

namespace fsiwave {

/// Base class for all toolkit errors. Each condition named in an
/// operation contract gets its own type so callers can react per case.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSpec : Error {
    using Error::Error;
};
struct InvalidArgument : Error {
    using Error::Error;
};
struct DegenerateInput : Error {
    using Error::Error;
};
struct SolveFailure : Error {
    using Error::Error;
};
struct AssemblyFailure : Error {
    using Error::Error;
};
struct PicardDivergence : Error {
    using Error::Error;
};
struct BlowUp : Error {
    using Error::Error;
};
struct InsufficientWindow : Error {
    using Error::Error;
};
struct MissingArtifacts : Error {
    using Error::Error;
};

}  // namespace fsiwave
