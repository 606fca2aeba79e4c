#pragma once

#include <stdexcept>
#include <string>

namespace treeglass {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A spherically symmetric level profile that cannot be realized.
class ProfileError : public Error {
public:
    using Error::Error;
};

/// A depth, window or edge id outside the valid range of a tree.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An enumeration or construction exceeded its configured cap.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Malformed tree file, distribution literal or tree spec.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A coupling equal to zero where a sign is required.
class ZeroCouplingError : public Error {
public:
    using Error::Error;
};

/// A flow that violates conservation or a capacity precondition.
class FlowError : public Error {
public:
    using Error::Error;
};

/// Raised when the critical-edge search cannot produce an edge at the given horizon.
class NoCriticalEdge : public Error {
public:
    using Error::Error;
};

}  // namespace treeglass
