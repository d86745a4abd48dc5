#pragma once

#include <stdexcept>
#include <string>

namespace xylokit {

/// Base class for all toolchain errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A module could not be constructed (empty weights, bad LIF parameters, ...).
struct ConstructionError : Error {
    using Error::Error;
};

/// connect_modules was asked to join modules with incompatible arities.
struct ConnectionError : Error {
    using Error::Error;
};

/// as_graph_holder boundary nodes do not enclose a connected subgraph.
struct EncapsulationError : Error {
    using Error::Error;
};

/// Traversal found a cycle between distinct modules.
struct CycleError : Error {
    using Error::Error;
};

/// The graph cannot be lowered to a hardware specification.
struct MappingError : Error {
    using Error::Error;
};

/// An argument is outside its mathematical domain (negative rate, tau <= 0).
struct DomainError : Error {
    using Error::Error;
};

/// Tensor or raster dimensions do not agree.
struct ShapeError : Error {
    using Error::Error;
};

/// A file or JSON document could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

/// The simulator was handed a configuration that never passed validation.
struct UnsealedConfigError : Error {
    using Error::Error;
};

/// An internal invariant was broken; indicates a bug, not a user error.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace xylokit
