#pragma once

#include <stdexcept>
#include <string>

namespace lidarseg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates an invariant (non-finite values, bad files, truncated buffers).
class DataError : public Error {
public:
    using Error::Error;
};

/// Shape or dimension mismatch between otherwise valid inputs.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Every corner of a 3D box lies behind the camera.
class BoxNotVisible : public Error {
public:
    using Error::Error;
};

/// Neither the positive nor the negative pool has any point to sample from.
class InstanceUnlabelable : public Error {
public:
    using Error::Error;
};

/// A similarity graph needs at least two nodes.
class EmptyGraph : public Error {
public:
    using Error::Error;
};

}  // namespace lidarseg
