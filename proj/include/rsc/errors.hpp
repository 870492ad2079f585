#pragma once

#include <stdexcept>

namespace rsc {

// Broken internal invariant, for example an empty corrected set.
class InternalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured state or step budget was exhausted.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The closed loop reached a state the supervisor table does not cover.
class RuntimeFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rsc
