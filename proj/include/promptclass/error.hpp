#pragma once

#include <stdexcept>
#include <string>

namespace promptclass {

// Bad input or configuration. The CLI maps this to exit code 1; every other
// exception maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace promptclass
