#ifndef QMINT_ERRORS_HPP
#define QMINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmint {

// Bad user-supplied parameters or malformed input files. CLI exit code 2.
class parameter_error : public std::invalid_argument {
  public:
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A structural invariant failed; indicates a bug or corrupted data. CLI exit code 3.
class invariant_error : public std::logic_error {
  public:
    explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace qmint

#endif
