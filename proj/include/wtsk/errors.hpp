#ifndef WTSK_ERRORS_HPP
#define WTSK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wtsk {

// Error taxonomy, mapped to CLI exit codes: io=1, validation=2, infeasible=3, guard=4.

struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration that cannot produce a result (e.g. no feasible design under a gate).
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact-enumeration or memory guard exceeded; caller should reduce sizes or switch to mc mode.
struct guard_error : std::runtime_error {
  explicit guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wtsk

#endif
