#ifndef QANM_ERRORS_HPP_
#define QANM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace qanm {

// Base class for all library-specific failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A digraph is not strongly connected; carries one unreachable ordered pair.
class ConnectivityError : public Error {
 public:
  ConnectivityError(int from, int to)
      : Error("graph is not strongly connected: node " + std::to_string(from) +
              " cannot reach node " + std::to_string(to)),
        from_(from),
        to_(to) {}

  int from() const { return from_; }
  int to() const { return to_; }

 private:
  int from_;
  int to_;
};

// Integer-lattice magnitude exceeds the range where arithmetic stays exact.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A protocol invariant was violated (conservation, simultaneity, agreement).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The consensus round budget was exhausted without halting.
class NonTerminationError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or other numeric breakdowns.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace qanm

#endif  // QANM_ERRORS_HPP_
