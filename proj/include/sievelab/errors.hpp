#ifndef SIEVELAB_ERRORS_HPP
#define SIEVELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sievelab {

// Exit-code taxonomy: parse errors are user input problems (1), domain
// errors are violated preconditions (2), resource errors are blown budgets
// (3), and a counterexample error flags that an object the theory
// guarantees could not be found (4).
enum class ErrorKind { parse = 1, domain = 2, resource = 3, counterexample = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::parse: return "parse";
      case ErrorKind::domain: return "domain";
      case ErrorKind::resource: return "resource";
      case ErrorKind::counterexample: return "counterexample";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(ErrorKind::parse, msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& msg)
      : Error(ErrorKind::resource, msg) {}
};

struct CounterexampleError : Error {
  explicit CounterexampleError(const std::string& msg)
      : Error(ErrorKind::counterexample, msg) {}
};

}  // namespace sievelab

#endif  // SIEVELAB_ERRORS_HPP
