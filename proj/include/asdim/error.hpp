#ifndef ASDIM_ERROR_HPP
#define ASDIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace asdim {

// Exit codes for the CLI; library errors carry the code they map to.
enum ExitCode {
    kOk = 0,
    kInternal = 1,
    kParseError = 2,
    kPrecondition = 3,
    kBudgetExceeded = 4,
    kTimeout = 5,
    kVerificationFailed = 6,
    kSearchExhausted = 7,
};

class Error : public std::runtime_error {
  public:
    Error(ExitCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ExitCode code() const { return code_; }

  private:
    ExitCode code_;
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg)
        : Error(kBudgetExceeded, "budget exceeded: " + msg) {}
};

struct TimeoutError : Error {
    explicit TimeoutError(const std::string& msg)
        : Error(kTimeout, "timeout: " + msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg)
        : Error(kParseError, "parse error: " + msg) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg)
        : Error(kPrecondition, "precondition failed: " + msg) {}
};

struct VerificationError : Error {
    explicit VerificationError(const std::string& msg)
        : Error(kVerificationFailed, "verification failed: " + msg) {}
};

struct SearchExhausted : Error {
    explicit SearchExhausted(const std::string& msg)
        : Error(kSearchExhausted, "search exhausted: " + msg) {}
};

} // namespace asdim

#endif
