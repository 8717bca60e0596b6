#ifndef LIGHTLIKE_ERRORS_HPP
#define LIGHTLIKE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lightlike {

// Exit-code contract of the CLI: 0 pass, 1 verdict failure,
// 2 input error, 3 numerical degeneracy.
enum ExitCode : int {
  exit_ok = 0,
  exit_verdict_failure = 1,
  exit_input_error = 2,
  exit_degenerate = 3,
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return exit_input_error; }
};

// Lexer/parser failures; `offset` is a 1-based byte offset into the source.
struct ParseError : Error {
  std::size_t offset = 0;
  ParseError(const std::string& msg, std::size_t off)
      : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// Evaluation outside a function's domain (sqrt of a negative, division
// by zero). Carries the offending subexpression text.
struct DomainError : Error {
  std::string subexpr;
  DomainError(const std::string& msg, std::string sub)
      : Error(msg + " in subexpression '" + sub + "'"), subexpr(std::move(sub)) {}
};

struct ScenarioError : Error {
  using Error::Error;
};

// Rank decisions disagree across sample points, or a kernel extraction
// disagrees with the SVD rank.
struct RankError : Error {
  using Error::Error;
  int exit_code() const override { return exit_degenerate; }
};

// Degenerate screen / singular dual-frame system.
struct DegenerateError : Error {
  using Error::Error;
  int exit_code() const override { return exit_degenerate; }
};

}  // namespace lightlike

#endif
