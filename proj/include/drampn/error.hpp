#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace drampn {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }
};

class ParseError : public Error {
public:
  explicit ParseError(std::vector<Diagnostic> diagnostics)
      : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}
  ParseError(std::vector<Diagnostic> diagnostics, const std::string& what)
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
  static std::string join(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
      if (!out.empty()) out += '\n';
      out += d.to_string();
    }
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

// Instantiation failures: unbound parameters, unresolvable references,
// out-of-range coordinates, non-positive weights or delays.
class BuildError : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  explicit BudgetExceeded(std::size_t budget)
      : Error("expansion budget of " + std::to_string(budget) + " nodes exceeded"),
        budget_(budget) {}

  std::size_t budget() const { return budget_; }

private:
  std::size_t budget_;
};

// A caller broke an operation's precondition, e.g. firing a disabled
// transition or firing earlier than its minimum time.
class ContractError : public Error {
public:
  using Error::Error;
};

}  // namespace drampn
