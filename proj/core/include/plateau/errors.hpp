#pragma once

#include <stdexcept>
#include <string>

namespace plateau {

// Malformed or out-of-contract input (dimension mismatch, non-dyadic values, bad files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class AxiomViolation : public std::runtime_error {
 public:
  AxiomViolation(int axiom, const std::string& what)
      : std::runtime_error("axiom (" + std::string(axiom == 1 ? "i" : axiom == 2 ? "ii" : "iii") +
                           ") violated: " + what),
        axiom_(axiom) {}
  int axiom() const { return axiom_; }

 private:
  int axiom_;
};

class DistanceOne : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CenterExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plateau
