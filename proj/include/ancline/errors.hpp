#pragma once

#include <stdexcept>
#include <string>

namespace ancline {

// Two families: bad input (exit code 1 in the CLI) and numeric failure (exit code 2).
class Invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Numeric_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Invalid_parameter : public Invalid_input {
 public:
  explicit Invalid_parameter(const std::string& what) : Invalid_input{"invalid parameter: " + what} {}
};

class Sigma_zero : public Invalid_input {
 public:
  Sigma_zero() : Invalid_input{"analytic derivatives are undefined at sigma = 0"} {}
};

class Unknown_figure : public Invalid_input {
 public:
  explicit Unknown_figure(const std::string& name) : Invalid_input{"unknown figure: " + name} {}
};

class Invalid_override : public Invalid_input {
 public:
  explicit Invalid_override(const std::string& what) : Invalid_input{"invalid override: " + what} {}
};

class Negative_neutral_rate : public Invalid_input {
 public:
  explicit Negative_neutral_rate(const std::string& what) : Invalid_input{what} {}
};

class Target_unreachable : public Invalid_input {
 public:
  explicit Target_unreachable(const std::string& what) : Invalid_input{what} {}
};

class Singular_system : public Numeric_failure {
 public:
  explicit Singular_system(const std::string& what) : Numeric_failure{"singular system: " + what} {}
};

class Undefined_conditional : public Numeric_failure {
 public:
  explicit Undefined_conditional(const std::string& what) : Numeric_failure{what} {}
};

class Degenerate_denominator : public Numeric_failure {
 public:
  explicit Degenerate_denominator(const std::string& what) : Numeric_failure{what} {}
};

class Quadrature_failure : public Numeric_failure {
 public:
  explicit Quadrature_failure(const std::string& what) : Numeric_failure{"quadrature failure: " + what} {}
};

class No_convergence : public Numeric_failure {
 public:
  explicit No_convergence(const std::string& what) : Numeric_failure{"no convergence: " + what} {}
};

class Degenerate_beta : public Numeric_failure {
 public:
  explicit Degenerate_beta(const std::string& what) : Numeric_failure{what} {}
};

class Window_too_short : public Numeric_failure {
 public:
  explicit Window_too_short(const std::string& what) : Numeric_failure{what} {}
};

}  // namespace ancline
