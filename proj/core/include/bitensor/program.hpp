#pragma once

#include <span>
#include <string>
#include <vector>

#include "bitensor/expr.hpp"

namespace bitensor {

/// A batch of expressions flattened into one instruction tape.
///
/// Structurally identical subexpressions are merged across all outputs, so
/// each distinct subterm is computed once per evaluation. Variables are
/// bound positionally in the order given at construction. A Program is
/// immutable and may be evaluated from several threads at once.
class Program {
 public:
  Program() = default;
  Program(std::span<const Expr> outputs, std::vector<std::string> variables);

  /// Evaluates every output at `inputs`. Throws DomainError on the first
  /// instruction that leaves its domain.
  void evaluate(std::span<const double> inputs, std::span<double> outputs) const;
  [[nodiscard]] std::vector<double> evaluate(std::span<const double> inputs) const;

  [[nodiscard]] std::size_t output_count() const noexcept { return outputs_.size(); }
  [[nodiscard]] std::size_t instruction_count() const noexcept { return code_.size(); }
  [[nodiscard]] const std::vector<std::string>& variables() const noexcept { return variables_; }

 private:
  struct Instruction {
    Op op;
    int a = -1;
    int b = -1;
    double value = 0.0;
  };

  [[noreturn]] void raise(std::size_t index, const char* what) const;

  std::vector<std::string> variables_;
  std::vector<Instruction> code_;
  std::vector<NodePtr> origin_;  // source node per instruction, for error messages
  std::vector<int> outputs_;
};

}  // namespace bitensor
