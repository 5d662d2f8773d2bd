#include "bitensor/program.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace bitensor {

namespace {

struct Key {
  Op op;
  int a;
  int b;
  std::uint64_t bits;

  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.op) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.a)) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.b)) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= k.bits + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Program::Program(std::span<const Expr> outputs, std::vector<std::string> variables)
    : variables_(std::move(variables)) {
  std::unordered_map<const Node*, int> slot_of_node;
  std::unordered_map<Key, int, KeyHash> slot_of_key;

  auto emit = [&](const NodePtr& n, Key key) {
    if (auto it = slot_of_key.find(key); it != slot_of_key.end()) return it->second;
    const int slot = static_cast<int>(code_.size());
    code_.push_back({key.op, key.a, key.b, n->op == Op::Var ? 0.0 : n->value});
    origin_.push_back(n);
    slot_of_key.emplace(key, slot);
    return slot;
  };

  // Iterative post-order walk; derivative trees can be deep.
  auto compile = [&](const NodePtr& root) {
    std::vector<std::pair<const NodePtr*, bool>> stack{{&root, false}};
    while (!stack.empty()) {
      auto [np, expanded] = stack.back();
      const NodePtr& n = *np;
      if (slot_of_node.count(n.get())) {
        stack.pop_back();
        continue;
      }
      if (!expanded) {
        stack.back().second = true;
        if (n->rhs) stack.push_back({&n->rhs, false});
        if (n->lhs) stack.push_back({&n->lhs, false});
        continue;
      }
      stack.pop_back();
      Key key{n->op, -1, -1, 0};
      switch (n->op) {
        case Op::Const:
          key.bits = std::bit_cast<std::uint64_t>(n->value);
          break;
        case Op::Var: {
          auto it = std::find(variables_.begin(), variables_.end(), n->name);
          if (it == variables_.end()) {
            throw std::invalid_argument("Program: expression uses unbound variable '" + n->name + "'");
          }
          key.a = static_cast<int>(it - variables_.begin());
          break;
        }
        case Op::Pow:
          key.a = slot_of_node.at(n->lhs.get());
          key.bits = std::bit_cast<std::uint64_t>(n->value);
          break;
        default:
          key.a = slot_of_node.at(n->lhs.get());
          if (n->rhs) key.b = slot_of_node.at(n->rhs.get());
          break;
      }
      slot_of_node.emplace(n.get(), emit(n, key));
    }
    return slot_of_node.at(root.get());
  };

  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(compile(e.ptr()));
}

void Program::raise(std::size_t index, const char* what) const {
  const std::string text = to_string(Expr(origin_[index]));
  throw DomainError(std::string("domain error: ") + what + " in '" + text + "'", text, origin_[index]->offset);
}

void Program::evaluate(std::span<const double> inputs, std::span<double> outputs) const {
  if (inputs.size() != variables_.size()) throw std::invalid_argument("Program::evaluate: wrong number of inputs");
  if (outputs.size() != outputs_.size()) throw std::invalid_argument("Program::evaluate: wrong number of outputs");
  thread_local std::vector<double> slots;
  slots.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instruction& ins = code_[i];
    double v = 0.0;
    switch (ins.op) {
      case Op::Const: v = ins.value; break;
      case Op::Var: v = inputs[static_cast<std::size_t>(ins.a)]; break;
      case Op::Neg: v = -slots[ins.a]; break;
      case Op::Add: v = slots[ins.a] + slots[ins.b]; break;
      case Op::Sub: v = slots[ins.a] - slots[ins.b]; break;
      case Op::Mul: v = slots[ins.a] * slots[ins.b]; break;
      case Op::Div:
        if (slots[ins.b] == 0.0) raise(i, "division by zero");
        v = slots[ins.a] / slots[ins.b];
        break;
      case Op::Pow:
        if (!apply_scalar_pow(slots[ins.a], ins.value, v)) raise(i, "power outside its domain");
        break;
      default:
        if (!apply_scalar(ins.op, slots[ins.a], v)) {
          raise(i, ins.op == Op::Log ? "log of a non-positive value" : "square root of a negative value");
        }
        break;
    }
    slots[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) outputs[k] = slots[static_cast<std::size_t>(outputs_[k])];
}

std::vector<double> Program::evaluate(std::span<const double> inputs) const {
  std::vector<double> out(outputs_.size());
  evaluate(inputs, out);
  return out;
}

}  // namespace bitensor
