#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "qipsim/types.hpp"

namespace qipsim {

/// One named block of qubits inside a layout.
struct Register {
  std::string name;
  int qubits = 0;
};

/// An ordered list of named, disjoint registers describing how a state's
/// qubits are addressed.
///
/// Qubit ordering is big-endian in declaration order: the first qubit of the
/// first register is the most significant bit of a basis-state index, and the
/// last qubit of the last register is the least significant bit.
class RegisterLayout {
 public:
  /// The scalar (zero-qubit) layout.  Only meaningful as the result of
  /// tracing out every register; cannot be used to address qubits.
  RegisterLayout() = default;

  RegisterLayout(std::initializer_list<Register> regs);
  explicit RegisterLayout(std::vector<Register> regs);

  int total_qubits() const { return total_; }
  Eigen::Index dim() const { return Eigen::Index{1} << total_; }
  bool empty() const { return regs_.empty(); }

  const std::vector<Register>& registers() const { return regs_; }

  bool has(const std::string& name) const;
  const Register& at(const std::string& name) const;

  /// Position (0-based, most significant first) of the first qubit of a
  /// register.
  int offset(const std::string& name) const;

  /// Qubit positions of the given registers, concatenated in the order the
  /// names are listed.  Throws ValidationError on unknown or repeated names.
  std::vector<int> positions(const std::vector<std::string>& names) const;

  /// Layout with the given registers removed, preserving declaration order
  /// of the survivors.
  RegisterLayout without(const std::vector<std::string>& names) const;

  /// Layout with one more register appended at the end.
  RegisterLayout with_appended(const Register& reg) const;

  bool operator==(const RegisterLayout& other) const;
  bool operator!=(const RegisterLayout& other) const { return !(*this == other); }

  /// Human-readable form, e.g. "(A:1, M:2)".
  std::string to_string() const;

 private:
  void validate() const;

  std::vector<Register> regs_;
  int total_ = 0;
};

/// Value of the qubit at position `pos` (0 = most significant) within a
/// basis-state index over `total` qubits.
inline int bit_at(std::uint64_t index, int pos, int total) {
  return static_cast<int>((index >> (total - 1 - pos)) & 1u);
}

}  // namespace qipsim
