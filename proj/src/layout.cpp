#include "qipsim/layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qipsim {

RegisterLayout::RegisterLayout(std::initializer_list<Register> regs)
    : RegisterLayout(std::vector<Register>(regs)) {}

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  validate();
  total_ = 0;
  for (const auto& r : regs_) total_ += r.qubits;
}

void RegisterLayout::validate() const {
  if (regs_.empty()) {
    throw ValidationError("RegisterLayout: at least one register is required");
  }
  std::set<std::string> seen;
  int total = 0;
  for (const auto& r : regs_) {
    if (r.name.empty()) {
      throw ValidationError("RegisterLayout: register names must be non-empty");
    }
    if (r.qubits < 1) {
      throw ValidationError("RegisterLayout: register '" + r.name +
                            "' must hold at least one qubit");
    }
    if (!seen.insert(r.name).second) {
      throw ValidationError("RegisterLayout: duplicate register name '" + r.name + "'");
    }
    total += r.qubits;
  }
  if (total > kMaxQubits) {
    throw BudgetError("RegisterLayout: " + std::to_string(total) +
                      " qubits exceeds the dense-simulation ceiling of " +
                      std::to_string(kMaxQubits));
  }
}

bool RegisterLayout::has(const std::string& name) const {
  return std::any_of(regs_.begin(), regs_.end(),
                     [&](const Register& r) { return r.name == name; });
}

const Register& RegisterLayout::at(const std::string& name) const {
  for (const auto& r : regs_) {
    if (r.name == name) return r;
  }
  throw ValidationError("RegisterLayout: unknown register '" + name + "'");
}

int RegisterLayout::offset(const std::string& name) const {
  int off = 0;
  for (const auto& r : regs_) {
    if (r.name == name) return off;
    off += r.qubits;
  }
  throw ValidationError("RegisterLayout: unknown register '" + name + "'");
}

std::vector<int> RegisterLayout::positions(const std::vector<std::string>& names) const {
  std::vector<int> pos;
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      throw ValidationError("RegisterLayout: register '" + name + "' listed twice");
    }
    const Register& r = at(name);
    int off = offset(name);
    for (int q = 0; q < r.qubits; ++q) pos.push_back(off + q);
  }
  return pos;
}

RegisterLayout RegisterLayout::without(const std::vector<std::string>& names) const {
  for (const auto& name : names) at(name);  // reject unknown names
  std::vector<Register> rest;
  for (const auto& r : regs_) {
    if (std::find(names.begin(), names.end(), r.name) == names.end()) {
      rest.push_back(r);
    }
  }
  RegisterLayout out;  // allow the scalar layout when everything is removed
  if (!rest.empty()) out = RegisterLayout(std::move(rest));
  return out;
}

RegisterLayout RegisterLayout::with_appended(const Register& reg) const {
  std::vector<Register> regs = regs_;
  regs.push_back(reg);
  return RegisterLayout(std::move(regs));
}

bool RegisterLayout::operator==(const RegisterLayout& other) const {
  if (regs_.size() != other.regs_.size()) return false;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (regs_[i].name != other.regs_[i].name || regs_[i].qubits != other.regs_[i].qubits) {
      return false;
    }
  }
  return true;
}

std::string RegisterLayout::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (i) os << ", ";
    os << regs_[i].name << ":" << regs_[i].qubits;
  }
  os << ")";
  return os.str();
}

}  // namespace qipsim
