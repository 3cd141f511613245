#pragma once

#include "sampling.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crcartan {

enum class Status { Pass, Fail, Info };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Info: return "info";
  }
  return "?";
}

// Hierarchical check result. Info leaves carry findings that are neither
// passes nor failures (e.g. which transcription variant matched).
struct CheckNode {
  std::string name;
  Status status = Status::Pass;
  std::string detail;
  std::optional<std::string> witness;
  std::optional<std::string> value;
  std::vector<CheckNode> children;

  static CheckNode group(std::string name) { return CheckNode{std::move(name)}; }

  static CheckNode leaf(std::string name, bool ok, std::string detail = {}) {
    CheckNode n{std::move(name)};
    n.status = ok ? Status::Pass : Status::Fail;
    n.detail = std::move(detail);
    return n;
  }

  static CheckNode info(std::string name, std::string detail) {
    CheckNode n{std::move(name)};
    n.status = Status::Info;
    n.detail = std::move(detail);
    return n;
  }

  static CheckNode from_zero_test(std::string name, const ZeroTest& z) {
    CheckNode n = leaf(std::move(name), z.zero);
    n.detail = std::to_string(z.points_tested) + " points";
    if (!z.zero) {
      if (z.witness) n.witness = z.witness->str();
      if (z.value) n.value = z.value->str();
      if (!z.note.empty()) n.detail = z.note;
    }
    return n;
  }

  CheckNode& add(CheckNode child) {
    children.push_back(std::move(child));
    if (children.back().status == Status::Fail) status = Status::Fail;
    return children.back();
  }

  bool ok() const {
    if (status == Status::Fail) return false;
    for (const auto& c : children)
      if (!c.ok()) return false;
    return true;
  }

  std::size_t count(Status s) const {
    std::size_t n = children.empty() && status == s ? 1 : 0;
    for (const auto& c : children) n += c.count(s);
    return n;
  }

  const CheckNode* find(std::string_view path) const {
    auto slash = path.find('/');
    std::string_view head = path.substr(0, slash);
    for (const auto& c : children)
      if (c.name == head) return slash == std::string_view::npos ? &c : c.find(path.substr(slash + 1));
    return nullptr;
  }
};

}  // namespace crcartan
