#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "litm/common.hpp"

namespace litm::detail {

// Typed field reader that rejects unknown keys. Every getter leaves the
// output untouched when the key is absent, so defaults survive.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string section,
               ErrorCode code = ErrorCode::config)
      : j_(j), section_(std::move(section)), code_(code) {
    if (!j_.is_object()) fail(code_, section_ + ": expected a JSON object");
  }

  void get_int(const char* key, int& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_number_integer()) fail(code_, where(key) + " must be an integer");
      out = v->get<int>();
    }
  }

  void get_u64(const char* key, std::uint64_t& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_number_integer())
        fail(code_, where(key) + " must be a non-negative integer");
      if (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)
        fail(code_, where(key) + " must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void get_double(const char* key, double& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_number()) fail(code_, where(key) + " must be a number");
      out = v->get<double>();
    }
  }

  void get_bool(const char* key, bool& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_boolean()) fail(code_, where(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }

  void get_string(const char* key, std::string& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_string()) fail(code_, where(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void get_int_array(const char* key, std::vector<int>& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_array()) fail(code_, where(key) + " must be an array");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) fail(code_, where(key) + " must hold integers");
        out.push_back(e.get<int>());
      }
    }
  }

  void get_double_array(const char* key, std::vector<double>& out) {
    if (const auto* v = claim(key)) {
      if (!v->is_array()) fail(code_, where(key) + " must be an array");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(code_, where(key) + " must hold numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  const nlohmann::json* get_object(const char* key) {
    if (const auto* v = claim(key)) {
      if (!v->is_object()) fail(code_, where(key) + " must be an object");
      return v;
    }
    return nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(code_, "unknown key '" + key + "' in " + section_);
  }

 private:
  const nlohmann::json* claim(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return section_ + "." + key; }

  const nlohmann::json& j_;
  std::string section_;
  ErrorCode code_;
  std::set<std::string> seen_;
};

}  // namespace litm::detail
