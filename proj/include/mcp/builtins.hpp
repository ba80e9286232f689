#pragma once

#include "mcp/dsl.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcp {

class UnknownInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct BuiltinEntry {
  std::string_view name;
  std::string_view text;
};

inline constexpr BuiltinEntry builtin_table[] = {
    {"bande-hadjar-6d", R"cps(# Six-dimensional nilpotent Lie algebra carrying a metric contact pair of type (1,1).
algebra bande-hadjar-6d {
  dim 6;
  basis w1 w2 w3 w4 w5 w6;
  d w1 = w3 ^ w4;
  d w2 = w5 ^ w6;
  d w3 = 0;
  d w4 = w3 ^ w5;
  d w5 = w3 ^ w6;
  d w6 = 0;
}
pair { alpha1 = w1; alpha2 = w2 }
metric { w1*w1 + w2*w2 + 1/2 (w3*w3 + w4*w4 + w5*w5 + w6*w6) }
phi {
  X6 -> X5; X5 -> -X6;
  X4 -> X3; X3 -> -X4;
}
config { kappa = 1/2; tol = 1e-9 }
)cps"},
    {"heisenberg3", R"cps(# Heisenberg algebra h3 with its Darboux contact form, plus a line: h3 + R.
algebra heisenberg3 {
  dim 4;
  basis w1 w2 w3 w4;
  d w1 = w2 ^ w3;
}
pair { alpha1 = w1; alpha2 = w4 }
metric { w1*w1 + 1/2 (w2*w2 + w3*w3) + w4*w4 }
phi { X3 -> X2; X2 -> -X3 }
config { kappa = 1/2 }
)cps"},
    {"heisenberg3x3", R"cps(# Product h3 + h3 with the product metric contact pair.
algebra heisenberg3x3 {
  dim 6;
  basis w1 w2 w3 w4 w5 w6;
  d w1 = w2 ^ w3;
  d w4 = w5 ^ w6;
}
pair { alpha1 = w1; alpha2 = w4 }
metric { w1*w1 + 1/2 (w2*w2 + w3*w3) + w4*w4 + 1/2 (w5*w5 + w6*w6) }
phi { X3 -> X2; X2 -> -X3; X6 -> X5; X5 -> -X6 }
config { kappa = 1/2 }
)cps"},
    {"heisenberg5x3", R"cps(# Product h5 + h3, a contact pair of type (2,1).
algebra heisenberg5x3 {
  dim 8;
  basis w1 w2 w3 w4 w5 w6 w7 w8;
  d w1 = w2 ^ w3 + w4 ^ w5;
  d w6 = w7 ^ w8;
}
pair { alpha1 = w1; alpha2 = w6 }
metric { w1*w1 + w6*w6 + 1/2 (w2*w2 + w3*w3 + w4*w4 + w5*w5 + w7*w7 + w8*w8) }
phi { X3 -> X2; X2 -> -X3; X5 -> X4; X4 -> -X5; X8 -> X7; X7 -> -X8 }
config { kappa = 1/2 }
)cps"},
    {"abelian2", R"cps(# Abelian plane: the degenerate pair of type (0,0).
algebra abelian2 {
  dim 2;
  basis w1 w2;
}
pair { alpha1 = w1; alpha2 = w2 }
metric { w1*w1 + w2*w2 }
phi { }
config { kappa = 1/2 }
)cps"},
};

}  // namespace detail

inline std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& e : detail::builtin_table) out.emplace_back(e.name);
  return out;
}

/// Source text of a registered instance.
inline std::string_view builtin_text(std::string_view name) {
  for (const auto& e : detail::builtin_table)
    if (e.name == name) return e.text;
  std::string msg = "unknown builtin '" + std::string(name) + "'; available:";
  for (const auto& e : detail::builtin_table) msg += " " + std::string(e.name);
  throw UnknownInstance(msg);
}

inline InstanceSpec builtin(std::string_view name) { return parse_instance(builtin_text(name)); }

}  // namespace mcp
