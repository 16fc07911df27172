#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/model.hpp"
#include "contracts/typecheck.hpp"

namespace contracts {

struct Value {
  enum class Kind { Bool, Natural, Real, Enum, Ctor };
  Kind kind = Kind::Bool;
  bool b = false;
  long long n = 0;
  double r = 0;
  std::string name;  // Enum member or constructor
  std::vector<Value> args;

  static Value boolean(bool v);
  static Value natural(long long v);
  static Value real(double v);
  static Value member(std::string m);
  static Value ctor(std::string c, std::vector<Value> args = {});

  bool numeric() const { return kind == Kind::Natural || kind == Kind::Real; }
  double num() const { return kind == Kind::Natural ? static_cast<double>(n) : r; }
  std::string str() const;

  // Numbers compare by value regardless of kind.
  bool operator==(const Value& o) const;
  bool operator<(const Value& o) const;
};

struct FunctionTable {
  std::map<std::vector<Value>, Value> cells;
  std::optional<Value> otherwise;  // every cell not listed
};

// Symbol names are the rendered io access (`agent.in.r`) or a free variable name.
struct Assignment {
  std::map<std::string, Value> scalars;
  std::map<std::string, FunctionTable> functions;

  std::string str() const;
};

struct DomainBounds {
  std::vector<double> real_grid;  // empty: derive from the obligation's constants
  long long natural_bound = 16;
  // Explicit value sets for NATURAL, REAL or a named type; enums cannot be overridden.
  std::map<std::string, std::vector<Value>> overrides;
  std::uint64_t max_nodes = 10'000'000;
  std::size_t max_function_domain = 64;
};

// Line-based `key: values` format, see README.
Result<DomainBounds> parse_bounds(std::string_view text);

// Every numeric literal c contributes c-1, c, c+1; consecutive literals add their midpoint.
std::vector<double> default_real_grid(const std::vector<FormulaPtr>& fs);

using SymbolTypes = std::map<std::string, TypeRef>;

// Two-valued evaluation; errors on unbound symbols, ill-typed values or unbounded domains.
Result<bool> eval_formula(const FormulaPtr& f, const Assignment& env, const ContextTable& ctx,
                          const DomainBounds& bounds, const SymbolTypes& types = {});

struct Verdict {
  enum class Kind { ValidBounded, Counterexample, Unknown };
  Kind kind = Kind::Unknown;
  Assignment assignment;  // Counterexample only
  std::string reason;     // Unknown only
  std::uint64_t nodes = 0;
};
const char* verdict_name(Verdict::Kind k);

Verdict discharge(const Obligation& ob, const ContextTable& ctx, const DomainBounds& bounds);

}  // namespace contracts
