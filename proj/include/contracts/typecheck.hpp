#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/model.hpp"

namespace contracts {

class ContextTable {
 public:
  void add(const std::string& name, TypeExpr t);

  const TypeExpr* find(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  size_t size() const { return order_.size(); }

  // Enum types declaring `member`.
  std::vector<std::string> enums_with(const std::string& member) const;
  // Constructor sets declaring `ctor`, with the constructor itself.
  std::vector<std::pair<std::string, const Ctor*>> ctors_named(const std::string& ctor) const;

  // Resolves a named type to its declaration; nullptr for base types.
  const TypeExpr* expr_of(const TypeRef& t) const;
  bool is_enum(const TypeRef& t) const;
  bool is_function(const TypeRef& t) const;

 private:
  std::map<std::string, TypeExpr> types_;
  std::vector<std::string> order_;
};

Result<ContextTable> resolve_context(const std::vector<ContextDecl>& decls);

struct TypedContract {
  Contract contract;
  std::unordered_map<const Term*, TypeRef> symbol_table;
  std::map<std::pair<Dir, std::string>, size_t> topic_index;

  const TopicBinding* topic_for(Dir d, const std::string& var) const;
};

Result<TypedContract> check_contract(const Contract& c, const ContextTable& ctx);

struct CheckedDocument {
  ContextTable context;
  std::vector<TypedContract> contracts;

  const TypedContract* find(const std::string& node) const;
};

// Resolves the context of all documents together and checks every contract.
Result<CheckedDocument> check_documents(const std::vector<Document>& docs);

}  // namespace contracts
