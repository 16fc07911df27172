#pragma once

#include <string>
#include <string_view>

#include "contracts/diagnostic.hpp"
#include "contracts/model.hpp"

namespace contracts {

Result<Document> parse_document(std::string_view source);
Result<FormulaPtr> parse_formula(std::string_view source);
Result<TermPtr> parse_term(std::string_view source);

std::string render_rcl(const Document& doc);
std::string render_contract(const Contract& c);
std::string render_formula(const FormulaPtr& f);
std::string render_term(const TermPtr& t);
std::string render_type_expr(const TypeExpr& t);

std::string render_latex(const Contract& c);
std::string render_latex_formula(const FormulaPtr& f);

bool is_rcl_keyword(std::string_view word);

}  // namespace contracts
