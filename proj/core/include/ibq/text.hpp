#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ibq/syntax.hpp"

namespace ibq {

struct BadSyntax : std::runtime_error {
  BadSyntax(int line, int column, std::string expected);
  int line, column;
  std::string expected;
};

struct DuplicateDeclaration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

KnowledgeBase parse_kb(std::string_view text);
Concept parse_concept(std::string_view text);
Role parse_role(std::string_view text);
Assertion parse_assertion(std::string_view text);
// Assertions separated by ';' (an empty string yields the empty ABox).
Abox parse_abox(std::string_view text);
// `concept NAME` / `role NAME` lines.
Signature parse_signature(std::string_view text);

std::string render(const Role& r);
std::string render(const Concept& c);
std::string render(const TBoxAxiom& a);    // no trailing '.'
std::string render(const Assertion& a);    // no trailing '.'
std::string render(const KnowledgeBase& kb);
std::string render(const Signature& s);
// Sorted by kind, then by rendered text; joined by `sep`.
std::string render_canonical(const Abox& a, std::string_view sep = "; ");

std::string read_file(const std::string& path);

}  // namespace ibq
