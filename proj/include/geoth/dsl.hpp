#pragma once

#include <iosfwd>
#include <string>

#include "geoth/extension.hpp"
#include "geoth/syntax.hpp"

namespace geoth {

// Canonical text rendering. Deterministic; parse(print(x)) == x for
// normalized values.
std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string print_sequent(const Sequent& s);
std::string print_theory(const Theory& t);
std::string print_extension(const TheoryExtension& e);

Term parse_term(const std::string& text);
Formula parse_formula(const std::string& text);
Theory parse_theory(const std::string& text);
TheoryExtension parse_extension(const std::string& text);

// Structural diff of canonical forms; empty string means equal.
std::string diff_theories(const Theory& a, const Theory& b);

}  // namespace geoth
