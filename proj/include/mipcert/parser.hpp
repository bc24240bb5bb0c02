#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mipcert/galgebra.hpp"
#include "mipcert/pcgroup.hpp"

namespace mipcert::parser {

/// Parse failure with 1-based source position and the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column,
               std::string token)
        : std::runtime_error(msg +
                             (line ? " at line " + std::to_string(line) + ", column " +
                                         std::to_string(column)
                                   : std::string{}) +
                             (token.empty() ? "" : " (near '" + token + "')")),
          line_(line),
          column_(column),
          token_(std::move(token)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& token() const { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

/// Parsed presentation plus the source it came from.
struct PresentationDoc {
    pc::PcPresentation presentation;
    std::string source;
};

/// Line-oriented presentation format:
///   # comment
///   gens: x y z
///   orders: 16 8 4
///   pow x = 1
///   conj y^x = y z
/// Words are space-separated generator powers (g or g^e); negative exponents
/// are reduced modulo the relative order, exponents at or above the order are
/// rejected.  The parsed presentation must pass consistency_check; the first
/// failed overlap equation is reported otherwise.
PresentationDoc parse_presentation(std::string_view text);

/// Canonical text form; parse_presentation(print_presentation(p)) == p.
std::string print_presentation(const pc::PcPresentation& p);

/// Algebra element literal over the basis group:
///   expr   := term ('+' term)*
///   term   := factor (('*')? factor)*
///   factor := generator ('^' int)? | '(' expr ')' | '1'
/// Juxtaposition multiplies; generator names are matched longest-first, so
/// "ab" means a*b when a and b are generators and no generator is named "ab".
alg::BitVector parse_algebra_literal(std::string_view text, const alg::GroupAlgebra& a);

}  // namespace mipcert::parser
