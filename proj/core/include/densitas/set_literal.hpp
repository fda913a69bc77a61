#pragma once

#include "densitas/natset.hpp"

#include <string>
#include <string_view>

namespace densitas {

/// Parses the set-literal DSL:
///   omega | empty
///   fin{1,2,3} | fin{0..9}                     (ranges inclusive)
///   per m=6 R={1,3} t=7 add={..} del={..}
///   ap a=6! h=1 j0=1 | ap a=720 h=3 | add={..} | del={..}
///   blocks f(n)=2^-3 | blocks f(n)=1/n | blocks f(n)=[1/2,1/4]
///   blocks pre=[{0,1/2};{}] cycle=[{0,1/8}] round=ceil add={..} del={..}
///   horizon H=4096 bits=<hex of sum 2^i>
/// Throws ParseError with the offending position.
NatSet parse_set_literal(std::string_view text);

/// Canonical literal; parse_set_literal(print_set_literal(A)) denotes the same set.
std::string print_set_literal(const NatSet& a);

}  // namespace densitas
