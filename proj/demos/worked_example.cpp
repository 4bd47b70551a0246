// Expands C d^2 {1,2} step by step and checks the theorem for a few graphs.

#include <iostream>

#include "overlap/io/text.hpp"
#include "overlap/operators.hpp"
#include "overlap/theorem.hpp"

int main() {
  using namespace overlap;
  const GraphPolynomial g(io::parse_monomial("{1,2}"));
  const auto once = delta(g);
  const auto twice = delta(once);
  std::cout << "g          = " << io::format_polynomial(g) << "\n";
  std::cout << "d g        = " << io::format_polynomial(once) << "\n";
  std::cout << "d^2 g      = " << io::format_polynomial(twice) << "\n";
  std::cout << "C d^2 g    = " << io::format_polynomial(wick_contract(twice)) << "\n";
  std::cout << "closed form  " << io::format_polynomial(delta_formula_direct(g.terms().begin()->first.graph()))
            << "\n\n";

  for (const char* text : {"{1,2}", "{1,2}{2,3}", "{1,2}{1,3}{2,3}"}) {
    for (int n = 1; n <= 2; ++n) {
      const auto r = theorem_verify(io::parse_monomial(text), n);
      std::cout << "C d^" << 2 * n << " " << text << " = " << 2 * n - 1 << "!! D^" << n << " " << text
                << ": " << (r.equal ? "equal" : "NOT equal") << " (" << r.counts.canonical_lhs
                << " classes, " << r.counts.raw_lhs << " raw terms)\n";
    }
  }
}
