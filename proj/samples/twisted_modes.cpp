// Prints a few twisted modes of psi on the k = 3 module, the vacuum
// eigenvalue of L^g(0), and the first terms of the graded dimension.

#include <iostream>

#include "permorb/qchar.hpp"

using namespace permorb;

int main() {
  FreeFermion V;
  TwistedModule tm(V, 3);

  std::cout << "a_j for k=3:";
  for (const auto& a : tm.delta().a()) std::cout << " " << a.to_string();
  std::cout << "\n";

  for (Frac m : frac_range(Frac(-1), Frac(0), Frac(1, 3)))
    std::cout << "psi^g_(" << m.to_string() << ") |0> = "
              << tm.single(FreeFermion::psi(), m, FreeFermion::vac()).to_string() << "\n";

  std::cout << "L^g(0) |0> = " << tm.Lg(0, FreeFermion::vac_vector()).to_string() << "\n";
  std::cout << "dim_q T = " << graded_dim(tm, 6).to_string() << "\n";
}
