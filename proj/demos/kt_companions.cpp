// Homology of the Koszul, Tate and total companions of KT(Z, {0}^r, [2; 0]) on the default window.

#include <iostream>

#include "uod/chainkit.hpp"

using namespace uod;

int main() {
  for (std::size_t r = 1; r <= 3; ++r) {
    auto kt = build_kt_scalar(std::vector<Integer>(r, Integer(0)), 2, 0);
    const Window w = default_window(r);
    std::cout << "r = " << r << ", window [" << w.lo << ", " << w.hi << "]\n";
    std::cout << "  K:";
    for (const auto& [n, g] : homology(kt.companion(Companion::K))) std::cout << "  " << n << ":" << g.str();
    std::cout << "\n";
    for (auto c : {Companion::T, Companion::KTtot}) {
      std::cout << "  " << to_string(c) << ":";
      for (const auto& [n, g] : kt.interior_homology(c, w)) std::cout << "  " << n << ":" << g.str();
      std::cout << "\n";
    }
  }
}
