// Prints the sign-homology of U(f) for a few conductors over Q and F_3(T), next to the
// predicted (Z/m')^(2^(r-1)).

#include <iostream>

#include "uod/signh.hpp"

using namespace uod;

template <class B>
void show(const B& b, const typename B::Elem& f) {
  auto h = sign_homology_U(b, f);
  auto rep = verify_rank_theorem(b, f);
  std::cout << "U(" << b.format(f) << ")  rank " << h.rank << "  even " << h.h.even.str() << "  odd " << h.h.odd.str()
            << "  [" << to_string(rep.verdict) << "]\n";
}

int main() {
  const Archimedean Z;
  for (std::int64_t f : {3, 4, 6, 12, 15, 105}) show(Z, f);
  FunctionField F3(3);
  for (const char* s : {"T", "T*(T+1)", "T*(T+1)*(T^2+1)"}) show(F3, F3.parse(s));
}
