#pragma once

// Farrell-Tate homology of Z^r x Z/m with coefficients in Z: the closed form and the
// KT-complex route; the KT side of the sign-homology comparison for squarefree f.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uod/arith.hpp"
#include "uod/chainkit.hpp"

namespace uod {

struct AlmostFreeSpec {
  std::size_t rank = 0;  // r
  Integer order = 1;     // m
};

inline AbGroupInvariants ftate_closed_form(const AlmostFreeSpec& s, int /*degree*/ = 0) {
  if (s.rank == 0) throw Error(ErrorKind::RankZeroUnsupported, "the closed form needs positive rank");
  if (s.order < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be positive");
  return AbGroupInvariants::free_cyclic(s.order, std::size_t{1} << (s.rank - 1));
}

/// Interior homology of KTtot(Z, {0}^r, [m; 0]).
inline HomologyTable ftate_via_kt(const AlmostFreeSpec& s, std::optional<Window> window = std::nullopt) {
  if (s.order < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be positive");
  KtComplex kt = build_kt_scalar(std::vector<Integer>(s.rank, Integer(0)), s.order, 0);
  return kt.interior_homology(Companion::KTtot, window.value_or(default_window(s.rank)));
}

/// KTtot(Z, {nu_p - 1}_{p | f}, [m; 0]): the rank-one module on which every X_p and every
/// group element act as the identity. Archimedean nu must be +-1.
template <class B>
HomologyTable thm442_lhs(const B& b, const typename B::Elem& f, const std::map<std::string, Integer>& nu = {},
                         std::optional<Window> window = std::nullopt) {
  if (!is_squarefree(b, f)) throw Error(ErrorKind::NotSquarefree, b.format(f) + " is not squarefree");
  std::vector<Integer> fs;
  std::vector<std::string> names;
  for (const auto& pp : b.factor(b.canonical(f))) names.push_back(b.format(pp.prime));
  for (const auto& [key, v] : nu)
    if (std::find(names.begin(), names.end(), key) == names.end())
      throw Error(ErrorKind::InvalidArgument, "nu given for " + key + ", which does not divide " + b.format(f));
  for (const auto& name : names) {
    auto it = nu.find(name);
    Integer v = it == nu.end() ? Integer(1) : it->second;
    if (std::string(B::kind()) == "q" && !is_unit(v))
      throw Error(ErrorKind::HypothesisViolated, "nu_" + name + " = " + v.get_str() + " is not a unit");
    fs.push_back(v - 1);
  }
  KtComplex kt = build_kt_scalar(fs, b.sign_order(), 0);
  return kt.interior_homology(Companion::KTtot, window.value_or(default_window(fs.size())));
}

/// True when every degree of the table carries the same group.
inline bool degree_independent(const HomologyTable& t) {
  for (const auto& [n, g] : t)
    if (!(g == t.begin()->second)) return false;
  return true;
}

}  // namespace uod
