#include "calogero/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "calogero/errors.hpp"

namespace calogero::symmetry {

const std::map<Rep, CharacterVector>& character_table() {
  static const std::map<Rep, CharacterVector> table = {
      {Rep::PlusPlus, {1, 1, 1, 1, 1, 1}},
      {Rep::MinusPlus, {1, -1, 1, -1, 1, -1}},
      {Rep::PlusMinus, {1, 1, -1, -1, 1, -1}},
      {Rep::MinusMinus, {1, -1, -1, 1, 1, 1}},
      {Rep::Defining, {2, 0, 0, 1, -1, -2}},
      {Rep::Twisted, {2, 0, 0, -1, -1, 2}},
  };
  return table;
}

int dimension(Rep r) { return character_table().at(r)[0]; }

std::string_view label(Rep r) {
  switch (r) {
    case Rep::PlusPlus: return "chi++";
    case Rep::MinusPlus: return "chi-+";
    case Rep::PlusMinus: return "chi+-";
    case Rep::MinusMinus: return "chi--";
    case Rep::Defining: return "chi2";
    case Rep::Twisted: return "chi2~";
  }
  return "?";
}

Rep rep_from_label(std::string_view s) {
  for (Rep r : kAllReps)
    if (label(r) == s) return r;
  throw DomainError("unknown representation label: " + std::string(s));
}

Rep one_dimensional(int r_parity, int p_parity) {
  if (r_parity > 0) return p_parity > 0 ? Rep::PlusPlus : Rep::PlusMinus;
  return p_parity > 0 ? Rep::MinusPlus : Rep::MinusMinus;
}

int inner_product(const CharacterVector& a, const CharacterVector& b) {
  int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += kClassSizes[i] * a[i] * b[i];
  if (s % kGroupOrder != 0) throw DomainError("character inner product is not an integer");
  return s / kGroupOrder;
}

std::map<Rep, int> decompose(const CharacterVector& chi) {
  std::map<Rep, int> out;
  int dim = 0;
  for (const auto& [rep, row] : character_table()) {
    int m = inner_product(chi, row);
    if (m < 0) throw DomainError("negative multiplicity: not a character of a representation");
    if (m > 0) out[rep] = m;
    dim += m * row[0];
  }
  if (dim != chi[0]) throw DomainError("character does not decompose into irreducibles");
  return out;
}

TauClass rep_of_tau(std::complex<double> tau, double tol) {
  if (std::abs(std::pow(tau, 6) - 1.0) > tol) throw DomainError("tau is not a sixth root of unity");
  if (std::abs(tau - 1.0) < tol) return {1, {Rep::PlusPlus, Rep::MinusMinus}};
  if (std::abs(tau + 1.0) < tol) return {1, {Rep::MinusPlus, Rep::PlusMinus}};
  if (tau.real() > 0.0) return {2, {Rep::Defining}};
  return {2, {Rep::Twisted}};
}

}  // namespace calogero::symmetry
