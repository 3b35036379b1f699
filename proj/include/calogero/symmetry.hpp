#pragma once

#include <array>
#include <complex>
#include <map>
#include <string_view>
#include <vector>

namespace calogero::symmetry {

/// Irreducible representations of D6. The one-dimensional ones are named by
/// (parity under the reflections R_i, parity under the exchanges P_i).
enum class Rep { PlusPlus, MinusPlus, PlusMinus, MinusMinus, Defining, Twisted };

inline constexpr std::array<Rep, 6> kAllReps = {Rep::PlusPlus, Rep::MinusPlus, Rep::PlusMinus,
                                                Rep::MinusMinus, Rep::Defining, Rep::Twisted};

/// Character values on the classes {e}, {R_i}, {P_i}, {R^{+-1}}, {R^{+-2}}, {R^3}
/// (R the rotation by pi/3). This ordering is part of the output schema.
using CharacterVector = std::array<int, 6>;

inline constexpr std::array<int, 6> kClassSizes = {1, 3, 3, 2, 2, 1};
inline constexpr int kGroupOrder = 12;

const std::map<Rep, CharacterVector>& character_table();

int dimension(Rep r);

/// chi++, chi-+, chi+-, chi--, chi2, chi2~
std::string_view label(Rep r);
Rep rep_from_label(std::string_view s);

Rep one_dimensional(int r_parity, int p_parity);

/// Class-weighted inner product (1/12) sum |C| chi1 chi2; exact for genuine characters.
int inner_product(const CharacterVector& a, const CharacterVector& b);

std::map<Rep, int> decompose(const CharacterVector& chi);

struct TauClass {
  int type;
  std::vector<Rep> candidates;
};

/// Classify a sixth root of unity tau (eigenvalue of the sector transport): +-1 give
/// type 1, {-j, -conj(j)} the defining and {j, conj(j)} the twisted 2-dimensional rep.
TauClass rep_of_tau(std::complex<double> tau, double tol = 1e-8);

}  // namespace calogero::symmetry
