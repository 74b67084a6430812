#pragma once

#include "qmeas/core.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qmeas {

enum class ChargeAxis : char { X = 'x', Y = 'y', Z = 'z' };

// Label of one non-local charge observable on the system-apparatus space.
// Valid ranges for system dimension d:
//   x, y : 0 <= m < n <= d-1
//   z    : 1 <= m = n <= d-1
struct ChargeLabel {
  ChargeAxis alpha = ChargeAxis::Z;
  int m = 0;
  int n = 0;

  std::string str() const;                          // "z:1:1", "x:0:1", ...
  static ChargeLabel parse(std::string_view text);  // inverse of str()

  bool operator==(const ChargeLabel&) const = default;
};

bool label_valid_for(const ChargeLabel& label, int d);

// All d^2-1 labels in canonical order: z ascending in m, then x in
// lexicographic (m, n), then y in lexicographic (m, n). This order is
// fixed so ledger files are stable across runs.
std::vector<ChargeLabel> canonical_labels(int d);

// The d^2 x d^2 charge observable for one label, under the composite index
// convention |m>_S |n>_A <-> m*d + n. Hermitian, traceless, Hilbert-Schmidt
// norm sqrt(2), and supported entirely on the span{|kk>} subspace.
Matrix charge_matrix(int d, const ChargeLabel& label);

// Largest |eigenvalue| of the labelled charge (closed form).
double charge_spectral_radius(const ChargeLabel& label);

struct ChargeSet {
  int d = 0;
  std::vector<std::pair<ChargeLabel, HermitianObservable>> charges;
};

ChargeSet build_charge_set(int d);

const HermitianObservable& charge_by_label(const ChargeSet& set, const ChargeLabel& label);

}  // namespace qmeas
