#include "qmeas/charges.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace qmeas {

namespace {

void require_dim(int d) {
  if (d < 2) {
    throw ValidationError("charge set: system dimension must be >= 2, got " +
                          std::to_string(d));
  }
}

int parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("ChargeLabel: bad integer field '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string ChargeLabel::str() const {
  std::ostringstream out;
  out << static_cast<char>(alpha) << ':' << m << ':' << n;
  return out.str();
}

ChargeLabel ChargeLabel::parse(std::string_view text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos ||
      first != 1 || text.find(':', second + 1) != std::string_view::npos) {
    throw ValidationError("ChargeLabel: expected 'axis:m:n', got '" +
                          std::string(text) + "'");
  }
  ChargeLabel label;
  switch (text[0]) {
    case 'x': label.alpha = ChargeAxis::X; break;
    case 'y': label.alpha = ChargeAxis::Y; break;
    case 'z': label.alpha = ChargeAxis::Z; break;
    default:
      throw ValidationError("ChargeLabel: axis must be x, y or z, got '" +
                            std::string(text) + "'");
  }
  label.m = parse_int(text.substr(2, second - 2));
  label.n = parse_int(text.substr(second + 1));
  return label;
}

bool label_valid_for(const ChargeLabel& label, int d) {
  if (d < 2) return false;
  if (label.alpha == ChargeAxis::Z) {
    return label.m == label.n && label.m >= 1 && label.m <= d - 1;
  }
  return label.m >= 0 && label.m < label.n && label.n <= d - 1;
}

std::vector<ChargeLabel> canonical_labels(int d) {
  require_dim(d);
  std::vector<ChargeLabel> labels;
  labels.reserve(static_cast<std::size_t>(d) * d - 1);
  for (int m = 1; m <= d - 1; ++m) {
    labels.push_back({ChargeAxis::Z, m, m});
  }
  for (int m = 0; m < d - 1; ++m) {
    for (int n = m + 1; n <= d - 1; ++n) {
      labels.push_back({ChargeAxis::X, m, n});
    }
  }
  for (int m = 0; m < d - 1; ++m) {
    for (int n = m + 1; n <= d - 1; ++n) {
      labels.push_back({ChargeAxis::Y, m, n});
    }
  }
  return labels;
}

Matrix charge_matrix(int d, const ChargeLabel& label) {
  require_dim(d);
  if (!label_valid_for(label, d)) {
    throw ValidationError("charge_matrix: label " + label.str() +
                          " invalid for d=" + std::to_string(d));
  }
  const Index dim = static_cast<Index>(d) * d;
  const auto diag_index = [d](int k) { return static_cast<Index>(k) * d + k; };
  Matrix q = Matrix::Zero(dim, dim);
  switch (label.alpha) {
    case ChargeAxis::X:
      q(diag_index(label.m), diag_index(label.n)) = Complex(1.0, 0.0);
      q(diag_index(label.n), diag_index(label.m)) = Complex(1.0, 0.0);
      break;
    case ChargeAxis::Y:
      q(diag_index(label.m), diag_index(label.n)) = Complex(0.0, -1.0);
      q(diag_index(label.n), diag_index(label.m)) = Complex(0.0, 1.0);
      break;
    case ChargeAxis::Z: {
      const double c = std::sqrt(2.0 / (static_cast<double>(label.m) * (label.m + 1)));
      for (int k = 0; k < label.m; ++k) {
        q(diag_index(k), diag_index(k)) = Complex(c, 0.0);
      }
      q(diag_index(label.m), diag_index(label.m)) = Complex(-label.m * c, 0.0);
      break;
    }
  }
  return q;
}

double charge_spectral_radius(const ChargeLabel& label) {
  if (label.alpha == ChargeAxis::Z) {
    return label.m * std::sqrt(2.0 / (static_cast<double>(label.m) * (label.m + 1)));
  }
  return 1.0;
}

ChargeSet build_charge_set(int d) {
  require_dim(d);
  ChargeSet set;
  set.d = d;
  for (const ChargeLabel& label : canonical_labels(d)) {
    set.charges.emplace_back(label, HermitianObservable(charge_matrix(d, label)));
  }
  return set;
}

const HermitianObservable& charge_by_label(const ChargeSet& set, const ChargeLabel& label) {
  if (!label_valid_for(label, set.d)) {
    throw ValidationError("charge_by_label: label " + label.str() +
                          " invalid for d=" + std::to_string(set.d));
  }
  for (const auto& [key, obs] : set.charges) {
    if (key == label) return obs;
  }
  throw ValidationError("charge_by_label: label " + label.str() + " not in set");
}

}  // namespace qmeas
