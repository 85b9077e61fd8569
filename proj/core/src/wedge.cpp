#include "ncshape/wedge.hpp"

#include <stdexcept>
#include <string>

namespace ncshape {

int basis_index(int i, int j, int n) {
  if (i < 1 || i >= j || j > n) {
    throw std::invalid_argument("basis_index: need 1 <= i < j <= n, got (" + std::to_string(i) +
                                "," + std::to_string(j) + "," + std::to_string(n) + ")");
  }
  // Pairs starting with 1..i-1 come first: (n-1) + (n-2) + ... + (n-i+1).
  const int before = (i - 1) * n - (i - 1) * i / 2;
  return before + (j - i - 1);
}

WedgeCoeffs wedge_embed(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wedge_embed: dimension mismatch");
  }
  const int n = static_cast<int>(a.size());
  WedgeCoeffs w;
  w.ambient_dim = n;
  w.coeffs.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      w.coeffs[k++] = a[i] * b[j] - a[j] * b[i];
    }
  }
  return w;
}

double wedge_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  if (a.size() != b.size() || a.size() != c.size() || a.size() != d.size()) {
    throw std::invalid_argument("wedge_inner: dimension mismatch");
  }
  const double ac = a.dot(c);
  const double ad = a.dot(d);
  const double bc = b.dot(c);
  const double bd = b.dot(d);
  return ac * bd - ad * bc;
}

} // namespace ncshape
