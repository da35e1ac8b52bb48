#ifndef FAIRSHARE_LP_H_
#define FAIRSHARE_LP_H_

#include <stdexcept>
#include <vector>

namespace fairshare {

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

class LpError : public std::runtime_error {
 public:
  explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

// Dense tableau simplex with Bland's rule for
//   maximize c^T x  s.t.  A x <= b,  x >= 0,
// with b >= 0 so the origin is a feasible starting vertex. Meant for the
// tiny packing LPs of the certifier and the utopic allocations. Throws
// LpError when unbounded or b has a negative entry.
LpSolution maximize_packing(const std::vector<std::vector<double>>& a,
                            const std::vector<double>& b, const std::vector<double>& c);

}  // namespace fairshare

#endif  // FAIRSHARE_LP_H_
