#ifndef LIGHTLIKE_TOLERANCES_HPP
#define LIGHTLIKE_TOLERANCES_HPP

namespace lightlike {

struct Tolerances {
  double rank = 1e-9;       // relative singular-value threshold for rank decisions
  double frame = 1e-8;      // frame orthogonality / tangency residuals
  double algebraic = 1e-9;  // classification thresholds on algebraic quantities
  double classify = 1e-7;   // classification thresholds on derived quantities
  double structure = 1e-9;  // ambient admission suite
};

}  // namespace lightlike

#endif
