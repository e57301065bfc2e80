#include "ncp/baselines.hpp"

#include <limits>
#include <string>

#include "ncp/kernels.hpp"

namespace ncp {

OracleResult exhaustive_nearest(const LinearCode& code, BitRef w, std::size_t cap, Exec exec) {
  if (code.n() > cap)
    throw CapExceeded("exhaustive_nearest enumerates 2^" + std::to_string(code.n()) + " codewords, above cap 2^" +
                      std::to_string(cap));
  if (w.size() != code.m()) throw LengthMismatch(w.size(), code.m());
  const CosetScan scan = kernels::scan_coset(code.columns(), w, exec);
  OracleResult r;
  r.x_star = BitVec::from_uint(code.n(), scan.min_x);
  r.distance = scan.min_weight;
  r.unique = scan.min_count == 1;
  return r;
}

PrangeResult prange_decode(const LinearCode& code, BitRef w, std::size_t target_distance, const RngStream& rng,
                           std::uint64_t max_iters, Exec exec) {
  if (w.size() != code.m()) throw LengthMismatch(w.size(), code.m());
  const PrangeRun run = kernels::prange(code, w, target_distance, rng, max_iters, exec);
  PrangeResult r;
  if (run.message) r.message = BitVec::from_uint(code.n(), *run.message);
  r.iterations = run.iterations;
  r.singular = run.singular;
  return r;
}

double prange_expected_iterations(std::size_t m, std::size_t n, std::size_t errors) {
  // Pr[no error in the set] = C(m - t, n) / C(m, n).
  double p = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (errors + j >= m) return std::numeric_limits<double>::infinity();
    p *= static_cast<double>(m - errors - j) / static_cast<double>(m - j);
  }
  return 1.0 / p;
}

}  // namespace ncp
