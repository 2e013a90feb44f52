#pragma once

// Seeded random helpers with a platform-independent output sequence
// (std::*_distribution is implementation-defined, so we derive values from
// the raw mt19937_64 stream ourselves).

#include "hclab/matrix_kernel.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace hclab {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  double normal();                         // standard normal, Box-Muller
  cplx complex_normal();                   // E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Haar-distributed unitary of size n (QR of a complex Gaussian matrix with
// the diagonal phases of R divided out).
CMatrix haar_unitary(Index n, SeededRng& rng);

// Nonzero complex weights with modulus in [lo, hi] and uniform phase.
std::vector<cplx> random_weights(std::size_t count, SeededRng& rng, double lo = 0.5, double hi = 2.0);

// Same with zero phase.
std::vector<cplx> random_positive_weights(std::size_t count, SeededRng& rng, double lo = 0.5,
                                          double hi = 2.0);

}  // namespace hclab
