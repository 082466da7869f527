#pragma once

// Exact brigade loads in rational arithmetic, independent of the library.

#include <boost/rational.hpp>

namespace emff::test {

using Rational = boost::rational<long long>;

// Per-unit loads from the balance of every satellite outward of j-2, in units
// of m_sat d K p̂ (force) and m_sat d² p̂ × K p̂ (torque). The outermost
// satellite has no outer neighbour; each further satellite passes on its own
// disturbance plus the load it receives.
struct Loads {
  Rational force;
  Rational torque;
};

inline Loads telescoped_loads(long long n, long long j) {
  Rational force = 0;   // g_i = Σ_{k=i}^{n} k, force handed inward by satellite i
  Rational torque = 0;  // Σ_{i} g_i from the torque balance and pair reactions
  for (long long i = n; i >= j - 1; --i) {
    force += i;
    torque += force;
  }
  return {force, torque};
}

/// The telescoped loads normalised to block weights of L(n, j).
inline Loads normalised_loads(long long n, long long j) {
  const Loads sums = telescoped_loads(n, j);
  return {sums.force * Rational(2, n * (n + 1)),
          sums.torque * Rational(6, n * (n + 1) * (2 * n + 1))};
}

/// Closed-form block weights of L(n, j).
inline Loads closed_form(long long n, long long j) {
  return {Rational((n - j + 2) * (n + j - 1), n * (n + 1)),
          Rational((n - j + 2) * (n - j + 3) * (2 * n + j - 1), n * (n + 1) * (2 * n + 1))};
}

}  // namespace emff::test
