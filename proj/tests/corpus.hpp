#ifndef PACKETLAB_TESTS_CORPUS_HPP
#define PACKETLAB_TESTS_CORPUS_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <packetlab/filterbank.hpp>
#include <packetlab/lattice.hpp>

namespace corpus {

using packetlab::Complex;
using packetlab::DigitSet;
using packetlab::DilationMatrix;
using packetlab::FilterBank;

struct Entry {
  std::string name;
  FilterBank bank;
};

inline DilationMatrix dilation(const std::vector<std::vector<std::int64_t>>& rows) {
  return packetlab::validate_dilation(rows);
}

inline FilterBank haar(const DilationMatrix& m, int multiplicity = 1) {
  return packetlab::complete_bank_haar(packetlab::digit_set(m, false), packetlab::digit_set(m, true), multiplicity);
}

inline FilterBank with_unitary(const DilationMatrix& m, int multiplicity, const Eigen::MatrixXcd& u) {
  return packetlab::complete_bank_haar(packetlab::digit_set(m, false), packetlab::digit_set(m, true), multiplicity, u);
}

inline FilterBank lazy(const DilationMatrix& m) {
  const auto a = static_cast<Eigen::Index>(m.det_abs());
  return with_unitary(m, 1, Eigen::MatrixXcd::Identity(a, a));
}

/// Daubechies 4-tap orthonormal pair, g_k = (-1)^k h_{3-k}.
inline FilterBank daubechies4() {
  const DilationMatrix m = dilation({{2}});
  FilterBank fb(packetlab::digit_set(m, false), packetlab::digit_set(m, true), 1);
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  const double h[4] = {(1 + s3) / norm, (3 + s3) / norm, (3 - s3) / norm, (1 - s3) / norm};
  for (int k = 0; k < 4; ++k) {
    fb.add_tap(0, 0, 0, {k}, h[k]);
    fb.add_tap(1, 0, 0, {k}, (k % 2 ? -1.0 : 1.0) * h[3 - k]);
  }
  return fb;
}

/// Orthonormal corpus.
inline std::vector<Entry> orthonormal() {
  const DilationMatrix dyadic = dilation({{2}});
  const DilationMatrix quincunx = dilation({{1, 1}, {1, -1}});
  const DilationMatrix triadic = dilation({{3}});
  return {
      {"haar-1d", haar(dyadic)},
      {"lazy-1d", lazy(dyadic)},
      {"haar-quincunx", haar(quincunx)},
      {"random-unitary-L2", with_unitary(dyadic, 2, packetlab::random_unitary(4, 20240601))},
      {"random-unitary-quincunx-L2", with_unitary(quincunx, 2, packetlab::random_unitary(4, 77))},
      {"haar-triadic", haar(triadic)},
      {"daubechies4", daubechies4()},
  };
}

/// Copy of a bank with every tap passed through f(r, l, j, k, value).
template <typename F>
FilterBank map_taps(const FilterBank& fb, F&& f) {
  FilterBank out(fb.digits_a(), fb.digits_b(), fb.multiplicity());
  for (int r = 0; r < fb.channels(); ++r)
    for (int l = 0; l < fb.multiplicity(); ++l)
      for (int j = 0; j < fb.multiplicity(); ++j)
        for (const auto& tap : fb.sequence(r, l, j).taps()) out.add_tap(r, l, j, tap.k, f(r, l, j, tap.k, tap.value));
  return out;
}

inline FilterBank scaled(const FilterBank& fb, double c) {
  return map_taps(fb, [c](int, int, int, const packetlab::IntVec&, Complex v) { return c * v; });
}

/// Adds complex noise of size `eps` to every tap and one extra tap outside the support.
inline FilterBank perturbed(const FilterBank& fb, double eps, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FilterBank out = map_taps(fb, [&](int, int, int, const packetlab::IntVec&, Complex v) {
    return v + eps * Complex(g(rng), g(rng));
  });
  std::uniform_int_distribution<int> pick(0, fb.channels() - 1);
  packetlab::IntVec k(static_cast<std::size_t>(fb.dim()), 0);
  k[0] = 5;
  out.add_tap(pick(rng), 0, 0, k, eps * Complex(g(rng), g(rng)));
  return out;
}

inline std::vector<Complex> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

}  // namespace corpus

#endif  // PACKETLAB_TESTS_CORPUS_HPP
