#pragma once

// Composite-boson statistics derived from a Schmidt spectrum.
//
// All quantities follow from the normalization factors
//   chi_n = n! * e_n(lambda_1, ..., lambda_J)
// where e_n is the n-th elementary symmetric polynomial of the Schmidt
// coefficients. chi_0 = chi_1 = 1 and chi_n = 0 once n exceeds the number of
// occupied modes.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coboson {

/// Normalized, canonically ordered (non-increasing) Schmidt coefficients.
class SchmidtSpectrum {
 public:
  /// Normalizes raw non-negative weights. Throws DomainError on an empty list,
  /// a negative or non-finite weight, or an all-zero list.
  explicit SchmidtSpectrum(std::vector<double> weights);

  static SchmidtSpectrum uniform(std::size_t modes);

  /// Plain text: one weight per line, blank lines and `#` comments ignored.
  static SchmidtSpectrum load(const std::filesystem::path& path);
  static SchmidtSpectrum parse(const std::string& text);

  std::span<const double> coefficients() const noexcept { return lambda_; }
  std::size_t mode_count() const noexcept { return lambda_.size(); }
  /// Number of strictly positive coefficients; chi_n > 0 iff n <= this.
  std::size_t occupied_modes() const noexcept { return occupied_; }

  friend bool operator==(const SchmidtSpectrum&, const SchmidtSpectrum&) = default;

 private:
  std::vector<double> lambda_;
  std::size_t occupied_ = 0;
};

/// chi_0..chi_{n_max} of one spectrum.
///
/// Built from the non-negative prefix recurrence
///   chi_k^(j) = chi_k^(j-1) + k * lambda_j * chi_{k-1}^(j-1)
/// in plain arithmetic for small spectra, and in log space (log-sum-exp) once
/// the mode count exceeds kLogScaleModes or a plain value underflows. Entries
/// past the occupied mode count are exact zeros.
class ChiTable {
 public:
  static constexpr std::size_t kLogScaleModes = 300;

  ChiTable(const SchmidtSpectrum& spectrum, std::size_t n_max);

  std::size_t n_max() const noexcept { return log_.size() - 1; }
  bool log_scale() const noexcept { return linear_.empty(); }

  double value(std::size_t k) const;
  /// -infinity for an exact zero.
  double log_value(std::size_t k) const;
  /// chi_k / chi_{k-1}; DomainError when chi_{k-1} = 0.
  double ratio(std::size_t k) const;

 private:
  std::vector<double> log_;
  std::vector<double> linear_;
};

double purity(const SchmidtSpectrum& spectrum);
double schmidt_number(const SchmidtSpectrum& spectrum);

double chi(const SchmidtSpectrum& spectrum, int n);
double chi_ratio(const SchmidtSpectrum& spectrum, int n);
double ideality_alpha(const SchmidtSpectrum& spectrum, int n);
double pair_number_mean(const SchmidtSpectrum& spectrum, int n);
double commutator_mean(const SchmidtSpectrum& spectrum, int n);
/// Raw <F_n|F_n>; may be slightly negative from rounding.
double fragment_norm(const SchmidtSpectrum& spectrum, int n);
/// Same, from a table holding chi up to n + 1.
double fragment_norm(const ChiTable& table, int n);
/// Clamped to [0, 1] for display.
double fragment_norm_reported(const SchmidtSpectrum& spectrum, int n);

struct RatioBounds {
  double lower;
  double upper;
};

/// (1 - P*n, 1 - P); chi_{n+1}/chi_n always lies inside.
RatioBounds purity_bounds(const SchmidtSpectrum& spectrum, int n);

/// Test oracle: n! times the sum over all n-subsets of the product of their
/// coefficients, by explicit enumeration. Requires J <= 24; zero for n > J.
double brute_force_chi(const SchmidtSpectrum& spectrum, int n);

/// Spectrum plus pair count with cached chi_0..chi_{N+1}.
class CobosonEnsemble {
 public:
  CobosonEnsemble(SchmidtSpectrum spectrum, int pair_count);

  const SchmidtSpectrum& spectrum() const noexcept { return spectrum_; }
  int pair_count() const noexcept { return pair_count_; }

  /// chi_k for 0 <= k <= N+1.
  double chi(int k) const;
  double log_chi(int k) const;

  double chi_ratio() const;          // chi_{N+1} / chi_N
  double ideality_alpha() const;     // sqrt(chi_N / chi_{N-1})
  double pair_number_mean() const;
  double commutator_mean() const;
  double fragment_norm() const;
  RatioBounds purity_bounds() const;

 private:
  SchmidtSpectrum spectrum_;
  int pair_count_;
  ChiTable table_;
};

// ---------------------------------------------------------------------------
// Quantum-dot and plasma measures.

/// Exciton Bohr radius over dot size, r = a_B / L. r = 0 is the bosonic limit.
class QuantumDotGeometry {
 public:
  explicit QuantumDotGeometry(double bohr_ratio);
  double bohr_ratio() const noexcept { return r_; }

  /// Largest pair number n with 2(n-1) r^2 < 1, or 0 when unbounded (r = 0).
  long long max_pair_number() const noexcept;

 private:
  double r_;
};

/// alpha_n^2 = n (1 - 2(n-1) r^2).
double qdot_alpha_squared(int n, const QuantumDotGeometry& geom);

/// g2(0) = alpha_{n-1}^2 alpha_n^2 / n^2. Requires n >= 2 and 2(n-1) r^2 < 1.
double qdot_g2_zero(int n, const QuantumDotGeometry& geom);

/// delta = 1 - g2(0).
double bosonic_deviation(int n, const QuantumDotGeometry& geom);

/// alpha_d = 1 - E_c / E_b.
double binding_deviation(double e_c, double e_b);

/// alpha_i = 1 - n_b / n_f.
double ionization_degree(double n_b, double n_f);

}  // namespace coboson
