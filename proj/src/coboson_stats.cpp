#include "coboson/coboson_stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "coboson/errors.hpp"

namespace coboson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void require_n(int n, int minimum, const char* op) {
  if (n < minimum)
    throw DomainError(std::string(op) + ": n >= " + std::to_string(minimum) +
                      " required (got " + std::to_string(n) + ")");
}

}  // namespace

// ---------------------------------------------------------------------------

SchmidtSpectrum::SchmidtSpectrum(std::vector<double> weights) : lambda_(std::move(weights)) {
  if (lambda_.empty()) throw DomainError("spectrum: at least one weight required");
  for (double w : lambda_) {
    if (!std::isfinite(w) || w < 0.0)
      throw DomainError("spectrum: weights must be finite and >= 0 (got " + fmt(w) + ")");
  }
  std::sort(lambda_.begin(), lambda_.end(), std::greater<>());

  // Summing the sorted list smallest-first makes the normalization independent
  // of the input order.
  double total = 0.0;
  for (auto it = lambda_.rbegin(); it != lambda_.rend(); ++it) total += *it;
  if (!(total > 0.0)) throw DomainError("spectrum: weights must not all be zero");
  for (double& w : lambda_) w /= total;

  occupied_ = static_cast<std::size_t>(
      std::count_if(lambda_.begin(), lambda_.end(), [](double w) { return w > 0.0; }));
}

SchmidtSpectrum SchmidtSpectrum::uniform(std::size_t modes) {
  if (modes == 0) throw DomainError("spectrum: uniform mode count must be >= 1");
  return SchmidtSpectrum(std::vector<double>(modes, 1.0));
}

SchmidtSpectrum SchmidtSpectrum::parse(const std::string& text) {
  std::vector<double> weights;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    if (*begin == '+') ++begin;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw ParseError("spectrum line " + std::to_string(line_no) +
                       ": expected one number, got '" + line.substr(first, last - first + 1) +
                       "'");
    weights.push_back(value);
  }
  return SchmidtSpectrum(std::move(weights));
}

SchmidtSpectrum SchmidtSpectrum::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

// ---------------------------------------------------------------------------

ChiTable::ChiTable(const SchmidtSpectrum& spectrum, std::size_t n_max) {
  const auto lambda = spectrum.coefficients();
  const std::size_t occupied = spectrum.occupied_modes();

  bool use_log = spectrum.mode_count() > kLogScaleModes;
  if (!use_log) {
    std::vector<double> c(n_max + 1, 0.0);
    c[0] = 1.0;
    std::size_t seen = 0;
    for (double l : lambda) {
      if (l == 0.0) break;  // sorted, zeros trail
      ++seen;
      for (std::size_t k = std::min(seen, n_max); k >= 1; --k)
        c[k] += static_cast<double>(k) * l * c[k - 1];
    }
    if (n_max >= 1) c[1] = 1.0;
    for (std::size_t k = 0; k <= std::min(occupied, n_max); ++k) {
      if (c[k] < std::numeric_limits<double>::min() * 1e6) {
        use_log = true;
        break;
      }
    }
    if (!use_log) {
      log_.resize(n_max + 1);
      for (std::size_t k = 0; k <= n_max; ++k) log_[k] = c[k] > 0.0 ? std::log(c[k]) : kNegInf;
      linear_ = std::move(c);
      return;
    }
  }

  log_.assign(n_max + 1, kNegInf);
  log_[0] = 0.0;
  std::size_t seen = 0;
  for (double l : lambda) {
    if (l == 0.0) break;
    ++seen;
    const double ll = std::log(l);
    for (std::size_t k = std::min(seen, n_max); k >= 1; --k)
      log_[k] = log_add(log_[k], std::log(static_cast<double>(k)) + ll + log_[k - 1]);
  }
  if (n_max >= 1) log_[1] = 0.0;
}

double ChiTable::value(std::size_t k) const {
  if (k > n_max()) throw DomainError("chi table: index out of range");
  return linear_.empty() ? std::exp(log_[k]) : linear_[k];
}

double ChiTable::log_value(std::size_t k) const {
  if (k > n_max()) throw DomainError("chi table: index out of range");
  return log_[k];
}

double ChiTable::ratio(std::size_t k) const {
  if (k == 0 || k > n_max()) throw DomainError("chi table: ratio index out of range");
  if (log_[k - 1] == kNegInf)
    throw DomainError("chi_" + std::to_string(k - 1) +
                      " = 0 (pair number exceeds occupied Schmidt modes); ratio undefined");
  if (log_[k] == kNegInf) return 0.0;
  return linear_.empty() ? std::exp(log_[k] - log_[k - 1]) : linear_[k] / linear_[k - 1];
}

// ---------------------------------------------------------------------------

double purity(const SchmidtSpectrum& spectrum) {
  double p = 0.0;
  for (double l : spectrum.coefficients()) p += l * l;
  return p;
}

double schmidt_number(const SchmidtSpectrum& spectrum) { return 1.0 / purity(spectrum); }

double chi(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 0, "chi");
  if (static_cast<std::size_t>(n) > spectrum.occupied_modes()) return 0.0;
  return ChiTable(spectrum, static_cast<std::size_t>(n)).value(static_cast<std::size_t>(n));
}

double chi_ratio(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 1, "chi_ratio");
  return ChiTable(spectrum, static_cast<std::size_t>(n) + 1).ratio(static_cast<std::size_t>(n) + 1);
}

double ideality_alpha(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 1, "ideality_alpha");
  return std::sqrt(ChiTable(spectrum, static_cast<std::size_t>(n)).ratio(static_cast<std::size_t>(n)));
}

double pair_number_mean(const SchmidtSpectrum& spectrum, int n) {
  return 1.0 + (n - 1) * chi_ratio(spectrum, n);
}

double commutator_mean(const SchmidtSpectrum& spectrum, int n) {
  return 2.0 * chi_ratio(spectrum, n) - 1.0;
}

double fragment_norm(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 1, "fragment_norm");
  return fragment_norm(ChiTable(spectrum, static_cast<std::size_t>(n) + 1), n);
}

double fragment_norm(const ChiTable& table, int n) {
  require_n(n, 1, "fragment_norm");
  if (static_cast<std::size_t>(n) + 1 > table.n_max())
    throw DomainError("fragment_norm: table holds chi up to " + std::to_string(table.n_max()) +
                      ", n + 1 = " + std::to_string(n + 1) + " needed");
  const double r_next = table.ratio(static_cast<std::size_t>(n) + 1);
  const double r_cur = table.ratio(static_cast<std::size_t>(n));
  return 1.0 - r_next - n * (r_cur - r_next);
}

double fragment_norm_reported(const SchmidtSpectrum& spectrum, int n) {
  return std::clamp(fragment_norm(spectrum, n), 0.0, 1.0);
}

RatioBounds purity_bounds(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 1, "purity_bounds");
  const double p = purity(spectrum);
  return {1.0 - p * n, 1.0 - p};
}

double brute_force_chi(const SchmidtSpectrum& spectrum, int n) {
  require_n(n, 0, "brute_force_chi");
  const auto lambda = spectrum.coefficients();
  const int modes = static_cast<int>(lambda.size());
  if (modes > 24)
    throw DomainError("brute_force_chi: enumeration limited to J <= 24 (got J = " +
                      std::to_string(modes) + ")");
  if (n > modes) return 0.0;

  // Neumaier-compensated sum over the n-subsets.
  double sum = 0.0;
  double carry = 0.0;
  auto accumulate = [&](double term) {
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      carry += (sum - t) + term;
    else
      carry += (term - t) + sum;
    sum = t;
  };
  std::function<void(int, int, double)> visit = [&](int start, int remaining, double product) {
    if (remaining == 0) {
      accumulate(product);
      return;
    }
    for (int j = start; j <= modes - remaining; ++j) visit(j + 1, remaining - 1, product * lambda[j]);
  };
  visit(0, n, 1.0);

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  return factorial * (sum + carry);
}

// ---------------------------------------------------------------------------

CobosonEnsemble::CobosonEnsemble(SchmidtSpectrum spectrum, int pair_count)
    : spectrum_(std::move(spectrum)),
      pair_count_(pair_count),
      table_(spectrum_, static_cast<std::size_t>(std::max(pair_count, 0)) + 1) {
  require_n(pair_count, 1, "ensemble");
}

double CobosonEnsemble::chi(int k) const {
  if (k < 0) throw DomainError("ensemble: chi index must be >= 0");
  return table_.value(static_cast<std::size_t>(k));
}

double CobosonEnsemble::log_chi(int k) const {
  if (k < 0) throw DomainError("ensemble: chi index must be >= 0");
  return table_.log_value(static_cast<std::size_t>(k));
}

double CobosonEnsemble::chi_ratio() const {
  return table_.ratio(static_cast<std::size_t>(pair_count_) + 1);
}

double CobosonEnsemble::ideality_alpha() const {
  return std::sqrt(table_.ratio(static_cast<std::size_t>(pair_count_)));
}

double CobosonEnsemble::pair_number_mean() const { return 1.0 + (pair_count_ - 1) * chi_ratio(); }

double CobosonEnsemble::commutator_mean() const { return 2.0 * chi_ratio() - 1.0; }

double CobosonEnsemble::fragment_norm() const { return coboson::fragment_norm(table_, pair_count_); }

RatioBounds CobosonEnsemble::purity_bounds() const {
  return coboson::purity_bounds(spectrum_, pair_count_);
}

// ---------------------------------------------------------------------------

QuantumDotGeometry::QuantumDotGeometry(double bohr_ratio) : r_(bohr_ratio) {
  if (!std::isfinite(bohr_ratio) || bohr_ratio < 0.0)
    throw DomainError("qdot: bohr ratio r = a_B/L must be finite and >= 0 (got " +
                      fmt(bohr_ratio) + ")");
}

long long QuantumDotGeometry::max_pair_number() const noexcept {
  if (r_ == 0.0) return 0;
  const double r2 = r_ * r_;
  auto valid = [r2](long long n) { return 2.0 * static_cast<double>(n - 1) * r2 < 1.0; };
  const double bound = 1.0 / (2.0 * r2);
  if (bound > 4e18) return std::numeric_limits<long long>::max();
  long long n = std::max(1LL, static_cast<long long>(std::ceil(bound)));
  while (n > 1 && !valid(n)) --n;
  while (valid(n + 1)) ++n;
  return n;
}

double qdot_alpha_squared(int n, const QuantumDotGeometry& geom) {
  const double r = geom.bohr_ratio();
  return n * (1.0 - 2.0 * (n - 1) * r * r);
}

double qdot_g2_zero(int n, const QuantumDotGeometry& geom) {
  require_n(n, 2, "qdot_g2_zero");
  const double r = geom.bohr_ratio();
  if (!(2.0 * (n - 1) * r * r < 1.0))
    throw DomainError("qdot: n = " + std::to_string(n) + " violates 2(n-1) r^2 < 1 for r = " +
                      fmt(r) + "; maximum admissible n is " +
                      std::to_string(geom.max_pair_number()));
  const double nn = static_cast<double>(n);
  return qdot_alpha_squared(n - 1, geom) * qdot_alpha_squared(n, geom) / (nn * nn);
}

double bosonic_deviation(int n, const QuantumDotGeometry& geom) {
  return 1.0 - qdot_g2_zero(n, geom);
}

double binding_deviation(double e_c, double e_b) {
  if (!std::isfinite(e_b) || e_b <= 0.0)
    throw DomainError("binding_deviation: e_b > 0 required (got " + fmt(e_b) + ")");
  if (!std::isfinite(e_c) || e_c < 0.0 || e_c > e_b)
    throw DomainError("binding_deviation: 0 <= e_c <= e_b required (got e_c = " + fmt(e_c) + ")");
  return 1.0 - e_c / e_b;
}

double ionization_degree(double n_b, double n_f) {
  if (!std::isfinite(n_f) || n_f <= 0.0)
    throw DomainError("ionization_degree: n_f > 0 required (got " + fmt(n_f) + ")");
  if (!std::isfinite(n_b) || n_b < 0.0 || n_b > n_f)
    throw DomainError("ionization_degree: 0 <= n_b <= n_f required (got n_b = " + fmt(n_b) + ")");
  return 1.0 - n_b / n_f;
}

}  // namespace coboson
