#pragma once

// Difference kernels: the compressed sum-of-exponentials form used by the
// solvers, the analytic kernels it approximates, and the checks tying them.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace memstep {

/// One term a * exp(-b t) of a Prony series.
struct PronyTerm {
  double weight;  // a, dimensionless, > 0
  double rate;    // b, inverse time, >= 0

  bool operator==(const PronyTerm&) const = default;
};

/// k(t) = sum_i a_i exp(-b_i t) with a_i > 0, b_i >= 0, at least one term.
///
/// Terms are kept sorted by ascending rate (stable, so ties keep input order).
/// Immutable after construction.
class PronySeries {
 public:
  /// Throws ValidationError if the list is empty or any term breaks the sign
  /// constraints; the message names the 1-based term index.
  explicit PronySeries(std::vector<PronyTerm> terms);

  /// Throws DomainError for t < 0. At t == 0 returns the weight sum exactly.
  double operator()(double t) const;

  std::span<const PronyTerm> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  double weight_sum() const noexcept;

  bool operator==(const PronySeries&) const = default;

 private:
  std::vector<PronyTerm> terms_;
};

double prony_eval(const PronySeries& kernel, double t);

/// exp(-t^beta), 0 < beta < 1.
struct StretchedExponential {
  double beta;
};

/// a exp(-b t), a > 0, b > 0.
struct SingleExponential {
  double weight;
  double rate;
};

class AnalyticKernel {
 public:
  using Variant = std::variant<StretchedExponential, SingleExponential>;

  /// Throws ValidationError on parameters outside the documented ranges.
  explicit AnalyticKernel(Variant kind);

  static AnalyticKernel stretched(double beta) { return AnalyticKernel(StretchedExponential{beta}); }
  static AnalyticKernel single(double weight, double rate) {
    return AnalyticKernel(SingleExponential{weight, rate});
  }

  /// Throws DomainError for t < 0.
  double operator()(double t) const;

  const Variant& kind() const noexcept { return kind_; }

 private:
  Variant kind_;
};

double analytic_eval(const AnalyticKernel& kernel, double t);

struct TimeWindow {
  double t_min;
  double t_max;
};

/// `count` log-spaced points covering [t_min, t_max] inclusive.
/// Throws DomainError unless 0 < t_min < t_max and count >= 2.
std::vector<double> geometric_samples(TimeWindow window, int count);

struct KernelErrorReport {
  std::vector<double> times;
  std::vector<double> errors;  // approximation - reference
  double sup_norm = 0.0;
};

using KernelFunction = std::function<double(double)>;

/// Pointwise approximation - reference on a geometric grid over `window`.
KernelErrorReport kernel_error(const KernelFunction& approximation, const KernelFunction& reference,
                               TimeWindow window, int samples);

/// Prony series measured against the analytic kernel it approximates.
KernelErrorReport kernel_sup_error(const AnalyticKernel& analytic, const PronySeries& prony,
                                   TimeWindow window, int samples);

struct PositivityViolation {
  double t;
  std::string condition;  // "k >= 0", "k' <= 0" or "k'' >= 0"
  double value;
};

struct PositivityReport {
  bool positive_type = true;
  std::optional<PositivityViolation> violation;
};

/// Termwise sufficient condition a_i > 0, b_i >= 0; holds for every t analytically.
PositivityReport check_positive_type(const PronySeries& kernel);

/// Samples k >= 0, k' <= 0, k'' >= 0 on a geometric grid, derivatives by
/// centered differences of the analytic evaluation.
PositivityReport check_positive_type(const AnalyticKernel& kernel, TimeWindow window = {1e-3, 10.0},
                                     int samples = 200);

/// The tabulated stretched-exponent values: 3/7, 1/2, 3/5.
std::span<const double> builtin_prony_betas();

/// 12-term fit of exp(-t^beta) for a tabulated beta (matched to 1e-9).
/// Throws NotFoundError listing the supported values otherwise.
PronySeries load_builtin_prony(double beta);

/// Two-column "a,b" CSV. Optional "a,b" header, '#' comments and blank lines
/// are skipped. Throws FormatError (with line) on malformed rows and
/// ValidationError naming the row on sign violations.
PronySeries parse_prony_csv(std::istream& in);
PronySeries prony_from_file(const std::filesystem::path& path);

void write_prony_csv(std::ostream& out, const PronySeries& kernel);

}  // namespace memstep
