#include "memstep/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "memstep/errors.hpp"
#include "memstep/io.hpp"

namespace memstep {

namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0)) {
    std::ostringstream msg;
    msg << "kernel evaluated at t = " << t << ", expected t >= 0";
    throw DomainError(msg.str());
  }
}

std::string describe_term(std::size_t index, const PronyTerm& term) {
  std::ostringstream msg;
  msg << "term " << index + 1 << " (a = " << term.weight << ", b = " << term.rate << ")";
  return msg.str();
}

}  // namespace

PronySeries::PronySeries(std::vector<PronyTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("Prony series needs at least one term");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& term = terms_[i];
    if (!std::isfinite(term.weight) || !(term.weight > 0.0))
      throw ValidationError(describe_term(i, term) + ": weight a must be > 0");
    if (!std::isfinite(term.rate) || !(term.rate >= 0.0))
      throw ValidationError(describe_term(i, term) + ": rate b must be >= 0");
  }
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const PronyTerm& l, const PronyTerm& r) { return l.rate < r.rate; });
}

double PronySeries::operator()(double t) const {
  require_nonnegative_time(t);
  if (t == 0.0) return weight_sum();
  double sum = 0.0;
  for (const auto& term : terms_) sum += term.weight * std::exp(-term.rate * t);
  return sum;
}

double PronySeries::weight_sum() const noexcept {
  double sum = 0.0;
  for (const auto& term : terms_) sum += term.weight;
  return sum;
}

double prony_eval(const PronySeries& kernel, double t) { return kernel(t); }

AnalyticKernel::AnalyticKernel(Variant kind) : kind_(kind) {
  if (const auto* s = std::get_if<StretchedExponential>(&kind_)) {
    if (!(s->beta > 0.0 && s->beta < 1.0))
      throw ValidationError("stretched exponential needs 0 < beta < 1");
  } else {
    const auto& e = std::get<SingleExponential>(kind_);
    if (!(e.weight > 0.0) || !(e.rate > 0.0) || !std::isfinite(e.weight) || !std::isfinite(e.rate))
      throw ValidationError("single exponential needs a > 0 and b > 0");
  }
}

double AnalyticKernel::operator()(double t) const {
  require_nonnegative_time(t);
  if (const auto* s = std::get_if<StretchedExponential>(&kind_)) return std::exp(-std::pow(t, s->beta));
  const auto& e = std::get<SingleExponential>(kind_);
  return e.weight * std::exp(-e.rate * t);
}

double analytic_eval(const AnalyticKernel& kernel, double t) { return kernel(t); }

std::vector<double> geometric_samples(TimeWindow window, int count) {
  if (!(window.t_min > 0.0) || !(window.t_max > window.t_min) || !std::isfinite(window.t_max))
    throw DomainError("sample window needs 0 < t_min < t_max");
  if (count < 2) throw DomainError("sample window needs at least 2 samples");
  std::vector<double> times(static_cast<std::size_t>(count));
  const double log_min = std::log(window.t_min);
  const double log_span = std::log(window.t_max) - log_min;
  for (int j = 0; j < count; ++j)
    times[j] = std::exp(log_min + log_span * static_cast<double>(j) / (count - 1));
  times.front() = window.t_min;
  times.back() = window.t_max;
  return times;
}

KernelErrorReport kernel_error(const KernelFunction& approximation, const KernelFunction& reference,
                               TimeWindow window, int samples) {
  KernelErrorReport report;
  report.times = geometric_samples(window, samples);
  report.errors.reserve(report.times.size());
  for (double t : report.times) {
    const double e = approximation(t) - reference(t);
    report.errors.push_back(e);
    report.sup_norm = std::max(report.sup_norm, std::abs(e));
  }
  return report;
}

KernelErrorReport kernel_sup_error(const AnalyticKernel& analytic, const PronySeries& prony,
                                   TimeWindow window, int samples) {
  return kernel_error([&](double t) { return prony(t); }, [&](double t) { return analytic(t); }, window,
                      samples);
}

PositivityReport check_positive_type(const PronySeries& kernel) {
  PositivityReport report;
  for (const auto& term : kernel.terms()) {
    if (!(term.weight > 0.0)) {
      report.positive_type = false;
      report.violation = PositivityViolation{0.0, "a_i > 0", term.weight};
      break;
    }
    if (!(term.rate >= 0.0)) {
      report.positive_type = false;
      report.violation = PositivityViolation{0.0, "b_i >= 0", term.rate};
      break;
    }
  }
  return report;
}

PositivityReport check_positive_type(const AnalyticKernel& kernel, TimeWindow window, int samples) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  PositivityReport report;
  for (double t : geometric_samples(window, samples)) {
    const double h = 1e-3 * t;
    const double k0 = kernel(t);
    const double km = kernel(t - h);
    const double kp = kernel(t + h);
    const double d1 = (kp - km) / (2.0 * h);
    const double d2 = (kp - 2.0 * k0 + km) / (h * h);
    // Rounding floor of the difference quotients.
    const double slack1 = 64.0 * eps * std::abs(k0) / h;
    const double slack2 = 64.0 * eps * std::abs(k0) / (h * h);
    std::optional<PositivityViolation> v;
    if (k0 < 0.0)
      v = PositivityViolation{t, "k >= 0", k0};
    else if (d1 > slack1)
      v = PositivityViolation{t, "k' <= 0", d1};
    else if (d2 < -slack2)
      v = PositivityViolation{t, "k'' >= 0", d2};
    if (v) {
      report.positive_type = false;
      report.violation = v;
      break;
    }
  }
  return report;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view text, int line, const char* name) {
  text = trim(text);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  // from_chars rejects a leading '+', accept it for hand-written files.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    std::ostringstream msg;
    msg << "line " << line << ": cannot parse " << name << " from '" << text << "'";
    throw FormatError(msg.str(), line);
  }
  return value;
}

}  // namespace

PronySeries parse_prony_csv(std::istream& in) {
  std::vector<PronyTerm> terms;
  std::string raw;
  int line = 0;
  bool seen_row = false;
  while (std::getline(in, raw)) {
    ++line;
    if (line == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (!seen_row && terms.empty() && text == "a,b") {
      seen_row = true;
      continue;
    }
    seen_row = true;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      std::ostringstream msg;
      msg << "line " << line << ": expected two comma-separated fields 'a,b'";
      throw FormatError(msg.str(), line);
    }
    const PronyTerm term{parse_field(text.substr(0, comma), line, "a"),
                         parse_field(text.substr(comma + 1), line, "b")};
    if (!(term.weight > 0.0) || !std::isfinite(term.weight) || !(term.rate >= 0.0) ||
        !std::isfinite(term.rate)) {
      std::ostringstream msg;
      msg << "row " << terms.size() + 1 << " (line " << line << "): a = " << term.weight
          << ", b = " << term.rate << " violates a > 0, b >= 0";
      throw ValidationError(msg.str());
    }
    terms.push_back(term);
  }
  if (terms.empty()) throw FormatError("no coefficient rows found", 0);
  return PronySeries(std::move(terms));
}

PronySeries prony_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open kernel file " + path.string());
  return parse_prony_csv(in);
}

void write_prony_csv(std::ostream& out, const PronySeries& kernel) {
  out << "a,b\n";
  for (const auto& term : kernel.terms()) out << format_double(term.weight) << ',' << format_double(term.rate) << '\n';
}

}  // namespace memstep
