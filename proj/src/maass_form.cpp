#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "moment_forge/maass.hpp"
#include "moment_forge/numeric.hpp"

#ifndef MFORGE_DATA_DIR
#define MFORGE_DATA_DIR "data"
#endif

namespace mforge::maass {

namespace {

constexpr std::array<std::string_view, 4> kHeaderKeys = {"spectral_parameter", "precision_digits", "source", "parity"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// [+-]digits[.digits][(e|E)[+-]digits], or [+-].digits[...]
bool is_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

double parse_decimal(std::string_view s, std::size_t offset, const char* what) {
  if (!is_decimal(s)) throw FormatError(std::string(what) + " is not a decimal: '" + std::string(s) + "'", offset);
  // from_chars rejects a leading '+'.
  std::string_view body = s.front() == '+' ? s.substr(1) : s;
  double v = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(v)) {
    throw FormatError(std::string(what) + " is out of range: '" + std::string(s) + "'", offset);
  }
  return v;
}

std::string at(std::size_t line, std::size_t offset) {
  std::ostringstream s;
  s << " (line " << line << ", byte " << offset << ")";
  return s.str();
}

std::size_t divisor_count(std::size_t n) {
  std::size_t count = 1;
  for (std::size_t p = 2; p * p <= n; ++p) {
    std::size_t e = 0;
    while (n % p == 0) n /= p, ++e;
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

}  // namespace

double MaassForm::coefficient(std::size_t n) const {
  if (n == 0) throw UsageError("Hecke eigenvalues are indexed from n = 1");
  if (n > lambda.size()) {
    std::ostringstream msg;
    msg << "fixture depth " << lambda.size() << " is too shallow: lambda(" << n << ") requested";
    throw DepthError(msg.str(), static_cast<long long>(n));
  }
  return lambda[n - 1];
}

double MaassForm::tolerance() const { return std::pow(10.0, -(precision_digits - 2)); }

MaassForm parse_fixture(std::string_view text, bool validate) {
  MaassForm form;
  std::array<bool, kHeaderKeys.size()> seen{};
  bool in_records = false;
  std::size_t offset = 0, line_no = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(offset, end - offset);
    const std::string_view line = trim(raw);
    ++line_no;
    const std::size_t line_offset = offset;
    offset = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (in_records) continue;
      std::string_view c = line.substr(1);
      if (!c.empty() && c.front() == ' ') c.remove_prefix(1);
      form.comments.emplace_back(c);
      continue;
    }
    const std::size_t eq = line.find('=');
    const std::size_t comma = line.find(',');
    if (eq != std::string_view::npos && comma == std::string_view::npos) {
      if (in_records) throw FormatError("header line after coefficient records" + at(line_no, line_offset), line_offset);
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      auto it = std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key);
      if (it == kHeaderKeys.end()) {
        throw FormatError("unknown header key '" + std::string(key) + "'" + at(line_no, line_offset), line_offset);
      }
      const auto idx = static_cast<std::size_t>(it - kHeaderKeys.begin());
      if (seen[idx]) throw FormatError("duplicate header key '" + std::string(key) + "'" + at(line_no, line_offset), line_offset);
      seen[idx] = true;
      if (value.empty()) throw FormatError("empty value for '" + std::string(key) + "'" + at(line_no, line_offset), line_offset);
      if (key == "spectral_parameter") {
        form.spectral_parameter = parse_decimal(value, line_offset, "spectral_parameter");
        if (!(form.spectral_parameter > 0)) throw FormatError("spectral_parameter must be positive" + at(line_no, line_offset), line_offset);
        form.spectral_text = std::string(value);
      } else if (key == "precision_digits") {
        int p = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
        if (ec != std::errc() || ptr != value.data() + value.size() || p < 3 || p > 40) {
          throw FormatError("precision_digits must be an integer in [3, 40]" + at(line_no, line_offset), line_offset);
        }
        form.precision_digits = p;
      } else if (key == "source") {
        form.source = std::string(value);
      } else {
        if (value != "even" && value != "odd") throw FormatError("parity must be even or odd" + at(line_no, line_offset), line_offset);
        form.parity = std::string(value);
      }
      continue;
    }
    if (comma == std::string_view::npos) throw FormatError("expected 'key = value' or 'n,value'" + at(line_no, line_offset), line_offset);
    if (!in_records) {
      for (std::size_t k = 0; k < kHeaderKeys.size(); ++k) {
        if (!seen[k]) throw FormatError("missing header key '" + std::string(kHeaderKeys[k]) + "'" + at(line_no, line_offset), line_offset);
      }
      in_records = true;
    }
    const std::string_view n_text = trim(line.substr(0, comma));
    const std::string_view v_text = trim(line.substr(comma + 1));
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
    if (ec != std::errc() || ptr != n_text.data() + n_text.size() || n_text.empty()) {
      throw FormatError("record index is not a positive integer: '" + std::string(n_text) + "'" + at(line_no, line_offset), line_offset);
    }
    const std::size_t expected = form.lambda.size() + 1;
    if (n != expected) {
      std::ostringstream msg;
      if (n > expected) {
        msg << "gap in n: expected " << expected << ", found " << n;
      } else {
        msg << "n not strictly increasing: expected " << expected << ", found " << n;
      }
      throw FormatError(msg.str() + at(line_no, line_offset), line_offset);
    }
    form.lambda.push_back(parse_decimal(v_text, line_offset, "coefficient"));
    form.decimals.emplace_back(v_text);
  }
  if (!in_records) {
    for (std::size_t k = 0; k < kHeaderKeys.size(); ++k) {
      if (!seen[k]) throw FormatError("missing header key '" + std::string(kHeaderKeys[k]) + "'", text.size());
    }
    throw FormatError("fixture has no coefficient records", text.size());
  }
  if (validate) validate_hecke(form);
  return form;
}

MaassForm load_form(const std::string& path, bool validate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open fixture '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_fixture(buf.str(), validate);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what(), e.byte_offset);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string format_fixture(const MaassForm& form) {
  std::ostringstream out;
  for (const auto& c : form.comments) out << "# " << c << '\n';
  out << "spectral_parameter = " << (form.spectral_text.empty() ? shortest_decimal(form.spectral_parameter) : form.spectral_text)
      << '\n';
  out << "precision_digits = " << form.precision_digits << '\n';
  out << "source = " << form.source << '\n';
  out << "parity = " << form.parity << '\n';
  for (std::size_t i = 0; i < form.lambda.size(); ++i) {
    out << (i + 1) << ',' << (i < form.decimals.size() ? form.decimals[i] : shortest_decimal(form.lambda[i])) << '\n';
  }
  return out.str();
}

void write_form(const MaassForm& form, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write fixture '" + path + "'");
  out << format_fixture(form);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string shortest_decimal(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

HeckeReport hecke_report(const MaassForm& form) {
  HeckeReport r;
  r.tolerance = form.tolerance();
  const std::size_t N = form.depth();
  const auto& lam = form.lambda;
  auto L = [&](std::size_t n) { return lam[n - 1]; };
  r.lambda_one_defect = std::abs(L(1) - 1.0);
  for (std::size_t m = 1; m * m <= N; ++m) {
    for (std::size_t n = m; m * n <= N; ++n) {
      const std::size_t g = std::gcd(m, n);
      double rhs = 0.0;
      for (std::size_t d = 1; d <= g; ++d) {
        if (g % d == 0) rhs += L(m * n / (d * d));
      }
      const double defect = std::abs(L(m) * L(n) - rhs);
      ++r.pairs_checked;
      if (defect > r.max_defect) {
        r.max_defect = defect;
        r.worst_m = m;
        r.worst_n = n;
      }
      if (g == 1) r.multiplicative_defect = std::max(r.multiplicative_defect, defect);
      if (defect > r.tolerance && !r.first_violation) r.first_violation = {m, n};
    }
  }
  // Prime-power recursion, a subset of the pairs above reported on its own.
  std::vector<bool> composite(N + 1, false);
  for (std::size_t p = 2; p <= N; ++p) {
    if (composite[p]) continue;
    for (std::size_t k = p * p; k <= N; k += p) composite[k] = true;
    for (std::size_t pk = p; pk * p <= N; pk *= p) {
      const double defect = std::abs(L(p) * L(pk) - L(pk * p) - L(pk / p));
      r.prime_recursion_defect = std::max(r.prime_recursion_defect, defect);
    }
  }
  const double theta = 7.0 / 64.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double ratio = std::abs(L(n)) / (static_cast<double>(divisor_count(n)) * std::pow(static_cast<double>(n), theta));
    if (ratio > r.ramanujan_ratio) {
      r.ramanujan_ratio = ratio;
      r.ramanujan_worst_n = n;
    }
  }
  return r;
}

void validate_hecke(const MaassForm& form) {
  if (form.lambda.empty()) throw ValidationError("form has no coefficients");
  const double tol = form.tolerance();
  if (std::abs(form.lambda[0] - 1.0) > tol) {
    std::ostringstream msg;
    msg << "lambda(1) = " << form.decimals.at(0) << " violates the normalization lambda(1) = 1";
    throw ValidationError(msg.str());
  }
  const HeckeReport r = hecke_report(form);
  if (r.first_violation) {
    const auto [m, n] = *r.first_violation;
    std::ostringstream msg;
    msg << "Hecke relation fails at (m, n) = (" << m << ", " << n << "): worst defect " << r.max_defect << " at ("
        << r.worst_m << ", " << r.worst_n << "), tolerance " << tol;
    throw ValidationError(msg.str());
  }
}

std::string data_dir() {
  if (const char* env = std::getenv("MOMENT_FORGE_DATA"); env && *env) return env;
  return MFORGE_DATA_DIR;
}

std::string bundled_fixture_path() { return data_dir() + "/maass_sl2z_even_1.txt"; }

std::vector<RankinSelbergRow> rankin_selberg_profile(const MaassForm& form, std::span<const double> xs) {
  std::vector<RankinSelbergRow> rows;
  std::vector<double> prefix(form.depth() + 1, 0.0);
  for (std::size_t n = 1; n <= form.depth(); ++n) prefix[n] = prefix[n - 1] + form.lambda[n - 1] * form.lambda[n - 1];
  for (double x : xs) {
    if (!(x >= 1.0) || x > static_cast<double>(form.depth())) {
      std::ostringstream msg;
      msg << "Rankin-Selberg grid point " << x << " outside [1, " << form.depth() << "]";
      throw UsageError(msg.str());
    }
    rows.push_back({x, prefix[static_cast<std::size_t>(std::floor(x))] / x});
  }
  return rows;
}

std::vector<WiltonRow> wilton_profile(const MaassForm& form, std::span<const double> alphas,
                                      std::span<const std::size_t> lengths) {
  for (std::size_t n : lengths) {
    if (n < 1 || n > form.depth()) {
      std::ostringstream msg;
      msg << "Wilton length " << n << " outside [1, " << form.depth() << "]";
      throw UsageError(msg.str());
    }
  }
  std::vector<WiltonRow> rows;
  for (double alpha : alphas) {
    // e(alpha m) depends only on the fractional part of alpha.
    const double frac = alpha - std::floor(alpha);
    std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
    std::sort(sorted.begin(), sorted.end());
    Complex acc = 0.0;
    std::size_t m = 0;
    std::vector<std::pair<std::size_t, double>> values;
    for (std::size_t target : sorted) {
      while (m < target) {
        ++m;
        const double turns = std::fmod(frac * static_cast<double>(m), 1.0);
        acc += form.lambda[m - 1] * e_turn(turns);
      }
      values.emplace_back(target, std::abs(acc) / std::pow(static_cast<double>(target), 0.6));
    }
    for (std::size_t n : lengths) {
      auto it = std::find_if(values.begin(), values.end(), [n](const auto& v) { return v.first == n; });
      rows.push_back({alpha, n, it->second});
    }
  }
  return rows;
}

}  // namespace mforge::maass
