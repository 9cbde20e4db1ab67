#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "moment_forge/maass.hpp"

namespace mforge::maass {

namespace {

using nlohmann::json;

std::string url_encode(const std::string& s) {
  std::ostringstream out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out << c;
    } else {
      out << '%' << "0123456789ABCDEF"[c >> 4] << "0123456789ABCDEF"[c & 15];
    }
  }
  return out.str();
}

std::string number_text(const json& v, std::size_t offset, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return shortest_decimal(v.get<double>());
  throw FormatError(std::string(what) + " must be a number or decimal string", offset);
}

FetchResult fall_back(const std::string& label, std::size_t depth, const std::string& reason) {
  if (label != kBundledLabel) {
    throw IoError(reason + "; no bundled fixture for label '" + label + "' (bundled: " + std::string(kBundledLabel) + ")");
  }
  FetchResult r;
  r.form = load_form(bundled_fixture_path());
  if (depth > r.form.depth()) {
    std::ostringstream msg;
    msg << reason << "; bundled fixture has only " << r.form.depth() << " coefficients, " << depth << " requested";
    throw IoError(msg.str());
  }
  r.form.lambda.resize(depth);
  r.form.decimals.resize(depth);
  r.form.comments.push_back("offline fallback: copied from the bundled fixture (" + reason + ")");
  r.fell_back = true;
  r.notice = "offline fallback: " + reason + "; using bundled fixture " + bundled_fixture_path();
  return r;
}

}  // namespace

FetchConfig FetchConfig::from_environment() {
  FetchConfig c;
  if (const char* env = std::getenv("MOMENT_FORGE_OFFLINE"); env && std::string(env) == "1") c.offline = true;
  if (const char* env = std::getenv("MOMENT_FORGE_ENDPOINT"); env && *env) c.endpoint = env;
  return c;
}

MaassForm parse_remote_payload(std::string_view body, const std::string& label, std::size_t depth,
                               const std::string& provenance) {
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    // nlohmann counts bytes from 1.
    throw FormatError(std::string("malformed payload: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  const json* rec = &doc;
  if (doc.is_object() && doc.contains("data")) {
    const json& data = doc["data"];
    if (!data.is_array()) throw FormatError("payload 'data' is not an array", 0);
    if (data.empty()) throw NotFoundError("label '" + label + "' not found");
    rec = &data[0];
  }
  if (!rec->is_object()) throw FormatError("payload record is not an object", 0);
  if (!rec->contains("spectral_parameter") || !rec->contains("coefficients")) {
    throw FormatError("payload record lacks spectral_parameter or coefficients", 0);
  }
  const json& coeffs = (*rec)["coefficients"];
  if (!coeffs.is_array()) throw FormatError("payload coefficients is not an array", 0);
  if (coeffs.size() < depth) {
    std::ostringstream msg;
    msg << "remote record for '" << label << "' has only " << coeffs.size() << " coefficients, " << depth << " requested";
    throw IoError(msg.str());
  }
  // Re-serialize through the fixture grammar so remote data gets the same checks as files.
  MaassForm form;
  std::string parity;
  if (rec->contains("parity")) {
    parity = (*rec)["parity"].is_string() ? (*rec)["parity"].get<std::string>() : "";
  } else if (rec->contains("symmetry") && (*rec)["symmetry"].is_number_integer()) {
    parity = (*rec)["symmetry"].get<int>() == 0 ? "even" : "odd";
  }
  if (parity != "even" && parity != "odd") throw FormatError("payload lacks a parity (parity or symmetry field)", 0);
  int precision = kDefaultRemotePrecision;
  if (rec->contains("precision_digits") && (*rec)["precision_digits"].is_number_integer()) {
    precision = (*rec)["precision_digits"].get<int>();
  }
  std::ostringstream text;
  text << "# fetched label " << label << '\n';
  text << "spectral_parameter = " << number_text((*rec)["spectral_parameter"], 0, "spectral_parameter") << '\n';
  text << "precision_digits = " << precision << '\n';
  text << "source = " << provenance << '\n';
  text << "parity = " << parity << '\n';
  for (std::size_t i = 0; i < depth; ++i) text << (i + 1) << ',' << number_text(coeffs[i], 0, "coefficient") << '\n';
  return parse_fixture(text.str(), true);
}

FetchResult fetch_remote(const std::string& label, std::size_t depth, const FetchConfig& config) {
  if (depth == 0) throw UsageError("fetch depth N must be positive");
  if (label.empty()) throw UsageError("fetch needs a form label");
  if (config.offline) return fall_back(label, depth, "MOMENT_FORGE_OFFLINE=1");

  std::string path = config.path_template;
  const auto slot = path.find("{label}");
  if (slot == std::string::npos) throw UsageError("fetch path template lacks {label}");
  path.replace(slot, 7, url_encode(label));

  httplib::Client client(config.endpoint);
  client.set_connection_timeout(config.timeout_seconds, 0);
  client.set_read_timeout(config.timeout_seconds, 0);
  client.set_follow_location(true);
  const std::string url = config.endpoint + path;
  auto res = client.Get(path);
  if (!res) return fall_back(label, depth, "network failure fetching " + url + ": " + httplib::to_string(res.error()));
  if (res->status == 404) throw NotFoundError("label '" + label + "' not found at " + url);
  if (res->status != 200) {
    std::ostringstream msg;
    msg << "HTTP " << res->status << " from " << url;
    throw IoError(msg.str());
  }
  FetchResult r;
  r.url = url;
  r.form = parse_remote_payload(res->body, label, depth, "remote:" + url);
  return r;
}

}  // namespace mforge::maass
