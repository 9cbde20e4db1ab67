#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "moment_forge/maass.hpp"

using namespace mforge;
using namespace mforge::maass;

namespace {

const MaassForm& bundled() {
  static const MaassForm form = load_form(bundled_fixture_path());
  return form;
}

std::string small_fixture(std::size_t depth) {
  MaassForm f = bundled();
  f.lambda.resize(depth);
  f.decimals.resize(depth);
  f.comments.clear();
  return format_fixture(f);
}

std::string replace_line(const std::string& text, const std::string& from, const std::string& to) {
  const auto pos = text.find("\n" + from + "\n");
  REQUIRE(pos != std::string::npos);
  return text.substr(0, pos + 1) + to + text.substr(pos + 1 + from.size());
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mforge_test_" + std::to_string(::getpid()) + "_" + name);
}

// Serves a JSON record built from the bundled fixture, plus a few failure modes.
class FakeDatabase {
 public:
  FakeDatabase() {
    server_.Get("/api/forms", [](const httplib::Request& req, httplib::Response& res) {
      const std::string label = req.get_param_value("label");
      if (label == "broken") {
        res.set_content("{\"data\": [{\"spectral_parameter\": 13.7, \"coefficients\": [1, 2,, 3]}]}", "application/json");
        return;
      }
      if (label == "missing") {
        res.status = 404;
        return;
      }
      if (label == "empty") {
        res.set_content("{\"data\": []}", "application/json");
        return;
      }
      nlohmann::json rec;
      rec["spectral_parameter"] = bundled().spectral_text;
      rec["symmetry"] = 0;
      rec["precision_digits"] = bundled().precision_digits;
      nlohmann::json coeffs = nlohmann::json::array();
      for (std::size_t i = 0; i < 1200; ++i) coeffs.push_back(bundled().decimals[i]);
      rec["coefficients"] = coeffs;
      res.set_content(nlohmann::json{{"data", {rec}}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeDatabase() {
    server_.stop();
    thread_.join();
  }
  FetchConfig config() const {
    FetchConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    c.path_template = "/api/forms?label={label}";
    c.timeout_seconds = 5;
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("maass") {
  TEST_CASE("bundled fixture loads and passes Hecke validation") {
    const MaassForm& f = bundled();
    CHECK(f.depth() == 100000);
    CHECK(f.coefficient(1) == 1.0);
    CHECK(f.is_even());
    CHECK(f.spectral_parameter == doctest::Approx(13.779751351890738944).epsilon(1e-15));
    const HeckeReport r = hecke_report(f);
    CHECK(r.ok());
    CHECK(r.max_defect < f.tolerance());
    CHECK(r.multiplicative_defect < f.tolerance());
    CHECK(r.prime_recursion_defect < f.tolerance());
    CHECK(r.pairs_checked > 500000);
    // lambda(6) = lambda(2) lambda(3)
    CHECK(std::abs(f.coefficient(6) - f.coefficient(2) * f.coefficient(3)) < 1e-13);
    CHECK_THROWS_AS(f.coefficient(100001), DepthError);
  }

  TEST_CASE("normalization and Hecke violations are rejected") {
    const std::string text = small_fixture(200);
    const MaassForm ok = parse_fixture(text);
    CHECK(ok.depth() == 200);

    std::string bad = replace_line(text, "1," + ok.decimals[0], "1,0.9");
    CHECK_THROWS_WITH_AS(parse_fixture(bad), doctest::Contains("lambda(1) = 0.9"), ValidationError);

    // lambda(6) perturbed by 1e-2; pairs (1, n) are trivial so (2, 3) is the first to see it.
    const std::string perturbed = shortest_decimal(ok.lambda[5] + 1e-2);
    bad = replace_line(text, "6," + ok.decimals[5], "6," + perturbed);
    CHECK_THROWS_WITH_AS(parse_fixture(bad), doctest::Contains("(m, n) = (2, 3)"), ValidationError);
    // Without validation the data still parses.
    CHECK(parse_fixture(bad, false).lambda[5] == ok.lambda[5] + 1e-2);
  }

  TEST_CASE("structural errors name the problem and its byte offset") {
    const std::string text = small_fixture(20);
    const MaassForm ok = parse_fixture(text);
    const std::string line5 = "5," + ok.decimals[4];
    const std::string gap = replace_line(text, line5 + "\n6," + ok.decimals[5], "6," + ok.decimals[5]);
    try {
      parse_fixture(gap);
      FAIL("gap accepted");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("gap in n: expected 5, found 6") != std::string::npos);
      CHECK(e.byte_offset == text.find("\n" + line5 + "\n") + 1);
      CHECK(e.kind() == ErrorKind::io);
    }
    CHECK_THROWS_WITH_AS(parse_fixture("spectral_parameter = 1\nprecision_digits = 10\nsource = x\nparity = even\ncolour = red\n1,1\n"),
                         doctest::Contains("unknown header key 'colour'"), FormatError);
    CHECK_THROWS_WITH_AS(parse_fixture("spectral_parameter = 1\nprecision_digits = 10\nsource = x\n1,1\n"),
                         doctest::Contains("missing header key 'parity'"), FormatError);
    CHECK_THROWS_WITH_AS(parse_fixture("spectral_parameter = 1\nprecision_digits = 10\nsource = x\nparity = even\n1,inf\n"),
                         doctest::Contains("not a decimal"), FormatError);
    CHECK_THROWS_WITH_AS(parse_fixture("spectral_parameter = 1\nprecision_digits = 10\nsource = x\nparity = even\n1,1\nparity = odd\n"),
                         doctest::Contains("header line after"), FormatError);
    CHECK_THROWS_WITH_AS(parse_fixture("spectral_parameter = 1\nprecision_digits = 10\nsource = x\nparity = even\n1,1\n1,1\n"),
                         doctest::Contains("not strictly increasing"), FormatError);
    CHECK_THROWS_AS(load_form("/nonexistent/fixture.txt"), IoError);
  }

  TEST_CASE("fixture round trip is bit-exact") {
    const std::string text = small_fixture(5000);
    const MaassForm a = parse_fixture(text);
    const auto path = temp_path("roundtrip.txt");
    write_form(a, path.string());
    const MaassForm b = load_form(path.string());
    CHECK(b.decimals == a.decimals);
    CHECK(b.lambda == a.lambda);
    CHECK(b.spectral_text == a.spectral_text);
    CHECK(format_fixture(b) == text);
    std::filesystem::remove(path);

    // Forms built from doubles round-trip through the shortest decimal.
    MaassForm c = a;
    c.decimals.clear();
    c.spectral_text.clear();
    const MaassForm d = parse_fixture(format_fixture(c));
    CHECK(d.lambda == a.lambda);
    CHECK(d.spectral_parameter == a.spectral_parameter);
  }

  TEST_CASE("Rankin-Selberg profile") {
    const std::vector<double> xs = {10.0, 1000.0, 100000.0};
    const auto rows = rankin_selberg_profile(bundled(), xs);
    REQUIRE(rows.size() == 3);
    // Partial sums of the fixture decimals at 30 digits (mpmath).
    CHECK(rows[0].ratio == doctest::Approx(0.875071049073089826412617974419).epsilon(1e-13));
    CHECK(rows[1].ratio == doctest::Approx(0.699409737155005433998800753051).epsilon(1e-13));
    CHECK(rows[2].ratio == doctest::Approx(0.697850760972272801114696015908).epsilon(1e-12));
    for (const auto& r : rows) {
      CHECK(r.ratio > 0.1);
      CHECK(r.ratio < 5.0);
    }
    CHECK(rankin_selberg_profile(bundled(), std::vector<double>{}).empty());
    CHECK_THROWS_AS(rankin_selberg_profile(bundled(), std::vector<double>{200000.0}), UsageError);
  }

  TEST_CASE("Wilton profile") {
    const std::vector<double> alphas = {0.0, 0.5, 1.0 / 3.0};
    const std::vector<std::size_t> lengths = {10, 1000, 100000};
    const auto rows = wilton_profile(bundled(), alphas, lengths);
    REQUIRE(rows.size() == 9);
    // mpmath sums over the fixture decimals.
    const double expected[] = {1.4764510800939881245, 0.10407074522607816116, 0.0030439002891832960805,
                               1.0828386874382232892, 0.0077847651496565392108, 0.0036304904355827792862,
                               0.85875176691203103631, 0.12833063512573096891, 0.018561404209130475389};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CAPTURE(i);
      CHECK(std::abs(rows[i].normalized - expected[i]) < 1e-10);
      CHECK(rows[i].normalized <= 10.0);
    }
    const std::vector<std::size_t> one = {1};
    const auto unit = wilton_profile(bundled(), alphas, one);
    for (const auto& r : unit) CHECK(r.normalized == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<std::size_t> deep = {100001};
    CHECK_THROWS_AS(wilton_profile(bundled(), alphas, deep), UsageError);
  }

  TEST_CASE("remote fetch against a local server") {
    FakeDatabase db;
    const FetchConfig config = db.config();
    const FetchResult r = fetch_remote("first-even", 1000, config);
    CHECK_FALSE(r.fell_back);
    CHECK(r.form.depth() == 1000);
    CHECK(r.form.decimals[1] == bundled().decimals[1]);
    CHECK(r.form.spectral_text == bundled().spectral_text);
    CHECK(r.form.is_even());
    CHECK(r.form.source.find("remote:http://127.0.0.1") == 0);
    // Written fixture reloads cleanly.
    const auto path = temp_path("fetched.txt");
    write_form(r.form, path.string());
    CHECK(load_form(path.string()).decimals == r.form.decimals);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(fetch_remote("missing", 10, config), NotFoundError);
    CHECK_THROWS_AS(fetch_remote("empty", 10, config), NotFoundError);
    CHECK_THROWS_WITH_AS(fetch_remote("first-even", 5000, config), doctest::Contains("has only 1200 coefficients"), IoError);
    CHECK_THROWS_AS(fetch_remote("first-even", 0, config), UsageError);
    try {
      fetch_remote("broken", 10, config);
      FAIL("malformed payload accepted");
    } catch (const FormatError& e) {
      // the second comma of ",,"
      CHECK(e.byte_offset == 61);
    }
  }

  TEST_CASE("offline and network failure fall back to the bundled fixture") {
    FetchConfig offline;
    offline.offline = true;
    const FetchResult r = fetch_remote(std::string(kBundledLabel), 1000, offline);
    CHECK(r.fell_back);
    CHECK(r.notice.find("MOMENT_FORGE_OFFLINE=1") != std::string::npos);
    CHECK(r.form.depth() == 1000);
    CHECK_THROWS_WITH_AS(fetch_remote("some-other-form", 10, offline), doctest::Contains("no bundled fixture"), IoError);

    FetchConfig dead;
    dead.endpoint = "http://127.0.0.1:1";
    dead.timeout_seconds = 2;
    const FetchResult d = fetch_remote(std::string(kBundledLabel), 50, dead);
    CHECK(d.fell_back);
    CHECK(d.notice.find("network failure") != std::string::npos);

    ::setenv("MOMENT_FORGE_OFFLINE", "1", 1);
    CHECK(FetchConfig::from_environment().offline);
    ::unsetenv("MOMENT_FORGE_OFFLINE");
    CHECK_FALSE(FetchConfig::from_environment().offline);
  }
}
