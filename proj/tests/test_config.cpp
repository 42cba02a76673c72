#include "omsim/config.hpp"

#include "test_support.hpp"

#include "catch_amalgamated.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace omsim;
using nlohmann::json;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;

json reference_json() {
    return json{{"omega", {1.0, 1.0}},  {"G", {0.2, 0.2}},     {"gamma", {1e-5, 1e-5}},
                {"nbar", {100.0, 100.0}}, {"chi", {0.1}},      {"theta", {pi / 2}},
                {"Delta", 1.0},          {"kappa", 0.2}};
}

// RAII temp file holding a given payload
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents, const char* tag = "cfg") {
        path = std::string("/tmp/omsim_test_") + tag + "_" +
               std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".json";
        std::ofstream(path) << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("system config parses into validated parameters", "[config]") {
    const SystemConfig cfg = parse_system_config(reference_json());
    const TwoModeParams ref = test::reference_two_mode();
    CHECK(cfg.params.omega == std::vector<double>{ref.omega1, ref.omega2});
    CHECK(cfg.params.G == std::vector<double>{ref.G1, ref.G2});
    CHECK(cfg.params.chi == std::vector<double>{ref.chi});
    CHECK(cfg.params.Theta == std::vector<double>{ref.Theta});
    CHECK(cfg.params.Delta == ref.Delta);
    CHECK(cfg.params.kappa == ref.kappa);
    CHECK_FALSE(cfg.omega_m_hz.has_value());

    json with_si = reference_json();
    with_si["omega_m_hz"] = 2.0e6;
    CHECK(parse_system_config(with_si).omega_m_hz == 2.0e6);

    SECTION("chi and theta default to uncoupled") {
        json j = reference_json();
        j.erase("chi");
        j.erase("theta");
        const SystemConfig c = parse_system_config(j);
        CHECK(c.params.chi == std::vector<double>{0.0});
        CHECK(c.params.Theta == std::vector<double>{0.0});
    }

    SECTION("three modes need two link entries") {
        json j{{"omega", {1.0, 1.0, 1.0}}, {"G", {0.2, 0.2, 0.2}},
               {"gamma", {1e-5, 1e-5, 1e-5}}, {"nbar", {10.0, 10.0, 10.0}},
               {"chi", {0.1, 0.1}}, {"theta", {pi, 0.0}},
               {"Delta", 1.0}, {"kappa", 0.2}};
        const SystemConfig c = parse_system_config(j);
        CHECK(c.params.modes() == 3);
        CHECK(c.params.Theta == std::vector<double>{pi, 0.0});
    }
}

TEST_CASE("phases are folded into the principal interval on load", "[config]") {
    json j = reference_json();
    j["theta"] = {-pi / 2};
    const SystemConfig c = parse_system_config(j);
    REQUIRE_THAT(c.params.Theta[0], WithinAbs(3 * pi / 2, 1e-12));

    j["theta"] = {5 * kTwoPi};
    CHECK_THAT(parse_system_config(j).params.Theta[0], WithinAbs(0.0, 1e-9));
}

TEST_CASE("schema violations are reported by field name", "[config]") {
    json j = reference_json();
    j["flux"] = 1.0;
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("unknown field 'flux'")));

    j = reference_json();
    j.erase("kappa");
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("kappa")));

    j = reference_json();
    j["G"] = {0.2, 0.2, 0.2};
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("'G'") &&
                                        ContainsSubstring("2 entries, got 3")));

    j = reference_json();
    j["chi"] = {0.1, 0.1};
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("'chi'") &&
                                        ContainsSubstring("1 entries")));

    j = reference_json();
    j["omega"] = {1.0};
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("at least 2")));

    j = reference_json();
    j["Delta"] = "resonant";
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("'Delta'") &&
                                        ContainsSubstring("number")));

    j = reference_json();
    j["nbar"] = 100.0;  // scalar where an array is required
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("'nbar'") &&
                                        ContainsSubstring("array")));

    j = reference_json();
    j["omega_m_hz"] = -5.0;
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("omega_m_hz")));

    CHECK_THROWS_AS(parse_system_config(json::array()), ConfigError);
}

TEST_CASE("physics validation failures surface as config errors", "[config]") {
    json j = reference_json();
    j["gamma"] = {-1e-5, 1e-5};
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("gamma")));

    j = reference_json();
    j["kappa"] = 0.0;
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("kappa")));

    j = reference_json();
    j["nbar"] = {100.0, -1.0};
    CHECK_THROWS_MATCHES(parse_system_config(j), ConfigError,
                         MessageMatches(ContainsSubstring("nbar")));
}

TEST_CASE("sweep specs parse and validate eagerly", "[config]") {
    json spec{{"base", reference_json()},
              {"axes", {{{"param", "Delta"}, {"start", 0.4}, {"stop", 1.6}, {"count", 9}}}},
              {"outputs", {"E_N", "stability_margin"}}};
    const SweepSpec s = parse_sweep_spec(spec);
    REQUIRE(s.axes.size() == 1);
    CHECK(s.axes[0].param == "Delta");
    CHECK(s.axes[0].count == 9);
    CHECK_FALSE(s.axes[0].log_scale);
    CHECK(s.outputs == std::vector<std::string>{"E_N", "stability_margin"});

    spec["axes"][0]["scale"] = "log";
    CHECK(parse_sweep_spec(spec).axes[0].log_scale);

    SECTION("axis errors are caught before any sweep runs") {
        json bad = spec;
        bad["axes"][0]["scale"] = "cubic";
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("scale")));

        bad = spec;
        bad["axes"][0] = {{"param", "nbar"}, {"start", 0.0}, {"stop", 10.0},
                          {"count", 5}, {"scale", "log"}};
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("log")));

        bad = spec;
        bad["axes"][0]["param"] = "twist";
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("twist")));

        bad = spec;
        bad["axes"][0]["count"] = 2.5;
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("count")));

        bad = spec;
        bad["axes"] = json::array();
        CHECK_THROWS_AS(parse_sweep_spec(bad), ConfigError);

        bad = spec;
        bad["axes"].push_back(bad["axes"][0]);
        bad["axes"].push_back(bad["axes"][0]);
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("1 or 2")));
    }

    SECTION("output tokens are checked against the base system") {
        json bad = spec;
        bad["outputs"] = {"E_N_7"};
        CHECK_THROWS_AS(parse_sweep_spec(bad), ConfigError);
        bad["outputs"] = json::array();
        CHECK_THROWS_AS(parse_sweep_spec(bad), ConfigError);
        bad["outputs"] = {"E_N", 3};
        CHECK_THROWS_AS(parse_sweep_spec(bad), ConfigError);
    }

    SECTION("missing or extra top-level keys") {
        json bad = spec;
        bad.erase("base");
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("base")));
        bad = spec;
        bad["comment"] = "hi";
        CHECK_THROWS_MATCHES(parse_sweep_spec(bad), ConfigError,
                             MessageMatches(ContainsSubstring("comment")));
    }
}

TEST_CASE("json files load with actionable errors", "[config]") {
    const TempFile good(reference_json().dump(), "good");
    const SystemConfig cfg = parse_system_config(load_json_file(good.path));
    CHECK(cfg.params.modes() == 2);

    const TempFile broken("{ \"omega\": [1.0,", "broken");
    CHECK_THROWS_MATCHES(load_json_file(broken.path), ConfigError,
                         MessageMatches(ContainsSubstring("parse")));

    CHECK_THROWS_MATCHES(load_json_file("/tmp/omsim_nonexistent_98341.json"), ConfigError,
                         MessageMatches(ContainsSubstring("cannot open")));
}

TEST_CASE("numbers are printed round-trippably and compactly", "[config]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(-1.5e-9) == "-1.5e-09");
    CHECK(format_double(0.0) == "0");
    // 12 significant digits reproduce doubles to ~1e-12 relative
    const double x = 0.134023917;
    CHECK_THAT(std::stod(format_double(x)), WithinAbs(x, 1e-12));
}

TEST_CASE("stability and entanglement reports serialize completely", "[config]") {
    const NetworkParams p = to_network(test::reference_two_mode());

    const json js = to_json(assess_stability(build_drift_network(p)));
    REQUIRE(js.contains("stable"));
    CHECK(js.at("stable").get<bool>());
    CHECK(js.at("margin").get<double>() < 0.0);
    REQUIRE(js.at("spectrum").is_array());
    CHECK(js.at("spectrum").size() == 6);
    CHECK(js.at("spectrum")[0].contains("re"));
    CHECK(js.at("spectrum")[0].contains("im"));

    const json je = to_json(steady_state_entanglement(p));
    REQUIRE(je.at("E_N").is_array());
    CHECK(je.at("E_N").size() == 2);
    CHECK(je.at("E_N")[0].get<double>() > 0.0);
    REQUIRE(je.contains("E_tau"));
    CHECK(je.at("residuals").contains("d1"));
    CHECK(je.at("residuals").contains("d2"));
    CHECK(je.at("residuals").contains("c"));
    CHECK(je.at("monogamy_ok").get<bool>());

    // three modes: no tripartite block
    const json j3 = to_json(steady_state_entanglement(test::reference_network(3, std::numbers::pi)));
    CHECK(j3.at("E_N").size() == 3);
    CHECK_FALSE(j3.contains("E_tau"));
}

TEST_CASE("mode reports carry couplings, magnitudes, and the verdict", "[config]") {
    TwoModeParams p = test::reference_two_mode();

    json j = to_json(tilde_modes(p), dark_mode_present(to_network(p)));
    CHECK(j.at("verdict") == "DMB");
    CHECK_FALSE(j.at("dark_mode_present").get<bool>());
    CHECK_FALSE(j.at("degenerate_fallback").get<bool>());
    REQUIRE(j.at("coupling_magnitudes").is_array());
    CHECK(j.at("coupling_magnitudes")[0].get<double>() > 0.0);
    CHECK(j.at("coupling_magnitudes")[1].get<double>() > 0.0);
    REQUIRE(j.at("frequencies").is_array());
    // tilde order is (plus, minus), pairing frequencies with the couplings above
    CHECK(j.at("frequencies")[0].get<double>() > j.at("frequencies")[1].get<double>());

    p.Theta = 0.0;
    j = to_json(tilde_modes(p), dark_mode_present(to_network(p)));
    CHECK(j.at("verdict") == "DMU");
    CHECK(j.at("dark_mode_present").get<bool>());
    CHECK_THAT(j.at("coupling_magnitudes")[1].get<double>(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("threshold results serialize with their prescan table", "[config]") {
    ThresholdResult res;
    res.threshold = 0.45;
    res.prescan_params = {0.1, 0.2, 0.3};
    res.prescan_values = {0.5, 0.2, 0.0};
    const json j = to_json(res, "nbar", "E_N_1");
    CHECK(j.at("param") == "nbar");
    CHECK(j.at("target") == "E_N_1");
    CHECK(j.at("threshold") == 0.45);
    CHECK(j.at("prescan").at("params").size() == 3);
    CHECK(j.at("prescan").at("values")[2] == 0.0);
}

TEST_CASE("csv output has a header, one line per point, and empty failed cells", "[config]") {
    SweepResult r;
    r.columns = {"Delta", "E_N_1", "stable"};
    r.rows = {{0.4, 0.05, 1.0}, {0.8, std::nullopt, 0.0}, {1.2, 0.125, 1.0}};

    std::ostringstream out;
    write_csv(r, out);
    CHECK(out.str() ==
          "Delta,E_N_1,stable\n"
          "0.4,0.05,1\n"
          "0.8,,0\n"
          "1.2,0.125,1\n");
}

TEST_CASE("csv bytes are identical across reruns and thread counts", "[config]") {
    SweepSpec spec;
    spec.base = to_network(test::reference_two_mode());
    spec.axes = {{"Delta", 0.5, 1.5, 11, false}};
    spec.outputs = {"E_N", "E_tau"};

    const auto render = [&spec](int threads) {
        std::ostringstream out;
        write_csv(run_sweep(spec, threads), out);
        return out.str();
    };
    const std::string once = render(1);
    CHECK(once == render(1));
    CHECK(once == render(4));
    CHECK(once.substr(0, once.find('\n')) == "Delta,E_N_1,E_N_2,E_tau,stable");
}
