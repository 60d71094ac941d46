#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "apx/cli_run.hpp"
#include "apx/json_io.hpp"

using namespace apx;

namespace {

const double kPi = 3.14159265358979323846;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("trig polynomial JSON round-trips with exact frequencies") {
    BasisSet b{{1.0, std::sqrt(2.0)}, {}};
    TrigPolynomial p(b, 2);
    p.add_term(VectorValue{{Complex(2.0, 0.0), Complex(0.0, -1.0)}},
               Frequency{{Rational(1, 3), Rational(-5, 7)}});
    p.add_term(VectorValue{{Complex(0.5), Complex(1.0)}}, Frequency::zero(2));
    auto j = to_json(p);
    auto q = trig_polynomial_from_json(j);
    REQUIRE(q.terms.size() == p.terms.size());
    for (size_t i = 0; i < p.terms.size(); ++i) {
        CHECK(q.terms[i].freq == p.terms[i].freq);  // exact rational equality
        CHECK((q.terms[i].coeff - p.terms[i].coeff).norm() == 0.0);
    }
    CHECK(j["terms"][1]["freq"][0].get<std::string>() == "1/3");
}

TEST_CASE("spectrum subcommand emits sorted CSV with echoed coefficients") {
    BasisSet b{{1.0, std::sqrt(2.0)}, {}};
    TrigPolynomial p(b, 1);
    p.add_term(VectorValue::scalar(2.0), Frequency::unit(2, 1));
    p.add_term(VectorValue::scalar(1.0), Frequency::unit(2, 0));
    write_json_file(to_json(p), "cli_poly.json");
    RunConfig rc;
    rc.command = "spectrum";
    rc.input = "cli_poly.json";
    rc.out = "cli_spectrum.csv";
    CHECK(run(rc) == 0);
    std::string csv = slurp("cli_spectrum.csv");
    CHECK(csv.find("frequency,re_1,im_1\n1,") != std::string::npos);
    CHECK(csv.find("\n1.4142135623730951,2,") != std::string::npos);
    std::remove("cli_poly.json");
    std::remove("cli_spectrum.csv");
}

TEST_CASE("kernel subcommand emits the expanded kernel") {
    KernelSpec spec{BasisSet{{1.0}, {}}, {1}, {2}};
    write_json_file(to_json(spec), "cli_kernel.json");
    RunConfig rc;
    rc.command = "kernel";
    rc.input = "cli_kernel.json";
    rc.out = "cli_kernel.csv";
    CHECK(run(rc) == 0);
    std::string csv = slurp("cli_kernel.csv");
    CHECK(csv.find("frequency,coefficient") != std::string::npos);
    CHECK(csv.find("\n0,1\n") != std::string::npos);   // unit mean
    CHECK(csv.find("\n1,0.5\n") != std::string::npos); // Fejer factor
    std::remove("cli_kernel.json");
    std::remove("cli_kernel.csv");
}

TEST_CASE("sap-verify: pass and designed failure exit codes") {
    GeneratorSpec gen{1.0, 0.0, kPi, Complex(0.0)};
    auto prof_x = generator_profile(gen, 0.0, 1.0);
    auto prof_y = generator_profile(gen, kPi, 1.0);
    Json sap;
    sap["singular"] = Json::array({0.0, kPi});
    sap["profiles"] = Json::array({to_json(prof_x), to_json(prof_y)});
    Json bg = to_json(gen);
    bg["type"] = "generator";
    sap["background"] = bg;
    sap["blend"] = Json::array({0.4, 0.4});

    Json input;
    input["sap"] = sap;
    input["z0"] = 0.0;
    input["epsilon"] = 1e-4;
    input["candidate"] = to_json(prof_x);
    write_json_file(input, "cli_verify.json");
    RunConfig rc;
    rc.command = "sap-verify";
    rc.input = "cli_verify.json";
    rc.out = "cli_verify_report.json";
    CHECK(run(rc) == 0);
    Json rep = load_json_file("cli_verify_report.json");
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("sup_error").get<double>() < 1e-4);

    // mismatched candidate: exit 2, pass = false
    APProfile zero = prof_x;
    TrigPolynomial zp(BasisSet{{1.0}, {}}, 1);
    zp.add_term(VectorValue::scalar(0.0), Frequency::zero(1));
    zero.h_plus = zp;
    zero.h_minus = zp;
    input["candidate"] = to_json(zero);
    input["epsilon"] = 0.1;
    write_json_file(input, "cli_verify.json");
    CHECK(run(rc) == 2);
    Json rep2 = load_json_file("cli_verify_report.json");
    CHECK(!rep2.at("pass").get<bool>());
    std::remove("cli_verify.json");
    std::remove("cli_verify_report.json");
}

TEST_CASE("pipeline subcommand: deterministic reports, config echo") {
    Json input;
    input["type"] = "poly";
    input["coeffs"] = Json::array({Json::array({0.25, 0.0}), Json::array({0.0, 0.5})});
    write_json_file(input, "cli_pipe.json");
    Json cfgj;
    cfgj["n_theta"] = 1024;
    cfgj["annulus_rows"] = 5;
    cfgj["radial_cells"] = 8;
    cfgj["core_rings"] = 4;
    write_json_file(cfgj, "cli_pipe_cfg.json");

    RunConfig rc;
    rc.command = "pipeline";
    rc.input = "cli_pipe.json";
    rc.config = "cli_pipe_cfg.json";
    rc.out = "cli_pipe_report.json";
    rc.epsilon = 0.1;
    CHECK(run(rc) == 0);
    std::string first = slurp("cli_pipe_report.json");
    CHECK(run(rc) == 0);
    CHECK(slurp("cli_pipe_report.json") == first);  // byte-identical reruns

    Json rep = load_json_file("cli_pipe_report.json");
    CHECK(rep.at("sup_error").get<double>() < 1e-6);
    CHECK(rep.at("config").at("n_theta").get<int>() == 1024);
    CHECK(rep.contains("stage_errors"));
    CHECK(rep.contains("constants"));
    CHECK(rep.at("constants").contains("C_hat"));
    std::remove("cli_pipe.json");
    std::remove("cli_pipe_cfg.json");
    std::remove("cli_pipe_report.json");
}

TEST_CASE("pipeline input errors exit 1") {
    spit("cli_bad.json", "{ not json");
    RunConfig rc;
    rc.command = "pipeline";
    rc.input = "cli_bad.json";
    CHECK(run(rc) == 1);
    rc.input = "cli_missing_file.json";
    CHECK(run(rc) == 1);
    std::remove("cli_bad.json");

    RunConfig unknown;
    unknown.command = "bogus";
    CHECK(run(unknown) == 1);
}

TEST_CASE("extend subcommand writes a field CSV") {
    BasisSet b{{1.0}, {}};
    TrigPolynomial f1(b, 1);
    f1.add_term(VectorValue::scalar(1.0), Frequency::unit(1, 0));
    TrigPolynomial f2(b, 1);
    f2.add_term(VectorValue::scalar(0.0), Frequency::zero(1));
    Json input;
    input["f1"] = to_json(f1);
    input["f2"] = to_json(f2);
    write_json_file(input, "cli_extend.json");
    Json cfg;
    cfg["step"] = 0.01;
    cfg["grid"] = Json{{"x0", 0.0}, {"x1", 0.5}, {"y0", 0.5}, {"y1", 1.0}, {"h", 0.25}};
    write_json_file(cfg, "cli_extend_cfg.json");
    RunConfig rc;
    rc.command = "extend";
    rc.input = "cli_extend.json";
    rc.config = "cli_extend_cfg.json";
    rc.out = "cli_extend.csv";
    CHECK(run(rc) == 0);
    std::string csv = slurp("cli_extend.csv");
    CHECK(csv.find("x,y,re_1,im_1") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 3x3 grid
    std::remove("cli_extend.json");
    std::remove("cli_extend_cfg.json");
    std::remove("cli_extend.csv");
}
