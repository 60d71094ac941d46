#include "apx/cli_run.hpp"

#include <cstdio>
#include <filesystem>

#include "apx/errors.hpp"
#include "apx/json_io.hpp"

namespace apx {

namespace {

void run_spectrum(const RunConfig& rc) {
    TrigPolynomial p = trig_polynomial_from_json(load_json_file(rc.input));
    auto spec = spectrum(p);
    std::FILE* f = std::fopen(rc.out.c_str(), "wb");
    if (!f) throw InputError("cannot open " + rc.out);
    std::fprintf(f, "frequency");
    for (int c = 0; c < p.dim; ++c) std::fprintf(f, ",re_%d,im_%d", c + 1, c + 1);
    std::fprintf(f, "\n");
    for (const auto& [freq, coeff] : spec) {
        std::fprintf(f, "%.17g", freq.value(p.basis));
        for (const auto& c : coeff.components)
            std::fprintf(f, ",%.17g,%.17g", c.real(), c.imag());
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void run_kernel(const RunConfig& rc) {
    KernelSpec spec = kernel_spec_from_json(load_json_file(rc.input));
    TrigPolynomial K = build_kernel(spec);
    std::FILE* f = std::fopen(rc.out.c_str(), "wb");
    if (!f) throw InputError("cannot open " + rc.out);
    std::fprintf(f, "frequency,coefficient\n");
    for (const auto& [freq, coeff] : spectrum(K))
        std::fprintf(f, "%.17g,%.17g\n", freq.value(K.basis),
                     coeff.components[0].real());
    std::fclose(f);
}

void run_extend(const RunConfig& rc) {
    Json j = load_json_file(rc.input);
    BoundaryPair bp{trig_polynomial_from_json(j.at("f1")),
                    trig_polynomial_from_json(j.at("f2"))};
    QuadraturePlan plan;
    Json grid = Json::object();
    if (!rc.config.empty()) {
        Json cj = load_json_file(rc.config);
        plan = quadrature_plan_from_json(cj);
        if (cj.contains("grid")) grid = cj.at("grid");
    }
    double x0 = grid.value("x0", -3.0), x1 = grid.value("x1", 3.0);
    double y0 = grid.value("y0", 0.1), y1 = grid.value("y1", 3.0);
    double h = grid.value("h", 0.1);
    int nx = static_cast<int>(std::floor((x1 - x0) / h)) + 1;
    int ny = static_cast<int>(std::floor((y1 - y0) / h)) + 1;
    auto field = GridField::cartesian(x0, y0, h, nx, ny, bp.dim());
    field.sample([&](Complex z) { return poisson_extend_strip(bp, z, plan); });
    write_csv(field, rc.out);
}

int run_sap_verify(const RunConfig& rc) {
    Json j = load_json_file(rc.input);
    SAPFunction f = sap_function_from_json(j.at("sap"));
    double z0 = j.at("z0").get<double>();
    double eps = j.contains("epsilon") ? j.at("epsilon").get<double>() : rc.epsilon;
    APProfile cand = profile_from_json(j.at("candidate"));
    VerifyReport rep = verify_sap(f, z0, eps, cand);
    Json out = to_json(rep);
    out["epsilon"] = eps;
    out["z0"] = z0;
    if (!rc.out.empty()) write_json_file(out, rc.out);
    std::printf("%s\n", out.dump(2).c_str());
    return rep.pass ? 0 : 2;
}

void dump_fields(const std::map<std::string, GridField>& fields,
                 const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, field] : fields)
        write_csv(field, dir + "/" + name + ".csv");
}

int run_pipeline(const RunConfig& rc) {
    PipelineInput in = pipeline_input_from_json(load_json_file(rc.input));
    if (!rc.singular.empty()) {
        Json sj = load_json_file(rc.singular);
        SingularSet declared;
        for (const auto& a : sj.at("angles")) declared.angles.push_back(a.get<double>());
        declared.canonicalize();
        if (declared.angles != in.singular.angles)
            throw InputError("singular set file does not match the input function");
    }
    GlueConfig cfg;
    if (!rc.config.empty()) cfg = glue_config_from_json(load_json_file(rc.config));
    auto result = approximate(in, rc.epsilon, cfg);
    Json rep = to_json(result.report);
    rep["config"] = to_json(cfg);
    rep["seed"] = rc.seed;
    if (!rc.out.empty()) write_json_file(rep, rc.out);
    std::printf("sup_error %.17g (C_hat %.17g)\n", result.report.sup_error,
                result.report.C_hat);
    if (!rc.fields_dir.empty()) dump_fields(result.fields, rc.fields_dir);
    return 0;
}

int run_tensor(const RunConfig& rc) {
    TensorFunction F = tensor_function_from_json(load_json_file(rc.input));
    GlueConfig cfg;
    if (!rc.config.empty()) cfg = glue_config_from_json(load_json_file(rc.config));
    auto result = tensor_approximate(F, rc.epsilon, cfg);
    Json rep = to_json(result.report);
    rep["config"] = to_json(cfg);
    rep["seed"] = rc.seed;
    if (!rc.out.empty()) write_json_file(rep, rc.out);
    std::printf("measured_error %.17g bound %.17g\n", result.report.measured_error,
                result.report.reported_bound);
    return result.report.measured_error <= result.report.reported_bound ? 0 : 2;
}

} // namespace

int run(const RunConfig& rc) {
    try {
        if (rc.command == "spectrum") {
            run_spectrum(rc);
            return 0;
        }
        if (rc.command == "kernel") {
            run_kernel(rc);
            return 0;
        }
        if (rc.command == "extend") {
            run_extend(rc);
            return 0;
        }
        if (rc.command == "sap-verify") return run_sap_verify(rc);
        if (rc.command == "pipeline") return run_pipeline(rc);
        if (rc.command == "tensor") return run_tensor(rc);
        std::fprintf(stderr, "unknown command: %s\n", rc.command.c_str());
        return 1;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const OutOfDomain& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const ProfileMismatch& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "verification failure: %s\n", e.what());
        return 2;
    }
}

} // namespace apx
