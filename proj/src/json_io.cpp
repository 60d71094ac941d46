#include "apx/json_io.hpp"

#include <fstream>

#include "apx/errors.hpp"

namespace apx {

namespace {

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InputError("expected [re, im] pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

Json vector_value_to_json(const VectorValue& v) {
    Json out = Json::array();
    for (const auto& c : v.components) out.push_back(complex_to_json(c));
    return out;
}

VectorValue vector_value_from_json(const Json& j) {
    VectorValue v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v.components[i] = complex_from_json(j[i]);
    return v;
}

DiskPoly poly_from_json(const Json& j) {
    DiskPoly p;
    for (const auto& c : j.at("coeffs"))
        p.coeffs.push_back(c.is_array() && !c.empty() && c[0].is_array()
                               ? vector_value_from_json(c)
                               : VectorValue::scalar(complex_from_json(c)));
    return p;
}

} // namespace

Json to_json(const TrigPolynomial& p) {
    Json j;
    j["basis"] = p.basis.betas;
    Json terms = Json::array();
    for (const auto& t : p.terms) {
        Json term;
        term["coeff"] = vector_value_to_json(t.coeff);
        Json freq = Json::array();
        for (const auto& c : t.freq.coords) freq.push_back(c.str());
        term["freq"] = freq;
        terms.push_back(term);
    }
    j["terms"] = terms;
    j["dim"] = p.dim;
    return j;
}

TrigPolynomial trig_polynomial_from_json(const Json& j) {
    BasisSet basis;
    for (const auto& b : j.at("basis")) basis.betas.push_back(b.get<double>());
    int dim = j.value("dim", 0);
    TrigPolynomial p(basis, dim > 0 ? dim : 1);
    bool dim_known = dim > 0;
    for (const auto& term : j.at("terms")) {
        VectorValue coeff = vector_value_from_json(term.at("coeff"));
        if (!dim_known) {
            p.dim = coeff.dim();
            dim_known = true;
        }
        Frequency f;
        for (const auto& c : term.at("freq"))
            f.coords.push_back(Rational::parse(c.get<std::string>()));
        p.add_term(std::move(coeff), std::move(f));
    }
    return p;
}

Json to_json(const KernelSpec& spec) {
    Json j;
    j["basis"] = spec.basis.betas;
    j["m"] = spec.m;
    j["N"] = spec.N;
    return j;
}

KernelSpec kernel_spec_from_json(const Json& j) {
    KernelSpec spec;
    for (const auto& b : j.at("basis")) spec.basis.betas.push_back(b.get<double>());
    for (const auto& m : j.at("m")) spec.m.push_back(m.get<std::int64_t>());
    for (const auto& n : j.at("N")) spec.N.push_back(n.get<std::int64_t>());
    spec.validate();
    return spec;
}

Json to_json(const QuadraturePlan& plan) {
    return Json{{"step", plan.step}, {"t_trunc", plan.t_trunc}, {"tol", plan.tol}};
}

QuadraturePlan quadrature_plan_from_json(const Json& j) {
    QuadraturePlan p;
    p.step = j.value("step", p.step);
    p.t_trunc = j.value("t_trunc", p.t_trunc);
    p.tol = j.value("tol", p.tol);
    return p;
}

Json to_json(const GeneratorSpec& spec) {
    Json j;
    j["lambda"] = spec.lambda;
    j["x_angle"] = spec.x_angle;
    j["y_angle"] = spec.y_angle;
    j["C"] = complex_to_json(spec.C);
    return j;
}

GeneratorSpec generator_spec_from_json(const Json& j) {
    GeneratorSpec spec;
    spec.lambda = j.at("lambda").get<double>();
    spec.x_angle = j.at("x_angle").get<double>();
    spec.y_angle = j.at("y_angle").get<double>();
    if (j.contains("C")) spec.C = complex_from_json(j.at("C"));
    return spec;
}

Json to_json(const APProfile& prof) {
    Json j;
    j["z0"] = prof.z0_angle;
    j["s"] = prof.scale;
    if (!std::holds_alternative<TrigPolynomial>(prof.h_minus) ||
        !std::holds_alternative<TrigPolynomial>(prof.h_plus))
        throw InputError("profiles serialize as trigonometric polynomials only");
    j["h_minus"] = to_json(std::get<TrigPolynomial>(prof.h_minus));
    j["h_plus"] = to_json(std::get<TrigPolynomial>(prof.h_plus));
    return j;
}

APProfile profile_from_json(const Json& j) {
    APProfile prof;
    prof.z0_angle = j.at("z0").get<double>();
    prof.scale = j.at("s").get<double>();
    prof.h_minus = trig_polynomial_from_json(j.at("h_minus"));
    prof.h_plus = trig_polynomial_from_json(j.at("h_plus"));
    return prof;
}

namespace {

BoundaryEvaluator background_from_json(const Json& j, int dim) {
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        VectorValue v = vector_value_from_json(j.at("value"));
        return [v](double) { return v; };
    }
    if (type == "generator") {
        GeneratorSpec spec = generator_spec_from_json(j);
        return [spec](double theta) {
            return VectorValue::scalar(sap_generator(spec, std::polar(1.0, theta)));
        };
    }
    if (type == "table") {
        auto thetas = std::make_shared<std::vector<double>>();
        auto values = std::make_shared<std::vector<VectorValue>>();
        for (const auto& t : j.at("theta")) thetas->push_back(t.get<double>());
        for (const auto& v : j.at("values")) values->push_back(vector_value_from_json(v));
        if (thetas->size() != values->size() || thetas->size() < 2)
            throw InputError("background table needs matching theta/values");
        return [thetas, values, dim](double theta) {
            double t = std::fmod(theta, 2.0 * 3.14159265358979323846);
            if (t < 0) t += 2.0 * 3.14159265358979323846;
            auto it = std::lower_bound(thetas->begin(), thetas->end(), t);
            size_t hi = it == thetas->end() ? 0 : static_cast<size_t>(it - thetas->begin());
            size_t lo = hi == 0 ? thetas->size() - 1 : hi - 1;
            double a = (*thetas)[lo], b = (*thetas)[hi];
            double span = b - a;
            if (span <= 0) span += 2.0 * 3.14159265358979323846;
            double u = span > 0 ? std::fmod(t - a + 2.0 * 3.14159265358979323846,
                                            2.0 * 3.14159265358979323846) /
                                      span
                                : 0.0;
            u = std::clamp(u, 0.0, 1.0);
            VectorValue out(dim);
            out += Complex(1.0 - u) * (*values)[lo];
            out += Complex(u) * (*values)[hi];
            return out;
        };
    }
    throw InputError("unknown background type: " + type);
}

} // namespace

SAPFunction sap_function_from_json(const Json& j) {
    SingularSet S;
    for (const auto& a : j.at("singular")) S.angles.push_back(a.get<double>());
    std::vector<APProfile> profiles;
    for (const auto& p : j.at("profiles")) profiles.push_back(profile_from_json(p));
    std::vector<double> blend;
    for (const auto& b : j.at("blend")) blend.push_back(b.get<double>());
    int dim = profiles.empty() ? j.value("dim", 1) : profiles.front().dim();
    BoundaryEvaluator bg = background_from_json(j.at("background"), dim);
    return build_sap(std::move(S), std::move(profiles), std::move(bg), std::move(blend),
                     dim);
}

GlueConfig glue_config_from_json(const Json& j) {
    GlueConfig cfg;
    cfg.initial_width = j.value("annulus_width", cfg.initial_width);
    cfg.min_width = j.value("min_width", cfg.min_width);
    cfg.h_budget_frac = j.value("h_budget_frac", cfg.h_budget_frac);
    cfg.n_theta = j.value("n_theta", cfg.n_theta);
    cfg.n_theta_cap = j.value("n_theta_cap", cfg.n_theta_cap);
    cfg.annulus_rows = j.value("annulus_rows", cfg.annulus_rows);
    cfg.radial_cells = j.value("radial_cells", cfg.radial_cells);
    cfg.core_rings = j.value("core_rings", cfg.core_rings);
    cfg.probe_depth = j.value("probe_depth", cfg.probe_depth);
    cfg.residual_cap = j.value("residual_cap", cfg.residual_cap);
    cfg.solve_tol = j.value("solve_tol", cfg.solve_tol);
    cfg.glue_tol = j.value("glue_tol", cfg.glue_tol);
    cfg.max_width_shrinks = j.value("max_width_shrinks", cfg.max_width_shrinks);
    cfg.eps_budget_local = j.value("eps_budget_local", cfg.eps_budget_local);
    return cfg;
}

Json to_json(const GlueConfig& cfg) {
    Json j;
    j["annulus_width"] = cfg.initial_width;
    j["min_width"] = cfg.min_width;
    j["h_budget_frac"] = cfg.h_budget_frac;
    j["n_theta"] = cfg.n_theta;
    j["n_theta_cap"] = cfg.n_theta_cap;
    j["annulus_rows"] = cfg.annulus_rows;
    j["radial_cells"] = cfg.radial_cells;
    j["core_rings"] = cfg.core_rings;
    j["probe_depth"] = cfg.probe_depth;
    j["residual_cap"] = cfg.residual_cap;
    j["solve_tol"] = cfg.solve_tol;
    j["glue_tol"] = cfg.glue_tol;
    j["max_width_shrinks"] = cfg.max_width_shrinks;
    j["eps_budget_local"] = cfg.eps_budget_local;
    return j;
}

PipelineInput pipeline_input_from_json(const Json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "generator")
        return make_generator_input(generator_spec_from_json(j), j.value("scale", 1.0));
    if (type == "poly") return make_poly_input(poly_from_json(j));
    if (type == "generator_plus_poly")
        return make_generator_plus_poly_input(generator_spec_from_json(j.at("generator")),
                                              poly_from_json(j.at("poly")),
                                              j.value("scale", 1.0));
    throw InputError("unknown pipeline input type: " + type);
}

Json to_json(const ApproximationReport& rep) {
    Json j;
    j["eps"] = rep.eps;
    j["width"] = rep.width;
    j["charts"] = rep.charts;
    Json stage = Json::object();
    for (const auto& [k, v] : rep.stage_errors) stage[k] = v;
    j["stage_errors"] = stage;
    j["constants"] = Json{{"C", rep.C},
                          {"C_prime", rep.C_prime},
                          {"C_bar", rep.C_bar},
                          {"C_hat", rep.C_hat}};
    j["dbar_residual"] = rep.dbar_residual;
    j["sup_error"] = rep.sup_error;
    Json cert = Json::array();
    for (const auto& blk : rep.certificate.blocks) {
        Json b;
        b["type"] = "exp_log_chart";
        b["z0_angle"] = blk.z0_angle;
        b["corrected"] = blk.corrected;
        Json terms = Json::array();
        for (const auto& [coeff, mu] : blk.exp_terms)
            terms.push_back(Json{{"coeff", vector_value_to_json(coeff)}, {"mu", mu}});
        b["terms"] = terms;
        cert.push_back(b);
    }
    if (rep.certificate.disk_algebra_part)
        cert.push_back(Json{{"type", "disk_algebra_remainder"},
                            {"sup", rep.certificate.remainder_sup}});
    for (const auto& gen : rep.certificate.recovered)
        cert.push_back(Json{{"type", "recovered_generator"},
                            {"lambda", gen.lambda},
                            {"x_angle", gen.x_angle},
                            {"y_angle", gen.y_angle}});
    j["certificate"] = cert;
    return j;
}

TensorFunction tensor_function_from_json(const Json& j) {
    TensorFunction F;
    F.n = j.at("n").get<int>();
    for (const auto& t : j.at("terms")) {
        TensorTerm term;
        term.weight = complex_from_json(t.at("weight"));
        for (const auto& f : t.at("factors")) {
            TensorFactor factor;
            std::string type = f.at("type").get<std::string>();
            if (type == "generator") {
                factor.kind = TensorFactor::Kind::generator;
                factor.gen = generator_spec_from_json(f);
            } else if (type == "poly") {
                factor.kind = TensorFactor::Kind::poly;
                factor.poly = poly_from_json(f);
            } else {
                throw InputError("unknown tensor factor type: " + type);
            }
            term.factors.push_back(std::move(factor));
        }
        F.terms.push_back(std::move(term));
    }
    F.validate();
    return F;
}

Json to_json(const TensorApproxReport& rep) {
    Json j;
    j["eps"] = rep.eps;
    j["reported_bound"] = rep.reported_bound;
    j["measured_error"] = rep.measured_error;
    j["factor_errors"] = rep.factor_errors;
    j["factor_sups"] = rep.factor_sups;
    Json runs = Json::array();
    for (const auto& r : rep.factor_reports) runs.push_back(to_json(r));
    j["factor_runs"] = runs;
    return j;
}

Json to_json(const VerifyReport& rep) {
    return Json{{"s_epsilon", rep.s_epsilon},
                {"sup_error", rep.sup_error},
                {"pass", rep.pass},
                {"best_sup", rep.best_sup},
                {"trials", rep.trials}};
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace apx
