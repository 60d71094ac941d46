#pragma once

#include <json.hpp>

#include "apx/bochner_fejer.hpp"
#include "apx/polydisk.hpp"

namespace apx {

using Json = nlohmann::ordered_json;

// Trigonometric polynomials round-trip with exact rational frequencies
// (strings "p/q", never floats).
Json to_json(const TrigPolynomial& p);
TrigPolynomial trig_polynomial_from_json(const Json& j);

Json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const Json& j);

Json to_json(const QuadraturePlan& plan);
QuadraturePlan quadrature_plan_from_json(const Json& j);

Json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const Json& j);

Json to_json(const APProfile& prof);
APProfile profile_from_json(const Json& j);

/// SAP boundary functions: backgrounds are named presets
/// ({"type":"generator",...}, {"type":"constant","value":[[re,im],...]}) or
/// sampled tables with linear interpolation.
SAPFunction sap_function_from_json(const Json& j);

GlueConfig glue_config_from_json(const Json& j);
Json to_json(const GlueConfig& cfg);

PipelineInput pipeline_input_from_json(const Json& j);

Json to_json(const ApproximationReport& rep);

TensorFunction tensor_function_from_json(const Json& j);
Json to_json(const TensorApproxReport& rep);

Json to_json(const VerifyReport& rep);

Json load_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

} // namespace apx
