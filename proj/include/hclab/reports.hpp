#pragma once

// JSON views of every module's results, plus a plain-text rendering of the
// same documents. Key order is fixed (ordered_json) so repeated runs produce
// byte-identical output.

#include "hclab/classifier.hpp"
#include "hclab/commutation_lab.hpp"
#include "hclab/operator_spec.hpp"

#include <json.hpp>

#include <string>

namespace hclab {

using ReportJson = nlohmann::ordered_json;

ReportJson config_json(const OperatorSpec& spec, const ToleranceConfig& cfg, int depth_used);

ReportJson operator_json(const OperatorModel& t);
ReportJson commutation_json(const CommutationReport& half, const CommutationReport& full,
                            const CriterionResult& criterion);
ReportJson chain_json(const ChainDecomposition& chain, const ChainStructureReport& structure);
ReportJson spectral_json(const StructureData& s, const std::vector<TripleRecord>& triples,
                         const SpectralProperties& props);
ReportJson classification_json(const ClassificationReport& r);

// Indented "key: value" lines; short numeric arrays stay on one line.
std::string render_text(const ReportJson& doc);

}  // namespace hclab
