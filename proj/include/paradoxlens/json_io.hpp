#pragma once

#include "paradoxlens/dataset.hpp"
#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/diagnostics.hpp"
#include "paradoxlens/ols.hpp"
#include "paradoxlens/simulate.hpp"
#include "paradoxlens/supermodel.hpp"

#include <nlohmann/json_fwd.hpp>

// ADL hooks so nlohmann::json can serialize every report type.
namespace paradoxlens {

void to_json(nlohmann::json& j, const OverlapReport& r);
void to_json(nlohmann::json& j, const FitResult& r);
void to_json(nlohmann::json& j, const SubgroupBin& b);
void to_json(nlohmann::json& j, const Decomposition& d);
void to_json(nlohmann::json& j, const EffectCurvePoint& p);
void to_json(nlohmann::json& j, const ResidualStageFit& s);
void to_json(nlohmann::json& j, const SupermodelReport& r);
void to_json(nlohmann::json& j, const StratumDiagnostics& s);
void to_json(nlohmann::json& j, const DiagnosticsReport& r);
void to_json(nlohmann::json& j, const GroupVarianceReduction& g);
void to_json(nlohmann::json& j, const VarianceReductionReport& r);
void to_json(nlohmann::json& j, const NoiseSpec& n);
void to_json(nlohmann::json& j, const ScenarioConfig& c);
void to_json(nlohmann::json& j, const ScenarioTruth& t);
void to_json(nlohmann::json& j, const ReplicateSummary& s);

} // namespace paradoxlens
