#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cogfit/discovery/strategies.hpp"
#include "cogfit/models/delta_rule.hpp"
#include "cogfit/models/dual_systems.hpp"
#include "cogfit/models/durp.hpp"
#include "cogfit/models/gcm.hpp"
#include "cogfit/models/gp_ucb.hpp"
#include "cogfit/models/hyperbolic.hpp"
#include "cogfit/models/odd_one_out.hpp"
#include "cogfit/models/prospect.hpp"
#include "cogfit/models/rescorla_wagner.hpp"
#include "cogfit/models/tabular.hpp"
#include "cogfit/models/uniform.hpp"

namespace cogfit {

/// Tags of the cognitive models proper.
inline const std::vector<std::string>& cognitive_model_tags() {
    static const std::vector<std::string> tags{
        "gcm",           "prospect",         "hyperbolic",      "dual_systems",      "rescorla_wagner",
        "rescorla_wagner_context", "delta_rule_judgment", "delta_rule_accept", "gp_ucb", "odd_one_out",
        "durp",          "rational",         "lookup"};
    return tags;
}

/// Every tag find_model accepts: cognitive models, the uniform baseline and
/// the multi-attribute strategies.
inline std::vector<std::string> model_tags() {
    std::vector<std::string> tags = cognitive_model_tags();
    tags.emplace_back("uniform");
    for (auto k : discovery::kAllStrategies) tags.emplace_back(discovery::to_string(k));
    return tags;
}

inline std::unique_ptr<models::Model> find_model(std::string_view tag) {
    using namespace models;
    if (tag == "gcm") return std::make_unique<Gcm>();
    if (tag == "prospect") return std::make_unique<ProspectTheory>();
    if (tag == "hyperbolic") return std::make_unique<Hyperbolic>();
    if (tag == "dual_systems") return std::make_unique<DualSystems>();
    if (tag == "rescorla_wagner") return std::make_unique<RescorlaWagner>();
    if (tag == "rescorla_wagner_context") return std::make_unique<RescorlaWagnerContext>();
    if (tag == "delta_rule_judgment") return std::make_unique<DeltaRule>(DeltaRuleVariant::judgment);
    if (tag == "delta_rule_accept") return std::make_unique<DeltaRule>(DeltaRuleVariant::accept);
    if (tag == "gp_ucb") return std::make_unique<GpUcb>();
    if (tag == "odd_one_out") return std::make_unique<OddOneOut>();
    if (tag == "durp") return std::make_unique<Durp>();
    if (tag == "rational") return std::make_unique<Tabular>(TabularVariant::rational);
    if (tag == "lookup") return std::make_unique<Tabular>(TabularVariant::lookup);
    if (tag == "uniform") return std::make_unique<Uniform>();
    if (auto k = discovery::strategy_from_string(tag)) return std::make_unique<discovery::Strategy>(*k);

    std::string valid;
    for (const auto& t : model_tags()) valid += (valid.empty() ? "" : ", ") + t;
    fail(ErrorKind::unknown_model, "unknown model '" + std::string(tag) + "'; valid tags: " + valid);
}

}  // namespace cogfit
