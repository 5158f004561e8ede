#include "etabs/serialize.hpp"

#include "etabs/error.hpp"

namespace etabs {

nlohmann::json to_json(const TridiagonalOperator& op) {
    return nlohmann::json{{"n", op.size()},   {"dx", op.dx},       {"x_min", op.x_min},
                          {"diag", op.diag}, {"upper", op.upper}, {"lower", op.lower}};
}

TridiagonalOperator operator_from_json(const nlohmann::json& j) {
    try {
        TridiagonalOperator op;
        const auto n = j.at("n").get<std::size_t>();
        op.dx = j.at("dx").get<double>();
        op.x_min = j.at("x_min").get<double>();
        op.diag = j.at("diag").get<std::vector<double>>();
        op.upper = j.at("upper").get<std::vector<double>>();
        op.lower = j.at("lower").get<std::vector<double>>();
        if (op.size() != n) throw ValidationError("operator JSON: n does not match diag length");
        op.validate();
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("operator JSON: ") + e.what());
    }
}

nlohmann::json to_json(const MetricOperator& m) {
    return nlohmann::json{{"eta", m.eta}, {"condition_number", m.condition_number()}};
}

MetricOperator metric_from_json(const nlohmann::json& j) {
    try {
        MetricOperator m{j.at("eta").get<std::vector<double>>()};
        if (!m.is_positive()) throw ValidationError("metric JSON: entries must be positive");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("metric JSON: ") + e.what());
    }
}

}  // namespace etabs
