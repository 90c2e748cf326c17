#include "rank2geo/models.hpp"

namespace rank2geo {

std::vector<std::string> model_coordinate_names(long long n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    names.emplace_back("x");
    for (long long i = 0; i <= n - 3; ++i) names.push_back("y" + std::to_string(i));
    names.emplace_back("z");
    return names;
}

std::vector<std::string> phase_coordinate_names(const std::vector<std::string>& coords) {
    std::vector<std::string> names = coords;
    names.reserve(2 * coords.size());
    for (const auto& c : coords) names.push_back("p_" + c);
    return names;
}

}  // namespace rank2geo
