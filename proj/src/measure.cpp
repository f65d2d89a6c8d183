#include "beliefcert/measure.hpp"

namespace beliefcert {

SupportedMeasure SupportedMeasure::from_vector(const std::vector<double>& weights,
                                               double drop_below) {
    SupportedMeasure m;
    m.universe_size = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > drop_below) m.atoms.emplace_back(i, weights[i]);
    return m;
}

std::vector<double> SupportedMeasure::to_vector() const {
    std::vector<double> v(universe_size, 0.0);
    for (auto& [i, w] : atoms) v[i] += w;
    return v;
}

double SupportedMeasure::total_mass() const {
    double s = 0.0;
    for (auto& [i, w] : atoms) s += w;
    return s;
}

} // namespace beliefcert
