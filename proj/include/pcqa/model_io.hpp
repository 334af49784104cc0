#pragma once

#include <string>

#include "pcqa/random_forest.hpp"

namespace pcqa {

// Versioned JSON model file; round-trips to bit-identical predictions.
void save_model(const QualityModel& m, const std::string& path);
QualityModel load_model(const std::string& path);

}  // namespace pcqa
