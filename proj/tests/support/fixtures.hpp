#pragma once

#include "radvlp/deid/detector_config.hpp"

#include <string>

namespace radvlp::fixtures {

inline std::string data_path(const std::string& rel) { return std::string(RADVLP_DATA_DIR) + "/" + rel; }
inline std::string test_data_path(const std::string& rel) { return std::string(RADVLP_TEST_DATA_DIR) + "/" + rel; }

inline const deid::DetectorConfig& default_detector_config() {
    static const deid::DetectorConfig cfg = deid::load_detector_config(data_path("config/detector.json"));
    return cfg;
}

}  // namespace radvlp::fixtures
