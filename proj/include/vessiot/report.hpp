#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace vessiot {

using Json = nlohmann::ordered_json;

struct CheckReport {
    bool ok = false;
    std::string witness;              // canonical text of the first nonzero residual, if any
    Json numbers = Json::object();    // dimensions, ranks, characters, ...
    std::vector<std::string> notes;   // assumptions and remarks echoed in reports
};

}  // namespace vessiot
