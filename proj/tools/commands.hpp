#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace qinet::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;  // written as '#' lines after the metadata
};

std::string num(double x);  // %.17g

Table run_command(const ExperimentConfig& cfg);

// One line per grid point, without computing anything.
std::vector<std::string> describe_grid(const ExperimentConfig& cfg);

}  // namespace qinet::cli
