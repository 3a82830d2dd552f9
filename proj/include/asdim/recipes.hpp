#ifndef ASDIM_RECIPES_HPP
#define ASDIM_RECIPES_HPP

#include <map>
#include <string>
#include <vector>

#include "asdim/rational.hpp"

namespace asdim {
namespace recipes {

struct Recipe {
    std::string name;
    std::string description;
    std::string operation;
    std::map<std::string, std::string> params;
    std::string expected_verdict; // optional
};

std::vector<Recipe> bundled_recipes();
Recipe find_recipe(const std::string& name);
Recipe parse_recipe(const std::string& text);
std::string write_recipe(const Recipe& r);

struct RunResult {
    int exit_code = 0;
    std::string verdict;
    std::string report;          // deterministic text, no wall-clock content
    std::string certificate;     // empty when the operation emits none
    std::string certificate_ext; // suggested file extension
};

// Dispatches, persists nothing itself; the CLI writes report/certificate.
RunResult run_recipe(const Recipe& r, std::uint64_t seed, double timeout_seconds,
                     i64 budget_override);

} // namespace recipes
} // namespace asdim

#endif
