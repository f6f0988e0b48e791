#pragma once

#include <stdexcept>
#include <string>

namespace wta {

// Violated precondition or API misuse (e.g. revealing a node twice).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Malformed or inconsistent input data (files, configs).
struct LoadError : std::runtime_error {
    explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wta
