#pragma once

#include <string>
#include <vector>

namespace monopole {

struct Check {
    std::string name;
    double residual = 0;
    double tol = 0;
    bool pass = false;
    std::string note;
};

struct Report {
    std::vector<Check> checks;

    Check& add(std::string name, double residual, double tol, std::string note = {}) {
        checks.push_back({std::move(name), residual, tol, residual <= tol, std::move(note)});
        return checks.back();
    }
    Check& add_bool(std::string name, bool ok, std::string note = {}) {
        checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.5, ok, std::move(note)});
        return checks.back();
    }
    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

}  // namespace monopole
