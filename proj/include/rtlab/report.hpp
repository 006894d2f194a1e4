#pragma once

#include <map>
#include <string>
#include <vector>

namespace rtlab {

/// Pass/fail record shared by every verification routine. passed is always
/// max_violation <= tolerance; checks encode their criterion in max_violation.
struct CheckReport {
    std::string name;
    bool passed = false;
    double max_violation = 0.0;
    double tolerance = 0.0;
    std::map<std::string, double> constants;
    std::vector<std::string> notes;

    static CheckReport make(std::string name, double max_violation, double tolerance) {
        CheckReport r;
        r.name = std::move(name);
        r.tolerance = tolerance;
        r.set_violation(max_violation);
        return r;
    }

    void set_violation(double v) {
        max_violation = v;
        passed = v <= tolerance;
    }
};

struct FitReport {
    double nu_hat = 0.0;
    double beta_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0;
    int samples = 0;
    bool rank_deficient = false;
};

} // namespace rtlab
