#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace coherence {

enum class CheckStatus { pass, fail, measured };

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::measured: return "measured";
    }
    return "?";
}

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::measured;
    std::string expected;    ///< expected value or bound, as text
    std::string provenance;  ///< where the expected value comes from
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

class VerificationReport {
public:
    /// Records |measured - expected| <= tol as pass/fail.
    Check& expect_near(std::string name, double measured, double expected, double tol, std::string provenance) {
        const bool ok = std::isfinite(measured) && std::abs(measured - expected) <= tol;
        return add({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, fmt(expected), std::move(provenance),
                    measured, tol, {}});
    }

    /// Records measured <= bound as pass/fail.
    Check& expect_at_most(std::string name, double measured, double bound, std::string provenance) {
        const bool ok = std::isfinite(measured) && measured <= bound;
        return add({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, "<= " + fmt(bound),
                    std::move(provenance), measured, bound, {}});
    }

    Check& expect_true(std::string name, bool ok, double measured, std::string expected, std::string provenance) {
        return add({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(expected),
                    std::move(provenance), measured, 0.0, {}});
    }

    /// A value recorded without a pass/fail verdict.
    Check& measure(std::string name, double measured, std::string expected, std::string provenance) {
        return add({std::move(name), CheckStatus::measured, std::move(expected), std::move(provenance), measured, 0.0, {}});
    }

    Check& add(Check c) {
        checks_.push_back(std::move(c));
        return checks_.back();
    }

    const std::vector<Check>& checks() const { return checks_; }

    bool ok() const {
        for (const auto& c : checks_)
            if (c.status == CheckStatus::fail) return false;
        return true;
    }

    int exit_code() const { return ok() ? 0 : 1; }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks_) {
            nlohmann::json j = {{"name", c.name},         {"status", status_name(c.status)},
                                {"expected", c.expected}, {"provenance", c.provenance},
                                {"tolerance", c.tolerance}};
            j["measured"] = std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr);
            if (!c.detail.empty()) j["detail"] = c.detail;
            arr.push_back(std::move(j));
        }
        return {{"ok", ok()}, {"checks", arr}};
    }

    void print(std::ostream& os) const {
        for (const auto& c : checks_) {
            os << '[' << status_name(c.status) << "] " << c.name << ": measured " << fmt(c.measured) << ", expected "
               << c.expected;
            if (c.tolerance > 0.0) os << " (tol " << fmt(c.tolerance) << ')';
            os << "  <" << c.provenance << '>';
            if (!c.detail.empty()) os << "  " << c.detail;
            os << '\n';
        }
        os << (ok() ? "all checks passed" : "some checks failed") << '\n';
    }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

private:
    std::vector<Check> checks_;
};

}  // namespace coherence
