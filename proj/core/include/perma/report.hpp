#ifndef PERMA_REPORT_HPP
#define PERMA_REPORT_HPP

#include <string>
#include <vector>

namespace perma {

/// Schema version of the JSON report lines emitted by checks and the CLI.
inline constexpr int kReportSchemaVersion = 1;

/// Outcome of one machine-checked identity or inequality.
struct VerificationReport {
    enum class Kind {
        Equality,    // pass iff |lhs - rhs| <= tolerance
        LowerBound,  // pass iff lhs >= rhs - tolerance
    };

    std::string name;    // stable identity key, e.g. "laplace/closed-vs-series"
    std::string anchor;  // subsystem the identity belongs to
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    Kind kind = Kind::Equality;
    std::string witness;  // optional serialized inputs for failures

    /// Evaluates the pass flag from lhs/rhs/tolerance and kind.
    void evaluate();

    /// One JSON line, numbers at 17 significant digits.
    std::string to_json() const;
};

/// Formats a double with up to 17 significant digits (round-trip exact).
std::string fmt17(double v);

/// JSON string escaping for the few places reports embed free text.
std::string json_escape(const std::string& s);

/// The JSON schema of report lines, as a JSON document.
std::string report_schema_json();

bool all_pass(const std::vector<VerificationReport>& reports);

}  // namespace perma

#endif
