#pragma once

#include "vessiot/invariants.hpp"
#include "vessiot/report.hpp"
#include "vessiot/symcore.hpp"

#include <memory>
#include <string>
#include <vector>

namespace vessiot {

struct Location {
    std::string path;  // JSON pointer of the offending value
    int line = 0;
    int column = 0;
};

// kind is SyntaxError, UnknownReference or ContextMismatch
struct ProblemError : Error {
    ProblemError(const std::string& kind, const std::string& what, Location where)
        : Error(kind, what), where(std::move(where)) {}
    Location where;
    std::string describe(const std::string& source) const;
};

class ProblemFile {
public:
    struct Impl;
    explicit ProblemFile(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
    const std::string& name() const;
    const std::string& source() const;
    const Json& document() const;
    std::vector<std::string> check_ids() const;
    bool operator==(const ProblemFile& o) const { return document() == o.document(); }
    const Impl& impl() const { return *impl_; }

private:
    std::shared_ptr<Impl> impl_;
};

// Parses and validates a problem file; every expression is parsed in its context and every reference
// is resolved. Throws ProblemError with the location of the first error.
ProblemFile parse_problem(const std::string& text, const std::string& source = "<input>");
ProblemFile load_problem(const std::string& path);
std::string render(const ProblemFile& f);

struct RunOptions {
    std::string only = "*";  // glob over check ids
    int max_order = 0;       // checks whose contexts exceed this jet order report OrderOverflow (0 = no cap)
};

struct CheckOutcome {
    std::string id, op;
    std::string status;           // OK, FAIL or ERROR
    std::string expected_status;  // declared in the file, OK by default
    std::string expected_error;   // declared error kind, if any
    std::string error_kind, error_message;
    std::string witness;
    Json numbers = Json::object();
    std::vector<std::string> notes;
    std::vector<std::string> mismatches;  // expectation keys that did not match
    bool matched = false;
    double millis = 0;
};

struct FileReport {
    std::string source, name;
    std::vector<CheckOutcome> checks;
    bool all_matched() const;
};

FileReport run(const ProblemFile& f, const RunOptions& options = {});

Json report_json(const std::vector<FileReport>& files, bool timing = false);
std::string report_text(const std::vector<FileReport>& files);

std::vector<std::string> op_names();

struct NamedGenerators {
    std::string name;
    ContextPtr context;
    GeneratorSet generators;
    std::vector<RationalExpr> invariants;  // expressions of the invariant checks expected to hold
};
std::vector<NamedGenerators> generator_sets(const ProblemFile& f);

}  // namespace vessiot
