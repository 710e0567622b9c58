#ifndef ADR_ERRORS_HPP
#define ADR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adr {

/// Bad files, malformed rows, invalid configuration. CLI exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Failures discovered while analysing an otherwise well-formed cohort
/// (drug absent, degenerate seed labels, ...). CLI exit code 2.
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adr

#endif
