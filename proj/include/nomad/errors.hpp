#ifndef NOMAD_ERRORS_HPP
#define NOMAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nomad {

// Error taxonomy shared by all modules. The CLI maps kinds onto exit codes
// (see tools/nomad_main.cpp); the service maps them onto HTTP statuses.
enum class ErrorKind {
    parse,       // malformed CSV structure (quotes, field counts)
    encoding,    // malformed UTF-8
    structure,   // input shape violates a contract (header depth, empty table)
    config,      // bad options, missing columns, unknown ids in user input
    not_found,   // store lookup miss
    duplicate,   // re-digest without force
    credential,  // authentication rejected, not retryable
    transient,   // network/jobs, retryable
    protocol,    // remote spoke an unexpected dialect
    io,          // filesystem failures
    stat,        // undefined statistic (degenerate pooled proportion)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define NOMAD_DEFINE_ERROR(Name, kind_value)                                  \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& msg) : Error(kind_value, msg) {}     \
    }

NOMAD_DEFINE_ERROR(ParseError, ErrorKind::parse);
NOMAD_DEFINE_ERROR(EncodingError, ErrorKind::encoding);
NOMAD_DEFINE_ERROR(StructureError, ErrorKind::structure);
NOMAD_DEFINE_ERROR(ConfigError, ErrorKind::config);
NOMAD_DEFINE_ERROR(NotFoundError, ErrorKind::not_found);
NOMAD_DEFINE_ERROR(DuplicateError, ErrorKind::duplicate);
NOMAD_DEFINE_ERROR(CredentialError, ErrorKind::credential);
NOMAD_DEFINE_ERROR(TransientError, ErrorKind::transient);
NOMAD_DEFINE_ERROR(ProtocolError, ErrorKind::protocol);
NOMAD_DEFINE_ERROR(IoError, ErrorKind::io);
NOMAD_DEFINE_ERROR(UndefinedStatisticError, ErrorKind::stat);

#undef NOMAD_DEFINE_ERROR

} // namespace nomad

#endif
