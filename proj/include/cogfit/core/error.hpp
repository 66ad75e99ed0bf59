#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cogfit {

enum class ErrorKind {
    malformed_transcript,
    empty_input,
    unknown_template,
    cannot_split,
    malformed_session,
    malformed_lottery,
    domain,
    ill_conditioned,
    degenerate_design,
    unknown_object,
    unknown_model,
    numeric,
    divergence,
    shape,
    spec,
    model_task_mismatch,
    invariant,
    precondition,
    io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::malformed_transcript: return "malformed transcript";
        case ErrorKind::empty_input: return "empty input";
        case ErrorKind::unknown_template: return "unknown template";
        case ErrorKind::cannot_split: return "cannot split";
        case ErrorKind::malformed_session: return "malformed session";
        case ErrorKind::malformed_lottery: return "malformed lottery";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::ill_conditioned: return "ill-conditioned";
        case ErrorKind::degenerate_design: return "degenerate design";
        case ErrorKind::unknown_object: return "unknown object";
        case ErrorKind::unknown_model: return "unknown model";
        case ErrorKind::numeric: return "numeric error";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::shape: return "shape mismatch";
        case ErrorKind::spec: return "invalid task spec";
        case ErrorKind::model_task_mismatch: return "model-task mismatch";
        case ErrorKind::invariant: return "invariant violation";
        case ErrorKind::precondition: return "precondition failed";
        case ErrorKind::io: return "i/o error";
    }
    return "error";
}

// All library failures are reported as cogfit::Error; kind() identifies the category.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace cogfit
